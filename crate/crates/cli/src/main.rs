//! `mwer`: rank acts, update beliefs, audit axioms and run the delivery demo.
//!
//! Exit status: 0 success, 2 bad input, 3 an audit found a counterexample,
//! 4 the requested operation is undefined (e.g. updating on a null event).

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mwer_core::audit::{
    audit, search, table4_matrix, AuditOptions, AuditReport, AxiomId, MenuPolicy, Updater, Verdict, Witness,
    WITNESS_FORMAT,
};
use mwer_core::convergence::{convergence_study, delivery_demo, delivery_sweep, simulate_iid};
use mwer_core::doc::parse_scenario;
use mwer_core::regret::rank;
use mwer_core::update::{epstein_schneider_update, likelihood_update, measure_by_measure_update};
use mwer_core::{Error, Execution, Rule, Scenario, WeightedBeliefs};
use serde_json::json;

use output::Out;

const EXIT_INPUT: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_UNDEFINED: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "mwer",
    version,
    about = "Decision making with weighted sets of probabilities"
)]
struct Cli {
    /// Emit one JSON record per result instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Run trial loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank the acts of a menu under a decision rule.
    Rank(RankArgs),
    /// Update the scenario's beliefs on an event.
    Update(UpdateArgs),
    /// Probe an axiom on random scenarios.
    Audit(AuditArgs),
    /// Audit every cell of the rule-by-axiom matrix.
    Table4(Table4Args),
    /// Simulate belief weights under i.i.d. observations.
    Converge(ConvergeArgs),
    /// Built-in worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Args, Debug)]
struct RankArgs {
    /// Scenario or witness JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    menu: String,
    /// seu, mmeu, mer, mwer or reg.
    #[arg(long, value_parser = parse_rule)]
    rule: Rule,
    /// Use this measure alone (with weight 1), e.g. for SEU.
    #[arg(long)]
    measure: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Likelihood,
    Mbm,
    Es,
}

#[derive(Args, Debug)]
struct UpdateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    event: String,
    #[arg(long, value_enum, default_value = "likelihood")]
    method: Method,
    /// Retention threshold in (0, 1) for `es`.
    #[arg(long, required_if_eq("method", "es"))]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// transitivity, completeness, nontriviality, monotonicity,
    /// mixture-continuity, ambiguity-aversion, independence,
    /// constant-menu-independence, ina, boundedness, c-independence,
    /// axiom12 or mdc.
    #[arg(long, value_parser = parse_axiom)]
    axiom: AxiomId,
    /// seu, mmeu, mer, mwer or reg.
    #[arg(long, value_parser = parse_rule)]
    rule: Rule,
    /// transformed (pM + (1-p)h) or fixed (M plus the mixtures).
    #[arg(long, value_parser = parse_policy, default_value = "transformed")]
    policy: MenuPolicy,
    /// Updating rule for the MDC audit.
    #[arg(long, value_parser = parse_updater, default_value = "likelihood")]
    updater: Updater,
    /// Probes to aggregate into a verdict.
    #[arg(long)]
    trials: Option<u64>,
    /// Trials to spend searching for a counterexample.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, env = "MWER_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write the first witness to this file.
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Table4Args {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, env = "MWER_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    /// Scenario file whose measures are the candidates.
    #[arg(long)]
    candidates: PathBuf,
    /// Name of the measure that generates the observations.
    #[arg(long)]
    truth: String,
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
    #[arg(long, env = "MWER_SEED", default_value_t = 0)]
    seed: u64,
    /// Repeat with seeds seed, seed+1, … and count converged runs.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// A run converges when every other weight ends below this.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// The cake delivery problem after N good cakes.
    Delivery {
        #[arg(long, default_value_t = 0)]
        n_good: u32,
        /// Range A..B (inclusive) of N values to tabulate.
        #[arg(long, value_parser = parse_range)]
        sweep: Option<(u32, u32)>,
    },
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axiom(s: &str) -> Result<AxiomId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_policy(s: &str) -> Result<MenuPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_updater(s: &str) -> Result<Updater, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a = a.trim().parse::<u32>().map_err(|e| format!("'{a}': {e}"))?;
    let b = b
        .trim()
        .trim_start_matches('=')
        .parse::<u32>()
        .map_err(|e| format!("'{b}': {e}"))?;
    Ok((a, b))
}

// ---------------------------------------------------------------------------

/// Why a command stopped.
enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<u8, Failure>;

/// Reads a scenario document, or the scenario embedded in a witness.
fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let format = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v.get("format").and_then(|f| f.as_str()).map(String::from));
    let loaded = match format.as_deref() {
        Some(WITNESS_FORMAT) => Witness::from_json(&text).map(|w| w.scenario),
        _ => parse_scenario(&text),
    };
    loaded.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn beliefs_for(sc: &Scenario, measure: Option<&str>) -> Result<WeightedBeliefs, Failure> {
    match measure {
        None => Ok(sc.beliefs().clone()),
        Some(name) => sc
            .beliefs()
            .get(name)
            .map(|e| WeightedBeliefs::single(e.measure.clone()))
            .ok_or_else(|| {
                Failure::Core(Error::UnknownReference {
                    kind: "measure",
                    name: name.to_string(),
                })
            }),
    }
}

fn cmd_rank(out: &mut Out, args: &RankArgs) -> CmdResult {
    let sc = load_scenario(&args.scenario)?;
    let menu = sc.menu(&args.menu)?;
    let beliefs = beliefs_for(&sc, args.measure.as_deref())?;
    let ranking = rank(args.rule, menu, &beliefs, sc.prizes())?;
    if out.json {
        out.record(&json!({"menu": args.menu, "ranking": ranking}));
    } else {
        out.ranking(&args.menu, &ranking);
    }
    Ok(0)
}

fn cmd_update(out: &mut Out, args: &UpdateArgs) -> CmdResult {
    let sc = load_scenario(&args.scenario)?;
    let event = sc.event(&args.event)?;
    let prior = sc.beliefs();
    let dropped: Vec<String> = prior
        .entries()
        .iter()
        .filter(|e| e.measure.prob_of(event) == 0.0)
        .map(|e| e.label.clone())
        .collect();
    let (beliefs, groups) = match args.method {
        Method::Likelihood => {
            let r = likelihood_update(prior, event)?;
            let groups: Vec<Vec<String>> = r
                .groups
                .iter()
                .map(|g| g.iter().map(|i| prior.entries()[*i].label.clone()).collect())
                .collect();
            (r.beliefs, Some(groups))
        }
        Method::Mbm => (measure_by_measure_update(prior, event)?, None),
        Method::Es => {
            let t = args.threshold.expect("clap requires --threshold for es");
            (epstein_schneider_update(prior, event, t)?, None)
        }
    };
    let method = format!("{:?}", args.method).to_lowercase();
    if out.json {
        let measures: Vec<_> = beliefs
            .entries()
            .iter()
            .map(|e| {
                let probs: serde_json::Map<_, _> = sc
                    .states()
                    .names()
                    .iter()
                    .zip(e.measure.probs())
                    .map(|(s, p)| (s.clone(), json!(p)))
                    .collect();
                json!({"name": e.label, "weight": e.weight, "probs": probs})
            })
            .collect();
        out.record(&json!({
            "event": args.event,
            "method": method,
            "measures": measures,
            "dropped": dropped,
            "groups": groups,
        }));
    } else {
        out.update(&sc, &args.event, &method, &beliefs, &dropped, groups.as_deref());
    }
    Ok(0)
}

fn cmd_audit(out: &mut Out, args: &AuditArgs, exec: Execution) -> CmdResult {
    let opts = AuditOptions {
        policy: args.policy,
        updater: args.updater,
        params: None,
    };
    let mut reports: Vec<AuditReport> = Vec::new();
    let trials = match (args.trials, args.budget) {
        (None, None) => Some(1000),
        (t, _) => t,
    };
    if let Some(n) = trials {
        reports.push(audit(args.axiom, args.rule, &opts, n, args.seed, exec)?);
    }
    if let Some(b) = args.budget {
        if reports.iter().all(|r| r.witness.is_none()) {
            reports.push(search(args.axiom, args.rule, &opts, b, args.seed, exec)?);
        }
    }
    let witness = reports.iter().find_map(|r| r.witness.as_ref());
    if let (Some(w), Some(path)) = (witness, &args.witness_out) {
        fs::write(path, w.to_json() + "\n").map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    for r in &reports {
        if out.json {
            out.record(r);
        } else {
            out.audit(r);
        }
    }
    let found = reports.iter().any(|r| r.verdict == Verdict::Counterexample);
    Ok(if found { EXIT_COUNTEREXAMPLE } else { 0 })
}

fn cmd_table4(out: &mut Out, args: &Table4Args, exec: Execution) -> CmdResult {
    let report = table4_matrix(args.trials, args.budget, args.seed, exec)?;
    if out.json {
        out.record(&report);
    } else {
        out.table4(&report);
    }
    // a counterexample in a cell expected to hold
    let broken = report
        .cells
        .iter()
        .any(|c| c.expected && c.verdict == Verdict::Counterexample);
    Ok(if broken { EXIT_COUNTEREXAMPLE } else { 0 })
}

fn cmd_converge(out: &mut Out, args: &ConvergeArgs, exec: Execution) -> CmdResult {
    let sc = load_scenario(&args.candidates)?;
    let candidates = sc.beliefs();
    let truth_index = candidates
        .entries()
        .iter()
        .position(|e| e.label == args.truth)
        .ok_or_else(|| {
            Failure::Core(Error::UnknownReference {
                kind: "measure",
                name: args.truth.clone(),
            })
        })?;
    if args.seeds == 0 {
        return Err(Failure::Input("--seeds must be positive".into()));
    }
    if args.seeds == 1 {
        let t = simulate_iid(
            candidates,
            &candidates.entries()[truth_index].measure,
            args.rounds,
            args.seed,
        )?;
        if out.json {
            let counts = observation_counts(&t.observations, sc.states().len());
            out.record(&json!({
                "seed": t.seed,
                "rounds": t.rounds(),
                "truth": args.truth,
                "labels": t.labels,
                "final_weights": t.final_weights(),
                "observation_counts": counts,
            }));
        } else {
            out.trajectory(&sc, &args.truth, &t);
        }
    } else {
        let study = convergence_study(
            candidates,
            truth_index,
            args.rounds,
            args.seed,
            args.seeds,
            args.threshold,
            exec,
        )?;
        if out.json {
            out.record(&json!({
                "truth": args.truth,
                "labels": candidates.entries().iter().map(|e| &e.label).collect::<Vec<_>>(),
                "base_seed": args.seed,
                "study": study,
            }));
        } else {
            out.study(candidates, args.seed, &study);
        }
    }
    Ok(0)
}

pub(crate) fn observation_counts(obs: &[usize], n: usize) -> Vec<usize> {
    let mut counts = vec![0; n];
    for o in obs {
        counts[*o] += 1;
    }
    counts
}

fn cmd_demo(out: &mut Out, which: &Demo) -> CmdResult {
    let Demo::Delivery { n_good, sweep } = which;
    match sweep {
        Some((a, b)) => {
            let reports = delivery_sweep(*a, *b)?;
            if out.json {
                for r in &reports {
                    out.record(r);
                }
            } else {
                out.sweep(&reports);
            }
        }
        None => {
            let r = delivery_demo(*n_good)?;
            if out.json {
                out.record(&r);
            } else {
                out.delivery(&r);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let mut out = Out::new(cli.json);
    let result = match &cli.command {
        Command::Rank(a) => cmd_rank(&mut out, a),
        Command::Update(a) => cmd_update(&mut out, a),
        Command::Audit(a) => cmd_audit(&mut out, a, exec),
        Command::Table4(a) => cmd_table4(&mut out, a, exec),
        Command::Converge(a) => cmd_converge(&mut out, a, exec),
        Command::Demo { which } => cmd_demo(&mut out, which),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_undefined() { EXIT_UNDEFINED } else { EXIT_INPUT })
        }
    }
}

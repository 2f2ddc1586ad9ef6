//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails if any attainable criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mwer_core::audit::{
    audit, check_prop1, check_theorem2_identity, table4_matrix, AuditOptions, AxiomId, Table4Row, Verdict,
};
use mwer_core::convergence::{convergence_study, delivery_demo, delivery_likelihoods, delivery_weight};
use mwer_core::fixtures;
use mwer_core::regret::rank;
use mwer_core::update::is_null_event;
use mwer_core::{Execution, Measure, PreferenceRanking, Rule, WeightedBeliefs};
use rand::Rng;

const SEED: u64 = 20_240_601;
const INSTANCES: u64 = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
    /// Parts of the criterion that cannot be met by any correct implementation.
    unattainable: Option<String>,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            unattainable: None,
        }
    }
}

fn tiers(r: &PreferenceRanking) -> Vec<Vec<String>> {
    r.tiers()
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.sort();
            t
        })
        .collect()
}

fn tier_list(spec: &[&[&str]]) -> Vec<Vec<String>> {
    spec.iter()
        .map(|t| {
            let mut t: Vec<String> = t.iter().map(|s| s.to_string()).collect();
            t.sort();
            t
        })
        .collect()
}

// ---------------------------------------------------------------------------

fn c1_delivery_regrets() -> Outcome {
    let report = delivery_demo(0).unwrap();
    let m0 = report.menu("M0").unwrap();
    let expected = [
        ("cont", [0.0, 10000.0]),
        ("back", [10000.0, 0.0]),
        ("check", [4999.0, 4999.0]),
    ];
    let regrets_ok = expected
        .iter()
        .all(|(name, r)| m0.regrets.iter().any(|(n, got)| n == name && got.as_slice() == r));
    let want = tier_list(&[&["check"], &["cont", "back"]]);
    let reg = tiers(m0.ranking(Rule::Reg));
    let mer = tiers(m0.ranking(Rule::Mer));
    Outcome::check(
        regrets_ok && reg == want && mer == want,
        format!("regrets {:?}; REG {reg:?}; MER {mer:?}", m0.regrets),
    )
}

fn c2_menu_dependence() -> Outcome {
    let sc = fixtures::delivery();
    let m1 = sc.menu("M1").unwrap();
    let r = rank(Rule::Mer, m1, sc.beliefs(), sc.prizes()).unwrap();
    let (cont, check) = (r.score("cont").unwrap(), r.score("check").unwrap());
    let pass = cont == 10000.0 && check == 14999.0 && r.tier_of("cont") < r.tier_of("check");
    Outcome::check(pass, format!("MER on M1: cont {cont}, check {check}"))
}

fn c3_seu_sensitivity() -> Outcome {
    let sc = fixtures::delivery();
    let m0 = sc.menu("M0").unwrap();
    let first = |p_one: f64| -> Vec<String> {
        let b = WeightedBeliefs::single(Measure::new(vec![p_one, 1.0 - p_one]).unwrap());
        rank(Rule::Seu, m0, &b, sc.prizes()).unwrap().tiers()[0].clone()
    };
    let (uniform, ten, one) = (first(0.5), first(0.49), first(0.51));
    let pass = uniform == ["check"] && ten == ["back"] && one == ["cont"];
    Outcome::check(
        pass,
        format!("first at 0.5: {uniform:?}; Pr(ten)=0.51: {ten:?}; Pr(one)=0.51: {one:?}"),
    )
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn c4_delivery_numbers() -> Outcome {
    let (one, ten) = delivery_likelihoods(100).unwrap();
    // hypergeometric oracles from exact binomial coefficients
    let ten_oracle = binom(900, 10) as f64 / binom(1000, 10) as f64;
    let likelihoods_ok = (one - 0.9).abs() < 1e-12 && (ten - ten_oracle).abs() < 1e-12 && (ten - 0.35).abs() <= 0.005;
    let weight_ok = (delivery_weight(100).unwrap() - ten_oracle / 0.9).abs() < 1e-12;
    let ends_ok = delivery_weight(0).unwrap() == 1.0 && delivery_weight(991).unwrap() == 0.0;
    let bound_violations: Vec<u32> = (1..=990)
        .filter(|&n| delivery_weight(n).unwrap() >= ((999.0 - f64::from(n)) / 999.0f64).powi(9))
        .collect();
    let pass = likelihoods_ok && weight_ok && ends_ok && bound_violations.is_empty();
    Outcome::check(
        pass,
        format!(
            "Pr1(E)={one}, Pr10(E)={ten:.6} (oracle {ten_oracle:.6}), weight(100)={:.6}, bound violations {}",
            delivery_weight(100).unwrap(),
            bound_violations.len()
        ),
    )
}

fn c5_interpolation() -> Outcome {
    let start = delivery_demo(0).unwrap();
    let end = delivery_demo(991).unwrap();
    let m = |r: &mwer_core::convergence::DeliveryReport, rule| tiers(r.menu("M0").unwrap().ranking(rule));
    let pass = m(&start, Rule::Mwer) == m(&start, Rule::Mer) && m(&end, Rule::Mwer) == m(&end, Rule::Seu);
    Outcome::check(
        pass,
        format!(
            "N=0 MWER {:?}; N=991 MWER {:?} SEU {:?}",
            m(&start, Rule::Mwer),
            m(&end, Rule::Mwer),
            m(&end, Rule::Seu)
        ),
    )
}

fn c6_prop1() -> Outcome {
    let mut worst = 0.0f64;
    let mut tested = 0u64;
    let mut i = 0u64;
    while tested < INSTANCES {
        let mut rng = common::rng(SEED ^ 6, i);
        i += 1;
        let n = rng.random_range(2..=5);
        let b = common::beliefs(&mut rng, n, 4);
        let (e1, e2) = (common::event(&mut rng, n), common::event(&mut rng, n));
        let both = e1.intersection(&e2);
        if both.is_empty() || is_null_event(&b, &both) {
            continue;
        }
        worst = worst.max(check_prop1(&b, &e1, &e2).unwrap());
        tested += 1;
    }
    Outcome::check(
        worst < 1e-9,
        format!("{tested} instances ({i} drawn), max residual {worst:.3e}"),
    )
}

fn c7_regret_identity_and_mdc() -> Outcome {
    let mut worst = 0.0f64;
    let mut tested = 0u64;
    let mut i = 0u64;
    while tested < INSTANCES {
        let mut rng = common::rng(SEED ^ 7, i);
        i += 1;
        let n = rng.random_range(2..=5);
        let b = common::beliefs(&mut rng, n, 4);
        let e = common::event(&mut rng, n);
        if is_null_event(&b, &e) {
            continue;
        }
        let k = rng.random_range(1..=4);
        let p = common::problem(&mut rng, n, k);
        let f = &p.menu.acts()[rng.random_range(0..k)];
        let h = &p.menu.acts()[rng.random_range(0..k)];
        worst = worst.max(check_theorem2_identity(&b, &e, &p.menu, f, h, &p.prizes).unwrap());
        tested += 1;
    }
    let mdc = audit(
        AxiomId::Mdc,
        Rule::Mwer,
        &AuditOptions::default(),
        INSTANCES,
        SEED,
        Execution::Parallel,
    )
    .unwrap();
    let pass = worst < 1e-9 && mdc.violations == 0 && mdc.verdict == Verdict::Supported;
    Outcome::check(
        pass,
        format!(
            "identity max residual {worst:.3e} over {tested}; MDC {} probes, {} decisive, {} violations",
            mdc.trials, mdc.decisive, mdc.violations
        ),
    )
}

fn c8_rule_equivalences() -> Outcome {
    let mut mismatches = [0u64; 3];
    for i in 0..INSTANCES {
        let mut rng = common::rng(SEED ^ 8, i);
        let n = rng.random_range(2..=5);
        let k = rng.random_range(2..=5);
        let p = common::problem(&mut rng, n, k);
        let single = WeightedBeliefs::single(common::measure(&mut rng, n));
        let seu = rank(Rule::Seu, &p.menu, &single, &p.prizes).unwrap();
        let mer = rank(Rule::Mer, &p.menu, &single, &p.prizes).unwrap();
        mismatches[0] += u64::from(!seu.same_tiers(&mer));

        let points = WeightedBeliefs::unweighted((0..n).map(|s| Measure::point_mass(s, n))).unwrap();
        let reg = rank(Rule::Reg, &p.menu, &points, &p.prizes).unwrap();
        let mer = rank(Rule::Mer, &p.menu, &points, &p.prizes).unwrap();
        mismatches[1] += u64::from(!reg.same_tiers(&mer));

        let unit = common::beliefs(&mut rng, n, 4).with_unit_weights();
        let mwer = rank(Rule::Mwer, &p.menu, &unit, &p.prizes).unwrap();
        let mer = rank(Rule::Mer, &p.menu, &unit, &p.prizes).unwrap();
        mismatches[2] += u64::from(!mwer.same_tiers(&mer));
    }
    Outcome::check(
        mismatches == [0, 0, 0],
        format!(
            "tier mismatches over {INSTANCES} each: SEU/MER {}, REG/MER {}, MWER/MER {}",
            mismatches[0], mismatches[1], mismatches[2]
        ),
    )
}

fn c9_axiom_matrix() -> Outcome {
    let report = table4_matrix(INSTANCES, 100_000, SEED, Execution::Parallel).unwrap();
    let mut problems = Vec::new();
    for cell in &report.cells {
        if cell.expected && (cell.verdict != Verdict::Supported || cell.violations != 0) {
            problems.push(format!("{}/{} not supported", cell.row.label(), cell.rule));
        }
        if !cell.consistent() {
            problems.push(format!("{}/{} inconsistent", cell.row.label(), cell.rule));
        }
    }
    let required = [
        (Table4Row::Independence, Rule::Mmeu),
        (Table4Row::CIndependence, Rule::Reg),
        (Table4Row::CIndependence, Rule::Mer),
        (Table4Row::CIndependence, Rule::Mwer),
        (Table4Row::Axiom12, Rule::Mwer),
    ];
    for (row, rule) in required {
        if report.cell(row, rule).verdict != Verdict::Counterexample {
            problems.push(format!("no counterexample for {}/{}", row.label(), rule));
        }
    }
    let summary: Vec<String> = report
        .cells
        .iter()
        .filter(|c| !c.expected)
        .map(|c| format!("{}/{}: {} after {}", c.row.label(), c.rule, c.verdict, c.trials))
        .collect();
    let mmeu12 = report.cell(Table4Row::Axiom12, Rule::Mmeu);
    let unattainable = (mmeu12.verdict != Verdict::Counterexample).then(|| {
        format!(
            "Ax 12/MMEU: {} after {} trials; MMEU satisfies C-independence and ignores the menu, so h ~ f forces the mixture ~ f",
            mmeu12.verdict, mmeu12.trials
        )
    });
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            summary.join("; ")
        } else {
            problems.join("; ")
        },
        unattainable,
    }
}

fn c10_convergence() -> Outcome {
    let candidates =
        WeightedBeliefs::unweighted([0.4, 0.5, 0.6].map(|p| Measure::new(vec![1.0 - p, p]).unwrap())).unwrap();
    let study = convergence_study(&candidates, 1, 1000, SEED, 100, 0.05, Execution::Parallel).unwrap();
    Outcome::check(
        study.converged >= 95,
        format!("{} of 100 seeds converged", study.converged),
    )
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (
            1,
            "delivery regrets and rankings",
            Duration::from_secs(1),
            c1_delivery_regrets,
        ),
        (2, "menu-dependence flip", Duration::from_secs(1), c2_menu_dependence),
        (3, "SEU sensitivity", Duration::from_secs(1), c3_seu_sensitivity),
        (
            4,
            "delivery update numbers",
            Duration::from_secs(1),
            c4_delivery_numbers,
        ),
        (5, "interpolation endpoints", Duration::from_secs(1), c5_interpolation),
        (6, "iterated updating commutes", Duration::from_secs(30), c6_prop1),
        (
            7,
            "conditional regret identity and MDC",
            Duration::from_secs(60),
            c7_regret_identity_and_mdc,
        ),
        (
            8,
            "rule-equivalence oracles",
            Duration::from_secs(60),
            c8_rule_equivalences,
        ),
        (9, "rule-by-axiom matrix", Duration::from_secs(600), c9_axiom_matrix),
        (10, "weight convergence", Duration::from_secs(60), c10_convergence),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time && out.unattainable.is_none();
        let status = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name} [{:.2?} / limit {:?}] {}",
            elapsed, limit, out.detail
        );
        if !in_time {
            println!("             over the time limit");
        }
        if let Some(why) = &out.unattainable {
            println!("             unattainable part: {why}");
        }
        // An unattainable part is reported but does not fail the run; every
        // attainable condition still has to hold.
        if !(out.pass && in_time) {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} attainable criteria failed");
        ExitCode::FAILURE
    }
}

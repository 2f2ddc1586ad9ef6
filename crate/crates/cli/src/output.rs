//! Human-readable tables and JSON records.

use mwer_core::audit::{AuditReport, AxiomId, Table4Report, Table4Row, Verdict};
use mwer_core::convergence::{ConvergenceStudy, DeliveryReport, MenuReport, WeightTrajectory};
use mwer_core::{PreferenceRanking, Rule, Scenario, WeightedBeliefs};
use serde::Serialize;

use crate::observation_counts;

pub struct Out {
    pub json: bool,
}

/// `check > back ~ cont`
fn tiers_line(r: &PreferenceRanking) -> String {
    r.tiers().iter().map(|t| t.join(" ~ ")).collect::<Vec<_>>().join(" > ")
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.6}")
    }
}

impl Out {
    pub fn new(json: bool) -> Self {
        Out { json }
    }

    /// One compact JSON document per line.
    pub fn record<T: Serialize + ?Sized>(&mut self, value: &T) {
        println!("{}", serde_json::to_string(value).expect("reports serialize"));
    }

    pub fn ranking(&mut self, menu: &str, r: &PreferenceRanking) {
        println!("{} on {menu}: {}", r.rule(), tiers_line(r));
        let width = r.scores().iter().map(|s| s.name.len()).max().unwrap_or(0).max(3);
        println!("  {:<width$}  {:>5}  {:>14}", "act", "tier", "score");
        for s in r.scores() {
            let tier = r.tier_of(&s.name).map_or(0, |t| t + 1);
            println!("  {:<width$}  {:>5}  {:>14}", s.name, tier, num(s.score));
        }
    }

    pub fn update(
        &mut self,
        sc: &Scenario,
        event: &str,
        method: &str,
        b: &WeightedBeliefs,
        dropped: &[String],
        groups: Option<&[Vec<String>]>,
    ) {
        println!("{method} update on {event}");
        let states = sc.states().names();
        let width = b.entries().iter().map(|e| e.label.len()).max().unwrap_or(0).max(7);
        let cols: Vec<String> = states.iter().map(|s| format!("{s:>12}")).collect();
        println!("  {:<width$}  {:>10}  {}", "measure", "weight", cols.join(" "));
        for e in b.entries() {
            let probs: Vec<String> = e.measure.probs().iter().map(|p| format!("{:>12}", num(*p))).collect();
            println!("  {:<width$}  {:>10}  {}", e.label, num(e.weight), probs.join(" "));
        }
        if !dropped.is_empty() {
            println!("  dropped (probability zero): {}", dropped.join(", "));
        }
        if let Some(groups) = groups {
            for (e, g) in b.entries().iter().zip(groups) {
                if g.len() > 1 {
                    println!("  {} merges {}", e.label, g.join(", "));
                }
            }
        }
    }

    pub fn audit(&mut self, r: &AuditReport) {
        let setting = match r.axiom {
            AxiomId::Mdc => format!("{} updating", r.updater.as_str()),
            _ => format!("{} menus", r.policy.as_str()),
        };
        println!("{} under {} ({setting}): {}", r.axiom, r.rule, r.verdict);
        println!(
            "  trials {}  decisive {}  inconclusive {}  violations {}",
            r.trials, r.decisive, r.inconclusive, r.violations
        );
        if let Some(w) = &r.witness {
            if let (Some(seed), Some(trial)) = (w.seed, w.trial) {
                println!("  witness: seed {seed}, trial {trial}");
            }
            for (k, v) in &w.parameters {
                println!("    {k} = {}", num(*v));
            }
            for c in &w.comparisons {
                println!(
                    "    {:<12} {:<6} {} vs {} ({:?}, {:?} beliefs): gap {}",
                    format!("{:?}", c.role).to_lowercase(),
                    c.menu,
                    c.left,
                    c.right,
                    c.claim,
                    c.beliefs,
                    num(c.gap)
                );
            }
            println!("  witness document:");
            for line in w.to_json().lines() {
                println!("    {line}");
            }
        }
    }

    pub fn table4(&mut self, r: &Table4Report) {
        println!(
            "{} trials per satisfied cell, search budget {}, seed {}",
            r.trials, r.budget, r.seed
        );
        print!("  {:<12}", "");
        for rule in Rule::ALL {
            print!("{:>16}", rule.to_string());
        }
        println!();
        for row in Table4Row::ALL {
            print!("  {:<12}", row.label());
            for rule in Rule::ALL {
                let c = r.cell(row, rule);
                let mark = match c.verdict {
                    Verdict::Supported => "holds".to_string(),
                    Verdict::Counterexample => format!("fails@{}", c.trials),
                    Verdict::Inconclusive => "?".to_string(),
                };
                let flag = if c.consistent() { "" } else { "!" };
                print!("{:>16}", format!("{mark}{flag}"));
            }
            println!();
        }
        if r.cells.iter().any(|c| !c.consistent()) {
            println!("  ! disagrees with the expected pattern");
        }
    }

    pub fn trajectory(&mut self, sc: &Scenario, truth: &str, t: &WeightTrajectory) {
        println!("{} rounds drawn from {truth} (seed {})", t.rounds(), t.seed);
        let counts = observation_counts(&t.observations, sc.states().len());
        let seen: Vec<String> = sc
            .states()
            .names()
            .iter()
            .zip(&counts)
            .map(|(s, c)| format!("{s}: {c}"))
            .collect();
        println!("  observations  {}", seen.join(", "));
        let width = t.labels.iter().map(|l| l.len()).max().unwrap_or(0).max(9);
        println!("  {:<width$}  {:>12}  {:>12}", "candidate", "prior", "final");
        for (i, label) in t.labels.iter().enumerate() {
            println!(
                "  {:<width$}  {:>12}  {:>12.6e}",
                label,
                num(t.weights[0][i]),
                t.final_weights()[i]
            );
        }
    }

    pub fn study(&mut self, candidates: &WeightedBeliefs, base_seed: u64, s: &ConvergenceStudy) {
        let n = s.final_weights.len();
        println!(
            "{} of {n} runs converged to {} after {} rounds (others below {}; seeds {}..{})",
            s.converged,
            candidates.entries()[s.truth_index].label,
            s.rounds,
            s.threshold,
            base_seed,
            base_seed + n as u64 - 1
        );
        for (i, e) in candidates.entries().iter().enumerate() {
            let mean = s.final_weights.iter().map(|w| w[i]).sum::<f64>() / n as f64;
            println!("  {:<12} mean final weight {mean:.6e}", e.label);
        }
    }

    fn menu_report(&mut self, m: &MenuReport) {
        println!("  menu {}", m.menu);
        println!(
            "    {:<8} {:>10} {:>10} {:>10} {:>10}",
            "act", "u(one)", "u(ten)", "reg(one)", "reg(ten)"
        );
        for ((name, u), (_, r)) in m.payoffs.iter().zip(&m.regrets) {
            println!(
                "    {:<8} {:>10} {:>10} {:>10} {:>10}",
                name,
                num(u[0]),
                num(u[1]),
                num(r[0]),
                num(r[1])
            );
        }
        for r in &m.rankings {
            println!("    {:<5} {}", r.rule().to_string(), tiers_line(r));
        }
    }

    pub fn delivery(&mut self, r: &DeliveryReport) {
        println!("delivery after {} good cakes", r.n_good);
        println!(
            "  Pr1(E) = {:.6}  Pr10(E) = {:.6}  weight of Pr10 = {:.6}",
            r.likelihood_one, r.likelihood_ten, r.weight_ten
        );
        for m in &r.menus {
            self.menu_report(m);
        }
    }

    pub fn sweep(&mut self, reports: &[DeliveryReport]) {
        println!(
            "  {:>5}  {:>12}  {:<28}  {:<28}",
            "N", "weight", "MWER on M0", "MWER on M1"
        );
        for r in reports {
            let line = |name: &str| {
                r.menu(name)
                    .map(|m| tiers_line(m.ranking(Rule::Mwer)))
                    .unwrap_or_default()
            };
            println!(
                "  {:>5}  {:>12.6}  {:<28}  {:<28}",
                r.n_good,
                r.weight_ten,
                line("M0"),
                line("M1")
            );
        }
    }
}

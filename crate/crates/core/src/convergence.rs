//! Belief-weight dynamics: i.i.d. likelihood reweighting, the cupcake
//! delivery update in closed form, and ranking distances used to watch MWER
//! approach expected-utility maximization.

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{trial_rng, Execution};
use crate::fixtures;
use crate::model::{Measure, WeightedBeliefs};
use crate::regret::{self, PreferenceRanking, Rule};

/// Weights of the candidate measures after every round; entry 0 is the prior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightTrajectory {
    pub seed: u64,
    pub labels: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub observations: Vec<usize>,
}

impl WeightTrajectory {
    pub fn rounds(&self) -> usize {
        self.observations.len()
    }

    pub fn final_weights(&self) -> &[f64] {
        self.weights.last().expect("trajectory always holds the prior")
    }
}

fn sample(pr: &Measure, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in pr.probs().iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Draws `rounds` outcomes from `truth`; after each outcome every weight is
/// multiplied by its measure's probability of that outcome and the vector is
/// rescaled so its maximum is 1.
pub fn simulate_iid(
    candidates: &WeightedBeliefs,
    truth: &Measure,
    rounds: usize,
    seed: u64,
) -> Result<WeightTrajectory> {
    if truth.len() != candidates.num_states() {
        return Err(Error::mismatch("truth measure", candidates.num_states(), truth.len()));
    }
    let mut rng = trial_rng(seed, 0);
    let mut w = candidates.weights();
    let mut weights = Vec::with_capacity(rounds + 1);
    let mut observations = Vec::with_capacity(rounds);
    weights.push(w.clone());
    for round in 0..rounds {
        let o = sample(truth, &mut rng);
        for (wi, m) in w.iter_mut().zip(candidates.measures()) {
            *wi *= m.prob(o);
        }
        let max = w.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::UpdateUndefined(format!(
                "round {}: outcome {o} has probability zero under every candidate",
                round + 1
            )));
        }
        for wi in &mut w {
            *wi /= max;
        }
        observations.push(o);
        weights.push(w.clone());
    }
    Ok(WeightTrajectory {
        seed,
        labels: candidates.entries().iter().map(|e| e.label.clone()).collect(),
        weights,
        observations,
    })
}

/// Summary of many seeded runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub truth_index: usize,
    pub rounds: usize,
    pub final_weights: Vec<Vec<f64>>,
    /// Runs whose true candidate ends at weight 1 with all others below the threshold.
    pub converged: usize,
    pub threshold: f64,
}

/// Runs `seeds` independent trajectories (seed `base_seed + i`).
pub fn convergence_study(
    candidates: &WeightedBeliefs,
    truth_index: usize,
    rounds: usize,
    base_seed: u64,
    seeds: u64,
    threshold: f64,
    exec: Execution,
) -> Result<ConvergenceStudy> {
    let truth = &candidates
        .entries()
        .get(truth_index)
        .ok_or_else(|| Error::UnknownReference {
            kind: "measure",
            name: truth_index.to_string(),
        })?
        .measure;
    let finals = exec
        .map(seeds, |i| {
            simulate_iid(candidates, truth, rounds, base_seed.wrapping_add(i)).map(|t| t.final_weights().to_vec())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let converged = finals
        .iter()
        .filter(|w| w[truth_index] == 1.0 && w.iter().enumerate().all(|(i, x)| i == truth_index || *x < threshold))
        .count();
    Ok(ConvergenceStudy {
        truth_index,
        rounds,
        final_weights: finals,
        converged,
        threshold,
    })
}

/// Normalized Kendall distance between two rankings of the same acts.
///
/// A pair ordered strictly in opposite directions costs 1, a pair tied in
/// one ranking and strict in the other costs 1/2; the sum is divided by the
/// number of pairs.
pub fn ranking_divergence(a: &PreferenceRanking, b: &PreferenceRanking) -> Result<f64> {
    let mut names: Vec<&str> = a.names();
    let mut other: Vec<&str> = b.names();
    names.sort_unstable();
    other.sort_unstable();
    if names != other {
        return Err(Error::invalid("ranking", "", "rankings cover different acts"));
    }
    let n = names.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut cost = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let x = a.compare(names[i], names[j]).expect("name present");
            let y = b.compare(names[i], names[j]).expect("name present");
            cost += match (x, y) {
                (x, y) if x == y => 0.0,
                (Ordering::Equal, _) | (_, Ordering::Equal) => 0.5,
                _ => 1.0,
            };
        }
    }
    Ok(cost / (n * (n - 1) / 2) as f64)
}

// ---------------------------------------------------------------------------
// Delivery example
// ---------------------------------------------------------------------------

const CAKES: u32 = 1000;
const BROKEN_UNDER_TEN: u32 = 10;

/// (Pr1(E), Pr10(E)) for E = "the first `n_good` cakes are good".
pub fn delivery_likelihoods(n_good: u32) -> Result<(f64, f64)> {
    if n_good > CAKES {
        return Err(Error::invalid(
            "observation count",
            n_good.to_string(),
            "must lie in 0..=1000",
        ));
    }
    let remaining = CAKES - n_good;
    let one = f64::from(remaining) / f64::from(CAKES);
    let ten = if remaining < BROKEN_UNDER_TEN {
        0.0
    } else {
        (0..BROKEN_UNDER_TEN)
            .map(|k| f64::from(remaining - k) / f64::from(CAKES - k))
            .product()
    };
    Ok((one, ten))
}

/// Weight of Pr10 after learning that the first `n_good` cakes are good
/// (Pr1 keeps weight 1). Zero once ten broken cakes no longer fit.
pub fn delivery_weight(n_good: u32) -> Result<f64> {
    if n_good > CAKES {
        return Err(Error::invalid(
            "observation count",
            n_good.to_string(),
            "must lie in 0..=1000",
        ));
    }
    let remaining = CAKES - n_good;
    if remaining < BROKEN_UNDER_TEN + 1 {
        return Ok(0.0);
    }
    // Pr10(E)/Pr1(E): the k = 0 factors cancel, leaving nine ratios each in (0, 1].
    Ok((1..BROKEN_UNDER_TEN)
        .map(|k| f64::from(remaining - k) / f64::from(CAKES - k))
        .product())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MenuReport {
    pub menu: String,
    /// (act, per-state utility)
    pub payoffs: Vec<(String, Vec<f64>)>,
    /// (act, per-state regret)
    pub regrets: Vec<(String, Vec<f64>)>,
    pub rankings: Vec<PreferenceRanking>,
}

impl MenuReport {
    pub fn ranking(&self, rule: Rule) -> &PreferenceRanking {
        self.rankings
            .iter()
            .find(|r| r.rule() == rule)
            .expect("every rule is ranked")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeliveryReport {
    pub n_good: u32,
    pub likelihood_one: f64,
    pub likelihood_ten: f64,
    pub weight_ten: f64,
    pub menus: Vec<MenuReport>,
}

impl DeliveryReport {
    pub fn menu(&self, name: &str) -> Option<&MenuReport> {
        self.menus.iter().find(|m| m.menu == name)
    }
}

/// Every rule on M0 and M1 of the delivery problem after `n_good` good cakes
/// have been observed. SEU uses Pr1; MER and MMEU use the surviving
/// hypotheses; REG ignores beliefs.
pub fn delivery_demo(n_good: u32) -> Result<DeliveryReport> {
    let (one, ten) = delivery_likelihoods(n_good)?;
    let weight_ten = delivery_weight(n_good)?;
    let sc = fixtures::delivery_with_weight(weight_ten);
    let seu_beliefs = WeightedBeliefs::single(Measure::point_mass(0, 2));
    let prizes = sc.prizes();
    let mut menus = Vec::new();
    for name in ["M0", "M1"] {
        let menu = sc.menu(name)?;
        let payoffs: Vec<(String, Vec<f64>)> = menu
            .acts()
            .iter()
            .map(|a| (a.name().to_string(), a.utilities(prizes)))
            .collect();
        let regrets = menu
            .acts()
            .iter()
            .map(|a| {
                let r = (0..2)
                    .map(|s| regret::regret(a, s, menu, prizes))
                    .collect::<Result<Vec<_>>>()?;
                Ok((a.name().to_string(), r))
            })
            .collect::<Result<Vec<_>>>()?;
        let rankings = Rule::ALL
            .iter()
            .map(|&rule| {
                let beliefs = if rule == Rule::Seu { &seu_beliefs } else { sc.beliefs() };
                regret::rank(rule, menu, beliefs, prizes)
            })
            .collect::<Result<Vec<_>>>()?;
        menus.push(MenuReport {
            menu: name.to_string(),
            payoffs,
            regrets,
            rankings,
        });
    }
    Ok(DeliveryReport {
        n_good,
        likelihood_one: one,
        likelihood_ten: ten,
        weight_ten,
        menus,
    })
}

/// [`delivery_demo`] for every N in `from..=to`.
pub fn delivery_sweep(from: u32, to: u32) -> Result<Vec<DeliveryReport>> {
    if from > to {
        return Err(Error::invalid("sweep", format!("{from}..{to}"), "empty range"));
    }
    (from..=to).map(delivery_demo).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BeliefEntry, Event};
    use crate::update::likelihood_update;

    fn bernoulli(p: f64) -> Measure {
        Measure::new(vec![1.0 - p, p]).unwrap()
    }

    fn sorted(tiers: &[Vec<String>]) -> Vec<Vec<String>> {
        tiers
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.sort();
                t
            })
            .collect()
    }

    #[test]
    fn zero_rounds_is_the_prior() {
        let b = WeightedBeliefs::unweighted([bernoulli(0.4), bernoulli(0.6)]).unwrap();
        let t = simulate_iid(&b, &bernoulli(0.5), 0, 1).unwrap();
        assert_eq!(t.weights, vec![vec![1.0, 1.0]]);
        assert!(t.observations.is_empty());
    }

    #[test]
    fn zero_likelihood_annihilates() {
        let b = WeightedBeliefs::unweighted([Measure::point_mass(0, 2), Measure::point_mass(1, 2)]).unwrap();
        let t = simulate_iid(&b, &Measure::point_mass(0, 2), 1, 9).unwrap();
        assert_eq!(t.weights[1], vec![1.0, 0.0]);
    }

    #[test]
    fn impossible_outcome_is_reported() {
        let b = WeightedBeliefs::single(Measure::point_mass(0, 2));
        assert!(simulate_iid(&b, &Measure::point_mass(1, 2), 3, 0).is_err());
        assert!(simulate_iid(&b, &Measure::uniform(3), 3, 0).is_err());
    }

    #[test]
    fn trajectory_rounds_are_normalized() {
        let b = WeightedBeliefs::unweighted([bernoulli(0.2), bernoulli(0.5), bernoulli(0.7)]).unwrap();
        let t = simulate_iid(&b, &bernoulli(0.6), 200, 4).unwrap();
        assert_eq!(t.weights.len(), 201);
        assert!(t.weights.iter().all(|w| w.iter().copied().fold(0.0, f64::max) == 1.0));
    }

    #[test]
    fn one_round_matches_likelihood_update_on_product_space() {
        // two i.i.d. rounds over {0, 1, 2}; state index = 3·first + second
        let singles = [
            Measure::new(vec![0.2, 0.3, 0.5]).unwrap(),
            Measure::new(vec![0.6, 0.1, 0.3]).unwrap(),
            Measure::new(vec![0.1, 0.8, 0.1]).unwrap(),
        ];
        let prior = [1.0, 0.7, 0.4];
        let candidates = WeightedBeliefs::new(
            singles
                .iter()
                .zip(prior)
                .enumerate()
                .map(|(i, (m, w))| BeliefEntry::new(format!("c{i}"), m.clone(), w))
                .collect(),
        )
        .unwrap();
        let product = WeightedBeliefs::new(
            singles
                .iter()
                .zip(prior)
                .enumerate()
                .map(|(i, (m, w))| {
                    let p = (0..9).map(|s| m.prob(s / 3) * m.prob(s % 3)).collect();
                    BeliefEntry::new(format!("c{i}"), Measure::new(p).unwrap(), w)
                })
                .collect(),
        )
        .unwrap();
        let truth = Measure::uniform(3);
        for seed in 0..20 {
            let t = simulate_iid(&candidates, &truth, 1, seed).unwrap();
            let o = t.observations[0];
            let first_is_o = Event::new(9, (0..9).filter(|s| s / 3 == o)).unwrap();
            let updated = likelihood_update(&product, &first_is_o).unwrap();
            assert_eq!(updated.beliefs.len(), 3);
            for (a, b) in t.weights[1].iter().zip(updated.beliefs.weights()) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn study_is_independent_of_execution_mode() {
        let b = WeightedBeliefs::unweighted([bernoulli(0.4), bernoulli(0.5), bernoulli(0.6)]).unwrap();
        let a = convergence_study(&b, 1, 300, 11, 16, 0.05, Execution::Sequential).unwrap();
        let c = convergence_study(&b, 1, 300, 11, 16, 0.05, Execution::Parallel).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn divergence_examples() {
        let d = fixtures::delivery();
        let m0 = d.menu("M0").unwrap();
        let mer = regret::rank(Rule::Mer, m0, d.beliefs(), d.prizes()).unwrap();
        assert_eq!(ranking_divergence(&mer, &mer).unwrap(), 0.0);

        let forward = PreferenceRanking::from_scores(
            Rule::Reg,
            ["a", "b", "c"]
                .iter()
                .zip([1.0, 2.0, 3.0])
                .map(|(n, s)| regret::ScoredAct {
                    name: n.to_string(),
                    score: s,
                })
                .collect(),
        );
        let backward = PreferenceRanking::from_scores(
            Rule::Reg,
            ["a", "b", "c"]
                .iter()
                .zip([3.0, 2.0, 1.0])
                .map(|(n, s)| regret::ScoredAct {
                    name: n.to_string(),
                    score: s,
                })
                .collect(),
        );
        assert_eq!(ranking_divergence(&forward, &backward).unwrap(), 1.0);
        assert_eq!(ranking_divergence(&backward, &forward).unwrap(), 1.0);

        let seu = regret::rank(
            Rule::Seu,
            m0,
            &WeightedBeliefs::single(Measure::point_mass(0, 2)),
            d.prizes(),
        )
        .unwrap();
        let mwer = delivery_demo(991).unwrap();
        assert_eq!(
            ranking_divergence(mwer.menu("M0").unwrap().ranking(Rule::Mwer), &seu).unwrap(),
            0.0
        );
        // tied in one ranking, strict in the other
        assert!(ranking_divergence(&mer, &seu).unwrap() > 0.0);

        let other = regret::rank(Rule::Mer, d.menu("M1").unwrap(), d.beliefs(), d.prizes()).unwrap();
        assert!(ranking_divergence(&mer, &other).is_err());
    }

    #[test]
    fn delivery_weight_endpoints() {
        assert_eq!(delivery_weight(0).unwrap(), 1.0);
        assert_eq!(delivery_weight(991).unwrap(), 0.0);
        assert_eq!(delivery_weight(1000).unwrap(), 0.0);
        assert!(delivery_weight(1001).is_err());
        let (one, ten) = delivery_likelihoods(100).unwrap();
        assert_eq!(one, 0.9);
        assert!((ten - 0.35).abs() < 0.005);
        assert!((delivery_weight(100).unwrap() - ten / one).abs() < 1e-15);
        assert_eq!(delivery_likelihoods(991).unwrap().1, 0.0);
        assert!(delivery_likelihoods(990).unwrap().1 > 0.0);
    }

    #[test]
    fn delivery_weight_is_strictly_decreasing() {
        let w: Vec<f64> = (0..=990).map(|n| delivery_weight(n).unwrap()).collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn delivery_demo_examples() {
        let r = delivery_demo(0).unwrap();
        let m0 = r.menu("M0").unwrap();
        assert!(m0.ranking(Rule::Mwer).same_tiers(m0.ranking(Rule::Mer)));
        assert_eq!(
            sorted(m0.ranking(Rule::Mwer).tiers()),
            vec![vec!["check".to_string()], vec!["back".into(), "cont".into()]]
        );

        let r = delivery_demo(100).unwrap();
        let tiers = sorted(r.menu("M0").unwrap().ranking(Rule::Mwer).tiers());
        assert_eq!(
            tiers,
            vec![vec!["cont".to_string()], vec!["check".into()], vec!["back".into()]]
        );

        let r = delivery_demo(991).unwrap();
        let m0 = r.menu("M0").unwrap();
        let seu = m0.ranking(Rule::Seu);
        assert!(m0.ranking(Rule::Mwer).same_tiers(seu));
        assert_eq!(seu.score("cont"), Some(10000.0));
        assert_eq!(seu.score("check"), Some(5001.0));
        assert_eq!(seu.score("back"), Some(0.0));
        assert_eq!(m0.regrets[2], ("check".to_string(), vec![4999.0, 4999.0]));
    }

    #[test]
    fn sweep_covers_the_range() {
        let rows = delivery_sweep(98, 102).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.n_good).collect::<Vec<_>>(),
            vec![98, 99, 100, 101, 102]
        );
        assert!(delivery_sweep(5, 4).is_err());
    }
}

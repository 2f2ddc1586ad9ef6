//! Random small decision problems.
//!
//! Utilities are integers and probabilities, weights and mixing
//! coefficients are dyadic, so most arithmetic is exact and ties between
//! acts are common.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::trial_rng;
use crate::model::{
    Act, BeliefEntry, Event, Lottery, Measure, Menu, PrizeSpace, Scenario, StateSpace, WeightedBeliefs,
};
use crate::regret::Rule;

/// Inclusive size bounds and value grids for [`random_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub states: (usize, usize),
    pub acts: (usize, usize),
    pub measures: (usize, usize),
    pub utility_range: (i32, i32),
    /// Probabilities are multiples of 1/`prob_denominator`.
    pub prob_denominator: u32,
    /// Non-unit weights are multiples of 1/`weight_denominator`.
    pub weight_denominator: u32,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            states: (2, 3),
            acts: (2, 4),
            measures: (1, 3),
            utility_range: (-10, 10),
            prob_denominator: 8,
            weight_denominator: 4,
        }
    }
}

impl ScenarioParams {
    /// Defaults, with a single measure for SEU.
    pub fn for_rule(rule: Rule) -> Self {
        let mut p = ScenarioParams::default();
        if rule == Rule::Seu {
            p.measures = (1, 1);
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::invalid("scenario parameters", "", reason));
        for (name, (lo, hi)) in [
            ("states", self.states),
            ("acts", self.acts),
            ("measures", self.measures),
        ] {
            if lo == 0 || lo > hi {
                return bad(&format!("{name} bounds ({lo}, {hi}) must satisfy 1 <= min <= max"));
            }
        }
        if self.utility_range.0 >= self.utility_range.1 {
            return bad("the utility range needs two distinct values");
        }
        if self.prob_denominator == 0 || self.weight_denominator == 0 {
            return bad("denominators must be positive");
        }
        Ok(())
    }
}

pub(crate) fn in_range(rng: &mut impl Rng, (lo, hi): (usize, usize)) -> usize {
    rng.random_range(lo..=hi)
}

/// Uniform mixing coefficient in {1/8, …, 7/8}.
pub(crate) fn grid_p(rng: &mut impl Rng) -> f64 {
    f64::from(rng.random_range(1..8u32)) / 8.0
}

pub(crate) fn random_utilities(rng: &mut impl Rng, n: usize, params: &ScenarioParams) -> Vec<f64> {
    let (lo, hi) = params.utility_range;
    (0..n).map(|_| f64::from(rng.random_range(lo..=hi))).collect()
}

/// Multinomial split of `d` units over the states.
pub(crate) fn random_measure(rng: &mut impl Rng, n: usize, d: u32) -> Measure {
    let mut counts = vec![0u32; n];
    for _ in 0..d {
        counts[rng.random_range(0..n)] += 1;
    }
    Measure::new(counts.iter().map(|c| f64::from(*c) / f64::from(d)).collect()).expect("counts sum to d")
}

pub(crate) fn random_beliefs(rng: &mut impl Rng, n: usize, params: &ScenarioParams) -> WeightedBeliefs {
    // may come up short when the grid has too few distinct measures
    let want = in_range(rng, params.measures);
    let mut entries: Vec<BeliefEntry> = Vec::with_capacity(want);
    let mut attempts = 0;
    while entries.len() < want && attempts < 64 {
        attempts += 1;
        let m = random_measure(rng, n, params.prob_denominator);
        if entries.iter().any(|e| e.measure == m) {
            continue;
        }
        let weight = if entries.is_empty() {
            1.0
        } else {
            let d = params.weight_denominator;
            f64::from(rng.random_range(1..=d)) / f64::from(d)
        };
        entries.push(BeliefEntry::new(format!("p{}", entries.len()), m, weight));
    }
    WeightedBeliefs::new(entries).expect("distinct measures with a unit weight")
}

/// Nonempty random subset of the states.
pub fn random_event(rng: &mut impl Rng, n: usize) -> Event {
    loop {
        let mask: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        if mask.iter().any(|m| *m) {
            return Event::from_mask(mask);
        }
    }
}

/// Scenario with acts given by utility rows; menu `M` holds every act.
pub(crate) fn scenario_from_rows(
    rows: Vec<(String, Vec<f64>)>,
    beliefs: WeightedBeliefs,
    params: &ScenarioParams,
) -> Result<Scenario> {
    let n = beliefs.num_states();
    let states = StateSpace::new((1..=n).map(|i| format!("s{i}")))?;
    let (lo, hi) = params.utility_range;
    let levels = [f64::from(lo), f64::from(hi)]
        .into_iter()
        .chain(rows.iter().flat_map(|(_, u)| u.iter().copied()));
    let prizes = PrizeSpace::from_utility_levels(levels)?;
    let acts = rows
        .iter()
        .map(|(name, u)| Act::from_utilities(name.clone(), u, &states, &prizes))
        .collect::<Result<Vec<_>>>()?;
    let menu = Menu::new(acts.clone())?;
    Scenario::new(states, prizes, acts, vec![("M".into(), menu)], beliefs, vec![])
}

pub(crate) fn scenario_from_rng(rng: &mut impl Rng, params: &ScenarioParams) -> Result<Scenario> {
    params.validate()?;
    let n = in_range(rng, params.states);
    let k = in_range(rng, params.acts);
    let rows = (0..k)
        .map(|i| (format!("a{i}"), random_utilities(rng, n, params)))
        .collect();
    let beliefs = random_beliefs(rng, n, params);
    scenario_from_rows(rows, beliefs, params)
}

/// Menu of cyclic shifts of one or two random utility vectors, so every
/// state sees the same set of outcomes.
pub(crate) fn cyclic_scenario(rng: &mut impl Rng, params: &ScenarioParams) -> Result<Scenario> {
    params.validate()?;
    let n = in_range(rng, params.states);
    let bases = rng.random_range(1..=2);
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    for b in 0..bases {
        let v = random_utilities(rng, n, params);
        for r in 0..n {
            let shifted: Vec<f64> = (0..n).map(|s| v[(s + r) % n]).collect();
            if !rows.iter().any(|(_, u)| *u == shifted) {
                rows.push((format!("c{b}.{r}"), shifted));
            }
        }
    }
    let beliefs = random_beliefs(rng, n, params);
    scenario_from_rows(rows, beliefs, params)
}

/// A deterministic random scenario: states `s1..`, acts `a0..` with integer
/// utilities, menu `M` holding every act, measures `p0..` on a dyadic grid.
pub fn random_scenario(params: &ScenarioParams, seed: u64) -> Result<Scenario> {
    scenario_from_rng(&mut trial_rng(seed, 0), params)
}

/// Point lottery on a random prize, or a k/8 mixture of two random prizes.
pub(crate) fn random_lottery(rng: &mut impl Rng, prizes: &PrizeSpace) -> Lottery {
    let a = rng.random_range(0..prizes.len());
    if rng.random() {
        return Lottery::degenerate(a, prizes).expect("prize index in range");
    }
    let b = rng.random_range(0..prizes.len());
    let p = grid_p(rng);
    let mut probs = vec![0.0; prizes.len()];
    probs[a] += p;
    probs[b] += 1.0 - p;
    Lottery::new(probs, prizes).expect("two-point lottery")
}

/// Random act over existing utility levels.
pub(crate) fn random_act(rng: &mut impl Rng, name: &str, sc: &Scenario) -> Result<Act> {
    let levels = sc.prizes().utilities();
    let u: Vec<f64> = (0..sc.states().len())
        .map(|_| *levels.choose(rng).expect("nonempty prize space"))
        .collect();
    Act::from_utilities(name, &u, sc.states(), sc.prizes())
}

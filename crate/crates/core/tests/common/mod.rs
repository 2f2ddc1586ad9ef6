//! Instance generators shared by the integration tests.

#![allow(dead_code)]

use mwer_core::exec::trial_rng;
use mwer_core::{Act, BeliefEntry, Event, Measure, Menu, PrizeSpace, StateSpace, WeightedBeliefs};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    trial_rng(seed, stream)
}

/// Probabilities with a fair share of exact zeros, so conditioning drops
/// measures and conditionals coincide now and then.
pub fn measure(rng: &mut impl Rng, n: usize) -> Measure {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random_range(0.01..1.0)
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return Measure::new(raw.iter().map(|x| x / total).collect()).unwrap();
        }
    }
}

/// Between one and `max` measures, some of them scalar multiples on a
/// subset (identical conditionals), weights in (0, 1].
pub fn beliefs(rng: &mut impl Rng, n: usize, max: usize) -> WeightedBeliefs {
    let k = rng.random_range(1..=max);
    let mut entries: Vec<BeliefEntry> = Vec::new();
    while entries.len() < k {
        let m = if !entries.is_empty() && rng.random_bool(0.2) {
            // rescale mass outside one state of an existing measure
            let base = entries[rng.random_range(0..entries.len())].measure.probs().to_vec();
            let s = rng.random_range(0..n);
            let t = rng.random_range(0.1..0.9);
            let mut p: Vec<f64> = base.iter().map(|x| x * t).collect();
            p[s] += 1.0 - t;
            let total: f64 = p.iter().sum();
            Measure::new(p.iter().map(|x| x / total).collect()).unwrap()
        } else {
            measure(rng, n)
        };
        if entries.iter().any(|e| e.measure.linf_distance(&m) < 1e-9) {
            continue;
        }
        let w = if rng.random_bool(0.3) {
            1.0
        } else {
            rng.random_range(0.05..=1.0)
        };
        entries.push(BeliefEntry::new(format!("b{}", entries.len()), m, w));
    }
    WeightedBeliefs::new(entries).unwrap()
}

pub fn event(rng: &mut impl Rng, n: usize) -> Event {
    loop {
        let mask: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        if mask.iter().any(|m| *m) {
            return Event::from_mask(mask);
        }
    }
}

pub struct Problem {
    pub states: StateSpace,
    pub prizes: PrizeSpace,
    pub menu: Menu,
}

/// Menu of `acts` random acts with real-valued utilities in [-10, 10].
pub fn problem(rng: &mut impl Rng, n: usize, acts: usize) -> Problem {
    let rows: Vec<Vec<f64>> = (0..acts)
        .map(|_| {
            (0..n)
                .map(|_| (rng.random_range(-10.0..10.0f64) * 4.0).round() / 4.0)
                .collect()
        })
        .collect();
    let states = StateSpace::new((0..n).map(|i| format!("s{i}"))).unwrap();
    let levels = rows.iter().flatten().copied().chain([-10.0, 10.0]);
    let prizes = PrizeSpace::from_utility_levels(levels).unwrap();
    let acts = rows
        .iter()
        .enumerate()
        .map(|(i, u)| Act::from_utilities(format!("a{i}"), u, &states, &prizes).unwrap())
        .collect();
    Problem {
        menu: Menu::new(acts).unwrap(),
        states,
        prizes,
    }
}

//! Updating weighted belief sets on an observed event.
//!
//! Likelihood updating conditions every measure and reweights it by its
//! weighted likelihood relative to the best one. Measure-by-measure and
//! threshold (Epstein–Schneider style) updating are provided as unweighted
//! baselines.

use crate::error::{Error, Result};
use crate::model::{BeliefEntry, Event, Measure, WeightedBeliefs, MEASURE_TOLERANCE};

/// Updated beliefs plus the provenance of every source measure.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateResult {
    pub beliefs: WeightedBeliefs,
    /// Indices of source measures that gave the event probability zero.
    pub dropped: Vec<usize>,
    /// `groups[i]` lists the source measures whose conditional is entry `i`.
    pub groups: Vec<Vec<usize>>,
}

impl UpdateResult {
    fn identity(beliefs: &WeightedBeliefs) -> Self {
        UpdateResult {
            beliefs: beliefs.clone(),
            dropped: Vec::new(),
            groups: (0..beliefs.len()).map(|i| vec![i]).collect(),
        }
    }
}

fn check_event(beliefs: &WeightedBeliefs, event: &Event) -> Result<()> {
    if event.num_states() != beliefs.num_states() {
        return Err(Error::mismatch("event", beliefs.num_states(), event.num_states()));
    }
    Ok(())
}

/// P̄⁺(E) = max over entries of α·Pr(E).
pub fn event_weight(beliefs: &WeightedBeliefs, event: &Event) -> f64 {
    beliefs
        .entries()
        .iter()
        .map(|e| e.weight * e.measure.prob_of(event))
        .fold(0.0, f64::max)
}

/// Pr | E.
pub fn condition(pr: &Measure, event: &Event) -> Result<Measure> {
    if event.num_states() != pr.len() {
        return Err(Error::mismatch("event", pr.len(), event.num_states()));
    }
    let mass = pr.prob_of(event);
    if mass <= 0.0 {
        return Err(Error::ConditioningUndefined);
    }
    Ok(Measure::from_raw(
        pr.probs()
            .iter()
            .zip(event.mask())
            .map(|(p, inside)| if *inside { p / mass } else { 0.0 })
            .collect(),
    ))
}

/// Whether E is null for these beliefs: P̄⁺(E) = 0.
pub fn is_null_event(beliefs: &WeightedBeliefs, event: &Event) -> bool {
    event_weight(beliefs, event) == 0.0
}

/// P⁺ | E.
///
/// Measures with Pr(E) = 0 are dropped. Survivors whose conditionals agree
/// within [`MEASURE_TOLERANCE`] share one entry, weighted by the largest
/// α·Pr(E) in the group divided by P̄⁺(E).
pub fn likelihood_update(beliefs: &WeightedBeliefs, event: &Event) -> Result<UpdateResult> {
    check_event(beliefs, event)?;
    let norm = event_weight(beliefs, event);
    if norm <= 0.0 {
        return Err(Error::UpdateUndefined("the event has zero weighted probability".into()));
    }
    if event.is_full() {
        return Ok(UpdateResult::identity(beliefs));
    }
    let mut dropped = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut entries: Vec<BeliefEntry> = Vec::new();
    for (i, e) in beliefs.entries().iter().enumerate() {
        let mass = e.measure.prob_of(event);
        if mass <= 0.0 {
            dropped.push(i);
            continue;
        }
        let cond = condition(&e.measure, event)?;
        let likelihood = e.weight * mass;
        match entries
            .iter()
            .position(|x| x.measure.linf_distance(&cond) <= MEASURE_TOLERANCE)
        {
            Some(j) => {
                groups[j].push(i);
                entries[j].weight = entries[j].weight.max(likelihood);
            }
            None => {
                groups.push(vec![i]);
                entries.push(BeliefEntry::new(e.label.clone(), cond, likelihood));
            }
        }
    }
    for e in &mut entries {
        e.weight /= norm;
    }
    Ok(UpdateResult {
        beliefs: WeightedBeliefs::merged(entries)?,
        dropped,
        groups,
    })
}

fn condition_survivors<'a>(survivors: impl Iterator<Item = &'a BeliefEntry>, event: &Event) -> Result<WeightedBeliefs> {
    let entries = survivors
        .map(|e| Ok(BeliefEntry::new(e.label.clone(), condition(&e.measure, event)?, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(Error::UpdateUndefined(
            "no measure gives the event positive probability".into(),
        ));
    }
    WeightedBeliefs::merged(entries)
}

/// Conditions every measure with Pr(E) > 0; all weights become 1.
pub fn measure_by_measure_update(beliefs: &WeightedBeliefs, event: &Event) -> Result<WeightedBeliefs> {
    check_event(beliefs, event)?;
    condition_survivors(
        beliefs.entries().iter().filter(|e| e.measure.prob_of(event) > 0.0),
        event,
    )
}

/// Keeps measures whose relative likelihood Pr(E) / max Pr'(E) strictly
/// exceeds `threshold`, conditions them, and resets weights to 1.
pub fn epstein_schneider_update(beliefs: &WeightedBeliefs, event: &Event, threshold: f64) -> Result<WeightedBeliefs> {
    check_event(beliefs, event)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid("threshold", threshold.to_string(), "must lie in (0, 1)"));
    }
    let best = beliefs.measures().map(|m| m.prob_of(event)).fold(0.0, f64::max);
    if best <= 0.0 {
        return Err(Error::UpdateUndefined(
            "no measure gives the event positive probability".into(),
        ));
    }
    condition_survivors(
        beliefs
            .entries()
            .iter()
            .filter(|e| e.measure.prob_of(event) / best > threshold),
        event,
    )
}

/// Left fold of [`likelihood_update`]; provenance refers to the original
/// measures.
pub fn sequential_update(beliefs: &WeightedBeliefs, events: &[Event]) -> Result<UpdateResult> {
    let mut acc = UpdateResult::identity(beliefs);
    for (k, event) in events.iter().enumerate() {
        let step = likelihood_update(&acc.beliefs, event).map_err(|err| match err {
            Error::UpdateUndefined(why) => Error::UpdateUndefined(format!("after the first {k} event(s): {why}")),
            other => other,
        })?;
        let mut dropped = acc.dropped.clone();
        for &j in &step.dropped {
            dropped.extend_from_slice(&acc.groups[j]);
        }
        dropped.sort_unstable();
        let groups = step
            .groups
            .iter()
            .map(|members| {
                let mut g: Vec<usize> = members.iter().flat_map(|&j| acc.groups[j].iter().copied()).collect();
                g.sort_unstable();
                g
            })
            .collect();
        acc = UpdateResult {
            beliefs: step.beliefs,
            dropped,
            groups,
        };
    }
    Ok(acc)
}

/// Directed Hausdorff-style distance between two belief sets: every entry of
/// each side is matched to the nearest entry of the other, with distance the
/// larger of the L∞ gap between measures and the weight gap.
pub fn belief_distance(a: &WeightedBeliefs, b: &WeightedBeliefs) -> f64 {
    fn directed(a: &WeightedBeliefs, b: &WeightedBeliefs) -> f64 {
        a.entries()
            .iter()
            .map(|x| {
                b.entries()
                    .iter()
                    .map(|y| x.measure.linf_distance(&y.measure).max((x.weight - y.weight).abs()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn three_state() -> WeightedBeliefs {
        WeightedBeliefs::new(vec![
            BeliefEntry::new("a", Measure::new(vec![0.6, 0.3, 0.1]).unwrap(), 1.0),
            BeliefEntry::new("b", Measure::new(vec![0.1, 0.25, 0.65]).unwrap(), 1.0),
        ])
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn event_weight_examples() {
        let b = three_state();
        assert_eq!(event_weight(&b, &Event::full(3)), 1.0);
        let e12 = Event::new(3, [0, 1]).unwrap();
        assert!((event_weight(&b, &e12) - 0.9).abs() < 1e-15);
        let single = WeightedBeliefs::single(Measure::point_mass(0, 2));
        assert_eq!(event_weight(&single, &Event::new(2, [1]).unwrap()), 0.0);
    }

    #[test]
    fn condition_examples() {
        let e = Event::new(2, [0]).unwrap();
        assert_eq!(
            condition(&Measure::new(vec![0.8, 0.2]).unwrap(), &e).unwrap(),
            Measure::point_mass(0, 2)
        );
        let c = condition(&Measure::uniform(4), &Event::new(4, [1, 3]).unwrap()).unwrap();
        assert_eq!(c.probs(), &[0.0, 0.5, 0.0, 0.5]);
        let c = condition(
            &Measure::new(vec![0.6, 0.3, 0.1]).unwrap(),
            &Event::new(3, [0, 1]).unwrap(),
        )
        .unwrap();
        assert!(close(c.probs(), &[2.0 / 3.0, 1.0 / 3.0, 0.0]));
        assert_eq!(
            condition(&Measure::point_mass(0, 2), &Event::new(2, [1]).unwrap()),
            Err(Error::ConditioningUndefined)
        );
    }

    #[test]
    fn likelihood_update_on_full_space_is_identity() {
        let b = three_state();
        let r = likelihood_update(&b, &Event::full(3)).unwrap();
        assert_eq!(r.beliefs, b);
        assert!(r.dropped.is_empty());
    }

    #[test]
    fn coinciding_conditionals_are_grouped() {
        let b = WeightedBeliefs::new(vec![
            BeliefEntry::new("a", Measure::new(vec![0.8, 0.2]).unwrap(), 1.0),
            BeliefEntry::new("b", Measure::new(vec![0.2, 0.8]).unwrap(), 1.0),
        ])
        .unwrap();
        let r = likelihood_update(&b, &Event::new(2, [0]).unwrap()).unwrap();
        assert_eq!(r.beliefs.len(), 1);
        assert_eq!(r.beliefs.entries()[0].measure, Measure::point_mass(0, 2));
        assert_eq!(r.beliefs.entries()[0].weight, 1.0);
        assert_eq!(r.groups, vec![vec![0, 1]]);
    }

    #[test]
    fn likelihood_weights_follow_relative_likelihood() {
        let r = likelihood_update(&three_state(), &Event::new(3, [0, 1]).unwrap()).unwrap();
        let e = r.beliefs.entries();
        assert_eq!(e.len(), 2);
        assert!(close(e[0].measure.probs(), &[2.0 / 3.0, 1.0 / 3.0, 0.0]));
        assert_eq!(e[0].weight, 1.0);
        assert!(close(e[1].measure.probs(), &[2.0 / 7.0, 5.0 / 7.0, 0.0]));
        assert!((e[1].weight - 0.35 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn null_event_update_is_undefined() {
        let single = WeightedBeliefs::single(Measure::point_mass(0, 2));
        let e = Event::new(2, [1]).unwrap();
        assert!(is_null_event(&single, &e));
        assert!(matches!(likelihood_update(&single, &e), Err(Error::UpdateUndefined(_))));
        assert!(is_null_event(&single, &Event::empty(2)));
        assert!(!is_null_event(
            fixtures::delivery().beliefs(),
            &Event::new(2, [1]).unwrap()
        ));
    }

    #[test]
    fn zero_probability_measures_are_dropped() {
        let b = fixtures::delivery();
        let r = likelihood_update(b.beliefs(), &Event::new(2, [0]).unwrap()).unwrap();
        assert_eq!(r.dropped, vec![1]);
        assert_eq!(r.beliefs.len(), 1);
    }

    #[test]
    fn measure_by_measure_examples() {
        let d = fixtures::delivery();
        let kept = measure_by_measure_update(d.beliefs(), &Event::full(2)).unwrap();
        assert_eq!(kept, *d.beliefs());
        // the informative event leaves every surviving hypothesis at weight 1
        let b = three_state();
        let r = measure_by_measure_update(&b, &Event::new(3, [0, 1]).unwrap()).unwrap();
        assert_eq!(r.weights(), vec![1.0, 1.0]);
        let single = WeightedBeliefs::single(Measure::new(vec![0.6, 0.3, 0.1]).unwrap());
        let e = Event::new(3, [0, 1]).unwrap();
        let r = measure_by_measure_update(&single, &e).unwrap();
        assert_eq!(
            r.entries()[0].measure,
            condition(&single.entries()[0].measure, &e).unwrap()
        );
        assert!(measure_by_measure_update(&single, &Event::new(3, []).unwrap()).is_err());
    }

    #[test]
    fn epstein_schneider_examples() {
        let b = three_state();
        let e = Event::new(3, [0, 1]).unwrap();
        let strict = epstein_schneider_update(&b, &e, 0.5).unwrap();
        assert_eq!(strict.len(), 1);
        assert!(close(strict.entries()[0].measure.probs(), &[2.0 / 3.0, 1.0 / 3.0, 0.0]));
        let loose = epstein_schneider_update(&b, &e, 0.3).unwrap();
        assert_eq!(loose.len(), 2);
        assert_eq!(loose.weights(), vec![1.0, 1.0]);
        assert_eq!(epstein_schneider_update(&b, &Event::full(3), 0.9).unwrap().len(), 2);
        assert!(epstein_schneider_update(&b, &e, 1.0).is_err());
    }

    #[test]
    fn sequential_examples() {
        let b = three_state();
        assert_eq!(sequential_update(&b, &[]).unwrap().beliefs, b);
        let e1 = Event::new(3, [0, 1]).unwrap();
        let e2 = Event::new(3, [1, 2]).unwrap();
        let ab = sequential_update(&b, &[e1.clone(), e2.clone()]).unwrap();
        let ba = sequential_update(&b, &[e2.clone(), e1.clone()]).unwrap();
        let direct = likelihood_update(&b, &e1.intersection(&e2)).unwrap();
        assert!(belief_distance(&ab.beliefs, &ba.beliefs) < 1e-12);
        assert!(belief_distance(&ab.beliefs, &direct.beliefs) < 1e-12);
        assert_eq!(ab.groups, vec![vec![0, 1]]);
    }

    #[test]
    fn sequential_names_failing_prefix() {
        let single = WeightedBeliefs::single(Measure::point_mass(0, 3));
        let err = sequential_update(&single, &[Event::full(3), Event::new(3, [2]).unwrap()]).unwrap_err();
        assert!(err.to_string().contains("first 1 event"), "{err}");
    }

    fn beliefs_strategy() -> impl Strategy<Value = (usize, WeightedBeliefs)> {
        (2usize..5, 1usize..5).prop_flat_map(|(n, k)| {
            (
                Just(n),
                prop::collection::vec((prop::collection::vec(0.0f64..1.0, n), 0.05f64..=1.0), k),
            )
                .prop_filter_map("degenerate", |(n, raw)| {
                    let entries = raw
                        .into_iter()
                        .enumerate()
                        .filter_map(|(i, (p, w))| {
                            let s: f64 = p.iter().sum();
                            (s > 0.0).then(|| {
                                BeliefEntry::new(
                                    format!("m{i}"),
                                    Measure::new(p.iter().map(|x| x / s).collect()).unwrap(),
                                    w,
                                )
                            })
                        })
                        .collect::<Vec<_>>();
                    WeightedBeliefs::merged(entries).ok().map(|b| (n, b))
                })
        })
    }

    proptest! {
        #[test]
        fn update_keeps_max_weight_one((n, b) in beliefs_strategy(), mask in prop::collection::vec(any::<bool>(), 4)) {
            let e = Event::from_mask(mask.into_iter().take(n).chain(std::iter::repeat(true)).take(n).collect());
            prop_assume!(!is_null_event(&b, &e));
            let r = likelihood_update(&b, &e).unwrap();
            prop_assert_eq!(r.beliefs.max_weight(), 1.0);
            let mut seen: Vec<usize> = r.dropped.clone();
            seen.extend(r.groups.iter().flatten());
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..b.len()).collect::<Vec<_>>());
        }

        #[test]
        fn equal_likelihoods_make_updates_agree(n in 2usize..5, k in 1usize..4, mass in 0.1f64..0.9, seed in any::<u64>()) {
            // every measure puts `mass` on state 0 and spreads the rest
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<BeliefEntry> = (0..k)
                .map(|i| {
                    let rest: Vec<f64> = (1..n).map(|_| rng.random_range(0.01..1.0)).collect();
                    let s: f64 = rest.iter().sum();
                    let mut p = vec![mass];
                    p.extend(rest.iter().map(|x| x / s * (1.0 - mass)));
                    BeliefEntry::new(format!("m{i}"), Measure::new(p).unwrap(), rng.random_range(0.1..=1.0))
                })
                .collect();
            let b = WeightedBeliefs::merged(entries).unwrap();
            let e = Event::new(n, [0]).unwrap();
            let e = Event::from_mask((0..n).map(|s| !e.contains(s)).collect());
            let lik = likelihood_update(&b, &e).unwrap().beliefs;
            let mbm = measure_by_measure_update(&b, &e).unwrap();
            prop_assert_eq!(lik.len(), mbm.len());
            for (x, y) in lik.entries().iter().zip(mbm.entries()) {
                prop_assert!(x.measure.linf_distance(&y.measure) < 1e-12);
            }
            for (x, w) in lik.weights().iter().zip(b.weights()) {
                prop_assert!((x - w).abs() < 1e-12);
            }
        }
    }
}

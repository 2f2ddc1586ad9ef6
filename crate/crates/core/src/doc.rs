//! JSON scenario documents.
//!
//! ```json
//! {
//!   "format": "mwer-scenario/1",
//!   "states": ["s1", "s2"],
//!   "prizes": [{"name": "lo", "utility": 0}, {"name": "hi", "utility": 1}],
//!   "acts": [
//!     {"name": "up", "utilities": {"s1": 1, "s2": 0}},
//!     {"name": "hedge", "lotteries": {"s1": {"lo": 0.5, "hi": 0.5}, "s2": {"hi": 1}}}
//!   ],
//!   "measures": [{"name": "d1", "probs": {"s1": 1, "s2": 0}, "weight": 1}],
//!   "menus": {"M": ["up", "hedge"]},
//!   "events": {"E": ["s1"]}
//! }
//! ```
//!
//! Acts given as `utilities` are realized as point lotteries. Each utility
//! value maps to the first declared prize with exactly that utility, or to a
//! synthesized prize named `u=<value>` when none exists. Missing state keys
//! in `probs` and lottery objects mean probability zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    utility_prize_name, Act, BeliefEntry, Event, Lottery, Measure, Menu, PrizeSpace, Scenario, StateSpace,
    WeightedBeliefs,
};

pub const SCENARIO_FORMAT: &str = "mwer-scenario/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub format: String,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prizes: Vec<PrizeDoc>,
    pub acts: Vec<ActDoc>,
    pub measures: Vec<MeasureDoc>,
    #[serde(default)]
    pub menus: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub events: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrizeDoc {
    pub name: String,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lotteries: Option<BTreeMap<String, BTreeMap<String, f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub name: String,
    pub probs: BTreeMap<String, f64>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_scenario()
}

/// Canonical pretty-printed JSON for a scenario.
pub fn scenario_to_json(sc: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioDocument::from_scenario(sc)).expect("scenario documents always serialize")
}

fn at(path: String, e: Error) -> Error {
    Error::Parse(format!("{path}: {e}"))
}

fn state_index(states: &StateSpace, path: &str, name: &str) -> Result<usize> {
    states.index_of(name).ok_or_else(|| {
        at(
            path.to_string(),
            Error::UnknownReference {
                kind: "state",
                name: name.to_string(),
            },
        )
    })
}

impl ScenarioDocument {
    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.format != SCENARIO_FORMAT {
            return Err(Error::Parse(format!(
                "format: expected \"{SCENARIO_FORMAT}\", found \"{}\"",
                self.format
            )));
        }
        let states = StateSpace::new(self.states.clone()).map_err(|e| at("states".into(), e))?;
        let n = states.len();

        // declared prizes first, then one synthesized prize per new shorthand utility level
        let mut prize_list: Vec<(String, f64)> = self.prizes.iter().map(|p| (p.name.clone(), p.utility)).collect();
        for (i, a) in self.acts.iter().enumerate() {
            if let Some(us) = &a.utilities {
                for u in us.values() {
                    if !u.is_finite() {
                        return Err(at(
                            format!("acts[{i}] ('{}')", a.name),
                            Error::invalid("utility", u.to_string(), "not finite"),
                        ));
                    }
                    if !prize_list.iter().any(|(_, v)| v == u) {
                        prize_list.push((utility_prize_name(*u), *u));
                    }
                }
            }
        }
        if prize_list.len() == 1 {
            let v = prize_list[0].1 + 1.0;
            prize_list.push((utility_prize_name(v), v));
        }
        let prizes = PrizeSpace::new(prize_list).map_err(|e| at("prizes".into(), e))?;

        let mut acts = Vec::with_capacity(self.acts.len());
        for (i, a) in self.acts.iter().enumerate() {
            let path = format!("acts[{i}] ('{}')", a.name);
            let act = match (&a.utilities, &a.lotteries) {
                (Some(us), None) => {
                    let mut per_state = vec![None; n];
                    for (s, u) in us {
                        per_state[state_index(&states, &path, s)?] = Some(*u);
                    }
                    let us = per_state
                        .into_iter()
                        .enumerate()
                        .map(|(s, u)| {
                            u.ok_or_else(|| Error::Parse(format!("{path}: no utility for state '{}'", states.name(s))))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Act::from_utilities(a.name.clone(), &us, &states, &prizes).map_err(|e| at(path, e))?
                }
                (None, Some(ls)) => {
                    let mut per_state = vec![None; n];
                    for (s, lottery) in ls {
                        let mut probs = vec![0.0; prizes.len()];
                        for (y, p) in lottery {
                            let idx = prizes.index_of(y).ok_or_else(|| {
                                at(
                                    path.clone(),
                                    Error::UnknownReference {
                                        kind: "prize",
                                        name: y.clone(),
                                    },
                                )
                            })?;
                            probs[idx] = *p;
                        }
                        let l = Lottery::new(probs, &prizes)
                            .map_err(|e| Error::Parse(format!("{path}, state '{s}': {e}")))?;
                        per_state[state_index(&states, &path, s)?] = Some(l);
                    }
                    let outcomes = per_state
                        .into_iter()
                        .enumerate()
                        .map(|(s, l)| {
                            l.ok_or_else(|| Error::Parse(format!("{path}: no lottery for state '{}'", states.name(s))))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Act::new(a.name.clone(), outcomes, &states, &prizes).map_err(|e| at(path, e))?
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "{path}: give exactly one of \"utilities\" or \"lotteries\""
                    )))
                }
            };
            acts.push(act);
        }

        let mut entries = Vec::with_capacity(self.measures.len());
        for (i, m) in self.measures.iter().enumerate() {
            let path = format!("measures[{i}] ('{}')", m.name);
            let mut probs = vec![0.0; n];
            for (s, p) in &m.probs {
                probs[state_index(&states, &path, s)?] = *p;
            }
            let measure = Measure::labeled(&m.name, probs).map_err(|e| at(path, e))?;
            entries.push(BeliefEntry::new(m.name.clone(), measure, m.weight));
        }
        if entries.iter().any(|e| e.label.is_empty()) {
            return Err(Error::Parse("measures: every measure needs a name".into()));
        }
        let beliefs = WeightedBeliefs::new(entries).map_err(|e| at("measures".into(), e))?;

        let mut menus = Vec::with_capacity(self.menus.len());
        for (name, members) in &self.menus {
            let path = format!("menus.{name}");
            let acts_in = members
                .iter()
                .map(|m| {
                    acts.iter().find(|a: &&Act| a.name() == m).cloned().ok_or_else(|| {
                        at(
                            path.clone(),
                            Error::UnknownReference {
                                kind: "act",
                                name: m.clone(),
                            },
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            menus.push((name.clone(), Menu::new(acts_in).map_err(|e| at(path, e))?));
        }

        let mut events = Vec::with_capacity(self.events.len());
        for (name, members) in &self.events {
            let path = format!("events.{name}");
            let idx = members
                .iter()
                .map(|s| state_index(&states, &path, s))
                .collect::<Result<Vec<_>>>()?;
            events.push((name.clone(), Event::new(n, idx).map_err(|e| at(path, e))?));
        }

        Scenario::new(states, prizes, acts, menus, beliefs, events)
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        let states = sc.states();
        let prizes = sc.prizes();
        let acts = sc
            .acts()
            .iter()
            .map(|a| {
                // shorthand only when it parses back to the very same prizes
                let shorthand: Option<Vec<f64>> = a
                    .outcomes()
                    .iter()
                    .map(|l| {
                        let y = l.probs().iter().position(|p| *p == 1.0)?;
                        let u = prizes.utility(y);
                        (prizes.index_of_utility(u) == Some(y)).then_some(u)
                    })
                    .collect();
                match shorthand {
                    Some(us) => ActDoc {
                        name: a.name().to_string(),
                        utilities: Some(states.names().iter().cloned().zip(us).collect()),
                        lotteries: None,
                    },
                    None => ActDoc {
                        name: a.name().to_string(),
                        utilities: None,
                        lotteries: Some(
                            states
                                .names()
                                .iter()
                                .zip(a.outcomes())
                                .map(|(s, l)| {
                                    let support = prizes
                                        .names()
                                        .iter()
                                        .zip(l.probs())
                                        .filter(|(_, p)| **p > 0.0)
                                        .map(|(y, p)| (y.clone(), *p))
                                        .collect();
                                    (s.clone(), support)
                                })
                                .collect(),
                        ),
                    },
                }
            })
            .collect();
        ScenarioDocument {
            format: SCENARIO_FORMAT.to_string(),
            states: states.names().to_vec(),
            prizes: prizes
                .names()
                .iter()
                .zip(prizes.utilities())
                .map(|(name, u)| PrizeDoc {
                    name: name.clone(),
                    utility: *u,
                })
                .collect(),
            acts,
            measures: sc
                .beliefs()
                .entries()
                .iter()
                .map(|e| MeasureDoc {
                    name: e.label.clone(),
                    probs: states
                        .names()
                        .iter()
                        .cloned()
                        .zip(e.measure.probs().iter().copied())
                        .collect(),
                    weight: e.weight,
                })
                .collect(),
            menus: sc
                .menus()
                .iter()
                .map(|(name, m)| (name.clone(), m.names().map(str::to_string).collect()))
                .collect(),
            events: sc
                .events()
                .iter()
                .map(|(name, e)| {
                    (
                        name.clone(),
                        e.indices().into_iter().map(|s| states.name(s).to_string()).collect(),
                    )
                })
                .collect(),
        }
    }
}

//! Decision making under ambiguity with minimax weighted expected regret.
//!
//! The crate covers the decision model (states, prizes, Anscombe–Aumann
//! acts, weighted sets of probability measures), five decision rules,
//! likelihood updating of weighted beliefs, randomized axiom audits and
//! belief-weight convergence experiments.

pub mod audit;
pub mod convergence;
pub mod doc;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod model;
pub mod regret;
pub mod update;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Act, BeliefEntry, Event, Lottery, Measure, Menu, PrizeSpace, Scenario, StateSpace, WeightedBeliefs};
pub use regret::{PreferenceRanking, Rule, EPS_PREF};

//! Executable axiom checks.
//!
//! Each axiom is evaluated on concrete probes: acts, menus and mixing
//! coefficients drawn from seeded random scenarios (or supplied directly
//! through [`check_axiom`]). A probe is a violation only when one side of
//! the axiom holds (gap ≥ −ε) while the other fails by more than 10·ε, so
//! tolerance-boundary noise never produces a counterexample. Every
//! violation comes with a [`Witness`] that replays from its own scenario.

mod generate;
mod probes;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generate::{random_event, random_scenario, ScenarioParams};
pub use probes::never_strictly_optimal;

use crate::doc::ScenarioDocument;
use crate::error::{Error, Result};
use crate::exec::{trial_rng, Execution};
use crate::fixtures;
use crate::model::{splice, splice_menu, Act, Event, Measure, Menu, PrizeSpace, Scenario, WeightedBeliefs};
use crate::regret::{max_weighted_expected_regret, Evaluation, Rule, EPS_PREF};
use crate::update::{belief_distance, event_weight, likelihood_update};
use probes::{RawComparison, Trial, TrialRecord};

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    Transitivity,
    Completeness,
    Nontriviality,
    Monotonicity,
    MixtureContinuity,
    AmbiguityAversion,
    Independence,
    /// Menu independence for constant acts.
    ConstantMenuIndependence,
    /// Independence of never strictly optimal alternatives.
    Ina,
    Boundedness,
    CIndependence,
    /// Constant-act betweenness on menus with state-independent outcome
    /// distributions.
    Axiom12,
    /// Menu-dependent dynamic consistency.
    Mdc,
}

impl AxiomId {
    pub const ALL: [AxiomId; 13] = [
        AxiomId::Transitivity,
        AxiomId::Completeness,
        AxiomId::Nontriviality,
        AxiomId::Monotonicity,
        AxiomId::MixtureContinuity,
        AxiomId::AmbiguityAversion,
        AxiomId::Independence,
        AxiomId::ConstantMenuIndependence,
        AxiomId::Ina,
        AxiomId::Boundedness,
        AxiomId::CIndependence,
        AxiomId::Axiom12,
        AxiomId::Mdc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::Transitivity => "transitivity",
            AxiomId::Completeness => "completeness",
            AxiomId::Nontriviality => "nontriviality",
            AxiomId::Monotonicity => "monotonicity",
            AxiomId::MixtureContinuity => "mixture-continuity",
            AxiomId::AmbiguityAversion => "ambiguity-aversion",
            AxiomId::Independence => "independence",
            AxiomId::ConstantMenuIndependence => "constant-menu-independence",
            AxiomId::Ina => "ina",
            AxiomId::Boundedness => "boundedness",
            AxiomId::CIndependence => "c-independence",
            AxiomId::Axiom12 => "axiom12",
            AxiomId::Mdc => "mdc",
        }
    }

    /// Number of acts a [`Probe`] must name, in role order.
    pub fn arity(self) -> usize {
        match self {
            AxiomId::Nontriviality | AxiomId::Boundedness => 0,
            AxiomId::Transitivity | AxiomId::MixtureContinuity | AxiomId::Independence | AxiomId::CIndependence => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownReference {
                kind: "axiom",
                name: s.to_string(),
            })
    }
}

/// How a mixture comparison picks its menu.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MenuPolicy {
    /// pM + (1−p)h, as in the Independence axiom.
    #[default]
    Transformed,
    /// M extended by the mixed acts.
    Fixed,
}

impl MenuPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            MenuPolicy::Transformed => "transformed",
            MenuPolicy::Fixed => "fixed",
        }
    }
}

impl FromStr for MenuPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transformed" => Ok(MenuPolicy::Transformed),
            "fixed" => Ok(MenuPolicy::Fixed),
            _ => Err(Error::UnknownReference {
                kind: "menu policy",
                name: s.to_string(),
            }),
        }
    }
}

/// Belief update used for conditional preferences in MDC probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Updater {
    #[default]
    #[serde(rename = "likelihood")]
    Likelihood,
    #[serde(rename = "mbm")]
    MeasureByMeasure,
}

impl Updater {
    pub fn as_str(self) -> &'static str {
        match self {
            Updater::Likelihood => "likelihood",
            Updater::MeasureByMeasure => "mbm",
        }
    }
}

impl FromStr for Updater {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "likelihood" => Ok(Updater::Likelihood),
            "mbm" => Ok(Updater::MeasureByMeasure),
            _ => Err(Error::UnknownReference {
                kind: "updater",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Supported,
    Counterexample,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Supported => "supported",
            Verdict::Counterexample => "counterexample",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Result of a single probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Violation,
    /// A premise was not met, or a comparison fell inside the tolerance band.
    Inconclusive,
}

/// Relation a comparison asserts of its left act against its right act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    /// left ⪰ right
    Weak,
    /// left ≻ right
    Strict,
    /// left ∼ right
    Indifferent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    /// Between ε and 10·ε from the boundary: neither.
    Borderline,
}

impl Claim {
    /// Classifies an oriented gap (positive when left is better).
    pub fn status(self, gap: f64) -> Status {
        let margin = 10.0 * EPS_PREF;
        let (holds, fails) = match self {
            Claim::Weak => (gap >= -EPS_PREF, gap < -margin),
            Claim::Strict => (gap > EPS_PREF, gap < -margin),
            Claim::Indifferent => (gap.abs() <= EPS_PREF, gap.abs() > margin),
        };
        if holds {
            Status::Holds
        } else if fails {
            Status::Fails
        } else {
            Status::Borderline
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Premise,
    Contradicted,
    Context,
}

/// Which beliefs a comparison uses: the scenario's own, or those updated
/// on the witness event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeliefSource {
    Prior,
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub role: Role,
    pub menu: String,
    pub left: String,
    pub right: String,
    pub claim: Claim,
    pub beliefs: BeliefSource,
    pub gap: f64,
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

pub const WITNESS_FORMAT: &str = "mwer-witness/1";

/// A violating probe, self-contained: the scenario holds every act, menu and
/// event the comparisons refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub axiom: AxiomId,
    pub rule: Rule,
    pub policy: MenuPolicy,
    pub updater: Updater,
    pub seed: Option<u64>,
    pub trial: Option<u64>,
    pub parameters: BTreeMap<String, f64>,
    pub event: Option<String>,
    pub comparisons: Vec<Comparison>,
    pub scenario: Scenario,
}

fn unused_name(sc: &Scenario, taken: impl Fn(&Scenario, &str) -> bool, stem: &str) -> String {
    let mut name = stem.to_string();
    while taken(sc, &name) {
        name.push('\'');
    }
    name
}

impl Witness {
    fn build(
        axiom: AxiomId,
        rule: Rule,
        opts: &AuditOptions,
        seed: Option<u64>,
        trial: Option<u64>,
        base: &Scenario,
        rec: TrialRecord,
    ) -> Result<Witness> {
        let mut sc = base.clone();
        let mut menu_names = Vec::with_capacity(rec.menus.len());
        for (i, m) in rec.menus.into_iter().enumerate() {
            let existing = sc.menus().iter().find(|(_, other)| *other == m).map(|(n, _)| n.clone());
            let name = match existing {
                Some(n) => n,
                None => {
                    let name = unused_name(&sc, |s, n| s.menu(n).is_ok(), &format!("W{i}"));
                    sc = sc.with_menu(name.clone(), m)?;
                    name
                }
            };
            menu_names.push(name);
        }
        let event = match rec.event {
            Some(e) => {
                let name = unused_name(&sc, |s, n| s.event(n).is_ok(), "E");
                sc = sc.with_event(name.clone(), e)?;
                Some(name)
            }
            None => None,
        };
        let comparisons = rec
            .comparisons
            .into_iter()
            .map(|c: RawComparison| Comparison {
                role: c.role,
                menu: menu_names[c.menu].clone(),
                left: c.left,
                right: c.right,
                claim: c.claim,
                beliefs: c.beliefs,
                gap: c.gap,
            })
            .collect();
        Ok(Witness {
            axiom,
            rule,
            policy: opts.policy,
            updater: opts.updater,
            seed,
            trial,
            parameters: rec.parameters,
            event,
            comparisons,
            scenario: sc,
        })
    }

    /// Recomputes every comparison from the scenario; true iff all premises
    /// still hold and every contradicted comparison still fails.
    pub fn replay(&self) -> Result<bool> {
        let sc = &self.scenario;
        let conditional = match &self.event {
            Some(e) => Some(self.updater.apply(sc.beliefs(), sc.event(e)?)?),
            None => None,
        };
        let mut reproduced = true;
        let mut contradicted = 0;
        for c in &self.comparisons {
            let menu = sc.menu(&c.menu)?;
            let get = |name: &str| menu.get(name).ok_or_else(|| Error::NotInMenu(name.to_string()));
            let beliefs = match c.beliefs {
                BeliefSource::Prior => sc.beliefs(),
                BeliefSource::Conditional => conditional
                    .as_ref()
                    .ok_or_else(|| Error::Parse("conditional comparison without a witness event".into()))?,
            };
            let gap = Evaluation::new(self.rule, menu, beliefs, sc.prizes())?.gap(get(&c.left)?, get(&c.right)?)?;
            let status = c.claim.status(gap);
            match c.role {
                Role::Premise => reproduced &= status == Status::Holds,
                Role::Contradicted => {
                    contradicted += 1;
                    reproduced &= status == Status::Fails;
                }
                Role::Context => {}
            }
        }
        Ok(reproduced && contradicted > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&WitnessDocument::from(self)).expect("witness documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Witness> {
        let doc: WitnessDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.try_into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDocument {
    pub format: String,
    pub axiom: AxiomId,
    pub rule: Rule,
    pub policy: MenuPolicy,
    pub updater: Updater,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    pub comparisons: Vec<Comparison>,
    pub scenario: ScenarioDocument,
}

impl From<&Witness> for WitnessDocument {
    fn from(w: &Witness) -> Self {
        WitnessDocument {
            format: WITNESS_FORMAT.to_string(),
            axiom: w.axiom,
            rule: w.rule,
            policy: w.policy,
            updater: w.updater,
            seed: w.seed,
            trial: w.trial,
            parameters: w.parameters.clone(),
            event: w.event.clone(),
            comparisons: w.comparisons.clone(),
            scenario: ScenarioDocument::from_scenario(&w.scenario),
        }
    }
}

impl TryFrom<WitnessDocument> for Witness {
    type Error = Error;

    fn try_from(doc: WitnessDocument) -> Result<Witness> {
        if doc.format != WITNESS_FORMAT {
            return Err(Error::Parse(format!(
                "format: expected \"{WITNESS_FORMAT}\", found \"{}\"",
                doc.format
            )));
        }
        Ok(Witness {
            axiom: doc.axiom,
            rule: doc.rule,
            policy: doc.policy,
            updater: doc.updater,
            seed: doc.seed,
            trial: doc.trial,
            parameters: doc.parameters,
            event: doc.event,
            comparisons: doc.comparisons,
            scenario: doc.scenario.to_scenario()?,
        })
    }
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessDocument::from(self).serialize(serializer)
    }
}

// ---------------------------------------------------------------------------
// Reports and drivers
// ---------------------------------------------------------------------------

/// Settings shared by every probe of an audit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditOptions {
    pub policy: MenuPolicy,
    pub updater: Updater,
    /// `None` uses [`ScenarioParams::for_rule`].
    pub params: Option<ScenarioParams>,
}

impl AuditOptions {
    pub fn with_policy(policy: MenuPolicy) -> Self {
        AuditOptions {
            policy,
            ..AuditOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub axiom: AxiomId,
    pub rule: Rule,
    pub policy: MenuPolicy,
    pub updater: Updater,
    pub trials: u64,
    pub decisive: u64,
    pub inconclusive: u64,
    pub violations: u64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl AuditReport {
    fn new(axiom: AxiomId, rule: Rule, opts: &AuditOptions) -> Self {
        AuditReport {
            axiom,
            rule,
            policy: opts.policy,
            updater: opts.updater,
            trials: 0,
            decisive: 0,
            inconclusive: 0,
            violations: 0,
            verdict: Verdict::Inconclusive,
            witness: None,
        }
    }

    fn tally(&mut self, outcome: Outcome, witness: Option<Witness>) {
        self.trials += 1;
        match outcome {
            Outcome::Holds => self.decisive += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
            Outcome::Violation => {
                self.decisive += 1;
                self.violations += 1;
                if self.witness.is_none() {
                    self.witness = witness;
                }
            }
        }
    }

    fn settle(mut self) -> Self {
        self.verdict = if self.violations > 0 {
            Verdict::Counterexample
        } else if self.decisive == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Supported
        };
        self
    }
}

fn run_trial(
    axiom: AxiomId,
    rule: Rule,
    opts: &AuditOptions,
    seed: u64,
    trial: u64,
) -> Result<(Outcome, Option<Witness>)> {
    let mut rng = trial_rng(seed, trial);
    let (sc, rec) = probes::random_probe(axiom, rule, opts, &mut rng)?;
    let outcome = rec.outcome;
    let witness = if outcome == Outcome::Violation {
        Some(Witness::build(axiom, rule, opts, Some(seed), Some(trial), &sc, rec)?)
    } else {
        None
    };
    Ok((outcome, witness))
}

fn check_rule_supports(axiom: AxiomId, rule: Rule) -> Result<()> {
    if axiom == AxiomId::Mdc && rule != Rule::Mwer {
        return Err(Error::RulePrecondition {
            rule: rule.to_string(),
            reason: "the MDC audit applies to MWER".into(),
        });
    }
    Ok(())
}

/// Nontriviality probe on the delivery problem (SEU uses Pr1 alone).
fn delivery_nontriviality(rule: Rule) -> Result<Outcome> {
    let sc = fixtures::delivery();
    let single;
    let beliefs = if rule == Rule::Seu {
        single = WeightedBeliefs::single(Measure::point_mass(0, 2));
        &single
    } else {
        sc.beliefs()
    };
    let mut t = Trial::new(rule, sc.prizes(), beliefs);
    probes::check_nontriviality(&mut t, sc.menu("M0")?)
}

/// Runs `trials` random probes and aggregates them. The verdict is
/// counterexample if any probe is a violation, inconclusive if no probe was
/// decisive, supported otherwise. Nontriviality also probes the delivery
/// problem.
pub fn audit(
    axiom: AxiomId,
    rule: Rule,
    opts: &AuditOptions,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<AuditReport> {
    if trials == 0 {
        return Err(Error::invalid("trial count", "0", "must be positive"));
    }
    check_rule_supports(axiom, rule)?;
    let results = exec.map(trials, |i| run_trial(axiom, rule, opts, seed, i));
    let mut report = AuditReport::new(axiom, rule, opts);
    for r in results {
        let (outcome, witness) = r?;
        report.tally(outcome, witness);
    }
    if axiom == AxiomId::Nontriviality {
        report.tally(delivery_nontriviality(rule)?, None);
    }
    Ok(report.settle())
}

/// The lowest-index violating trial within `budget`, if any. Absence of a
/// witness is not evidence that the axiom holds.
pub fn find_counterexample(
    axiom: AxiomId,
    rule: Rule,
    opts: &AuditOptions,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<Option<Witness>> {
    if budget == 0 {
        return Err(Error::invalid("budget", "0", "must be positive"));
    }
    check_rule_supports(axiom, rule)?;
    exec.find_first(budget, |i| match run_trial(axiom, rule, opts, seed, i) {
        Ok((_, Some(w))) => Some(Ok(w)),
        Ok((_, None)) => None,
        Err(e) => Some(Err(e)),
    })
    .transpose()
}

/// [`find_counterexample`] as a report: counterexample or inconclusive.
pub fn search(
    axiom: AxiomId,
    rule: Rule,
    opts: &AuditOptions,
    budget: u64,
    seed: u64,
    exec: Execution,
) -> Result<AuditReport> {
    let mut report = AuditReport::new(axiom, rule, opts);
    match find_counterexample(axiom, rule, opts, budget, seed, exec)? {
        Some(w) => {
            report.trials = w.trial.map_or(budget, |t| t + 1);
            report.violations = 1;
            report.decisive = 1;
            report.verdict = Verdict::Counterexample;
            report.witness = Some(w);
        }
        None => {
            report.trials = budget;
            report.verdict = Verdict::Inconclusive;
        }
    }
    Ok(report)
}

/// Acts, menus and coefficients for [`check_axiom`]. `acts` are in the
/// axiom's role order: (f, g, h) for transitivity, mixture continuity,
/// independence and C-independence; (f, h) for axiom 12; (l, l') for
/// constant-menu independence; (f, g) otherwise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Probe {
    pub menu: String,
    pub acts: Vec<String>,
    pub p: Option<f64>,
    /// M' for constant-menu independence and INA.
    pub other_menu: Option<String>,
    /// Conditioning event for MDC.
    pub event: Option<String>,
    pub updater: Updater,
}

/// Evaluates one explicit probe.
pub fn check_axiom(
    axiom: AxiomId,
    rule: Rule,
    sc: &Scenario,
    policy: MenuPolicy,
    probe: &Probe,
) -> Result<AuditReport> {
    check_rule_supports(axiom, rule)?;
    if rule == Rule::Seu && sc.beliefs().len() != 1 {
        return Err(Error::RulePrecondition {
            rule: rule.to_string(),
            reason: format!("needs exactly one measure, found {}", sc.beliefs().len()),
        });
    }
    let m = sc.menu(&probe.menu)?;
    let acts = probe
        .acts
        .iter()
        .map(|n| {
            sc.act(n).ok_or_else(|| Error::UnknownReference {
                kind: "act",
                name: n.clone(),
            })
        })
        .collect::<Result<Vec<&Act>>>()?;
    if acts.len() != axiom.arity() {
        return Err(Error::ProbePrecondition(format!(
            "{axiom} needs {} act(s), got {}",
            axiom.arity(),
            acts.len()
        )));
    }
    let p = || {
        probe
            .p
            .ok_or_else(|| Error::ProbePrecondition(format!("{axiom} needs a mixing coefficient")))
    };
    let other = || {
        let name = probe
            .other_menu
            .as_deref()
            .ok_or_else(|| Error::ProbePrecondition(format!("{axiom} needs a second menu")))?;
        sc.menu(name)
    };
    let opts = AuditOptions {
        policy,
        updater: probe.updater,
        params: None,
    };
    let mut t = Trial::new(rule, sc.prizes(), sc.beliefs());
    let outcome = match axiom {
        AxiomId::Transitivity => probes::check_transitivity(&mut t, m, acts[0], acts[1], acts[2])?,
        AxiomId::Completeness => probes::check_completeness(&mut t, m, acts[0], acts[1])?,
        AxiomId::Nontriviality => probes::check_nontriviality(&mut t, m)?,
        AxiomId::Monotonicity => probes::check_monotonicity(&mut t, m, acts[0], acts[1])?,
        AxiomId::MixtureContinuity => probes::check_mixture_continuity(&mut t, m, acts[0], acts[1], acts[2])?,
        AxiomId::AmbiguityAversion => probes::check_ambiguity_aversion(&mut t, m, acts[0], acts[1], p()?)?,
        AxiomId::Independence => probes::check_independence(&mut t, policy, m, acts[0], acts[1], acts[2], p()?)?,
        AxiomId::CIndependence => probes::check_c_independence(&mut t, policy, m, acts[0], acts[1], acts[2], p()?)?,
        AxiomId::ConstantMenuIndependence => {
            probes::check_constant_menu_independence(&mut t, m, other()?, acts[0], acts[1])?
        }
        AxiomId::Ina => probes::check_ina(&mut t, m, other()?, acts[0], acts[1])?,
        AxiomId::Boundedness => probes::check_boundedness(&mut t, m)?,
        AxiomId::Axiom12 => probes::check_axiom12(&mut t, m, acts[0], acts[1], p()?)?,
        AxiomId::Mdc => {
            let name = probe
                .event
                .as_deref()
                .ok_or_else(|| Error::ProbePrecondition("mdc needs an event".into()))?;
            let e = sc.event(name)?;
            t.condition_on(e, probe.updater)?;
            probes::check_mdc(&mut t, m, e, acts[0], acts[1])?
        }
    };
    let rec = t.finish(outcome);
    let mut report = AuditReport::new(axiom, rule, &opts);
    let witness = if outcome == Outcome::Violation {
        Some(Witness::build(axiom, rule, &opts, None, None, sc, rec)?)
    } else {
        None
    };
    report.tally(outcome, witness);
    Ok(report.settle())
}

// ---------------------------------------------------------------------------
// Rule-by-axiom matrix
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Table4Row {
    #[serde(rename = "Ax 1-6,8-10")]
    Core,
    #[serde(rename = "Ind")]
    Independence,
    #[serde(rename = "C-Ind")]
    CIndependence,
    #[serde(rename = "Ax 12")]
    Axiom12,
}

impl Table4Row {
    pub const ALL: [Table4Row; 4] = [
        Table4Row::Core,
        Table4Row::Independence,
        Table4Row::CIndependence,
        Table4Row::Axiom12,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Table4Row::Core => "Ax 1-6,8-10",
            Table4Row::Independence => "Ind",
            Table4Row::CIndependence => "C-Ind",
            Table4Row::Axiom12 => "Ax 12",
        }
    }

    pub fn axioms(self) -> &'static [AxiomId] {
        match self {
            Table4Row::Core => &[
                AxiomId::Transitivity,
                AxiomId::Completeness,
                AxiomId::Nontriviality,
                AxiomId::Monotonicity,
                AxiomId::MixtureContinuity,
                AxiomId::AmbiguityAversion,
                AxiomId::ConstantMenuIndependence,
                AxiomId::Ina,
                AxiomId::Boundedness,
            ],
            Table4Row::Independence => &[AxiomId::Independence],
            Table4Row::CIndependence => &[AxiomId::CIndependence],
            Table4Row::Axiom12 => &[AxiomId::Axiom12],
        }
    }

    /// Independence is read with its own transformed menus; C-independence
    /// with mixtures appended to a fixed menu. The other rows name their
    /// menus explicitly, so the policy does not affect them.
    pub fn policy(self) -> MenuPolicy {
        match self {
            Table4Row::Independence => MenuPolicy::Transformed,
            _ => MenuPolicy::Fixed,
        }
    }

    /// Whether the published table marks the cell as satisfied.
    pub fn expected(self, rule: Rule) -> bool {
        match self {
            Table4Row::Core => true,
            Table4Row::Independence => rule != Rule::Mmeu,
            Table4Row::CIndependence => matches!(rule, Rule::Seu | Rule::Mmeu),
            Table4Row::Axiom12 => matches!(rule, Rule::Seu | Rule::Reg | Rule::Mer),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table4Cell {
    pub row: Table4Row,
    pub rule: Rule,
    /// Marked as satisfied in the published table.
    pub expected: bool,
    pub verdict: Verdict,
    pub trials: u64,
    pub violations: u64,
    pub reports: Vec<AuditReport>,
}

impl Table4Cell {
    /// Satisfied cells must be supported; blank cells may be counterexample
    /// or inconclusive.
    pub fn consistent(&self) -> bool {
        if self.expected {
            self.verdict == Verdict::Supported
        } else {
            self.verdict != Verdict::Supported && (self.violations == 0) == (self.verdict != Verdict::Counterexample)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table4Report {
    pub trials: u64,
    pub budget: u64,
    pub seed: u64,
    pub cells: Vec<Table4Cell>,
}

impl Table4Report {
    pub fn cell(&self, row: Table4Row, rule: Rule) -> &Table4Cell {
        self.cells
            .iter()
            .find(|c| c.row == row && c.rule == rule)
            .expect("every row/rule pair has a cell")
    }
}

/// Audits every satisfied cell with `trials` probes per axiom and searches
/// every blank cell for a counterexample within `budget` trials.
pub fn table4_matrix(trials: u64, budget: u64, seed: u64, exec: Execution) -> Result<Table4Report> {
    if trials == 0 || budget == 0 {
        return Err(Error::invalid(
            "matrix counts",
            format!("{trials}/{budget}"),
            "must be positive",
        ));
    }
    let mut cells = Vec::new();
    for row in Table4Row::ALL {
        let opts = AuditOptions::with_policy(row.policy());
        for rule in Rule::ALL {
            let expected = row.expected(rule);
            let reports = row
                .axioms()
                .iter()
                .map(|&axiom| {
                    if expected {
                        audit(axiom, rule, &opts, trials, seed, exec)
                    } else {
                        search(axiom, rule, &opts, budget, seed, exec)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let violations = reports.iter().map(|r| r.violations).sum();
            let verdict = if violations > 0 {
                Verdict::Counterexample
            } else if reports.iter().all(|r| r.verdict == Verdict::Supported) {
                Verdict::Supported
            } else {
                Verdict::Inconclusive
            };
            cells.push(Table4Cell {
                row,
                rule,
                expected,
                verdict,
                trials: reports.iter().map(|r| r.trials).sum(),
                violations,
                reports,
            });
        }
    }
    Ok(Table4Report {
        trials,
        budget,
        seed,
        cells,
    })
}

// ---------------------------------------------------------------------------
// Dynamic identities
// ---------------------------------------------------------------------------

/// |reg_{MEh}(fEh) − P̄⁺(E)·reg_{M, P⁺|E}(f)| under MWER.
pub fn check_theorem2_identity(
    beliefs: &WeightedBeliefs,
    event: &Event,
    menu: &Menu,
    f: &Act,
    h: &Act,
    prizes: &PrizeSpace,
) -> Result<f64> {
    if !menu.contains(h) {
        return Err(Error::NotInMenu(h.name().to_string()));
    }
    let updated = likelihood_update(beliefs, event)?;
    let conditional = max_weighted_expected_regret(f, menu, &updated.beliefs, prizes)?;
    let spliced = max_weighted_expected_regret(&splice(f, event, h)?, &splice_menu(menu, event, h)?, beliefs, prizes)?;
    Ok((spliced - event_weight(beliefs, event) * conditional).abs())
}

/// Largest pairwise distance between (P⁺|E1)|E2, (P⁺|E2)|E1 and P⁺|(E1∩E2).
pub fn check_prop1(beliefs: &WeightedBeliefs, e1: &Event, e2: &Event) -> Result<f64> {
    let direct = likelihood_update(beliefs, &e1.intersection(e2))?.beliefs;
    let one_two = likelihood_update(&likelihood_update(beliefs, e1)?.beliefs, e2)?.beliefs;
    let two_one = likelihood_update(&likelihood_update(beliefs, e2)?.beliefs, e1)?.beliefs;
    Ok(belief_distance(&direct, &one_two)
        .max(belief_distance(&direct, &two_one))
        .max(belief_distance(&one_two, &two_one)))
}

/// MDC for MWER on one instance: the conditional preference between `f`
/// and `g` on the named event against the spliced preference for every h
/// in the menu.
pub fn check_mdc(sc: &Scenario, menu: &str, event: &str, f: &str, g: &str, updater: Updater) -> Result<AuditReport> {
    let probe = Probe {
        menu: menu.to_string(),
        acts: vec![f.to_string(), g.to_string()],
        event: Some(event.to_string()),
        updater,
        ..Probe::default()
    };
    check_axiom(AxiomId::Mdc, Rule::Mwer, sc, MenuPolicy::default(), &probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BeliefEntry, StateSpace};

    fn coin_probe(acts: &[&str], p: Option<f64>) -> Probe {
        Probe {
            menu: "M".into(),
            acts: acts.iter().map(|s| s.to_string()).collect(),
            p,
            ..Probe::default()
        }
    }

    #[test]
    fn axiom_names_round_trip() {
        for a in AxiomId::ALL {
            assert_eq!(a.as_str().parse::<AxiomId>().unwrap(), a);
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.as_str()));
        }
        assert!("symmetry".parse::<AxiomId>().is_err());
    }

    #[test]
    fn claim_status_bands() {
        assert_eq!(Claim::Weak.status(0.0), Status::Holds);
        assert_eq!(Claim::Weak.status(-5e-9), Status::Borderline);
        assert_eq!(Claim::Weak.status(-1e-7), Status::Fails);
        assert_eq!(Claim::Indifferent.status(5e-10), Status::Holds);
        assert_eq!(Claim::Indifferent.status(-1e-6), Status::Fails);
        assert_eq!(Claim::Strict.status(1e-6), Status::Holds);
        assert_eq!(Claim::Strict.status(0.0), Status::Borderline);
    }

    #[test]
    fn mmeu_independence_fails_on_the_coin() {
        let sc = fixtures::coin();
        let r = check_axiom(
            AxiomId::Independence,
            Rule::Mmeu,
            &sc,
            MenuPolicy::Transformed,
            &coin_probe(&["up", "down", "up"], Some(0.5)),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Counterexample);
        let w = r.witness.unwrap();
        assert!(w.replay().unwrap());
        let contradicted: Vec<&Comparison> = w.comparisons.iter().filter(|c| c.role == Role::Contradicted).collect();
        assert_eq!(contradicted.len(), 1);
        // 0.5·up + 0.5·up has min-EU 0, 0.5·down + 0.5·up has 0.5
        assert_eq!(contradicted[0].gap, -0.5);
        let back = Witness::from_json(&w.to_json()).unwrap();
        assert!(back.replay().unwrap());
    }

    #[test]
    fn regret_rules_satisfy_independence_on_the_coin() {
        let sc = fixtures::coin();
        for rule in [Rule::Mer, Rule::Mwer, Rule::Reg] {
            let r = check_axiom(
                AxiomId::Independence,
                rule,
                &sc,
                MenuPolicy::Transformed,
                &coin_probe(&["up", "down", "up"], Some(0.5)),
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::Supported, "{rule}");
        }
    }

    #[test]
    fn transitivity_is_supported() {
        let sc = fixtures::delivery();
        let probe = Probe {
            menu: "M1".into(),
            acts: vec!["new".into(), "cont".into(), "back".into()],
            ..Probe::default()
        };
        let r = check_axiom(AxiomId::Transitivity, Rule::Mwer, &sc, MenuPolicy::Fixed, &probe).unwrap();
        assert_ne!(r.verdict, Verdict::Counterexample);
    }

    #[test]
    fn probe_preconditions_are_enforced() {
        let sc = fixtures::coin();
        let err = check_axiom(
            AxiomId::Independence,
            Rule::Mmeu,
            &sc,
            MenuPolicy::Transformed,
            &coin_probe(&["up", "down", "up"], Some(1.5)),
        );
        assert!(matches!(err, Err(Error::ProbePrecondition(_))));
        let err = check_axiom(
            AxiomId::Independence,
            Rule::Mmeu,
            &sc,
            MenuPolicy::Transformed,
            &coin_probe(&["up", "down"], Some(0.5)),
        );
        assert!(matches!(err, Err(Error::ProbePrecondition(_))));
        let err = check_axiom(
            AxiomId::CIndependence,
            Rule::Mmeu,
            &sc,
            MenuPolicy::Fixed,
            &coin_probe(&["up", "down", "up"], Some(0.5)),
        );
        assert!(matches!(err, Err(Error::ProbePrecondition(_))));
        let err = check_axiom(
            AxiomId::Transitivity,
            Rule::Seu,
            &sc,
            MenuPolicy::Fixed,
            &coin_probe(&["up", "down", "up"], None),
        );
        assert!(matches!(err, Err(Error::RulePrecondition { .. })));
        let err = check_axiom(
            AxiomId::Mdc,
            Rule::Mer,
            &sc,
            MenuPolicy::Fixed,
            &coin_probe(&["up", "down"], None),
        );
        assert!(matches!(err, Err(Error::RulePrecondition { .. })));
    }

    #[test]
    fn never_strictly_optimal_examples() {
        let d = fixtures::delivery();
        let m0 = d.menu("M0").unwrap();
        let new = d.act("new").unwrap();
        assert!(!never_strictly_optimal(new, m0, d.prizes()));
        for f in m0.acts() {
            assert!(never_strictly_optimal(f, m0, d.prizes()));
        }
        let dominated = Act::from_utilities("low", &[0.0, -10000.0], d.states(), d.prizes()).unwrap();
        assert!(never_strictly_optimal(&dominated, m0, d.prizes()));
    }

    #[test]
    fn conditional_regret_identity_examples() {
        let d = fixtures::delivery();
        let m0 = d.menu("M0").unwrap();
        let back = d.act("back").unwrap();
        let one = d.event("one").unwrap();
        for f in m0.acts() {
            let full = check_theorem2_identity(d.beliefs(), &Event::full(2), m0, f, back, d.prizes()).unwrap();
            assert_eq!(full, 0.0);
            assert!(check_theorem2_identity(d.beliefs(), one, m0, f, back, d.prizes()).unwrap() < 1e-9);
        }
        let single = WeightedBeliefs::single(Measure::point_mass(0, 2));
        let err = check_theorem2_identity(&single, d.event("ten").unwrap(), m0, back, back, d.prizes()).unwrap_err();
        assert!(err.is_undefined());
    }

    #[test]
    fn iterated_update_examples() {
        let states = 3;
        let b = WeightedBeliefs::new(vec![
            BeliefEntry::new("a", Measure::new(vec![0.5, 0.25, 0.25]).unwrap(), 1.0),
            BeliefEntry::new("b", Measure::new(vec![0.125, 0.375, 0.5]).unwrap(), 0.5),
            BeliefEntry::new("c", Measure::new(vec![0.25, 0.25, 0.5]).unwrap(), 0.75),
        ])
        .unwrap();
        let full = Event::full(states);
        assert_eq!(check_prop1(&b, &full, &full).unwrap(), 0.0);
        let e1 = Event::new(states, [0, 1]).unwrap();
        let e2 = Event::new(states, [1, 2]).unwrap();
        assert!(check_prop1(&b, &e1, &e2).unwrap() < 1e-9);
        let disjoint = Event::new(states, [2]).unwrap();
        assert!(check_prop1(&b, &Event::new(states, [0]).unwrap(), &disjoint).is_err());
    }

    #[test]
    fn mdc_holds_on_delivery_and_full_event_is_trivial() {
        let d = fixtures::delivery();
        for (f, g) in [("cont", "check"), ("check", "back"), ("back", "cont")] {
            for e in ["one", "ten"] {
                let r = check_mdc(&d, "M0", e, f, g, Updater::Likelihood).unwrap();
                assert_ne!(r.verdict, Verdict::Counterexample, "{f} {g} {e}");
            }
        }
        let d = d.with_event("all", Event::full(2)).unwrap();
        let r = check_mdc(&d, "M1", "all", "cont", "check", Updater::Likelihood).unwrap();
        assert_eq!(r.verdict, Verdict::Supported);
        let w = r.witness;
        assert!(w.is_none());
    }

    #[test]
    fn audits_are_deterministic_across_execution_modes() {
        for axiom in [AxiomId::Independence, AxiomId::AmbiguityAversion, AxiomId::Axiom12] {
            let opts = AuditOptions::default();
            let a = audit(axiom, Rule::Mmeu, &opts, 64, 3, Execution::Sequential).unwrap();
            let b = audit(axiom, Rule::Mmeu, &opts, 64, 3, Execution::Parallel).unwrap();
            assert_eq!(a, b);
        }
        let opts = AuditOptions::default();
        let a = find_counterexample(AxiomId::Independence, Rule::Mmeu, &opts, 2000, 7, Execution::Sequential).unwrap();
        let b = find_counterexample(AxiomId::Independence, Rule::Mmeu, &opts, 2000, 7, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.is_some());
    }

    #[test]
    fn zero_counts_are_rejected() {
        let opts = AuditOptions::default();
        assert!(audit(AxiomId::Completeness, Rule::Mer, &opts, 0, 1, Execution::Sequential).is_err());
        assert!(find_counterexample(AxiomId::Completeness, Rule::Mer, &opts, 0, 1, Execution::Sequential).is_err());
        assert!(table4_matrix(0, 1, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn witness_scenarios_keep_user_menu_names() {
        // a user menu called W0 must not be overwritten
        let states = StateSpace::new(["s1", "s2"]).unwrap();
        let coin = fixtures::coin();
        let m = coin.menu("M").unwrap().clone();
        let sc = coin
            .with_menu("W0", Menu::new(vec![m.acts()[0].clone()]).unwrap())
            .unwrap();
        assert_eq!(sc.states(), &states);
        let r = check_axiom(
            AxiomId::Independence,
            Rule::Mmeu,
            &sc,
            MenuPolicy::Transformed,
            &coin_probe(&["up", "down", "up"], Some(0.5)),
        )
        .unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.scenario.menu("W0").unwrap().len(), 1);
        assert!(w.replay().unwrap());
    }
}

//! States, prizes, lotteries, Anscombe–Aumann acts, menus and weighted
//! belief sets, plus the act algebra (mixtures, splices, constant acts).
//!
//! Everything here is immutable once constructed. Constructors validate
//! their invariants, so any value that exists has already passed them.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Tolerance on probability sums for input data.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// L∞ distance under which two measures are treated as the same measure
/// (grouping of conditionals, deduplication after updates).
pub const MEASURE_TOLERANCE: f64 = 1e-12;

fn check_unique<'a>(kind: &'static str, names: impl IntoIterator<Item = &'a String>) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if name.is_empty() {
            return Err(Error::invalid(kind, name.clone(), "empty identifier"));
        }
        if !seen.insert(name) {
            return Err(Error::invalid(kind, name.clone(), "duplicate identifier"));
        }
    }
    Ok(())
}

/// Validates a probability vector and renormalizes it to sum to one.
fn normalized_probs(kind: &'static str, label: &str, probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::invalid(kind, label, "no entries"));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::invalid(
                kind,
                label,
                format!("entry {i} is {p}, must be a finite value >= 0"),
            ));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::invalid(
            kind,
            label,
            format!("probabilities sum to {sum}, expected 1 within {PROB_TOLERANCE:e}"),
        ));
    }
    if sum == 1.0 {
        Ok(probs)
    } else {
        Ok(probs.into_iter().map(|p| p / sum).collect())
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Name of the synthesized prize carrying utility `value`.
pub fn utility_prize_name(value: f64) -> String {
    format!("u={value}")
}

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

/// Finite, ordered, nonempty set of state identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::invalid("state space", "", "at least one state is required"));
        }
        check_unique("state", &names)?;
        Ok(StateSpace { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Prizes with their utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PrizeSpace {
    names: Vec<String>,
    utilities: Vec<f64>,
}

impl PrizeSpace {
    pub fn new<S: Into<String>>(prizes: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (names, utilities): (Vec<String>, Vec<f64>) = prizes.into_iter().map(|(n, u)| (n.into(), u)).unzip();
        check_unique("prize", &names)?;
        for (name, u) in names.iter().zip(&utilities) {
            if !u.is_finite() {
                return Err(Error::invalid(
                    "prize",
                    name.clone(),
                    format!("utility {u} is not finite"),
                ));
            }
        }
        let distinct = utilities.iter().any(|u| *u != utilities[0]);
        if utilities.len() < 2 || !distinct {
            return Err(Error::invalid(
                "prize space",
                "",
                "at least two prizes with distinct utilities are required",
            ));
        }
        Ok(PrizeSpace { names, utilities })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn utility(&self, prize: usize) -> f64 {
        self.utilities[prize]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// One prize per distinct utility value, named `u=<value>`, in order of
    /// first appearance. A single level gets a companion prize one unit
    /// above it so the space stays nontrivial.
    pub fn from_utility_levels(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut levels: Vec<f64> = Vec::new();
        for v in values {
            if !v.is_finite() {
                return Err(Error::invalid("prize", format!("u={v}"), "utility is not finite"));
            }
            if !levels.contains(&v) {
                levels.push(v);
            }
        }
        match levels.len() {
            0 => return Err(Error::invalid("prize space", "", "no utility values given")),
            1 => levels.push(levels[0] + 1.0),
            _ => {}
        }
        PrizeSpace::new(levels.into_iter().map(|v| (utility_prize_name(v), v)))
    }

    /// Index of the first prize whose utility is exactly `value`.
    pub fn index_of_utility(&self, value: f64) -> Option<usize> {
        self.utilities.iter().position(|u| *u == value)
    }

    /// Index of a prize with maximal utility (first one on ties).
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, u) in self.utilities.iter().enumerate() {
            if *u > self.utilities[best] {
                best = i;
            }
        }
        best
    }

    /// Index of a prize with minimal utility (first one on ties).
    pub fn worst(&self) -> usize {
        let mut worst = 0;
        for (i, u) in self.utilities.iter().enumerate() {
            if *u < self.utilities[worst] {
                worst = i;
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Lotteries and acts
// ---------------------------------------------------------------------------

/// Finite-support probability over prizes, stored densely by prize index.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    probs: Vec<f64>,
}

impl Lottery {
    pub fn new(probs: Vec<f64>, prizes: &PrizeSpace) -> Result<Self> {
        if probs.len() != prizes.len() {
            return Err(Error::mismatch("lottery", prizes.len(), probs.len()));
        }
        Ok(Lottery {
            probs: normalized_probs("lottery", "", probs)?,
        })
    }

    /// Point lottery on a single prize.
    pub fn degenerate(prize: usize, prizes: &PrizeSpace) -> Result<Self> {
        if prize >= prizes.len() {
            return Err(Error::UnknownReference {
                kind: "prize",
                name: prize.to_string(),
            });
        }
        let mut probs = vec![0.0; prizes.len()];
        probs[prize] = 1.0;
        Ok(Lottery { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_prizes(&self) -> usize {
        self.probs.len()
    }

    pub(crate) fn utility_unchecked(&self, prizes: &PrizeSpace) -> f64 {
        self.probs
            .iter()
            .zip(prizes.utilities())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, u)| p * u)
            .sum()
    }

    fn mix(p: f64, a: &Lottery, b: &Lottery) -> Lottery {
        let q = 1.0 - p;
        Lottery {
            probs: a.probs.iter().zip(&b.probs).map(|(x, y)| p * x + q * y).collect(),
        }
    }
}

/// Expected utility of a lottery: Σ_y l(y)·U(y).
pub fn lottery_utility(lottery: &Lottery, prizes: &PrizeSpace) -> Result<f64> {
    if lottery.num_prizes() != prizes.len() {
        return Err(Error::UnknownReference {
            kind: "prize",
            name: format!(
                "lottery over {} prizes used with a {}-prize space",
                lottery.num_prizes(),
                prizes.len()
            ),
        });
    }
    Ok(lottery.utility_unchecked(prizes))
}

/// Anscombe–Aumann act: a lottery for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct Act {
    name: String,
    outcomes: Vec<Lottery>,
}

impl Act {
    pub fn new(
        name: impl Into<String>,
        outcomes: Vec<Lottery>,
        states: &StateSpace,
        prizes: &PrizeSpace,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("act", name, "empty identifier"));
        }
        if outcomes.len() != states.len() {
            return Err(Error::mismatch(format!("act '{name}'"), states.len(), outcomes.len()));
        }
        for l in &outcomes {
            if l.num_prizes() != prizes.len() {
                return Err(Error::mismatch(
                    format!("lottery of act '{name}'"),
                    prizes.len(),
                    l.num_prizes(),
                ));
            }
        }
        Ok(Act { name, outcomes })
    }

    /// Act whose outcome in each state is the given prize for sure.
    pub fn from_prizes(
        name: impl Into<String>,
        prize_per_state: &[usize],
        states: &StateSpace,
        prizes: &PrizeSpace,
    ) -> Result<Self> {
        let outcomes = prize_per_state
            .iter()
            .map(|&y| Lottery::degenerate(y, prizes))
            .collect::<Result<Vec<_>>>()?;
        Act::new(name, outcomes, states, prizes)
    }

    /// Act given by per-state utilities, each realized as a point lottery on
    /// a prize carrying exactly that utility.
    pub fn from_utilities(
        name: impl Into<String>,
        utilities: &[f64],
        states: &StateSpace,
        prizes: &PrizeSpace,
    ) -> Result<Self> {
        let name = name.into();
        let idx = utilities
            .iter()
            .map(|u| {
                prizes.index_of_utility(*u).ok_or_else(|| Error::UnknownReference {
                    kind: "prize",
                    name: utility_prize_name(*u),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Act::from_prizes(name, &idx, states, prizes)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn outcomes(&self) -> &[Lottery] {
        &self.outcomes
    }

    pub fn outcome(&self, state: usize) -> &Lottery {
        &self.outcomes[state]
    }

    pub fn num_states(&self) -> usize {
        self.outcomes.len()
    }

    pub fn num_prizes(&self) -> usize {
        self.outcomes.first().map_or(0, Lottery::num_prizes)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Act {
        Act {
            name: name.into(),
            outcomes: self.outcomes.clone(),
        }
    }

    pub fn same_outcomes(&self, other: &Act) -> bool {
        self.outcomes == other.outcomes
    }

    /// Per-state utilities u(f(s)).
    pub fn utilities(&self, prizes: &PrizeSpace) -> Vec<f64> {
        self.outcomes.iter().map(|l| l.utility_unchecked(prizes)).collect()
    }

    fn check_compatible(&self, other: &Act) -> Result<()> {
        if self.num_states() != other.num_states() {
            return Err(Error::mismatch(
                format!("act '{}'", other.name),
                self.num_states(),
                other.num_states(),
            ));
        }
        if self.num_prizes() != other.num_prizes() {
            return Err(Error::mismatch(
                format!("lotteries of act '{}'", other.name),
                self.num_prizes(),
                other.num_prizes(),
            ));
        }
        Ok(())
    }
}

/// Σ_s Pr(s)·u(f(s)).
pub fn expected_utility(f: &Act, pr: &Measure, prizes: &PrizeSpace) -> Result<f64> {
    if f.num_states() != pr.len() {
        return Err(Error::mismatch(
            format!("measure for act '{}'", f.name),
            f.num_states(),
            pr.len(),
        ));
    }
    if f.num_prizes() != prizes.len() {
        return Err(Error::mismatch(
            format!("prize space for act '{}'", f.name),
            f.num_prizes(),
            prizes.len(),
        ));
    }
    Ok(f.outcomes
        .iter()
        .zip(pr.probs())
        .map(|(l, p)| p * l.utility_unchecked(prizes))
        .sum())
}

fn check_mix_coefficient(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::MixOutOfRange(p));
    }
    Ok(())
}

/// Name given to the mixture p·f + (1−p)·g.
pub fn mix_name(p: f64, f: &str, g: &str) -> String {
    format!("mix({p}:{f},{g})")
}

/// The act mapping each state s to p·f(s) + (1−p)·g(s).
pub fn mix_acts(p: f64, f: &Act, g: &Act) -> Result<Act> {
    check_mix_coefficient(p)?;
    f.check_compatible(g)?;
    Ok(Act {
        name: mix_name(p, &f.name, &g.name),
        outcomes: f
            .outcomes
            .iter()
            .zip(&g.outcomes)
            .map(|(a, b)| Lottery::mix(p, a, b))
            .collect(),
    })
}

/// The menu pM + (1−p)h. At p = 1 the menu is returned unchanged.
pub fn mix_menu(p: f64, menu: &Menu, h: &Act) -> Result<Menu> {
    check_mix_coefficient(p)?;
    if p == 1.0 {
        menu.acts[0].check_compatible(h)?;
        return Ok(menu.clone());
    }
    let acts = menu
        .acts
        .iter()
        .map(|f| mix_acts(p, f, h))
        .collect::<Result<Vec<_>>>()?;
    Menu::new(acts)
}

fn event_tag(event: &Event) -> String {
    let idx: Vec<String> = event.indices().iter().map(usize::to_string).collect();
    idx.join(",")
}

/// fEh: agrees with f on E and with h off E.
pub fn splice(f: &Act, event: &Event, h: &Act) -> Result<Act> {
    f.check_compatible(h)?;
    if event.num_states() != f.num_states() {
        return Err(Error::mismatch("event", f.num_states(), event.num_states()));
    }
    if event.is_full() {
        return Ok(f.clone());
    }
    if event.is_empty() {
        return Ok(h.clone());
    }
    let outcomes = (0..f.num_states())
        .map(|s| {
            if event.contains(s) {
                f.outcomes[s].clone()
            } else {
                h.outcomes[s].clone()
            }
        })
        .collect();
    Ok(Act {
        name: format!("splice({}:[{}]:{})", f.name, event_tag(event), h.name),
        outcomes,
    })
}

/// MEh = {fEh : f ∈ M}.
pub fn splice_menu(menu: &Menu, event: &Event, h: &Act) -> Result<Menu> {
    if event.is_full() {
        menu.acts[0].check_compatible(h)?;
        return Ok(menu.clone());
    }
    let mut acts: Vec<Act> = Vec::with_capacity(menu.len());
    for f in &menu.acts {
        let mut spliced = splice(f, event, h)?;
        // an empty event maps every act to h; keep names distinct
        if acts.iter().any(|a| a.name == spliced.name) {
            spliced.name = format!("splice({}:[{}]:{})", f.name, event_tag(event), h.name);
        }
        acts.push(spliced);
    }
    Menu::new(acts)
}

/// l*: the act mapping every state to `lottery`.
pub fn constant_act(lottery: &Lottery, num_states: usize) -> Act {
    let probs: Vec<String> = lottery.probs.iter().map(|p| p.to_string()).collect();
    Act {
        name: format!("const[{}]", probs.join(",")),
        outcomes: vec![lottery.clone(); num_states],
    }
}

// ---------------------------------------------------------------------------
// Menus
// ---------------------------------------------------------------------------

/// Finite nonempty set of acts with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct Menu {
    acts: Vec<Act>,
}

impl Menu {
    pub fn new(acts: Vec<Act>) -> Result<Self> {
        if acts.is_empty() {
            return Err(Error::invalid("menu", "", "a menu needs at least one act"));
        }
        check_unique("act", acts.iter().map(|a| &a.name))?;
        for a in &acts[1..] {
            acts[0].check_compatible(a)?;
        }
        Ok(Menu { acts })
    }

    pub fn acts(&self) -> &[Act] {
        &self.acts
    }

    pub fn len(&self) -> usize {
        self.acts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acts.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.acts[0].num_states()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.acts.iter().map(|a| a.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&Act> {
        self.acts.iter().find(|a| a.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.acts.iter().position(|a| a.name == name)
    }

    /// Membership by name and outcomes.
    pub fn position(&self, act: &Act) -> Option<usize> {
        self.index_of(&act.name).filter(|&i| self.acts[i].same_outcomes(act))
    }

    pub fn contains(&self, act: &Act) -> bool {
        self.position(act).is_some()
    }

    /// M ∪ {act}. An identical act under the same name is a no-op.
    pub fn with_act(&self, act: &Act) -> Result<Menu> {
        self.union_acts(std::slice::from_ref(act))
    }

    pub fn union(&self, other: &Menu) -> Result<Menu> {
        self.union_acts(&other.acts)
    }

    pub fn union_acts(&self, extra: &[Act]) -> Result<Menu> {
        let mut acts = self.acts.clone();
        for act in extra {
            self.acts[0].check_compatible(act)?;
            match acts.iter().find(|a| a.name == act.name) {
                Some(existing) if existing.same_outcomes(act) => {}
                Some(_) => {
                    return Err(Error::invalid(
                        "act",
                        act.name.clone(),
                        "name already used by a different act",
                    ));
                }
                None => acts.push(act.clone()),
            }
        }
        Ok(Menu { acts })
    }
}

// ---------------------------------------------------------------------------
// Measures, events, weighted beliefs
// ---------------------------------------------------------------------------

/// Probability measure over the states.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    probs: Vec<f64>,
}

impl Measure {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::labeled("", probs)
    }

    /// Like [`Measure::new`] but names the measure in diagnostics.
    pub fn labeled(label: &str, probs: Vec<f64>) -> Result<Self> {
        Ok(Measure {
            probs: normalized_probs("measure", label, probs)?,
        })
    }

    pub fn point_mass(state: usize, num_states: usize) -> Self {
        let mut probs = vec![0.0; num_states];
        probs[state] = 1.0;
        Measure { probs }
    }

    pub fn uniform(num_states: usize) -> Self {
        Measure {
            probs: vec![1.0 / num_states as f64; num_states],
        }
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Measure { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Pr(E).
    pub fn prob_of(&self, event: &Event) -> f64 {
        if event.is_full() {
            return 1.0;
        }
        self.probs
            .iter()
            .zip(&event.members)
            .filter(|(_, m)| **m)
            .map(|(p, _)| p)
            .sum()
    }

    pub fn linf_distance(&self, other: &Measure) -> f64 {
        linf(&self.probs, &other.probs)
    }
}

/// Subset of the state space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    members: Vec<bool>,
}

impl Event {
    pub fn new(num_states: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members = vec![false; num_states];
        for i in indices {
            if i >= num_states {
                return Err(Error::UnknownReference {
                    kind: "state",
                    name: i.to_string(),
                });
            }
            members[i] = true;
        }
        Ok(Event { members })
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        Event { members }
    }

    pub fn full(num_states: usize) -> Self {
        Event {
            members: vec![true; num_states],
        }
    }

    pub fn empty(num_states: usize) -> Self {
        Event {
            members: vec![false; num_states],
        }
    }

    pub fn num_states(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, state: usize) -> bool {
        self.members[state]
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|m| *m)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|m| *m)
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event {
            members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect(),
        }
    }
}

/// A measure with its label and weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefEntry {
    pub label: String,
    pub measure: Measure,
    pub weight: f64,
}

impl BeliefEntry {
    pub fn new(label: impl Into<String>, measure: Measure, weight: f64) -> Self {
        BeliefEntry {
            label: label.into(),
            measure,
            weight,
        }
    }
}

/// Finite weighted set of probability measures, normalized so the largest
/// weight is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBeliefs {
    entries: Vec<BeliefEntry>,
}

impl WeightedBeliefs {
    /// Validates and normalizes. Weights are divided by the maximum when it
    /// lies in (0, 1); a set whose weights are all zero is rejected, as is a
    /// set listing the same measure twice.
    pub fn new(entries: Vec<BeliefEntry>) -> Result<Self> {
        Self::validate_shape(&entries)?;
        for (i, a) in entries.iter().enumerate() {
            if let Some(b) = entries[..i].iter().find(|b| b.measure == a.measure) {
                return Err(Error::invalid(
                    "measure",
                    a.label.clone(),
                    format!("duplicates measure '{}'", b.label),
                ));
            }
        }
        Self::normalize(entries)
    }

    /// Like [`WeightedBeliefs::new`], but measures within
    /// [`MEASURE_TOLERANCE`] of an earlier one are merged into it, keeping
    /// the larger weight.
    pub fn merged(entries: Vec<BeliefEntry>) -> Result<Self> {
        Self::validate_shape(&entries)?;
        let mut out: Vec<BeliefEntry> = Vec::with_capacity(entries.len());
        for e in entries {
            match out
                .iter_mut()
                .find(|o| o.measure.linf_distance(&e.measure) <= MEASURE_TOLERANCE)
            {
                Some(o) => o.weight = o.weight.max(e.weight),
                None => out.push(e),
            }
        }
        Self::normalize(out)
    }

    /// All measures with weight 1.
    pub fn unweighted(measures: impl IntoIterator<Item = Measure>) -> Result<Self> {
        let entries = measures
            .into_iter()
            .enumerate()
            .map(|(i, m)| BeliefEntry::new(format!("m{i}"), m, 1.0))
            .collect();
        Self::new(entries)
    }

    pub fn single(measure: Measure) -> Self {
        WeightedBeliefs {
            entries: vec![BeliefEntry::new("m0", measure, 1.0)],
        }
    }

    fn validate_shape(entries: &[BeliefEntry]) -> Result<()> {
        let Some(first) = entries.first() else {
            return Err(Error::EmptyMeasureSet);
        };
        for e in entries {
            if e.measure.len() != first.measure.len() {
                return Err(Error::mismatch(
                    format!("measure '{}'", e.label),
                    first.measure.len(),
                    e.measure.len(),
                ));
            }
            if !e.weight.is_finite() || !(0.0..=1.0).contains(&e.weight) {
                return Err(Error::invalid(
                    "measure",
                    e.label.clone(),
                    format!("weight {} is outside [0, 1]", e.weight),
                ));
            }
        }
        Ok(())
    }

    fn normalize(mut entries: Vec<BeliefEntry>) -> Result<Self> {
        let max = entries.iter().map(|e| e.weight).fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::invalid("weighted beliefs", "", "all weights are zero"));
        }
        if max < 1.0 {
            for e in &mut entries {
                e.weight /= max;
            }
        }
        Ok(WeightedBeliefs { entries })
    }

    pub fn entries(&self) -> &[BeliefEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.entries[0].measure.len()
    }

    pub fn measures(&self) -> impl Iterator<Item = &Measure> + Clone {
        self.entries.iter().map(|e| &e.measure)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.weight).collect()
    }

    pub fn max_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).fold(0.0, f64::max)
    }

    pub fn get(&self, label: &str) -> Option<&BeliefEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Same measures, every weight set to 1.
    pub fn with_unit_weights(&self) -> WeightedBeliefs {
        WeightedBeliefs {
            entries: self
                .entries
                .iter()
                .map(|e| BeliefEntry::new(e.label.clone(), e.measure.clone(), 1.0))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// A complete decision problem: spaces, an act registry, named menus over
/// those acts, weighted beliefs and named events.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    states: StateSpace,
    prizes: PrizeSpace,
    acts: Vec<Act>,
    menus: Vec<(String, Menu)>,
    beliefs: WeightedBeliefs,
    events: Vec<(String, Event)>,
}

impl Scenario {
    pub fn new(
        states: StateSpace,
        prizes: PrizeSpace,
        acts: Vec<Act>,
        menus: Vec<(String, Menu)>,
        beliefs: WeightedBeliefs,
        events: Vec<(String, Event)>,
    ) -> Result<Self> {
        let sc = Scenario {
            states,
            prizes,
            acts,
            menus,
            beliefs,
            events,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Re-checks every invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        check_unique("act", self.acts.iter().map(|a| &a.name))?;
        for a in &self.acts {
            if a.num_states() != n {
                return Err(Error::mismatch(format!("act '{}'", a.name), n, a.num_states()));
            }
            for l in &a.outcomes {
                if l.num_prizes() != self.prizes.len() {
                    return Err(Error::mismatch(
                        format!("lottery of act '{}'", a.name),
                        self.prizes.len(),
                        l.num_prizes(),
                    ));
                }
                let sum: f64 = l.probs.iter().sum();
                if l.probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > PROB_TOLERANCE {
                    return Err(Error::invalid("act", a.name.clone(), "a lottery is not a probability"));
                }
            }
        }
        check_unique("menu", self.menus.iter().map(|(name, _)| name))?;
        for (name, menu) in &self.menus {
            if menu.is_empty() {
                return Err(Error::invalid("menu", name.clone(), "empty"));
            }
            for act in menu.acts() {
                match self.act(act.name()) {
                    Some(reg) if reg.same_outcomes(act) => {}
                    Some(_) => {
                        return Err(Error::invalid(
                            "menu",
                            name.clone(),
                            format!("act '{}' differs from the declared act", act.name),
                        ))
                    }
                    None => {
                        return Err(Error::UnknownReference {
                            kind: "act",
                            name: act.name.clone(),
                        })
                    }
                }
            }
        }
        for e in self.beliefs.entries() {
            if e.measure.len() != n {
                return Err(Error::mismatch(format!("measure '{}'", e.label), n, e.measure.len()));
            }
        }
        if (self.beliefs.max_weight() - 1.0).abs() > 0.0 {
            return Err(Error::invalid("weighted beliefs", "", "maximum weight is not 1"));
        }
        check_unique("event", self.events.iter().map(|(name, _)| name))?;
        for (name, e) in &self.events {
            if e.num_states() != n {
                return Err(Error::mismatch(format!("event '{name}'"), n, e.num_states()));
            }
        }
        Ok(())
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn prizes(&self) -> &PrizeSpace {
        &self.prizes
    }

    pub fn acts(&self) -> &[Act] {
        &self.acts
    }

    pub fn act(&self, name: &str) -> Option<&Act> {
        self.acts.iter().find(|a| a.name == name)
    }

    pub fn menus(&self) -> &[(String, Menu)] {
        &self.menus
    }

    pub fn menu(&self, name: &str) -> Result<&Menu> {
        self.menus
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownReference {
                kind: "menu",
                name: name.to_string(),
            })
    }

    pub fn beliefs(&self) -> &WeightedBeliefs {
        &self.beliefs
    }

    pub fn events(&self) -> &[(String, Event)] {
        &self.events
    }

    pub fn event(&self, name: &str) -> Result<&Event> {
        self.events
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::UnknownReference {
                kind: "event",
                name: name.to_string(),
            })
    }

    /// Adds (or replaces) a named menu, registering any new acts it uses.
    pub fn with_menu(&self, name: impl Into<String>, menu: Menu) -> Result<Scenario> {
        let name = name.into();
        let mut sc = self.clone();
        for act in menu.acts() {
            match sc.act(act.name()) {
                Some(reg) if reg.same_outcomes(act) => {}
                Some(_) => {
                    return Err(Error::invalid(
                        "act",
                        act.name.clone(),
                        "name already used by a different act",
                    ))
                }
                None => sc.acts.push(act.clone()),
            }
        }
        sc.menus.retain(|(n, _)| *n != name);
        sc.menus.push((name, menu));
        sc.validate()?;
        Ok(sc)
    }

    pub fn with_beliefs(&self, beliefs: WeightedBeliefs) -> Result<Scenario> {
        let mut sc = self.clone();
        sc.beliefs = beliefs;
        sc.validate()?;
        Ok(sc)
    }

    pub fn with_event(&self, name: impl Into<String>, event: Event) -> Result<Scenario> {
        let name = name.into();
        let mut sc = self.clone();
        sc.events.retain(|(n, _)| *n != name);
        sc.events.push((name, event));
        sc.validate()?;
        Ok(sc)
    }
}

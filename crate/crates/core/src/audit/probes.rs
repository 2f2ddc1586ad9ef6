//! Axiom probes.
//!
//! Each `check_*` function evaluates one concrete instance of an axiom and
//! records every comparison it makes in a [`Trial`]. The `random_probe`
//! driver builds instances from seeded random scenarios, constructing
//! indifferences by bisection where an axiom needs `f ∼ g` as a premise.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::generate::{cyclic_scenario, grid_p, random_act, random_event, random_lottery, scenario_from_rng};
use super::{AuditOptions, AxiomId, BeliefSource, Claim, MenuPolicy, Outcome, Role, Status, Updater};
use crate::error::{Error, Result};
use crate::model::{
    constant_act, mix_acts, mix_menu, splice, splice_menu, Act, Event, Lottery, Menu, PrizeSpace, Scenario,
    WeightedBeliefs,
};
use crate::regret::{Evaluation, Rule, EPS_PREF};
use crate::update::{is_null_event, likelihood_update, measure_by_measure_update};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawComparison {
    pub menu: usize,
    pub left: String,
    pub right: String,
    pub claim: Claim,
    pub beliefs: BeliefSource,
    pub gap: f64,
    pub role: Role,
}

/// Everything a finished probe produced.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TrialRecord {
    pub outcome: Outcome,
    pub menus: Vec<Menu>,
    pub comparisons: Vec<RawComparison>,
    pub parameters: BTreeMap<String, f64>,
    pub event: Option<Event>,
}

type Checked = (usize, Status);

pub(crate) struct Trial<'a> {
    rule: Rule,
    prizes: &'a PrizeSpace,
    prior: &'a WeightedBeliefs,
    conditional: Option<WeightedBeliefs>,
    event: Option<Event>,
    menus: Vec<Menu>,
    comparisons: Vec<RawComparison>,
    parameters: BTreeMap<String, f64>,
}

impl<'a> Trial<'a> {
    pub fn new(rule: Rule, prizes: &'a PrizeSpace, prior: &'a WeightedBeliefs) -> Self {
        Trial {
            rule,
            prizes,
            prior,
            conditional: None,
            event: None,
            menus: Vec::new(),
            comparisons: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    /// Conditions the prior on `event`; comparisons may then use
    /// [`BeliefSource::Conditional`].
    pub fn condition_on(&mut self, event: &Event, updater: Updater) -> Result<()> {
        self.conditional = Some(updater.apply(self.prior, event)?);
        self.event = Some(event.clone());
        Ok(())
    }

    pub fn finish(self, outcome: Outcome) -> TrialRecord {
        TrialRecord {
            outcome,
            menus: self.menus,
            comparisons: self.comparisons,
            parameters: self.parameters,
            event: self.event,
        }
    }

    fn param(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    fn gap(&self, menu: &Menu, f: &Act, g: &Act, src: BeliefSource) -> Result<f64> {
        let beliefs = match src {
            BeliefSource::Prior => self.prior,
            BeliefSource::Conditional => self
                .conditional
                .as_ref()
                .expect("condition_on precedes conditional comparisons"),
        };
        Evaluation::new(self.rule, menu, beliefs, self.prizes)?.gap(f, g)
    }

    fn record(&mut self, menu: &Menu, f: &Act, g: &Act, claim: Claim, src: BeliefSource) -> Result<Checked> {
        let gap = self.gap(menu, f, g, src)?;
        let menu_idx = match self.menus.iter().position(|m| m == menu) {
            Some(i) => i,
            None => {
                self.menus.push(menu.clone());
                self.menus.len() - 1
            }
        };
        self.comparisons.push(RawComparison {
            menu: menu_idx,
            left: f.name().to_string(),
            right: g.name().to_string(),
            claim,
            beliefs: src,
            gap,
            role: Role::Context,
        });
        Ok((self.comparisons.len() - 1, claim.status(gap)))
    }

    fn violation(&mut self, premises: &[Checked], contradicted: Checked) -> Outcome {
        for (i, _) in premises {
            self.comparisons[*i].role = Role::Premise;
        }
        self.comparisons[contradicted.0].role = Role::Contradicted;
        Outcome::Violation
    }

    fn implication(&mut self, premises: &[Checked], conclusion: Checked) -> Outcome {
        if premises.iter().any(|(_, s)| *s != Status::Holds) {
            return Outcome::Inconclusive;
        }
        match conclusion.1 {
            Status::Holds => Outcome::Holds,
            Status::Fails => self.violation(premises, conclusion),
            Status::Borderline => Outcome::Inconclusive,
        }
    }

    fn iff(&mut self, a: Checked, b: Checked) -> Outcome {
        match (a.1, b.1) {
            (Status::Holds, Status::Holds) | (Status::Fails, Status::Fails) => Outcome::Holds,
            (Status::Holds, Status::Fails) => self.violation(&[a], b),
            (Status::Fails, Status::Holds) => self.violation(&[b], a),
            _ => Outcome::Inconclusive,
        }
    }
}

// ---------------------------------------------------------------------------
// Structural predicates
// ---------------------------------------------------------------------------

/// True iff in every state some act of `menu` is at least as good as `h`.
pub fn never_strictly_optimal(h: &Act, menu: &Menu, prizes: &PrizeSpace) -> bool {
    let uh = h.utilities(prizes);
    (0..h.num_states()).all(|s| menu.acts().iter().any(|f| f.utilities(prizes)[s] >= uh[s] - EPS_PREF))
}

pub(crate) fn is_constant(h: &Act) -> bool {
    h.outcomes().windows(2).all(|w| w[0] == w[1])
}

/// Same set of outcome lotteries in every state.
pub(crate) fn state_independent_outcomes(menu: &Menu) -> bool {
    let set = |s: usize| -> Vec<&Lottery> { menu.acts().iter().map(|a| a.outcome(s)).collect() };
    let first = set(0);
    (1..menu.num_states()).all(|s| {
        let other = set(s);
        first.iter().all(|l| other.contains(l)) && other.iter().all(|l| first.contains(l))
    })
}

fn require_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbePrecondition(format!(
            "mixing coefficient {p} must lie in (0, 1)"
        )))
    }
}

// ---------------------------------------------------------------------------
// Axioms on concrete instances
// ---------------------------------------------------------------------------

pub(crate) fn check_transitivity(t: &mut Trial, m: &Menu, f: &Act, g: &Act, h: &Act) -> Result<Outcome> {
    let fg = t.record(m, f, g, Claim::Weak, BeliefSource::Prior)?;
    let gh = t.record(m, g, h, Claim::Weak, BeliefSource::Prior)?;
    let fh = t.record(m, f, h, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.implication(&[fg, gh], fh))
}

pub(crate) fn check_completeness(t: &mut Trial, m: &Menu, f: &Act, g: &Act) -> Result<Outcome> {
    let fg = t.record(m, f, g, Claim::Weak, BeliefSource::Prior)?;
    let gf = t.record(m, g, f, Claim::Weak, BeliefSource::Prior)?;
    Ok(match (fg.1, gf.1) {
        (Status::Holds, _) | (_, Status::Holds) => Outcome::Holds,
        (Status::Fails, Status::Fails) => {
            t.violation(&[], fg);
            t.comparisons[gf.0].role = Role::Contradicted;
            Outcome::Violation
        }
        _ => Outcome::Inconclusive,
    })
}

/// Existential: holds once some pair in the menu is strictly ordered.
pub(crate) fn check_nontriviality(t: &mut Trial, m: &Menu) -> Result<Outcome> {
    for f in m.acts() {
        for g in m.acts() {
            if Claim::Strict.status(t.gap(m, f, g, BeliefSource::Prior)?) == Status::Holds {
                t.record(m, f, g, Claim::Strict, BeliefSource::Prior)?;
                return Ok(Outcome::Holds);
            }
        }
    }
    Ok(Outcome::Inconclusive)
}

pub(crate) fn check_monotonicity(t: &mut Trial, m: &Menu, f: &Act, g: &Act) -> Result<Outcome> {
    let n = f.num_states();
    let mut premises = Vec::with_capacity(n);
    for s in 0..n {
        let cf = constant_act(f.outcome(s), n);
        let cg = constant_act(g.outcome(s), n);
        let pair = Menu::new(vec![cf.clone()])?.with_act(&cg)?;
        premises.push(t.record(&pair, &cf, &cg, Claim::Weak, BeliefSource::Prior)?);
    }
    let conclusion = t.record(m, f, g, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.implication(&premises, conclusion))
}

/// Searches q, r over {k/64} for the two strict comparisons the axiom
/// promises; never reports a violation.
pub(crate) fn check_mixture_continuity(t: &mut Trial, m: &Menu, f: &Act, g: &Act, h: &Act) -> Result<Outcome> {
    let fg = t.record(m, f, g, Claim::Strict, BeliefSource::Prior)?;
    let gh = t.record(m, g, h, Claim::Strict, BeliefSource::Prior)?;
    if fg.1 != Status::Holds || gh.1 != Status::Holds {
        return Ok(Outcome::Inconclusive);
    }
    let grid = |k: u32| f64::from(k) / 64.0;
    let mut q_found = None;
    for q in (1..64).rev().map(grid) {
        let mix = mix_acts(q, f, h)?;
        let menu = m.with_act(&mix)?;
        if Claim::Strict.status(t.gap(&menu, &mix, g, BeliefSource::Prior)?) == Status::Holds {
            q_found = Some((q, mix, menu));
            break;
        }
    }
    let mut r_found = None;
    for r in (1..64).map(grid) {
        let mix = mix_acts(r, f, h)?;
        let menu = m.with_act(&mix)?;
        if Claim::Strict.status(t.gap(&menu, g, &mix, BeliefSource::Prior)?) == Status::Holds {
            r_found = Some((r, mix, menu));
            break;
        }
    }
    match (q_found, r_found) {
        (Some((q, qmix, qmenu)), Some((r, rmix, rmenu))) => {
            t.record(&qmenu, &qmix, g, Claim::Strict, BeliefSource::Prior)?;
            t.record(&rmenu, g, &rmix, Claim::Strict, BeliefSource::Prior)?;
            t.param("q", q);
            t.param("r", r);
            Ok(Outcome::Holds)
        }
        _ => Ok(Outcome::Inconclusive),
    }
}

pub(crate) fn check_ambiguity_aversion(t: &mut Trial, m: &Menu, f: &Act, g: &Act, p: f64) -> Result<Outcome> {
    require_p(p)?;
    t.param("p", p);
    let tie = t.record(m, f, g, Claim::Indifferent, BeliefSource::Prior)?;
    let mix = mix_acts(p, f, g)?;
    let menu = m.with_act(&mix)?;
    let conclusion = t.record(&menu, &mix, g, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.implication(&[tie], conclusion))
}

/// f ⪰_M g iff pf+(1−p)h ⪰ pg+(1−p)h, the right side compared in the menu
/// chosen by `policy`.
pub(crate) fn check_independence(
    t: &mut Trial,
    policy: MenuPolicy,
    m: &Menu,
    f: &Act,
    g: &Act,
    h: &Act,
    p: f64,
) -> Result<Outcome> {
    require_p(p)?;
    t.param("p", p);
    let lhs = t.record(m, f, g, Claim::Weak, BeliefSource::Prior)?;
    let mf = mix_acts(p, f, h)?;
    let mg = mix_acts(p, g, h)?;
    let menu = match policy {
        MenuPolicy::Transformed => mix_menu(p, m, h)?,
        MenuPolicy::Fixed => m.union_acts(&[mf.clone(), mg.clone()])?,
    };
    let rhs = t.record(&menu, &mf, &mg, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.iff(lhs, rhs))
}

pub(crate) fn check_c_independence(
    t: &mut Trial,
    policy: MenuPolicy,
    m: &Menu,
    f: &Act,
    g: &Act,
    h: &Act,
    p: f64,
) -> Result<Outcome> {
    if !is_constant(h) {
        return Err(Error::ProbePrecondition(format!("act '{}' is not constant", h.name())));
    }
    check_independence(t, policy, m, f, g, h, p)
}

pub(crate) fn check_constant_menu_independence(
    t: &mut Trial,
    m1: &Menu,
    m2: &Menu,
    l: &Act,
    l2: &Act,
) -> Result<Outcome> {
    for c in [l, l2] {
        if !is_constant(c) {
            return Err(Error::ProbePrecondition(format!("act '{}' is not constant", c.name())));
        }
    }
    let a = t.record(m1, l, l2, Claim::Weak, BeliefSource::Prior)?;
    let b = t.record(m2, l, l2, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.iff(a, b))
}

/// Vacuous (inconclusive) when some act of `extra` can be strictly optimal.
pub(crate) fn check_ina(t: &mut Trial, m: &Menu, extra: &Menu, f: &Act, g: &Act) -> Result<Outcome> {
    if !extra.acts().iter().all(|h| never_strictly_optimal(h, m, t.prizes)) {
        return Ok(Outcome::Inconclusive);
    }
    let small = t.record(m, f, g, Claim::Weak, BeliefSource::Prior)?;
    let big = m.union(extra)?;
    let large = t.record(&big, f, g, Claim::Weak, BeliefSource::Prior)?;
    Ok(t.iff(small, large))
}

/// Finite menus are bounded by the best prize; every outcome of the menu is
/// compared against it as a constant act.
pub(crate) fn check_boundedness(t: &mut Trial, m: &Menu) -> Result<Outcome> {
    let n = m.num_states();
    let top = constant_act(&Lottery::degenerate(t.prizes.best(), t.prizes)?, n);
    let mut worst = Outcome::Holds;
    for f in m.acts() {
        for s in 0..n {
            let c = constant_act(f.outcome(s), n);
            let pair = Menu::new(vec![top.clone()])?.with_act(&c)?;
            let checked = t.record(&pair, &top, &c, Claim::Weak, BeliefSource::Prior)?;
            match checked.1 {
                Status::Fails => return Ok(t.violation(&[], checked)),
                Status::Borderline => worst = Outcome::Inconclusive,
                Status::Holds => {}
            }
        }
    }
    Ok(worst)
}

pub(crate) fn check_axiom12(t: &mut Trial, m: &Menu, f: &Act, h: &Act, p: f64) -> Result<Outcome> {
    require_p(p)?;
    if !is_constant(h) {
        return Err(Error::ProbePrecondition(format!("act '{}' is not constant", h.name())));
    }
    if !state_independent_outcomes(m) {
        return Ok(Outcome::Inconclusive);
    }
    t.param("p", p);
    let tie = t.record(m, h, f, Claim::Indifferent, BeliefSource::Prior)?;
    let mix = mix_acts(p, f, h)?;
    let menu = m.with_act(&mix)?;
    let conclusion = t.record(&menu, &mix, f, Claim::Indifferent, BeliefSource::Prior)?;
    Ok(t.implication(&[tie], conclusion))
}

/// Conditional preference on E against the spliced preference for every
/// h ∈ M. Any h whose spliced comparison decisively disagrees with the
/// conditional one is a violation (of the "some h" reading when no h
/// agrees, of the "all h" reading otherwise).
pub(crate) fn check_mdc(t: &mut Trial, m: &Menu, e: &Event, f: &Act, g: &Act) -> Result<Outcome> {
    let cond = t.record(m, f, g, Claim::Weak, BeliefSource::Conditional)?;
    let mut spliced = Vec::with_capacity(m.len());
    for h in m.acts() {
        let meh = splice_menu(m, e, h)?;
        let feh = splice(f, e, h)?;
        let geh = splice(g, e, h)?;
        spliced.push(t.record(&meh, &feh, &geh, Claim::Weak, BeliefSource::Prior)?);
    }
    for s in &spliced {
        match (cond.1, s.1) {
            (Status::Holds, Status::Fails) => return Ok(t.violation(&[cond], *s)),
            (Status::Fails, Status::Holds) => return Ok(t.violation(&[*s], cond)),
            _ => {}
        }
    }
    if cond.1 == Status::Borderline || spliced.iter().any(|s| s.1 == Status::Borderline) {
        Ok(Outcome::Inconclusive)
    } else {
        Ok(Outcome::Holds)
    }
}

// ---------------------------------------------------------------------------
// Indifference construction
// ---------------------------------------------------------------------------

const BISECTION_STEPS: usize = 80;

/// Bisects t ∈ [0, 1] for a root of `phi`, given opposite (weak) signs at
/// the ends. Returns the t with the smallest |phi| seen.
fn bisect(mut phi: impl FnMut(f64) -> Result<f64>) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let (f_lo, f_hi) = (phi(lo)?, phi(hi)?);
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Ok(None);
    }
    let rising = f_hi > 0.0;
    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo.abs())
    } else {
        (hi, f_hi.abs())
    };
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = phi(mid)?;
        if v.abs() < best.1 {
            best = (mid, v.abs());
        }
        if v == 0.0 {
            break;
        }
        if (v > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((best.1 <= EPS_PREF / 4.0).then_some(best.0))
}

/// An act t·a + (1−t)·b with t·a + (1−t)·b ∼ f in M ∪ {it}, where a and b
/// are the best and worst acts of M. Mixtures of menu acts leave every
/// state's best utility unchanged, so only the new act's score moves.
fn tie_by_mixing(
    rule: Rule,
    m: &Menu,
    beliefs: &WeightedBeliefs,
    prizes: &PrizeSpace,
    f: &Act,
) -> Result<Option<(Act, Menu)>> {
    let eval = Evaluation::new(rule, m, beliefs, prizes)?;
    let mut acts: Vec<&Act> = m.acts().iter().collect();
    acts.sort_by(|x, y| {
        let gx = eval.gap(x, f).unwrap_or(0.0);
        let gy = eval.gap(y, f).unwrap_or(0.0);
        gy.total_cmp(&gx)
    });
    let (a, b) = (acts[0], acts[acts.len() - 1]);
    if a == b {
        return Ok(None);
    }
    let phi = |t: f64| -> Result<f64> {
        let mix = mix_acts(t, a, b)?;
        let menu = m.with_act(&mix)?;
        Evaluation::new(rule, &menu, beliefs, prizes)?.gap(&mix, f)
    };
    match bisect(phi)? {
        Some(t) => {
            let mix = mix_acts(t, a, b)?;
            let menu = m.with_act(&mix)?;
            Ok(Some((mix, menu)))
        }
        None => Ok(None),
    }
}

/// A constant act h between the worst and best prize with h ∼ f in M ∪ {h}.
fn tie_by_constant(
    rule: Rule,
    m: &Menu,
    beliefs: &WeightedBeliefs,
    prizes: &PrizeSpace,
    f: &Act,
) -> Result<Option<(Act, Menu)>> {
    let (best, worst) = (prizes.best(), prizes.worst());
    let n = m.num_states();
    let constant = |t: f64| -> Result<Act> {
        let mut probs = vec![0.0; prizes.len()];
        probs[best] += t;
        probs[worst] += 1.0 - t;
        Ok(constant_act(&Lottery::new(probs, prizes)?, n))
    };
    let phi = |t: f64| -> Result<f64> {
        let h = constant(t)?;
        let menu = m.with_act(&h)?;
        Evaluation::new(rule, &menu, beliefs, prizes)?.gap(&h, f)
    };
    match bisect(phi)? {
        Some(t) => {
            let h = constant(t)?;
            let menu = m.with_act(&h)?;
            Ok(Some((h, menu)))
        }
        None => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Random probes
// ---------------------------------------------------------------------------

fn two<'m, R: Rng>(rng: &mut R, m: &'m Menu) -> (&'m Act, &'m Act) {
    let f = m.acts().choose(rng).expect("nonempty menu");
    let others: Vec<&Act> = m.acts().iter().filter(|a| a.name() != f.name()).collect();
    let g = others.choose(rng).copied().unwrap_or(f);
    (f, g)
}

/// Utility levels no higher than the menu's best in each state.
fn dominated_act<R: Rng>(rng: &mut R, name: &str, sc: &Scenario, m: &Menu) -> Result<Act> {
    let prizes = sc.prizes();
    let table: Vec<Vec<f64>> = m.acts().iter().map(|a| a.utilities(prizes)).collect();
    let u: Vec<f64> = (0..sc.states().len())
        .map(|s| {
            let top = table.iter().map(|row| row[s]).fold(f64::NEG_INFINITY, f64::max);
            let below: Vec<f64> = prizes.utilities().iter().copied().filter(|v| *v <= top).collect();
            *below.choose(rng).expect("the menu's own level qualifies")
        })
        .collect();
    Act::from_utilities(name, &u, sc.states(), prizes)
}

/// Builds a random instance of `axiom` for `rule` and evaluates it.
pub(crate) fn random_probe<R: Rng>(
    axiom: AxiomId,
    rule: Rule,
    opts: &AuditOptions,
    rng: &mut R,
) -> Result<(Scenario, TrialRecord)> {
    let params = opts
        .params
        .clone()
        .unwrap_or_else(|| super::ScenarioParams::for_rule(rule));
    let sc = if axiom == AxiomId::Axiom12 {
        cyclic_scenario(rng, &params)?
    } else {
        scenario_from_rng(rng, &params)?
    };
    let m = sc.menu("M")?.clone();
    let prizes = sc.prizes();
    let beliefs = sc.beliefs();
    let n = sc.states().len();
    let mut t = Trial::new(rule, prizes, beliefs);
    let outcome = match axiom {
        AxiomId::Transitivity => {
            let mut picks: Vec<&Act> = (0..3).map(|_| m.acts().choose(rng).expect("nonempty menu")).collect();
            let eval = Evaluation::new(rule, &m, beliefs, prizes)?;
            let goodness = |a: &Act| rule.goodness(eval.score(a).expect("menu act"));
            picks.sort_by(|a, b| goodness(b).total_cmp(&goodness(a)));
            check_transitivity(&mut t, &m, picks[0], picks[1], picks[2])?
        }
        AxiomId::Completeness => {
            let (f, g) = two(rng, &m);
            check_completeness(&mut t, &m, f, g)?
        }
        AxiomId::Nontriviality => check_nontriviality(&mut t, &m)?,
        AxiomId::Monotonicity => {
            let (g, k) = two(rng, &m);
            let (ug, uk) = (g.utilities(prizes), k.utilities(prizes));
            let u: Vec<f64> = ug.iter().zip(&uk).map(|(a, b)| a.max(*b)).collect();
            let f = Act::from_utilities(format!("dom({},{})", g.name(), k.name()), &u, sc.states(), prizes)?;
            let menu = m.with_act(&f)?;
            check_monotonicity(&mut t, &menu, &f, g)?
        }
        AxiomId::MixtureContinuity => {
            let eval = Evaluation::new(rule, &m, beliefs, prizes)?;
            let mut acts: Vec<&Act> = m.acts().iter().collect();
            acts.sort_by(|a, b| eval.gap(b, a).unwrap_or(0.0).total_cmp(&0.0));
            // one representative per strict level, best first
            let mut levels: Vec<&Act> = Vec::new();
            for a in acts {
                if levels
                    .last()
                    .is_none_or(|l| eval.strictly_prefers(l, a).unwrap_or(false))
                {
                    levels.push(a);
                }
            }
            if levels.len() < 3 {
                Outcome::Inconclusive
            } else {
                let mut idx = rand::seq::index::sample(rng, levels.len(), 3).into_vec();
                idx.sort_unstable();
                check_mixture_continuity(&mut t, &m, levels[idx[0]], levels[idx[1]], levels[idx[2]])?
            }
        }
        AxiomId::AmbiguityAversion => {
            let (f, g) = two(rng, &m);
            let p = grid_p(rng);
            let eval = Evaluation::new(rule, &m, beliefs, prizes)?;
            if Claim::Indifferent.status(eval.gap(f, g)?) == Status::Holds {
                check_ambiguity_aversion(&mut t, &m, f, g, p)?
            } else {
                match tie_by_mixing(rule, &m, beliefs, prizes, f)? {
                    Some((g, menu)) => check_ambiguity_aversion(&mut t, &menu, f, &g, p)?,
                    None => Outcome::Inconclusive,
                }
            }
        }
        AxiomId::Independence | AxiomId::CIndependence => {
            let (f, g) = two(rng, &m);
            let p = grid_p(rng);
            let h = if axiom == AxiomId::CIndependence {
                constant_act(&random_lottery(rng, prizes), n)
            } else if rng.random() {
                m.acts().choose(rng).expect("nonempty menu").clone()
            } else {
                random_act(rng, "x", &sc)?
            };
            // half the probes start from an indifference
            let tied = if rng.random() {
                tie_by_mixing(rule, &m, beliefs, prizes, f)?
            } else {
                None
            };
            let (menu, g) = match tied {
                Some((g, menu)) => (menu, g),
                None => (m.clone(), g.clone()),
            };
            if axiom == AxiomId::CIndependence {
                check_c_independence(&mut t, opts.policy, &menu, f, &g, &h, p)?
            } else {
                check_independence(&mut t, opts.policy, &menu, f, &g, &h, p)?
            }
        }
        AxiomId::ConstantMenuIndependence => {
            let l = constant_act(&random_lottery(rng, prizes), n);
            let l2 = constant_act(&random_lottery(rng, prizes), n);
            let m1 = m.union_acts(&[l.clone(), l2.clone()])?;
            let mut subset: Vec<Act> = m.acts().iter().filter(|_| rng.random()).cloned().collect();
            subset.push(random_act(rng, "x", &sc)?);
            let m2 = Menu::new(subset)?.union_acts(&[l.clone(), l2.clone()])?;
            check_constant_menu_independence(&mut t, &m1, &m2, &l, &l2)?
        }
        AxiomId::Ina => {
            let count = rng.random_range(1..=2);
            let extra = (0..count)
                .map(|i| dominated_act(rng, &format!("nso{i}"), &sc, &m))
                .collect::<Result<Vec<_>>>()?;
            let extra = Menu::new(extra)?;
            let (f, g) = two(rng, &m);
            check_ina(&mut t, &m, &extra, f, g)?
        }
        AxiomId::Boundedness => check_boundedness(&mut t, &m)?,
        AxiomId::Axiom12 => {
            let f = m.acts().choose(rng).expect("nonempty menu");
            let p = grid_p(rng);
            match tie_by_constant(rule, &m, beliefs, prizes, f)? {
                Some((h, menu)) => check_axiom12(&mut t, &menu, f, &h, p)?,
                None => Outcome::Inconclusive,
            }
        }
        AxiomId::Mdc => {
            if rule != Rule::Mwer {
                return Err(Error::RulePrecondition {
                    rule: rule.to_string(),
                    reason: "the MDC audit applies to MWER".into(),
                });
            }
            let e = random_event(rng, n);
            let (f, g) = two(rng, &m);
            if is_null_event(beliefs, &e) {
                Outcome::Inconclusive
            } else {
                t.condition_on(&e, opts.updater)?;
                check_mdc(&mut t, &m, &e, f, g)?
            }
        }
    };
    let record = t.finish(outcome);
    Ok((sc.clone(), record))
}

impl Updater {
    pub(crate) fn apply(self, beliefs: &WeightedBeliefs, event: &Event) -> Result<WeightedBeliefs> {
        match self {
            Updater::Likelihood => Ok(likelihood_update(beliefs, event)?.beliefs),
            Updater::MeasureByMeasure => measure_by_measure_update(beliefs, event),
        }
    }
}

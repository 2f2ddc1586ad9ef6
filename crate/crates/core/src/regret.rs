//! Regret quantities and the five decision rules.
//!
//! Score functions report the textbook quantity un-negated: regret scores
//! (REG, MER, MWER) are minimized, utility scores (SEU, MMEU) maximized.
//! Orientation is applied only when ranking or comparing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Act, Measure, Menu, PrizeSpace, WeightedBeliefs};

/// Absolute tolerance for indifference between scores.
pub const EPS_PREF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Rule {
    /// Subjective expected utility under a single measure.
    Seu,
    /// Maxmin expected utility; weights are ignored.
    Mmeu,
    /// Minimax expected regret; weights are ignored.
    Mer,
    /// Minimax weighted expected regret.
    Mwer,
    /// Probability-free minimax regret; beliefs are ignored.
    Reg,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Seu, Rule::Reg, Rule::Mer, Rule::Mwer, Rule::Mmeu];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Seu => "seu",
            Rule::Mmeu => "mmeu",
            Rule::Mer => "mer",
            Rule::Mwer => "mwer",
            Rule::Reg => "reg",
        }
    }

    /// True for the regret rules, whose scores are minimized.
    pub fn minimizes(self) -> bool {
        matches!(self, Rule::Mer | Rule::Mwer | Rule::Reg)
    }

    /// Whether the relative order of two acts can depend on the rest of the menu.
    pub fn menu_dependent(self) -> bool {
        self.minimizes()
    }

    /// Maps a raw score to "larger is better".
    pub fn goodness(self, score: f64) -> f64 {
        if self.minimizes() {
            -score
        } else {
            score
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_uppercase())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "seu" => Ok(Rule::Seu),
            "mmeu" => Ok(Rule::Mmeu),
            "mer" => Ok(Rule::Mer),
            "mwer" => Ok(Rule::Mwer),
            "reg" => Ok(Rule::Reg),
            _ => Err(Error::UnknownReference {
                kind: "rule",
                name: s.to_string(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Regret table
// ---------------------------------------------------------------------------

/// Per-act, per-state utilities of a menu and the per-state maxima.
#[derive(Debug, Clone)]
struct UtilityTable {
    utils: Vec<Vec<f64>>,
    best: Vec<f64>,
}

impl UtilityTable {
    fn new(menu: &Menu, prizes: &PrizeSpace) -> Result<Self> {
        if menu.acts()[0].num_prizes() != prizes.len() {
            return Err(Error::mismatch(
                "prize space of menu",
                menu.acts()[0].num_prizes(),
                prizes.len(),
            ));
        }
        let utils: Vec<Vec<f64>> = menu.acts().iter().map(|a| a.utilities(prizes)).collect();
        let n = menu.num_states();
        let best = (0..n)
            .map(|s| utils.iter().map(|u| u[s]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Ok(UtilityTable { utils, best })
    }

    fn regret(&self, act: usize, state: usize) -> f64 {
        self.best[state] - self.utils[act][state]
    }

    fn expected_regret(&self, act: usize, pr: &Measure) -> f64 {
        pr.probs()
            .iter()
            .enumerate()
            .map(|(s, p)| p * self.regret(act, s))
            .sum()
    }

    fn expected_utility(&self, act: usize, pr: &Measure) -> f64 {
        pr.probs().iter().zip(&self.utils[act]).map(|(p, u)| p * u).sum()
    }

    fn worst_case_regret(&self, act: usize) -> f64 {
        (0..self.best.len()).map(|s| self.regret(act, s)).fold(0.0, f64::max)
    }
}

fn locate(f: &Act, menu: &Menu) -> Result<usize> {
    menu.position(f).ok_or_else(|| Error::NotInMenu(f.name().to_string()))
}

fn check_measure(pr: &Measure, menu: &Menu) -> Result<()> {
    if pr.len() != menu.num_states() {
        return Err(Error::mismatch("measure", menu.num_states(), pr.len()));
    }
    Ok(())
}

/// reg_M(f, s) = max_{g∈M} u(g(s)) − u(f(s)).
pub fn regret(f: &Act, state: usize, menu: &Menu, prizes: &PrizeSpace) -> Result<f64> {
    let i = locate(f, menu)?;
    if state >= menu.num_states() {
        return Err(Error::UnknownReference {
            kind: "state",
            name: state.to_string(),
        });
    }
    Ok(UtilityTable::new(menu, prizes)?.regret(i, state))
}

/// max_s reg_M(f, s): the REG score.
pub fn worst_case_regret(f: &Act, menu: &Menu, prizes: &PrizeSpace) -> Result<f64> {
    let i = locate(f, menu)?;
    Ok(UtilityTable::new(menu, prizes)?.worst_case_regret(i))
}

/// Σ_s Pr(s)·reg_M(f, s).
pub fn expected_regret(f: &Act, menu: &Menu, pr: &Measure, prizes: &PrizeSpace) -> Result<f64> {
    let i = locate(f, menu)?;
    check_measure(pr, menu)?;
    Ok(UtilityTable::new(menu, prizes)?.expected_regret(i, pr))
}

/// max over Pr ∈ P of the expected regret: the MER score.
pub fn max_expected_regret<'a>(
    f: &Act,
    menu: &Menu,
    measures: impl IntoIterator<Item = &'a Measure>,
    prizes: &PrizeSpace,
) -> Result<f64> {
    let i = locate(f, menu)?;
    let table = UtilityTable::new(menu, prizes)?;
    let mut best: Option<f64> = None;
    for pr in measures {
        check_measure(pr, menu)?;
        let r = table.expected_regret(i, pr);
        best = Some(best.map_or(r, |b| b.max(r)));
    }
    best.ok_or(Error::EmptyMeasureSet)
}

/// max over (Pr, α) of α·(expected regret): the MWER score.
pub fn max_weighted_expected_regret(
    f: &Act,
    menu: &Menu,
    beliefs: &WeightedBeliefs,
    prizes: &PrizeSpace,
) -> Result<f64> {
    let i = locate(f, menu)?;
    let table = UtilityTable::new(menu, prizes)?;
    beliefs.measures().try_for_each(|pr| check_measure(pr, menu))?;
    Ok(mwer_score(&table, i, beliefs))
}

fn mwer_score(table: &UtilityTable, act: usize, beliefs: &WeightedBeliefs) -> f64 {
    beliefs
        .entries()
        .iter()
        .map(|e| e.weight * table.expected_regret(act, &e.measure))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_rule(rule: Rule, menu: &Menu, beliefs: &WeightedBeliefs) -> Result<()> {
    if rule == Rule::Reg {
        return Ok(());
    }
    if rule == Rule::Seu && beliefs.len() != 1 {
        return Err(Error::RulePrecondition {
            rule: rule.to_string(),
            reason: format!("requires exactly one measure, found {}", beliefs.len()),
        });
    }
    beliefs.measures().try_for_each(|pr| check_measure(pr, menu))
}

/// Raw scores of every act in the menu, in menu order.
pub fn scores(rule: Rule, menu: &Menu, beliefs: &WeightedBeliefs, prizes: &PrizeSpace) -> Result<Vec<f64>> {
    check_rule(rule, menu, beliefs)?;
    let table = UtilityTable::new(menu, prizes)?;
    let out = (0..menu.len())
        .map(|i| match rule {
            Rule::Reg => table.worst_case_regret(i),
            Rule::Mer => beliefs
                .measures()
                .map(|pr| table.expected_regret(i, pr))
                .fold(f64::NEG_INFINITY, f64::max),
            Rule::Mwer => mwer_score(&table, i, beliefs),
            Rule::Seu => table.expected_utility(i, &beliefs.entries()[0].measure),
            Rule::Mmeu => beliefs
                .measures()
                .map(|pr| table.expected_utility(i, pr))
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    Ok(out)
}

/// Raw score of one act of the menu.
pub fn score(rule: Rule, f: &Act, menu: &Menu, beliefs: &WeightedBeliefs, prizes: &PrizeSpace) -> Result<f64> {
    let i = locate(f, menu)?;
    Ok(scores(rule, menu, beliefs, prizes)?[i])
}

// ---------------------------------------------------------------------------
// Rankings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredAct {
    pub name: String,
    pub score: f64,
}

/// Tiers of act names, best first, with the raw score of every act.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceRanking {
    rule: Rule,
    tiers: Vec<Vec<String>>,
    scores: Vec<ScoredAct>,
}

impl PreferenceRanking {
    /// Groups scored acts into tiers. Acts join the current tier while their
    /// score is within [`EPS_PREF`] of the tier's best act.
    pub fn from_scores(rule: Rule, scores: Vec<ScoredAct>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            rule.goodness(scores[b].score)
                .partial_cmp(&rule.goodness(scores[a].score))
                .unwrap_or(Ordering::Equal)
        });
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut head = f64::NAN;
        for i in order {
            let g = rule.goodness(scores[i].score);
            match groups.last_mut() {
                Some(tier) if head - g <= EPS_PREF => tier.push(i),
                _ => {
                    head = g;
                    groups.push(vec![i]);
                }
            }
        }
        let tiers = groups
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t.into_iter().map(|i| scores[i].name.clone()).collect()
            })
            .collect();
        PreferenceRanking { rule, tiers, scores }
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn tiers(&self) -> &[Vec<String>] {
        &self.tiers
    }

    pub fn scores(&self) -> &[ScoredAct] {
        &self.scores
    }

    pub fn score(&self, name: &str) -> Option<f64> {
        self.scores.iter().find(|s| s.name == name).map(|s| s.score)
    }

    pub fn tier_of(&self, name: &str) -> Option<usize> {
        self.tiers.iter().position(|t| t.iter().any(|n| n == name))
    }

    /// Act names in the order they appear in the tiers.
    pub fn names(&self) -> Vec<&str> {
        self.tiers.iter().flatten().map(String::as_str).collect()
    }

    /// Same partition into the same tier sequence, ignoring order inside a tier.
    pub fn same_tiers(&self, other: &PreferenceRanking) -> bool {
        self.tiers.len() == other.tiers.len()
            && self.tiers.iter().zip(&other.tiers).all(|(a, b)| {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort();
                b.sort();
                a == b
            })
    }

    /// `Greater` when `f` is in a better tier than `g`.
    pub fn compare(&self, f: &str, g: &str) -> Option<Ordering> {
        Some(self.tier_of(g)?.cmp(&self.tier_of(f)?))
    }
}

/// Ranks every act of the menu under the rule.
pub fn rank(rule: Rule, menu: &Menu, beliefs: &WeightedBeliefs, prizes: &PrizeSpace) -> Result<PreferenceRanking> {
    let raw = scores(rule, menu, beliefs, prizes)?;
    let scored = menu
        .names()
        .zip(raw)
        .map(|(name, score)| ScoredAct {
            name: name.to_string(),
            score,
        })
        .collect();
    Ok(PreferenceRanking::from_scores(rule, scored))
}

/// How acts outside the menu are treated when ranking a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Membership {
    /// Acts must already belong to the menu.
    #[default]
    Strict,
    /// The menu is first extended by the acts.
    Extend,
}

/// Ranks only `acts`, with regret measured against `menu` (optionally
/// extended by the acts themselves).
pub fn rank_acts(
    rule: Rule,
    menu: &Menu,
    acts: &[Act],
    membership: Membership,
    beliefs: &WeightedBeliefs,
    prizes: &PrizeSpace,
) -> Result<PreferenceRanking> {
    let menu = match membership {
        Membership::Strict => menu.clone(),
        Membership::Extend => menu.union_acts(acts)?,
    };
    let idx = acts.iter().map(|a| locate(a, &menu)).collect::<Result<Vec<_>>>()?;
    let raw = scores(rule, &menu, beliefs, prizes)?;
    let scored = acts
        .iter()
        .zip(idx)
        .map(|(a, i)| ScoredAct {
            name: a.name().to_string(),
            score: raw[i],
        })
        .collect();
    Ok(PreferenceRanking::from_scores(rule, scored))
}

/// Scores of a whole menu, kept for repeated pairwise comparisons.
#[derive(Debug, Clone)]
pub struct Evaluation {
    rule: Rule,
    menu: Menu,
    scores: Vec<f64>,
}

impl Evaluation {
    pub fn new(rule: Rule, menu: &Menu, beliefs: &WeightedBeliefs, prizes: &PrizeSpace) -> Result<Self> {
        Ok(Evaluation {
            rule,
            menu: menu.clone(),
            scores: scores(rule, menu, beliefs, prizes)?,
        })
    }

    pub fn menu(&self) -> &Menu {
        &self.menu
    }

    pub fn score(&self, f: &Act) -> Result<f64> {
        Ok(self.scores[locate(f, &self.menu)?])
    }

    /// Oriented score difference: positive when `f` is better than `g`.
    pub fn gap(&self, f: &Act, g: &Act) -> Result<f64> {
        Ok(self.rule.goodness(self.score(f)?) - self.rule.goodness(self.score(g)?))
    }

    /// f ⪰_M g.
    pub fn weakly_prefers(&self, f: &Act, g: &Act) -> Result<bool> {
        Ok(self.gap(f, g)? >= -EPS_PREF)
    }

    /// f ≻_M g.
    pub fn strictly_prefers(&self, f: &Act, g: &Act) -> Result<bool> {
        Ok(self.gap(f, g)? > EPS_PREF)
    }
}

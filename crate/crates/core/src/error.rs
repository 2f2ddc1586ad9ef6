use thiserror::Error;

/// Errors produced by the decision engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violates one of its type invariants.
    #[error("invalid {kind} '{name}': {reason}")]
    Invalid {
        kind: &'static str,
        name: String,
        reason: String,
    },

    /// Two objects that must share a state or prize space do not.
    #[error("dimension mismatch for {what}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    /// A name refers to nothing declared in the scenario.
    #[error("unknown {kind} '{name}'")]
    UnknownReference { kind: &'static str, name: String },

    #[error("act '{0}' is not a member of the menu")]
    NotInMenu(String),

    #[error("mixing coefficient {0} is outside [0, 1]")]
    MixOutOfRange(f64),

    #[error("cannot condition on an event of probability zero")]
    ConditioningUndefined,

    /// Likelihood (or other) updating is undefined because no measure
    /// gives the event positive weighted probability.
    #[error("update undefined: {0}")]
    UpdateUndefined(String),

    #[error("rule {rule} cannot be applied: {reason}")]
    RulePrecondition { rule: String, reason: String },

    #[error("empty measure set")]
    EmptyMeasureSet,

    #[error("probe precondition violated: {0}")]
    ProbePrecondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(kind: &'static str, name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            kind,
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn mismatch(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    /// True when the error means "operation undefined" rather than bad input.
    pub fn is_undefined(&self) -> bool {
        matches!(self, Error::UpdateUndefined(_) | Error::ConditioningUndefined)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

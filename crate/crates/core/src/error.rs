use thiserror::Error;

use crate::subset::Subset;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GtError {
    #[error("zero-or-negative field: {0} must be at least 1")]
    ZeroField(&'static str),

    #[error("capacity-exceeds-k: alpha = {alpha} > k = {k}")]
    CapacityExceedsK { alpha: usize, k: usize },

    #[error("k-exceeds-n: k = {k} > n = {n}")]
    KExceedsN { k: usize, n: usize },

    #[error("alpha-exceeds-n: alpha = {alpha} > n = {n}")]
    AlphaExceedsN { alpha: usize, n: usize },

    #[error("universe-too-large: n = {n} exceeds the supported maximum of {max}")]
    UniverseTooLarge { n: usize, max: usize },

    #[error("beta-exceeds-bar-alpha: beta = {beta} > bar_alpha = {bar_alpha}")]
    BetaExceedsBarAlpha { beta: usize, bar_alpha: usize },

    #[error("element {id} outside universe [1..{n}]")]
    ElementOutOfRange { id: usize, n: usize },

    #[error("duplicate element {0} in query")]
    DuplicateElement(usize),

    #[error("sequence has {actual} queries but provenance parts sum to {recorded}")]
    PartLengthMismatch { actual: usize, recorded: usize },

    #[error("capacity-exceeded: feedback input has {size} elements, capacity is {alpha}")]
    CapacityExceeded { size: usize, alpha: usize },

    #[error("missing-code: GENFEED feedback requires a BCC code")]
    MissingCode,

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("budget-infeasible: no [n={n}, width={width}, gamma={gamma}] code found after {attempts} attempts")]
    BudgetInfeasible {
        n: usize,
        gamma: usize,
        width: usize,
        attempts: usize,
    },

    #[error("resource-limit: {what} count {count} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        count: u128,
        cap: u128,
    },

    #[error("invalid-range: delta = {delta} outside [1, {max}]")]
    InvalidDelta { delta: usize, max: usize },

    #[error("precondition-violated: {0}")]
    PreconditionViolated(String),

    #[error("attempts-exhausted after {attempts} attempts")]
    AttemptsExhausted {
        attempts: usize,
        witness: Option<(Subset, Subset)>,
    },

    #[error("length-mismatch: observed {observed} words for {expected} queries")]
    LengthMismatch { observed: usize, expected: usize },

    #[error("infeasible-constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("universe mismatch: sequence has n = {sequence}, feedback has n = {feedback}")]
    UniverseMismatch { sequence: usize, feedback: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GtError>;

use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the learning core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("directed cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self-arc on node `{0}`")]
    SelfArc(String),
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(String, String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("variable `{0}` must have at least two states")]
    TooFewStates(String),
    #[error("variable `{variable}` declares state `{state}` twice")]
    DuplicateState { variable: String, state: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("state index {index} out of range for variable `{variable}` with {arity} states")]
    StateOutOfRange {
        variable: String,
        index: usize,
        arity: usize,
    },
    #[error("invalid probability table for `{variable}`: {reason}")]
    InvalidCpt { variable: String, reason: String },
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("joint state space of {states} exceeds cap {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("case {case}: variable `{variable}` is missing; use the hidden-variable scorer")]
    MissingValue { case: usize, variable: String },
    #[error("{completions} completions exceed cap {cap}")]
    TooManyCompletions { completions: u128, cap: u128 },
    #[error("counts and priors are indexed by different structures: {0}")]
    IndexMismatch(String),
    #[error("graphs are over different node sets")]
    NodeSetMismatch,
    #[error("{what} {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },
    #[error("case {case}: variable `{variable}` is set by intervention, which acausal mode does not allow")]
    InterventionInAcausalMode { case: usize, variable: String },
    #[error("hypothesis priors must be positive and sum to 1, got sum {0}")]
    InvalidHypothesisPriors(f64),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("empty hypothesis list")]
    NoHypotheses,
}

pub type Result<T> = core::result::Result<T, Error>;

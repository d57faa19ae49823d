use thiserror::Error;

/// Errors raised while parsing process, activity-term, or environment text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Errors raised by the semantic layers (enumeration, execution, checking).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The environment lacks a verdict for an activity reachable from the
    /// process under evaluation.
    #[error("environment has no verdict for activity `{name}`")]
    MissingVerdict { name: String },

    /// A non-terminal configuration with no outgoing step. Should be
    /// impossible for well-formed inputs; reported for study.
    #[error("progress violation: configuration `{config}` has no outgoing step")]
    Stuck { config: String },

    /// A configuration repeated along a single path, which the calculus
    /// rules out; reported as a termination monitor trip.
    #[error("termination violation: configuration `{config}` revisited along one path")]
    Revisited { config: String },

    /// Trace enumeration exceeded the configured computation budget.
    #[error("computation cap exceeded: more than {cap} maximal computations")]
    ComputationCap { cap: usize },

    /// A single computation exceeded the configured length budget.
    #[error("computation length cap exceeded: more than {cap} steps")]
    LengthCap { cap: usize },

    /// Materializing a linearization set exceeded the configured budget.
    #[error("linearization cap exceeded: more than {cap} words; use the membership test instead")]
    LinearizationCap { cap: usize },

    /// A protected or killed block whose body is not an activity-term shape.
    /// The transition rules never build such a body.
    #[error("internal invariant violated: protected body `{process}` is not an activity term")]
    MalformedProtectedBody { process: String },

    /// A stored compensation containing parallel composition where only
    /// sequential terms may appear.
    #[error("internal invariant violated: stored compensation `{term}` is not sequential")]
    NonSequentialStore { term: String },
}

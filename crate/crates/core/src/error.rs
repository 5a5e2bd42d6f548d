use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// A configuration value violates its invariant.
    Config(&'static str),
    /// A rotation was requested with the rotation budget exhausted.
    PlanInfeasible,
    /// Rotation indices are not strictly increasing, out of range, or too many.
    InvalidPlan(&'static str),
    /// The action is not enabled in the current game phase.
    IllegalAction(&'static str),
    /// No winning plan exists for the request.
    NoStrategy,
    /// Too few observed points for the requested operation.
    InsufficientData(&'static str),
    /// The simulated horizon does not cover the observed steps.
    Coverage { observed: u32, horizon: u32 },
    /// A value does not fit into the fixed-point integer range.
    Range,
    /// An observation trace violates its invariants.
    Trace(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::PlanInfeasible => f.write_str("rotation budget exhausted"),
            Error::InvalidPlan(msg) => write!(f, "invalid plan: {msg}"),
            Error::IllegalAction(msg) => write!(f, "illegal action: {msg}"),
            Error::NoStrategy => f.write_str("no winning strategy"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::Coverage { observed, horizon } => {
                write!(f, "plan horizon {horizon} does not cover observed step {observed}")
            }
            Error::Range => f.write_str("value out of fixed-point range"),
            Error::Trace(msg) => write!(f, "invalid trace: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

use thiserror::Error;

/// Errors raised by schedule construction, sequence generation, oracles and
/// the SGD engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A recursion/schedule parameter violates its bound. Names the exact
    /// constraint so campaign drivers can surface it verbatim.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A lemma or schedule that needs `a > 0` (resp. `mu > 0`) was asked for
    /// the degenerate rate; callers should use the sublinear path instead.
    #[error("{0} requires a positive decay rate; use the sublinear lemma/schedule for a = 0")]
    SublinearRequired(&'static str),

    /// Horizon-dependent bounds are undefined at `T = 0`.
    #[error("{0} is undefined at horizon T = 0")]
    ZeroHorizon(&'static str),

    /// Weighted averaging with no mass anywhere.
    #[error("all averaging weights are zero")]
    AllZeroWeights,

    /// A sequence and a schedule that are supposed to share a horizon do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// The engine was handed a schedule whose stepsizes exceed 1/(2L).
    #[error("stepsize cap violated: max gamma {max_gamma} > 1/(2L) = {cap}")]
    StepsizeCapExceeded { max_gamma: f64, cap: f64 },

    /// Problem-instance construction failed (bad data, contradiction between
    /// flags and data, ...).
    #[error("oracle construction: {0}")]
    OracleConstruction(String),

    /// An inner deterministic solve ran out of its iteration budget.
    #[error("inner solver did not converge: {0}")]
    SolverDidNotConverge(String),

    /// Pathwise descent checking is only meaningful when the sampled gradient
    /// equals the full gradient.
    #[error(
        "descent margin requested on a stochastic oracle; the inequality only holds in expectation"
    )]
    DescentCheckOnStochasticOracle,
}

pub type Result<T> = std::result::Result<T, Error>;

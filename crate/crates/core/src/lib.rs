//! SGD under an unbiased `(L, sigma)`-smooth gradient oracle model, the
//! stepsize/weight schedules that make it converge, and machinery for
//! verifying the associated convergence bounds empirically, both on the
//! abstract recursion and on concrete problem instances.

// Parameter guards are written as `!(x > 0)` on purpose: NaN must fail
// validation, and the negated form does exactly that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod linalg;
pub mod oracles;
pub mod recursion;
pub mod rng;
pub mod scalar;
pub mod schedules;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::Scalar;

/// Concrete f64 aliases; the CLI and the test suites run on these.
pub type RecursionParams64 = recursion::RecursionParams<f64>;
pub type SequencePair64 = recursion::SequencePair<f64>;
pub type Schedule64 = schedules::StepWeightSchedule<f64>;
pub type Oracle64 = oracles::ProblemOracle<f64>;
pub type RunConfig64 = engine::RunConfig<f64>;
pub type RunResult64 = engine::RunResult<f64>;
pub type BoundReport64 = engine::BoundReport<f64>;

//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type. `f64` is the default used by the CLI and the test
//! suites; `f32` is supported for experimentation.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Conversion from `f64` literals; exact for every constant used here.
#[inline]
pub(crate) fn cst<F: Scalar>(v: f64) -> F {
    F::from_f64(v).expect("constant representable in scalar type")
}

/// Converts an iteration count; exact for `t < 2^53`.
#[inline]
pub(crate) fn cst_usize<F: Scalar>(v: usize) -> F {
    cst(v as f64)
}

/// Pairwise (cascade) summation over a slice.
///
/// Deterministic for a fixed slice order, which is the documented reduction
/// order for bit-exact replay of campaign aggregates. Also considerably more
/// accurate than a running sum for long inputs.
pub fn pairwise_sum<F: Scalar>(xs: &[F]) -> F {
    match xs.len() {
        0 => F::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
    }

    #[test]
    fn pairwise_empty_and_single() {
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5f64]), 3.5);
    }
}

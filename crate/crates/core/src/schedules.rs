//! Stepsize and averaging-weight schedules.
//!
//! Each schedule is a finite-horizon pair `(gamma_0..gamma_T, w_0..w_T)`.
//! Both sequences are stored in closed form so horizons beyond 10^7 stream
//! in O(1) memory; `gammas_vec` / `weights_vec` materialize explicit arrays
//! when a caller wants them. Exponential weights `(1 - a*gamma)^-(t+1)`
//! overflow f64 for modest horizons, so consumers that average online use
//! the relative-weight accessor `ratio_between` instead of raw values.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::{cst, cst_usize, Scalar};

/// Which lemma/construction a schedule realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Tuned constant stepsize with exponential weights (log-factor lemma).
    ConstantLog,
    /// Constant first phase with zero weights, then decreasing stepsizes with
    /// polynomially growing weights (the 32/36 lemma).
    TwoPhase,
    /// Constant stepsize, uniform weights (the a = 0 lemma).
    Sublinear,
    /// Caller-chosen constant stepsize. Also used by the classic
    /// distance-recursion schedule, which weights the last iterate only.
    UserConstant,
    /// Decreasing stepsizes over the whole horizon, exposed for the
    /// decreasing-stepsize recursion experiments only.
    Decreasing,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::ConstantLog => "constant_log",
            Family::TwoPhase => "two_phase",
            Family::Sublinear => "sublinear",
            Family::UserConstant => "user_constant",
            Family::Decreasing => "decreasing",
        }
    }
}

/// Stepsize sequence in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaSeq<F> {
    Constant {
        value: F,
    },
    /// `1/d` before `t0`, then `2 / (2d + a*(t - t0))`.
    TwoPhase {
        d: F,
        a: F,
        t0: usize,
    },
    /// `2 / (2d + a*t)` for every t.
    Decreasing {
        d: F,
        a: F,
    },
}

impl<F: Scalar> GammaSeq<F> {
    #[inline]
    pub fn at(&self, t: usize) -> F {
        match *self {
            GammaSeq::Constant { value } => value,
            GammaSeq::TwoPhase { d, a, t0 } => {
                if t < t0 {
                    F::one() / d
                } else {
                    cst::<F>(2.0) / (cst::<F>(2.0) * d + a * cst_usize(t - t0))
                }
            }
            GammaSeq::Decreasing { d, a } => cst::<F>(2.0) / (cst::<F>(2.0) * d + a * cst_usize(t)),
        }
    }
}

/// Averaging-weight sequence in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSeq<F> {
    Uniform,
    /// All mass on the final iterate.
    LastOnly,
    /// Exponential weights `w_t = ratio^(t+1)` with `ratio = 1/(1 - a*gamma)`.
    Geometric {
        ratio: F,
    },
    /// Zero before `t0`, `(kappa + t - t0)^2` afterwards.
    SuffixSquare {
        kappa: F,
        t0: usize,
    },
    /// `kappa + t` (linear weights of the decreasing-stepsize lemma).
    ShiftedLinear {
        kappa: F,
    },
    /// `(kappa + t)^2` (quadratic variant of the same).
    ShiftedSquare {
        kappa: F,
    },
    Explicit(Vec<F>),
}

impl<F: Scalar> WeightSeq<F> {
    /// Raw weight value. Overflows for `Geometric` at large `t`; callers that
    /// need large horizons use `ratio_between` instead.
    pub fn at(&self, t: usize, horizon: usize) -> F {
        match self {
            WeightSeq::Uniform => F::one(),
            WeightSeq::LastOnly => {
                if t == horizon {
                    F::one()
                } else {
                    F::zero()
                }
            }
            WeightSeq::Geometric { ratio } => ratio.powi(t as i32 + 1),
            WeightSeq::SuffixSquare { kappa, t0 } => {
                if t < *t0 {
                    F::zero()
                } else {
                    let u = *kappa + cst_usize(t - *t0);
                    u * u
                }
            }
            WeightSeq::ShiftedLinear { kappa } => *kappa + cst_usize(t),
            WeightSeq::ShiftedSquare { kappa } => {
                let u = *kappa + cst_usize(t);
                u * u
            }
            WeightSeq::Explicit(w) => w[t],
        }
    }

    /// `w_prev / w_cur` for two positive-weight indices `prev < cur`,
    /// computed without materializing either weight.
    pub fn ratio_between(&self, prev: usize, cur: usize) -> F {
        debug_assert!(prev < cur);
        match self {
            WeightSeq::Uniform => F::one(),
            WeightSeq::LastOnly => F::zero(),
            WeightSeq::Geometric { ratio } => (F::one() / *ratio).powi((cur - prev) as i32),
            WeightSeq::SuffixSquare { kappa, t0 } => {
                let up = *kappa + cst_usize(prev.saturating_sub(*t0));
                let uc = *kappa + cst_usize(cur - *t0);
                if prev < *t0 {
                    F::zero()
                } else {
                    (up / uc).powi(2)
                }
            }
            WeightSeq::ShiftedLinear { kappa } => {
                (*kappa + cst_usize(prev)) / (*kappa + cst_usize(cur))
            }
            WeightSeq::ShiftedSquare { kappa } => {
                ((*kappa + cst_usize(prev)) / (*kappa + cst_usize(cur))).powi(2)
            }
            WeightSeq::Explicit(w) => w[prev] / w[cur],
        }
    }

    #[inline]
    pub fn is_zero_at(&self, t: usize, horizon: usize) -> bool {
        match self {
            WeightSeq::Uniform | WeightSeq::Geometric { .. } => false,
            WeightSeq::LastOnly => t != horizon,
            WeightSeq::SuffixSquare { t0, .. } => t < *t0,
            WeightSeq::ShiftedLinear { .. } | WeightSeq::ShiftedSquare { .. } => false,
            WeightSeq::Explicit(w) => w[t] == F::zero(),
        }
    }

    /// Normalized weights `w_t / W_T`, computed stably (backwards from the
    /// largest weight for geometric growth, so nothing overflows).
    pub fn normalized(&self, horizon: usize) -> Vec<F> {
        let len = horizon + 1;
        match self {
            WeightSeq::Geometric { ratio } if *ratio > F::one() => {
                let inv = F::one() / *ratio;
                // rel_t = w_t / w_T, accumulated backwards.
                let mut rel = vec![F::zero(); len];
                let mut cur = F::one();
                let mut total = F::zero();
                for t in (0..len).rev() {
                    rel[t] = cur;
                    total = total + cur;
                    cur = cur * inv;
                }
                rel.iter().map(|x| *x / total).collect()
            }
            _ => {
                let raw: Vec<F> = (0..len).map(|t| self.at(t, horizon)).collect();
                let total = crate::scalar::pairwise_sum(&raw);
                raw.iter().map(|x| *x / total).collect()
            }
        }
    }
}

/// Finite-horizon stepsizes plus averaging weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWeightSchedule<F> {
    family: Family,
    horizon: usize,
    gammas: GammaSeq<F>,
    weights: WeightSeq<F>,
    /// The cap `1/d` the stepsizes were built against.
    gamma_cap: F,
    /// Set when the sublinear construction hit the `r0 = 0, c > 0` corner and
    /// fell back to `1/d`; the lemma's stated bound is vacuous there.
    degenerate: bool,
}

impl<F: Scalar> StepWeightSchedule<F> {
    pub fn family(&self) -> Family {
        self.family
    }

    /// Horizon `T`; the schedule covers steps `t = 0..=T`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gamma_cap(&self) -> F {
        self.gamma_cap
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    #[inline]
    pub fn gamma(&self, t: usize) -> F {
        debug_assert!(t <= self.horizon);
        self.gammas.at(t)
    }

    pub fn weights(&self) -> &WeightSeq<F> {
        &self.weights
    }

    pub fn gammas_vec(&self) -> Vec<F> {
        (0..=self.horizon).map(|t| self.gammas.at(t)).collect()
    }

    pub fn weights_vec(&self) -> Vec<F> {
        (0..=self.horizon)
            .map(|t| self.weights.at(t, self.horizon))
            .collect()
    }

    /// Constant stepsize `min{1/d, ln(max{2, a^2 r0 T^2 / c}) / (aT)}` with
    /// exponential weights. With `c = 0` the log argument is taken as
    /// infinite, so the cap branch is always selected. When the cap makes
    /// `a*gamma = 1` the exponential weights degenerate to last-iterate mass.
    pub fn constant_log(a: F, d: F, c: F, r0: F, horizon: usize) -> Result<Self> {
        if !(a > F::zero()) {
            return Err(Error::SublinearRequired("constant_log schedule"));
        }
        check_d(a, d)?;
        if r0 < F::zero() {
            return Err(Error::InvalidParameter("r0 must be >= 0".into()));
        }
        if c < F::zero() {
            return Err(Error::InvalidParameter("c must be >= 0".into()));
        }
        if horizon < 1 {
            return Err(Error::ZeroHorizon("constant_log schedule"));
        }
        let cap = F::one() / d;
        let t_f = cst_usize::<F>(horizon);
        let gamma = if c == F::zero() {
            cap
        } else {
            let arg = cst::<F>(2.0).max(a * a * r0 * t_f * t_f / c);
            cap.min(arg.ln() / (a * t_f))
        };
        Ok(StepWeightSchedule {
            family: Family::ConstantLog,
            horizon,
            gammas: GammaSeq::Constant { value: gamma },
            weights: exponential_weights(a, gamma),
            gamma_cap: cap,
            degenerate: false,
        })
    }

    /// Two-phase schedule: for `T <= d/a` a constant stepsize with
    /// exponential weights; otherwise `gamma = 1/d` with zero weight up to
    /// `t0 = ceil(T/2)`, then `gamma_t = 2/(a (kappa + t - t0))` with weights
    /// `(kappa + t - t0)^2`, `kappa = 2d/a`.
    pub fn two_phase(a: F, d: F, horizon: usize) -> Result<Self> {
        if !(a > F::zero()) {
            return Err(Error::SublinearRequired("two_phase schedule"));
        }
        check_d(a, d)?;
        let cap = F::one() / d;
        let t_f = cst_usize::<F>(horizon);
        if t_f <= d / a {
            return Ok(StepWeightSchedule {
                family: Family::TwoPhase,
                horizon,
                gammas: GammaSeq::Constant { value: cap },
                weights: exponential_weights(a, cap),
                gamma_cap: cap,
                degenerate: false,
            });
        }
        let t0 = horizon.div_ceil(2);
        let kappa = cst::<F>(2.0) * d / a;
        Ok(StepWeightSchedule {
            family: Family::TwoPhase,
            horizon,
            gammas: GammaSeq::TwoPhase { d, a, t0 },
            weights: WeightSeq::SuffixSquare { kappa, t0 },
            gamma_cap: cap,
            degenerate: false,
        })
    }

    /// Constant stepsize for the `a = 0` regime: `1/d` when
    /// `1/d^2 <= r0 / (c (T+1))`, otherwise `sqrt(r0 / (c (T+1)))`; uniform
    /// weights. `r0 = 0` with `c > 0` would ask for a zero stepsize; the
    /// schedule falls back to `1/d` and is flagged degenerate.
    pub fn sublinear(d: F, c: F, r0: F, horizon: usize) -> Result<Self> {
        if !(d > F::zero()) {
            return Err(Error::InvalidParameter("d must be > 0".into()));
        }
        if c < F::zero() || r0 < F::zero() {
            return Err(Error::InvalidParameter("c and r0 must be >= 0".into()));
        }
        let cap = F::one() / d;
        let t1 = cst_usize::<F>(horizon + 1);
        let (gamma, degenerate) = if c == F::zero() {
            (cap, false)
        } else if r0 == F::zero() {
            (cap, true)
        } else if F::one() / (d * d) <= r0 / (c * t1) {
            (cap, false)
        } else {
            ((r0 / (c * t1)).sqrt(), false)
        };
        Ok(StepWeightSchedule {
            family: Family::Sublinear,
            horizon,
            gammas: GammaSeq::Constant { value: gamma },
            weights: WeightSeq::Uniform,
            gamma_cap: cap,
            degenerate,
        })
    }

    /// The classic constant-stepsize choice backing the distance recursion:
    /// `gamma = min{1/(2L), ln(max{2, mu^2 R^2 T / sigma^2}) / (mu T)}`, with
    /// the `sigma^2 = 0` convention selecting the cap. Weights are
    /// last-iterate only; this schedule targets the final distance, not an
    /// averaged function value.
    pub fn classic_constant(mu: F, big_l: F, r_sq: F, sigma_sq: F, horizon: usize) -> Result<Self> {
        if !(mu > F::zero()) {
            return Err(Error::SublinearRequired("classic constant schedule"));
        }
        if !(big_l > F::zero()) {
            return Err(Error::InvalidParameter("L must be > 0".into()));
        }
        if horizon < 1 {
            return Err(Error::ZeroHorizon("classic constant schedule"));
        }
        if r_sq < F::zero() || sigma_sq < F::zero() {
            return Err(Error::InvalidParameter(
                "R^2 and sigma^2 must be >= 0".into(),
            ));
        }
        let cap = F::one() / (cst::<F>(2.0) * big_l);
        let t_f = cst_usize::<F>(horizon);
        let gamma = if sigma_sq == F::zero() {
            cap
        } else {
            let arg = cst::<F>(2.0).max(mu * mu * r_sq * t_f / sigma_sq);
            cap.min(arg.ln() / (mu * t_f))
        };
        Ok(StepWeightSchedule {
            family: Family::UserConstant,
            horizon,
            gammas: GammaSeq::Constant { value: gamma },
            weights: WeightSeq::LastOnly,
            gamma_cap: cap,
            degenerate: false,
        })
    }

    /// Caller-chosen constant stepsize with explicit weights.
    pub fn user_constant(gamma: F, d: F, horizon: usize, weights: WeightSeq<F>) -> Result<Self> {
        if !(gamma > F::zero()) {
            return Err(Error::InvalidParameter("gamma must be > 0".into()));
        }
        if !(d > F::zero()) || gamma > F::one() / d {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} exceeds the cap 1/d = {}",
                F::one() / d
            )));
        }
        validate_weights(&weights, horizon)?;
        Ok(StepWeightSchedule {
            family: Family::UserConstant,
            horizon,
            gammas: GammaSeq::Constant { value: gamma },
            weights,
            gamma_cap: F::one() / d,
            degenerate: false,
        })
    }

    /// `gamma_t = 2/(a (kappa + t))`, `kappa = 2d/a`, with either linear
    /// `(kappa + t)` or quadratic `(kappa + t)^2` weights. Both weight
    /// readings of the decreasing-stepsize lemma are exposed; the recursion
    /// experiments report margins for each.
    pub fn decreasing(a: F, d: F, horizon: usize, quadratic_weights: bool) -> Result<Self> {
        if !(a > F::zero()) {
            return Err(Error::SublinearRequired("decreasing schedule"));
        }
        check_d(a, d)?;
        let kappa = cst::<F>(2.0) * d / a;
        let weights = if quadratic_weights {
            WeightSeq::ShiftedSquare { kappa }
        } else {
            WeightSeq::ShiftedLinear { kappa }
        };
        Ok(StepWeightSchedule {
            family: Family::Decreasing,
            horizon,
            gammas: GammaSeq::Decreasing { d, a },
            weights,
            gamma_cap: F::one() / d,
            degenerate: false,
        })
    }

    /// Serializes the schedule as CSV with columns `t,gamma,weight`. The
    /// weight column carries normalized weights `w_t / W_T` (raw exponential
    /// weights overflow f64 at large horizons; the normalized form is what
    /// the averages actually use).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,gamma,weight")?;
        let normalized = self.weights.normalized(self.horizon);
        for (t, weight) in normalized.iter().enumerate() {
            writeln!(out, "{},{},{}", t, self.gamma(t), weight)?;
        }
        Ok(())
    }
}

/// Exponential weights `(1 - a*gamma)^-(t+1)`, degenerating to last-iterate
/// mass at `a*gamma = 1` (that limit kills `r_t` in one recursion step).
fn exponential_weights<F: Scalar>(a: F, gamma: F) -> WeightSeq<F> {
    let a_gamma = a * gamma;
    if a_gamma >= F::one() {
        WeightSeq::LastOnly
    } else {
        WeightSeq::Geometric {
            ratio: F::one() / (F::one() - a_gamma),
        }
    }
}

fn check_d<F: Scalar>(a: F, d: F) -> Result<()> {
    if !(d > F::zero()) {
        return Err(Error::InvalidParameter("d must be > 0".into()));
    }
    if d < a {
        return Err(Error::InvalidParameter(format!(
            "d = {d} must be >= a = {a}"
        )));
    }
    Ok(())
}

fn validate_weights<F: Scalar>(weights: &WeightSeq<F>, horizon: usize) -> Result<()> {
    if let WeightSeq::Explicit(w) = weights {
        if w.len() != horizon + 1 {
            return Err(Error::LengthMismatch(format!(
                "weights length {} != horizon + 1 = {}",
                w.len(),
                horizon + 1
            )));
        }
        if w.iter().any(|x| *x < F::zero()) {
            return Err(Error::InvalidParameter(
                "weights must be non-negative".into(),
            ));
        }
        if w.iter().all(|x| *x == F::zero()) {
            return Err(Error::AllZeroWeights);
        }
    }
    Ok(())
}

//! The SGD iteration, online weighted averaging, bound evaluation and
//! replicate campaigns.
//!
//! A run follows `x_{t+1} = x_t - gamma_t g_t` for `t = 0..=T` and maintains
//! the weighted average `xbar = (1/W_T) sum_t w_t x_t` online via
//! `xbar <- (1 - rho_t) xbar + rho_t x_t` with `rho_t = w_t / W_t`, where
//! `W_t / w_t` follows the stable ratio recurrence (exponential weights never
//! get materialized). Zero-weight iterates advance the state but never touch
//! the average.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{axpy, norm_sq, sub};
use crate::oracles::ProblemOracle;
use crate::rng::{stream_id_from, RngStream};
use crate::scalar::{cst, cst_usize, pairwise_sum, Scalar};
use crate::schedules::StepWeightSchedule;

/// Normal quantile for two-sided 99% confidence intervals.
const Z99: f64 = 2.575829303548901;

/// Configuration of one SGD run.
#[derive(Debug, Clone)]
pub struct RunConfig<F> {
    pub horizon: usize,
    pub schedule: StepWeightSchedule<F>,
    pub replicate_seed: u64,
    pub record_trajectory: bool,
    pub descent_check: bool,
}

impl<F: Scalar> RunConfig<F> {
    pub fn new(schedule: StepWeightSchedule<F>, replicate_seed: u64) -> Self {
        RunConfig {
            horizon: schedule.horizon(),
            schedule,
            replicate_seed,
            record_trajectory: false,
            descent_check: false,
        }
    }

    pub fn with_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn with_descent_check(mut self) -> Self {
        self.descent_check = true;
        self.record_trajectory = true;
        self
    }
}

/// Summary of one SGD trajectory.
#[derive(Debug, Clone)]
pub struct RunResult<F> {
    /// `f(xbar_T) - f*`.
    pub f_gap_avg: F,
    /// `||x_{T+1} - x*||^2`.
    pub dist_sq_last: F,
    /// `f_gap_avg + mu * dist_sq_last`, the quantity the main bound controls.
    pub composite: F,
    /// Pathwise descent margins, when requested on a deterministic oracle.
    pub descent_margins: Option<Vec<F>>,
    /// Iterates `x_0..x_{T+1}`, when recorded.
    pub trajectory: Option<Vec<Vec<F>>>,
    pub wall_time: Duration,
}

/// Runs SGD under a schedule. Stepsizes must respect `gamma_t <= 1/(2L)`;
/// the engine rejects schedules that violate the cap.
pub fn run_sgd<F: Scalar>(
    oracle: &ProblemOracle<F>,
    x0: &[F],
    cfg: &RunConfig<F>,
) -> Result<RunResult<F>> {
    let start = Instant::now();
    let horizon = cfg.horizon;
    if cfg.schedule.horizon() != horizon {
        return Err(Error::LengthMismatch(format!(
            "schedule horizon {} != config horizon {horizon}",
            cfg.schedule.horizon()
        )));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::LengthMismatch(format!(
            "x0 has {} coordinates, oracle dim is {}",
            x0.len(),
            oracle.dim()
        )));
    }
    // Schedules in this crate are non-increasing, so the first stepsize is
    // the largest.
    let cap = F::one() / (cst::<F>(2.0) * oracle.big_l());
    let max_gamma = cfg.schedule.gamma(0);
    if max_gamma > cap * (F::one() + cst::<F>(1e-12)) {
        return Err(Error::StepsizeCapExceeded {
            max_gamma: max_gamma.to_f64().unwrap_or(f64::NAN),
            cap: cap.to_f64().unwrap_or(f64::NAN),
        });
    }
    if cfg.descent_check && !oracle.is_deterministic() {
        return Err(Error::DescentCheckOnStochasticOracle);
    }

    let mut grad_rng = RngStream::new(cfg.replicate_seed, 0);
    let weights = cfg.schedule.weights();

    let mut x = x0.to_vec();
    let mut xbar: Vec<F> = Vec::new();
    let mut q = F::zero();
    let mut prev_positive: Option<usize> = None;

    let mut trajectory = if cfg.record_trajectory {
        let mut v = Vec::with_capacity(horizon + 2);
        v.push(x.clone());
        Some(v)
    } else {
        None
    };
    let mut margins = if cfg.descent_check {
        Some(Vec::with_capacity(horizon + 1))
    } else {
        None
    };

    for t in 0..=horizon {
        // Fold x_t into the running average before stepping.
        if !weights.is_zero_at(t, horizon) {
            match prev_positive {
                None => {
                    xbar = x.clone();
                    q = F::one();
                }
                Some(p) => {
                    q = F::one() + weights.ratio_between(p, t) * q;
                    let rho = F::one() / q;
                    for (b, xi) in xbar.iter_mut().zip(&x) {
                        *b = *b + rho * (*xi - *b);
                    }
                }
            }
            prev_positive = Some(t);
        }

        let gamma = cfg.schedule.gamma(t);
        let g = oracle.sample_gradient_vec(&x, &mut grad_rng);
        let x_prev = if margins.is_some() {
            Some(x.clone())
        } else {
            None
        };
        axpy(-gamma, &g, &mut x);

        if let Some(ms) = margins.as_mut() {
            let m = descent_step_margin(
                oracle,
                x_prev.as_ref().expect("descent check records x_t"),
                &x,
                gamma,
                &g,
            )?;
            ms.push(m);
        }
        if let Some(tr) = trajectory.as_mut() {
            tr.push(x.clone());
        }
    }

    if prev_positive.is_none() {
        return Err(Error::AllZeroWeights);
    }

    let dist_sq_last = norm_sq(&sub(&x, oracle.x_star()));
    let f_gap_avg = oracle.f(&xbar) - oracle.f_star();
    let composite = f_gap_avg + oracle.mu() * dist_sq_last;
    Ok(RunResult {
        f_gap_avg,
        dist_sq_last,
        composite,
        descent_margins: margins,
        trajectory,
        wall_time: start.elapsed(),
    })
}

/// Pathwise margin of the per-step descent inequality at one transition:
/// `(1 - mu*gamma)||x_t - x*||^2 - gamma (f(x_t) - f*) + gamma^2 sigma^2 - ||x_{t+1} - x*||^2`.
/// Only meaningful when the realized gradient equals the full gradient, so
/// stochastic oracles are rejected.
pub fn descent_step_margin<F: Scalar>(
    oracle: &ProblemOracle<F>,
    x_t: &[F],
    x_next: &[F],
    gamma: F,
    g_t: &[F],
) -> Result<F> {
    if !oracle.is_deterministic() {
        return Err(Error::DescentCheckOnStochasticOracle);
    }
    // The transition must actually be the SGD step for the margin to mean
    // anything.
    let mut recon = x_t.to_vec();
    axpy(-gamma, g_t, &mut recon);
    let drift = norm_sq(&sub(&recon, x_next));
    let scale = norm_sq(x_t).max(F::one());
    if drift > cst::<F>(1e-20) * scale {
        return Err(Error::InvalidParameter(
            "x_{t+1} is not the SGD step from x_t with the given gradient".into(),
        ));
    }
    let r_t = norm_sq(&sub(x_t, oracle.x_star()));
    let r_next = norm_sq(&sub(x_next, oracle.x_star()));
    let f_gap = oracle.f(x_t) - oracle.f_star();
    Ok(
        (F::one() - oracle.mu() * gamma) * r_t - gamma * f_gap + gamma * gamma * oracle.sigma_sq()
            - r_next,
    )
}

/// Theoretical bound values for given constants.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport<F> {
    /// `64 L R^2 e^{-mu T / 4L} + 36 sigma^2 / (mu T)`; infinite when mu = 0.
    pub branch_exp: F,
    /// `2 L R^2 / T + 2 sigma R / sqrt(T)`.
    pub branch_sub: F,
    /// Minimum of the two branches.
    pub theorem_min: F,
    /// Stepsize of the classic constant schedule (mu > 0 only).
    pub classic_gamma: Option<F>,
    /// `(1 - mu gamma)^T R^2 + gamma sigma^2 / mu` at that stepsize.
    pub classic_distance_bound: Option<F>,
    /// Informational large-T form `mu R^2 e^{-mu T / L} + sigma^2/(mu T)`;
    /// never used for acceptance since its precondition is only asymptotic.
    pub footnote_large_t: Option<F>,
}

/// Evaluates the composite bound (both branches) plus the classic distance
/// bound at the tuned constant stepsize.
pub fn theorem_bound<F: Scalar>(
    mu: F,
    big_l: F,
    r: F,
    sigma_sq: F,
    horizon: usize,
) -> Result<BoundReport<F>> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon("theorem bound"));
    }
    if !(big_l > F::zero()) || mu < F::zero() || r < F::zero() || sigma_sq < F::zero() {
        return Err(Error::InvalidParameter(
            "need L > 0, mu >= 0, R >= 0, sigma^2 >= 0".into(),
        ));
    }
    let t = cst_usize::<F>(horizon);
    let r_sq = r * r;
    let branch_sub =
        cst::<F>(2.0) * big_l * r_sq / t + cst::<F>(2.0) * sigma_sq.sqrt() * r / t.sqrt();
    if mu == F::zero() {
        return Ok(BoundReport {
            branch_exp: F::infinity(),
            branch_sub,
            theorem_min: branch_sub,
            classic_gamma: None,
            classic_distance_bound: None,
            footnote_large_t: None,
        });
    }
    let branch_exp = cst::<F>(64.0) * big_l * r_sq * (-mu * t / (cst::<F>(4.0) * big_l)).exp()
        + cst::<F>(36.0) * sigma_sq / (mu * t);
    let schedule = StepWeightSchedule::classic_constant(mu, big_l, r_sq, sigma_sq, horizon)?;
    let gamma = schedule.gamma(0);
    let distance_bound =
        (F::one() - mu * gamma).powi(horizon as i32) * r_sq + gamma * sigma_sq / mu;
    let footnote = mu * r_sq * (-mu * t / big_l).exp() + sigma_sq / (mu * t);
    Ok(BoundReport {
        branch_exp,
        branch_sub,
        theorem_min: branch_exp.min(branch_sub),
        classic_gamma: Some(gamma),
        classic_distance_bound: Some(distance_bound),
        footnote_large_t: Some(footnote),
    })
}

/// One replicate's summary inside a campaign.
#[derive(Debug, Clone, Copy)]
pub struct ReplicateSummary<F> {
    pub seed: u64,
    pub f_gap_avg: F,
    pub dist_sq_last: F,
    pub composite: F,
}

/// Aggregate over replicates, with a 99% normal-approximation CI on the
/// composite mean.
#[derive(Debug, Clone)]
pub struct CampaignAggregate<F> {
    pub replicates: usize,
    pub mean_composite: F,
    pub std_composite: F,
    pub ci99_composite: F,
    pub mean_f_gap: F,
    pub mean_dist_sq: F,
    pub bound: BoundReport<F>,
    /// `(mean_composite + ci99) / theorem_min`.
    pub ratio: F,
    pub per_replicate: Vec<ReplicateSummary<F>>,
}

/// Runs `n_replicates` independent SGD runs. Replicate `r` uses a seed
/// derived from `(master_seed, r)`; replicates are evaluated in parallel and
/// reduced in fixed index order (pairwise summation), so the aggregate is
/// bit-identical across thread counts and repeat invocations.
pub fn run_campaign<F: Scalar>(
    oracle: &ProblemOracle<F>,
    x0: &[F],
    schedule: &StepWeightSchedule<F>,
    n_replicates: usize,
    master_seed: u64,
) -> Result<CampaignAggregate<F>> {
    if n_replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    let summaries: Vec<ReplicateSummary<F>> = (0..n_replicates)
        .into_par_iter()
        .map(|r| {
            let seed = stream_id_from(&[master_seed, r as u64]);
            let cfg = RunConfig::new(schedule.clone(), seed);
            run_sgd(oracle, x0, &cfg).map(|res| ReplicateSummary {
                seed,
                f_gap_avg: res.f_gap_avg,
                dist_sq_last: res.dist_sq_last,
                composite: res.composite,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n_f = cst_usize::<F>(n_replicates);
    let composites: Vec<F> = summaries.iter().map(|s| s.composite).collect();
    let mean = pairwise_sum(&composites) / n_f;
    let sq_dev: Vec<F> = composites
        .iter()
        .map(|&c| (c - mean) * (c - mean))
        .collect();
    let std = if n_replicates > 1 {
        (pairwise_sum(&sq_dev) / (n_f - F::one())).sqrt()
    } else {
        F::zero()
    };
    let ci = cst::<F>(Z99) * std / n_f.sqrt();

    let f_gaps: Vec<F> = summaries.iter().map(|s| s.f_gap_avg).collect();
    let dists: Vec<F> = summaries.iter().map(|s| s.dist_sq_last).collect();
    let mean_f_gap = pairwise_sum(&f_gaps) / n_f;
    let mean_dist = pairwise_sum(&dists) / n_f;

    let r = norm_sq(&sub(x0, oracle.x_star())).sqrt();
    let bound = theorem_bound(
        oracle.mu(),
        oracle.big_l(),
        r,
        oracle.sigma_sq(),
        schedule.horizon(),
    )?;
    let ratio = if bound.theorem_min > F::zero() {
        (mean + ci) / bound.theorem_min
    } else if mean + ci <= F::zero() {
        F::zero()
    } else {
        F::infinity()
    };

    Ok(CampaignAggregate {
        replicates: n_replicates,
        mean_composite: mean,
        std_composite: std,
        ci99_composite: ci,
        mean_f_gap,
        mean_dist_sq: mean_dist,
        bound,
        ratio,
        per_replicate: summaries,
    })
}

/// CSV schema shared by the run/sweep subcommands; per-replicate rows carry
/// the replicate seed, the aggregate row the master seed.
pub const RUN_CSV_HEADER: &str =
    "kind,n,mu,L,sigma2,schedule,T,seed,f_gap_avg,dist_sq_last,composite,theorem_min,ratio";

pub fn aggregate_csv_row<F: Scalar>(
    oracle: &ProblemOracle<F>,
    schedule_tag: &str,
    horizon: usize,
    master_seed: u64,
    agg: &CampaignAggregate<F>,
) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        oracle.kind_tag(),
        oracle.dim(),
        oracle.mu(),
        oracle.big_l(),
        oracle.sigma_sq(),
        schedule_tag,
        horizon,
        master_seed,
        agg.mean_f_gap,
        agg.mean_dist_sq,
        agg.mean_composite,
        agg.bound.theorem_min,
        agg.ratio
    )
}

pub fn replicate_csv_row<F: Scalar>(
    oracle: &ProblemOracle<F>,
    schedule_tag: &str,
    horizon: usize,
    rep: &ReplicateSummary<F>,
    theorem_min: F,
) -> String {
    let ratio = if theorem_min > F::zero() {
        rep.composite / theorem_min
    } else {
        F::infinity()
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        oracle.kind_tag(),
        oracle.dim(),
        oracle.mu(),
        oracle.big_l(),
        oracle.sigma_sq(),
        schedule_tag,
        horizon,
        rep.seed,
        rep.f_gap_avg,
        rep.dist_sq_last,
        rep.composite,
        theorem_min,
        ratio
    )
}

//! Concrete stochastic-gradient problem instances with certified constants,
//! plus empirical validators of the oracle assumptions.
//!
//! Every instance certifies a triple `(mu, L, sigma^2)`:
//! the sampled gradient is unbiased, its second moment obeys
//! `E||g||^2 <= 2L (f(x) - f*) + sigma^2`, and the full gradient satisfies
//! the mu-convexity inequality against the minimizer. Constructors compute
//! `x*` and `f*` up front so downstream metrics have a single source of
//! truth.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, min_norm_least_squares, norm_sq, sub};
use crate::rng::RngStream;
use crate::scalar::{cst, cst_usize, Scalar};

/// One stochastic gradient draw; `fx` carries the exact deterministic
/// function value at the query point for metric bookkeeping.
#[derive(Debug, Clone)]
pub struct GradientSample<F> {
    pub g: Vec<F>,
    pub fx: F,
}

#[derive(Debug, Clone)]
enum OracleKind<F> {
    /// `f(x) = 1/2 sum_i lambda_i (x_i - x*_i)^2` with additive spherical
    /// Gaussian gradient noise of total variance `sigma^2`.
    Quadratic { spectrum: Vec<F>, noise_std: F },
    /// `f(x) = (1/m) sum_i 1/2 (a_i^T x - b_i)^2`, uniform index sampling.
    LeastSquares { rows: Vec<Vec<F>>, targets: Vec<F> },
    /// `f_i(x) = log(1 + exp(-y_i a_i^T x)) + (l2/2)||x||^2`.
    Logistic {
        rows: Vec<Vec<F>>,
        labels: Vec<i8>,
        l2: F,
    },
}

/// A problem instance together with its certified oracle constants.
#[derive(Debug, Clone)]
pub struct ProblemOracle<F> {
    kind: OracleKind<F>,
    dim: usize,
    mu: F,
    big_l: F,
    sigma_sq: F,
    x_star: Vec<F>,
    f_star: F,
    master_seed: u64,
}

impl<F: Scalar> ProblemOracle<F> {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn mu(&self) -> F {
        self.mu
    }
    pub fn big_l(&self) -> F {
        self.big_l
    }
    pub fn sigma_sq(&self) -> F {
        self.sigma_sq
    }
    pub fn x_star(&self) -> &[F] {
        &self.x_star
    }
    pub fn f_star(&self) -> F {
        self.f_star
    }
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            OracleKind::Quadratic { .. } => "noisy_quadratic",
            OracleKind::LeastSquares { .. } => "least_squares",
            OracleKind::Logistic { .. } => "logistic",
        }
    }

    /// True when `sample_gradient` always returns the full gradient, so
    /// pathwise descent checks are meaningful.
    pub fn is_deterministic(&self) -> bool {
        match &self.kind {
            OracleKind::Quadratic { noise_std, .. } => *noise_std == F::zero(),
            OracleKind::LeastSquares { rows, .. } => rows.len() == 1,
            OracleKind::Logistic { rows, .. } => rows.len() == 1,
        }
    }

    /// Diagonal quadratic with an exact spectrum: `mu = lambda_min`,
    /// `L = lambda_max`, noise with `E||xi||^2 = sigma^2` exactly.
    pub fn noisy_quadratic(
        spectrum: &[F],
        x_star: &[F],
        sigma_sq: F,
        master_seed: u64,
    ) -> Result<Self> {
        if spectrum.is_empty() || spectrum.len() != x_star.len() {
            return Err(Error::OracleConstruction(
                "spectrum and x_star must be non-empty and same length".into(),
            ));
        }
        for w in spectrum.windows(2) {
            if w[1] < w[0] {
                return Err(Error::OracleConstruction(
                    "spectrum must be ascending".into(),
                ));
            }
        }
        if spectrum[0] < F::zero() {
            return Err(Error::OracleConstruction("negative eigenvalue".into()));
        }
        if !(spectrum[spectrum.len() - 1] > F::zero()) {
            return Err(Error::OracleConstruction(
                "spectrum must not be all zero".into(),
            ));
        }
        if sigma_sq < F::zero() {
            return Err(Error::OracleConstruction("sigma^2 must be >= 0".into()));
        }
        let n = spectrum.len();
        let noise_std = (sigma_sq / cst_usize::<F>(n)).sqrt();
        Ok(ProblemOracle {
            kind: OracleKind::Quadratic {
                spectrum: spectrum.to_vec(),
                noise_std,
            },
            dim: n,
            mu: spectrum[0],
            big_l: spectrum[n - 1],
            sigma_sq,
            x_star: x_star.to_vec(),
            f_star: F::zero(),
            master_seed,
        })
    }

    /// Finite-sum least squares with uniform index sampling. Oracle
    /// constants: `L = 2 max_i ||a_i||^2`,
    /// `sigma^2 = (2/m) sum_i ||grad f_i(x*)||^2` (exactly zero for
    /// interpolating instances), `mu` the smallest eigenvalue of the
    /// second-moment matrix; `x*` is the minimum-norm solution.
    pub fn finite_sum_least_squares(
        rows: &[Vec<F>],
        targets: &[F],
        interpolating: bool,
        master_seed: u64,
    ) -> Result<Self> {
        let (x_star, eigs) = min_norm_least_squares(rows, targets)?;
        let n = x_star.len();
        let mu = eigs[0];

        let mut max_row_norm_sq = F::zero();
        let mut sigma_sq = F::zero();
        let m_f = cst_usize::<F>(rows.len());
        let mut max_abs_residual = F::zero();
        for (row, &b) in rows.iter().zip(targets) {
            let rn = norm_sq(row);
            max_row_norm_sq = max_row_norm_sq.max(rn);
            let residual = dot(row, &x_star) - b;
            max_abs_residual = max_abs_residual.max(residual.abs());
            sigma_sq = sigma_sq + rn * residual * residual;
        }
        sigma_sq = cst::<F>(2.0) * sigma_sq / m_f;
        if interpolating {
            // The instance was built with consistent targets; residuals are
            // rounding noise and the oracle noise floor is exactly zero.
            let scale = max_row_norm_sq.sqrt().max(F::one());
            if max_abs_residual > cst::<F>(1e-8) * scale {
                return Err(Error::OracleConstruction(format!(
                    "interpolating flag set but residual {max_abs_residual} is not negligible"
                )));
            }
            sigma_sq = F::zero();
        }

        let kind = OracleKind::LeastSquares {
            rows: rows.to_vec(),
            targets: targets.to_vec(),
        };
        let mut oracle = ProblemOracle {
            kind,
            dim: n,
            mu,
            big_l: cst::<F>(2.0) * max_row_norm_sq,
            sigma_sq,
            x_star,
            f_star: F::zero(),
            master_seed,
        };
        oracle.f_star = oracle.f(&oracle.x_star.clone());
        oracle.check_solution_quality()?;
        Ok(oracle)
    }

    /// L2-regularized logistic regression. `mu = l2`,
    /// `L = 2 max_i (l2 + ||a_i||^2 / 4)`; `x*` is found by a deterministic
    /// full-gradient solve down to gradient norm 1e-10 and `sigma^2` is
    /// computed from the per-sample gradients there.
    pub fn logistic_regression(
        rows: &[Vec<F>],
        labels: &[i8],
        l2: F,
        master_seed: u64,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::OracleConstruction(
                "logistic needs at least one sample".into(),
            ));
        }
        if !(l2 > F::zero()) {
            return Err(Error::OracleConstruction("l2 penalty must be > 0".into()));
        }
        if labels.len() != rows.len() || labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::OracleConstruction(
                "labels must be +/-1, one per row".into(),
            ));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::OracleConstruction("ragged data rows".into()));
        }

        let mut max_comp_l = F::zero();
        let mut mean_row_norm_sq = F::zero();
        let m_f = cst_usize::<F>(rows.len());
        for row in rows {
            let rn = norm_sq(row);
            max_comp_l = max_comp_l.max(l2 + rn / cst::<F>(4.0));
            mean_row_norm_sq = mean_row_norm_sq + rn / m_f;
        }

        let kind = OracleKind::Logistic {
            rows: rows.to_vec(),
            labels: labels.to_vec(),
            l2,
        };
        let mut oracle = ProblemOracle {
            kind,
            dim: n,
            mu: l2,
            big_l: cst::<F>(2.0) * max_comp_l,
            sigma_sq: F::zero(),
            x_star: vec![F::zero(); n],
            f_star: F::zero(),
            master_seed,
        };

        // Deterministic full-gradient descent for x*.
        let smoothness = l2 + mean_row_norm_sq / cst::<F>(4.0);
        let step = F::one() / smoothness;
        let tol = cst::<F>(1e-10);
        let budget = 2_000_000usize;
        let mut x = vec![F::zero(); n];
        let mut converged = false;
        for _ in 0..budget {
            let g = oracle.grad_at(&x);
            if norm_sq(&g).sqrt() <= tol {
                converged = true;
                break;
            }
            axpy(-step, &g, &mut x);
        }
        if !converged {
            let g = oracle.grad_at(&x);
            if norm_sq(&g).sqrt() > tol {
                return Err(Error::SolverDidNotConverge(format!(
                    "logistic inner solve: gradient norm {} after {budget} iterations",
                    norm_sq(&g).sqrt()
                )));
            }
        }
        oracle.x_star = x;
        oracle.f_star = oracle.f(&oracle.x_star.clone());

        // sigma^2 = (2/m) sum ||grad f_i(x*)||^2 at the solved point.
        let mut s = F::zero();
        for i in 0..rows.len() {
            let gi = oracle.component_grad(i, &oracle.x_star);
            s = s + norm_sq(&gi);
        }
        oracle.sigma_sq = cst::<F>(2.0) * s / m_f;
        oracle.check_solution_quality()?;
        Ok(oracle)
    }

    /// Errors unless the instance certifies `mu > 0`; lets callers demand
    /// strong convexity on singular least squares, where `x*` exists but the
    /// instance is only valid with the `mu = 0` tag.
    pub fn require_mu_positive(&self) -> Result<()> {
        if self.mu > F::zero() {
            Ok(())
        } else {
            Err(Error::OracleConstruction(format!(
                "{} instance certifies mu = 0; strong convexity was requested",
                self.kind_tag()
            )))
        }
    }

    fn check_solution_quality(&self) -> Result<()> {
        let g = self.grad_at(&self.x_star);
        let gnorm = norm_sq(&g).sqrt();
        if gnorm > cst::<F>(1e-8) {
            return Err(Error::OracleConstruction(format!(
                "gradient norm at x* is {gnorm}, expected <= 1e-8"
            )));
        }
        if self.mu > self.big_l {
            return Err(Error::OracleConstruction("mu exceeds L".into()));
        }
        Ok(())
    }

    /// Exact function value.
    pub fn f(&self, x: &[F]) -> F {
        match &self.kind {
            OracleKind::Quadratic { spectrum, .. } => {
                let mut acc = F::zero();
                for i in 0..self.dim {
                    let delta = x[i] - self.x_star[i];
                    acc = acc + spectrum[i] * delta * delta;
                }
                acc * cst::<F>(0.5)
            }
            OracleKind::LeastSquares { rows, targets } => {
                let m_f = cst_usize::<F>(rows.len());
                let mut acc = F::zero();
                for (row, &b) in rows.iter().zip(targets) {
                    let r = dot(row, x) - b;
                    acc = acc + r * r;
                }
                acc / (cst::<F>(2.0) * m_f)
            }
            OracleKind::Logistic { rows, labels, l2 } => {
                let m_f = cst_usize::<F>(rows.len());
                let mut acc = F::zero();
                for (row, &y) in rows.iter().zip(labels) {
                    let margin = dot(row, x) * cst::<F>(y as f64);
                    acc = acc + softplus(-margin);
                }
                acc / m_f + *l2 * cst::<F>(0.5) * norm_sq(x)
            }
        }
    }

    /// Exact full gradient.
    pub fn grad_at(&self, x: &[F]) -> Vec<F> {
        match &self.kind {
            OracleKind::Quadratic { spectrum, .. } => (0..self.dim)
                .map(|i| spectrum[i] * (x[i] - self.x_star[i]))
                .collect(),
            OracleKind::LeastSquares { rows, targets } => {
                let m_f = cst_usize::<F>(rows.len());
                let mut g = vec![F::zero(); self.dim];
                for (row, &b) in rows.iter().zip(targets) {
                    let r = dot(row, x) - b;
                    axpy(r / m_f, row, &mut g);
                }
                g
            }
            OracleKind::Logistic { rows, labels, l2 } => {
                let m_f = cst_usize::<F>(rows.len());
                let mut g: Vec<F> = x.iter().map(|&xi| *l2 * xi).collect();
                for (row, &y) in rows.iter().zip(labels) {
                    let yf = cst::<F>(y as f64);
                    let s = sigmoid(-dot(row, x) * yf);
                    axpy(-yf * s / m_f, row, &mut g);
                }
                g
            }
        }
    }

    /// Per-component gradient of finite-sum instances.
    fn component_grad(&self, i: usize, x: &[F]) -> Vec<F> {
        match &self.kind {
            OracleKind::Quadratic { .. } => self.grad_at(x),
            OracleKind::LeastSquares { rows, targets } => {
                let r = dot(&rows[i], x) - targets[i];
                rows[i].iter().map(|&aij| aij * r).collect()
            }
            OracleKind::Logistic { rows, labels, l2 } => {
                let yf = cst::<F>(labels[i] as f64);
                let s = sigmoid(-dot(&rows[i], x) * yf);
                let mut g: Vec<F> = x.iter().map(|&xi| *l2 * xi).collect();
                axpy(-yf * s, &rows[i], &mut g);
                g
            }
        }
    }

    /// Unbiased stochastic gradient draw.
    pub fn sample_gradient(&self, x: &[F], rng: &mut RngStream) -> GradientSample<F> {
        GradientSample {
            g: self.sample_gradient_vec(x, rng),
            fx: self.f(x),
        }
    }

    /// Gradient draw without the function-value bookkeeping (the engine's
    /// hot path; `f(x)` costs O(mn) on finite sums).
    pub fn sample_gradient_vec(&self, x: &[F], rng: &mut RngStream) -> Vec<F> {
        let g = match &self.kind {
            OracleKind::Quadratic { noise_std, .. } => {
                let mut g = self.grad_at(x);
                if *noise_std > F::zero() {
                    for gi in g.iter_mut() {
                        *gi = *gi + *noise_std * cst::<F>(rng.normal());
                    }
                }
                g
            }
            OracleKind::LeastSquares { rows, .. } => {
                let i = rng.index(rows.len());
                self.component_grad(i, x)
            }
            OracleKind::Logistic { rows, .. } => {
                let i = rng.index(rows.len());
                self.component_grad(i, x)
            }
        };
        debug_assert!(g.iter().all(|v| v.is_finite()), "non-finite gradient sample");
        g
    }

    /// Number of finite-sum components (1 for the quadratic).
    pub fn components(&self) -> usize {
        match &self.kind {
            OracleKind::Quadratic { .. } => 1,
            OracleKind::LeastSquares { rows, .. } => rows.len(),
            OracleKind::Logistic { rows, .. } => rows.len(),
        }
    }

    /// Monte-Carlo check of the second-moment bound
    /// `E||g||^2 <= 2L (f(x) - f*) + sigma^2` at a query point. Welford
    /// accumulation keeps the estimate exact on deterministic oracles (all
    /// samples identical), where the CI collapses to zero and the comparison
    /// can sit exactly on the bound; the flag additionally tolerates 1e-12
    /// relative rounding.
    pub fn check_smoothness_assumption(
        &self,
        x: &[F],
        n_samples: usize,
        rng: &mut RngStream,
    ) -> SmoothnessReport<F> {
        let mut mean = F::zero();
        let mut m2 = F::zero();
        for k in 0..n_samples {
            let g = self.sample_gradient_vec(x, rng);
            let gsq = norm_sq(&g);
            let delta = gsq - mean;
            mean = mean + delta / cst_usize::<F>(k + 1);
            m2 = m2 + delta * (gsq - mean);
        }
        let n_f = cst_usize::<F>(n_samples);
        let var = if n_samples > 1 {
            (m2 / (n_f - F::one())).max(F::zero())
        } else {
            F::zero()
        };
        let ci = cst::<F>(3.0) * (var / n_f).sqrt();
        let rhs = cst::<F>(2.0) * self.big_l * (self.f(x) - self.f_star) + self.sigma_sq;
        let rounding = cst::<F>(1e-12) * rhs.abs().max(F::one());
        SmoothnessReport {
            lhs_estimate: mean,
            rhs,
            slack: rhs - mean,
            ci_halfwidth: ci,
            violation: mean - ci > rhs + rounding,
        }
    }

    /// Margin of the mu-convexity inequality at a point:
    /// `<grad f(x), x - x*> - (mu/2)||x - x*||^2 - (f(x) - f*)`.
    /// Non-negative (up to rounding) for valid instances.
    pub fn check_mu_convexity(&self, x: &[F]) -> F {
        let delta = sub(x, &self.x_star);
        let g = self.grad_at(x);
        dot(&g, &delta) - cst::<F>(0.5) * self.mu * norm_sq(&delta) - (self.f(x) - self.f_star)
    }

    /// Dumps the backing dataset as CSV (`feature_1..feature_n,target`).
    /// Quadratic instances carry no dataset.
    pub fn write_dataset_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let (rows, targets): (&[Vec<F>], Vec<F>) = match &self.kind {
            OracleKind::Quadratic { .. } => {
                return Err(Error::OracleConstruction(
                    "quadratic instances have no dataset to dump".into(),
                ))
            }
            OracleKind::LeastSquares { rows, targets } => (rows, targets.clone()),
            OracleKind::Logistic { rows, labels, .. } => {
                (rows, labels.iter().map(|&y| cst::<F>(y as f64)).collect())
            }
        };
        let header: Vec<String> = (1..=self.dim).map(|i| format!("feature_{i}")).collect();
        writeln!(out, "{},target", header.join(",")).map_err(io_err)?;
        for (row, t) in rows.iter().zip(&targets) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{},{t}", cells.join(",")).map_err(io_err)?;
        }
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::OracleConstruction(format!("io: {e}"))
}

/// Outcome of a Monte-Carlo second-moment check.
#[derive(Debug, Clone, Copy)]
pub struct SmoothnessReport<F> {
    pub lhs_estimate: F,
    pub rhs: F,
    pub slack: F,
    pub ci_halfwidth: F,
    pub violation: bool,
}

#[inline]
fn softplus<F: Scalar>(u: F) -> F {
    // ln(1 + e^u), stable for large |u|.
    u.max(F::zero()) + (-u.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid<F: Scalar>(u: F) -> F {
    if u >= F::zero() {
        F::one() / (F::one() + (-u).exp())
    } else {
        let e = u.exp();
        e / (F::one() + e)
    }
}

/// Deterministic data generators used by the CLI and the test suites.
pub mod data {
    use super::*;

    /// `m` rows of i.i.d. standard normal features, scaled by `scale`.
    pub fn gaussian_rows<F: Scalar>(
        m: usize,
        n: usize,
        scale: F,
        rng: &mut RngStream,
    ) -> Vec<Vec<F>> {
        (0..m)
            .map(|_| (0..n).map(|_| scale * cst::<F>(rng.normal())).collect())
            .collect()
    }

    /// Rows cycling through the scaled coordinate basis: row i is
    /// `scale * e_(i mod n)`. With `m` a multiple of `n`, the second-moment
    /// matrix is exactly `(scale^2 m/n / m) I`, so `mu` and `L` are known in
    /// closed form.
    pub fn orthogonal_design_rows<F: Scalar>(m: usize, n: usize, scale: F) -> Vec<Vec<F>> {
        (0..m)
            .map(|i| {
                let mut row = vec![F::zero(); n];
                row[i % n] = scale;
                row
            })
            .collect()
    }

    /// Gaussian rows supported on the first `rank` coordinates; the
    /// second-moment matrix is singular for `rank < n`.
    pub fn low_rank_rows<F: Scalar>(
        m: usize,
        n: usize,
        rank: usize,
        scale: F,
        rng: &mut RngStream,
    ) -> Vec<Vec<F>> {
        (0..m)
            .map(|_| {
                let mut row = vec![F::zero(); n];
                for item in row.iter_mut().take(rank.min(n)) {
                    *item = scale * cst::<F>(rng.normal());
                }
                row
            })
            .collect()
    }

    /// Targets `b_i = a_i^T x_planted`, making the system consistent.
    pub fn planted_targets<F: Scalar>(rows: &[Vec<F>], x_planted: &[F]) -> Vec<F> {
        rows.iter().map(|r| dot(r, x_planted)).collect()
    }

    /// A deterministic planted solution drawn from the stream.
    pub fn planted_solution<F: Scalar>(n: usize, rng: &mut RngStream) -> Vec<F> {
        (0..n).map(|_| cst::<F>(rng.normal())).collect()
    }

    /// Labels `sign(a_i^T w + noise)` for a planted direction.
    pub fn planted_labels<F: Scalar>(
        rows: &[Vec<F>],
        w: &[F],
        noise: F,
        rng: &mut RngStream,
    ) -> Vec<i8> {
        rows.iter()
            .map(|r| {
                let v = dot(r, w) + noise * cst::<F>(rng.normal());
                if v >= F::zero() {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }
}

/// The fixed instance set exercised by the assumption validators.
pub fn standard_instance_grid<F: Scalar>(master_seed: u64) -> Vec<ProblemOracle<F>> {
    use data::*;
    // Quadratics with exact constants.
    let mut out =
        vec![
            ProblemOracle::noisy_quadratic(&[cst(1.0)], &[cst(0.0)], cst(0.0), master_seed)
                .unwrap(),
        ];
    out.push(
        ProblemOracle::noisy_quadratic(
            &[cst(0.1), cst(1.0)],
            &[cst(1.0), cst(-2.0)],
            cst(0.0),
            master_seed,
        )
        .unwrap(),
    );
    out.push(
        ProblemOracle::noisy_quadratic(
            &[cst(0.1), cst(1.0)],
            &[cst(0.0), cst(0.0)],
            cst(1.0),
            master_seed,
        )
        .unwrap(),
    );
    out.push(
        ProblemOracle::noisy_quadratic(
            &[cst(0.5), cst(0.8), cst(1.1), cst(1.7), cst(2.0)],
            &[cst(1.0); 5],
            cst(4.0),
            master_seed,
        )
        .unwrap(),
    );

    // Least squares: interpolating, noisy, singular-consistent.
    let mut rng = RngStream::new(master_seed, 101);
    let rows = gaussian_rows::<F>(30, 5, cst(1.0), &mut rng);
    let planted = planted_solution::<F>(5, &mut rng.substream(1));
    let targets = planted_targets(&rows, &planted);
    out.push(ProblemOracle::finite_sum_least_squares(&rows, &targets, true, master_seed).unwrap());

    let noisy_targets: Vec<F> = {
        let mut noise_rng = rng.substream(2);
        targets
            .iter()
            .map(|&t| t + cst::<F>(noise_rng.normal()))
            .collect()
    };
    out.push(
        ProblemOracle::finite_sum_least_squares(&rows, &noisy_targets, false, master_seed).unwrap(),
    );

    let mut rng2 = RngStream::new(master_seed, 102);
    let low_rank = low_rank_rows::<F>(24, 6, 3, cst(1.0), &mut rng2);
    let planted2 = planted_solution::<F>(6, &mut rng2.substream(1));
    let targets2 = planted_targets(&low_rank, &planted2);
    out.push(
        ProblemOracle::finite_sum_least_squares(&low_rank, &targets2, true, master_seed).unwrap(),
    );

    // Logistic regression.
    let mut rng3 = RngStream::new(master_seed, 103);
    let lrows = gaussian_rows::<F>(20, 4, cst(1.0), &mut rng3);
    let w = planted_solution::<F>(4, &mut rng3.substream(1));
    let labels = planted_labels(&lrows, &w, cst(0.3), &mut rng3.substream(2));
    out.push(ProblemOracle::logistic_regression(&lrows, &labels, cst(0.1), master_seed).unwrap());

    out
}

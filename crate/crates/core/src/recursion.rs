//! The abstract two-sequence recursion and its solving lemmas.
//!
//! Two non-negative sequences `r_t`, `s_t` are *feasible* for parameters
//! `(a, b, c, d)` and stepsizes `gamma_t <= 1/d` when
//!
//! ```text
//! r_{t+1} <= (1 - a*gamma_t) r_t - b*gamma_t s_t + c*gamma_t^2
//! ```
//!
//! holds at every step. The lemmas bound the weighted error
//! `b/W_T * sum_t s_t w_t + a r_{T+1}` (or `r_T` itself) for specific
//! stepsize/weight schedules. Since the lemmas quantify over *all* feasible
//! sequences, the verification strategy is randomized coverage: draw
//! sequences uniformly inside the feasible region (plus the tight extreme
//! where the recursion holds with equality) and check the claimed bound on
//! every draw.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream_id_from, RngStream};
use crate::scalar::{cst, cst_usize, Scalar};
use crate::schedules::{StepWeightSchedule, WeightSeq};

/// Constants `(a, b, c, d)` governing the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionParams<F> {
    a: F,
    b: F,
    c: F,
    d: F,
}

impl<F: Scalar> RecursionParams<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Result<Self> {
        if !(b > F::zero()) {
            return Err(Error::InvalidParameter(format!("b = {b} must be > 0")));
        }
        if !(c >= F::zero()) {
            return Err(Error::InvalidParameter(format!("c = {c} must be >= 0")));
        }
        if !(a >= F::zero()) {
            return Err(Error::InvalidParameter(format!("a = {a} must be >= 0")));
        }
        if !(d > F::zero()) {
            return Err(Error::InvalidParameter(format!("d = {d} must be > 0")));
        }
        if d < a {
            return Err(Error::InvalidParameter(format!(
                "d = {d} must be >= a = {a}"
            )));
        }
        Ok(RecursionParams { a, b, c, d })
    }

    pub fn a(&self) -> F {
        self.a
    }
    pub fn b(&self) -> F {
        self.b
    }
    pub fn c(&self) -> F {
        self.c
    }
    pub fn d(&self) -> F {
        self.d
    }

    /// The stepsize cap `1/d`.
    pub fn gamma_cap(&self) -> F {
        F::one() / self.d
    }
}

/// How `generate_feasible_sequence` fills the feasible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// `r_{t+1}` sits exactly on the recursion's right-hand side. This is the
    /// extreme point that stresses the bounds hardest.
    Tight,
    /// `r_{t+1}` is additionally drawn uniformly below the tight value.
    Slack,
}

impl GenMode {
    pub fn tag(self) -> &'static str {
        match self {
            GenMode::Tight => "tight",
            GenMode::Slack => "slack",
        }
    }
}

/// A feasible pair of sequences: `r` has `T+2` entries, `s` has `T+1`.
#[derive(Debug, Clone)]
pub struct SequencePair<F> {
    pub r: Vec<F>,
    pub s: Vec<F>,
    pub params: RecursionParams<F>,
    pub gammas: Vec<F>,
}

impl<F: Scalar> SequencePair<F> {
    /// Horizon `T` (number of recursion steps minus one).
    pub fn horizon(&self) -> usize {
        self.gammas.len() - 1
    }

    /// Builds the tight sequence for given error values `s`: the recursion
    /// holds with equality at every step (clamping tiny negative rounding
    /// residue to zero).
    pub fn tight(params: RecursionParams<F>, gammas: &[F], r0: F, s: &[F]) -> Result<Self> {
        validate_gammas(&params, gammas)?;
        if s.len() != gammas.len() {
            return Err(Error::LengthMismatch(format!(
                "s has {} entries, need {}",
                s.len(),
                gammas.len()
            )));
        }
        if !(r0 >= F::zero()) {
            return Err(Error::InvalidParameter(format!("r0 = {r0} must be >= 0")));
        }
        let mut r = Vec::with_capacity(gammas.len() + 1);
        r.push(r0);
        for (t, &gamma) in gammas.iter().enumerate() {
            let prev = r[t];
            let next = (F::one() - params.a * gamma) * prev - params.b * gamma * s[t]
                + params.c * gamma * gamma;
            r.push(next.max(F::zero()));
        }
        let pair = SequencePair {
            r,
            s: s.to_vec(),
            params,
            gammas: gammas.to_vec(),
        };
        pair.check_feasible(cst(1e-12))?;
        Ok(pair)
    }

    /// Independent per-step re-check of the recursion inequality, the
    /// non-negativity of both sequences and the stepsize cap. `rel_slack`
    /// is relative to the magnitude of the right-hand side's terms, with the
    /// smallest normal as an absolute underflow guard (the relative slack
    /// itself underflows once the sequences reach denormal scale).
    pub fn check_feasible(&self, rel_slack: F) -> Result<()> {
        let t_len = self.gammas.len();
        if self.s.len() != t_len || self.r.len() != t_len + 1 {
            return Err(Error::LengthMismatch(format!(
                "r/s/gamma lengths {}/{}/{}",
                self.r.len(),
                self.s.len(),
                t_len
            )));
        }
        validate_gammas(&self.params, &self.gammas)?;
        for (t, &rv) in self.r.iter().enumerate() {
            if !(rv >= F::zero()) {
                return Err(Error::InvalidParameter(format!("r[{t}] = {rv} < 0")));
            }
        }
        for (t, &sv) in self.s.iter().enumerate() {
            if !(sv >= F::zero()) {
                return Err(Error::InvalidParameter(format!("s[{t}] = {sv} < 0")));
            }
        }
        let p = &self.params;
        for t in 0..t_len {
            let gamma = self.gammas[t];
            let decay = (F::one() - p.a * gamma) * self.r[t];
            let err = p.b * gamma * self.s[t];
            let noise = p.c * gamma * gamma;
            let rhs = decay - err + noise;
            let scale = decay.abs() + err.abs() + noise.abs();
            if self.r[t + 1] > rhs + rel_slack * scale + F::min_positive_value() {
                return Err(Error::InvalidParameter(format!(
                    "recursion violated at t = {t}: r[t+1] = {} > rhs = {rhs}",
                    self.r[t + 1]
                )));
            }
        }
        Ok(())
    }
}

fn validate_gammas<F: Scalar>(params: &RecursionParams<F>, gammas: &[F]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("empty stepsize list".into()));
    }
    let cap = params.gamma_cap();
    for (t, &gamma) in gammas.iter().enumerate() {
        if !(gamma > F::zero()) {
            return Err(Error::InvalidParameter(format!(
                "gamma[{t}] = {gamma} must be > 0"
            )));
        }
        if gamma > cap {
            return Err(Error::InvalidParameter(format!(
                "gamma[{t}] = {gamma} exceeds cap 1/d = {cap}"
            )));
        }
    }
    Ok(())
}

/// Draws a feasible sequence. `s_t` is uniform on
/// `[0, ((1-a*gamma_t) r_t + c*gamma_t^2) / (b*gamma_t))`, the largest value
/// keeping `r_{t+1} >= 0`; in tight mode `r_{t+1}` sits on the recursion's
/// right side, in slack mode it is drawn uniformly below it. The `s` draws
/// come from a substream shared by both modes, so tight/slack pairs with the
/// same stream are coupled draw-for-draw.
pub fn generate_feasible_sequence<F: Scalar>(
    params: RecursionParams<F>,
    gammas: &[F],
    r0: F,
    mode: GenMode,
    stream: &RngStream,
) -> Result<SequencePair<F>> {
    validate_gammas(&params, gammas)?;
    if !(r0 >= F::zero()) {
        return Err(Error::InvalidParameter(format!("r0 = {r0} must be >= 0")));
    }
    let mut s_rng = stream.substream(1);
    let mut slack_rng = stream.substream(2);

    let len = gammas.len();
    let mut r = Vec::with_capacity(len + 1);
    let mut s = Vec::with_capacity(len);
    r.push(r0);
    for (t, &gamma) in gammas.iter().enumerate() {
        let carry = (F::one() - params.a * gamma) * r[t] + params.c * gamma * gamma;
        let s_max = carry / (params.b * gamma);
        let u = cst::<F>(s_rng.uniform());
        let s_t = s_max * u;
        let tight = (carry - params.b * gamma * s_t).max(F::zero());
        let next = match mode {
            GenMode::Tight => tight,
            GenMode::Slack => tight * cst::<F>(slack_rng.uniform()),
        };
        s.push(s_t);
        r.push(next);
    }
    Ok(SequencePair {
        r,
        s,
        params,
        gammas: gammas.to_vec(),
    })
}

/// `b/W_T * sum_{t=0}^T s_t w_t + a r_{T+1}`, computed with an online
/// normalized mean. The running state is `q_t = W_t / w_t`, updated through
/// relative weights only, so geometrically growing weights never overflow.
pub fn weighted_error<F: Scalar>(
    seq: &SequencePair<F>,
    weights: &WeightSeq<F>,
    horizon: usize,
) -> Result<F> {
    if seq.horizon() != horizon {
        return Err(Error::LengthMismatch(format!(
            "sequence horizon {} != requested {horizon}",
            seq.horizon()
        )));
    }
    if let WeightSeq::Explicit(w) = weights {
        if w.len() != horizon + 1 {
            return Err(Error::LengthMismatch(format!(
                "weights length {} != horizon + 1 = {}",
                w.len(),
                horizon + 1
            )));
        }
    }
    let mut mean = F::zero();
    let mut q = F::zero();
    let mut prev: Option<usize> = None;
    for t in 0..=horizon {
        if weights.is_zero_at(t, horizon) {
            continue;
        }
        match prev {
            None => {
                mean = seq.s[t];
                q = F::one();
            }
            Some(p) => {
                q = F::one() + weights.ratio_between(p, t) * q;
                let rho = F::one() / q;
                mean = mean + rho * (seq.s[t] - mean);
            }
        }
        prev = Some(t);
    }
    if prev.is_none() {
        return Err(Error::AllZeroWeights);
    }
    Ok(seq.params.b * mean + seq.params.a * seq.r[horizon + 1])
}

/// Right side of the telescoped constant-stepsize estimate,
/// `(r0/gamma) e^{-a gamma (T+1)} + c gamma`, at the stepsize chosen by
/// `StepWeightSchedule::constant_log`.
pub fn lemma_constant_bound<F: Scalar>(
    params: &RecursionParams<F>,
    r0: F,
    horizon: usize,
) -> Result<F> {
    let schedule = StepWeightSchedule::constant_log(params.a, params.d, params.c, r0, horizon)?;
    let gamma = schedule.gamma(0);
    let t1 = cst_usize::<F>(horizon + 1);
    Ok(r0 / gamma * (-params.a * gamma * t1).exp() + params.c * gamma)
}

/// `32 d r0 e^{-aT/(2d)} + 36 c / (aT)`.
pub fn lemma_two_phase_bound<F: Scalar>(
    params: &RecursionParams<F>,
    r0: F,
    horizon: usize,
) -> Result<F> {
    if !(params.a > F::zero()) {
        return Err(Error::SublinearRequired("two-phase bound"));
    }
    if horizon == 0 {
        return Err(Error::ZeroHorizon("two-phase bound"));
    }
    let t = cst_usize::<F>(horizon);
    let exp_term =
        cst::<F>(32.0) * params.d * r0 * (-params.a * t / (cst::<F>(2.0) * params.d)).exp();
    Ok(exp_term + cst::<F>(36.0) * params.c / (params.a * t))
}

/// `d r0 / (T+1) + 2 sqrt(c r0) / sqrt(T+1)`.
pub fn lemma_sublinear_bound<F: Scalar>(
    params: &RecursionParams<F>,
    r0: F,
    horizon: usize,
) -> Result<F> {
    if !(r0 >= F::zero()) {
        return Err(Error::InvalidParameter(format!("r0 = {r0} must be >= 0")));
    }
    let t1 = cst_usize::<F>(horizon + 1);
    Ok(params.d * r0 / t1 + cst::<F>(2.0) * (params.c * r0).sqrt() / t1.sqrt())
}

/// `r0 e^{-aT/d} + c/(ad)`: the bound on `r_T` itself under `gamma = 1/d`.
pub fn lemma_unroll_bound<F: Scalar>(
    params: &RecursionParams<F>,
    r0: F,
    horizon: usize,
) -> Result<F> {
    if !(params.a > F::zero()) {
        return Err(Error::SublinearRequired("unrolling bound"));
    }
    let t = cst_usize::<F>(horizon);
    Ok(r0 * (-params.a * t / params.d).exp() + params.c / (params.a * params.d))
}

/// `2 a kappa^2 r0 / T^2 + 2c/(aT)` with `kappa = 2d/a`.
pub fn lemma_decreasing_bound<F: Scalar>(
    params: &RecursionParams<F>,
    r0: F,
    horizon: usize,
) -> Result<F> {
    if !(params.a > F::zero()) {
        return Err(Error::SublinearRequired("decreasing-stepsize bound"));
    }
    if horizon == 0 {
        return Err(Error::ZeroHorizon("decreasing-stepsize bound"));
    }
    let t = cst_usize::<F>(horizon);
    let kappa = cst::<F>(2.0) * params.d / params.a;
    Ok(cst::<F>(2.0) * params.a * kappa * kappa * r0 / (t * t)
        + cst::<F>(2.0) * params.c / (params.a * t))
}

/// Which lemma a sequence/schedule pair is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaKind {
    ConstantLog,
    TwoPhase,
    Sublinear,
    /// Unrolling: checks `r_t` against its closed-form envelope at
    /// every prefix, not a weighted average.
    Unroll,
    DecreasingLinear,
    DecreasingQuadratic,
}

impl LemmaKind {
    pub fn tag(self) -> &'static str {
        match self {
            LemmaKind::ConstantLog => "constant_log",
            LemmaKind::TwoPhase => "two_phase",
            LemmaKind::Sublinear => "sublinear",
            LemmaKind::Unroll => "unroll",
            LemmaKind::DecreasingLinear => "decreasing_linear",
            LemmaKind::DecreasingQuadratic => "decreasing_quadratic",
        }
    }

    pub fn needs_positive_a(self) -> bool {
        !matches!(self, LemmaKind::Sublinear)
    }

    /// Builds the schedule this lemma quantifies over.
    pub fn schedule<F: Scalar>(
        self,
        params: &RecursionParams<F>,
        r0: F,
        horizon: usize,
    ) -> Result<StepWeightSchedule<F>> {
        match self {
            LemmaKind::ConstantLog => {
                StepWeightSchedule::constant_log(params.a, params.d, params.c, r0, horizon)
            }
            LemmaKind::TwoPhase => StepWeightSchedule::two_phase(params.a, params.d, horizon),
            LemmaKind::Sublinear => StepWeightSchedule::sublinear(params.d, params.c, r0, horizon),
            LemmaKind::Unroll => StepWeightSchedule::user_constant(
                params.gamma_cap(),
                params.d,
                horizon,
                WeightSeq::Uniform,
            ),
            LemmaKind::DecreasingLinear => {
                StepWeightSchedule::decreasing(params.a, params.d, horizon, false)
            }
            LemmaKind::DecreasingQuadratic => {
                StepWeightSchedule::decreasing(params.a, params.d, horizon, true)
            }
        }
    }

    pub fn bound<F: Scalar>(self, params: &RecursionParams<F>, r0: F, horizon: usize) -> Result<F> {
        match self {
            LemmaKind::ConstantLog => lemma_constant_bound(params, r0, horizon),
            LemmaKind::TwoPhase => lemma_two_phase_bound(params, r0, horizon),
            LemmaKind::Sublinear => lemma_sublinear_bound(params, r0, horizon),
            LemmaKind::Unroll => lemma_unroll_bound(params, r0, horizon),
            LemmaKind::DecreasingLinear | LemmaKind::DecreasingQuadratic => {
                lemma_decreasing_bound(params, r0, horizon)
            }
        }
    }
}

/// Outcome of checking one sequence against one lemma bound.
#[derive(Debug, Clone, Copy)]
pub struct VerificationMargin<F> {
    /// The lemma's left-hand side: the weighted error, or the worst `r_t`
    /// for the unrolling lemma.
    pub weighted_error: F,
    pub bound_value: F,
    /// `bound_value - weighted_error`; negative means the bound failed.
    pub margin: F,
    pub schedule_tag: &'static str,
}

/// Evaluates the lemma bound on a generated sequence. The sequence must have
/// been generated with the stepsizes of `schedule`.
pub fn verify_lemma<F: Scalar>(
    seq: &SequencePair<F>,
    schedule: &StepWeightSchedule<F>,
    kind: LemmaKind,
) -> Result<VerificationMargin<F>> {
    let horizon = schedule.horizon();
    if seq.horizon() != horizon {
        return Err(Error::LengthMismatch(format!(
            "sequence horizon {} != schedule horizon {horizon}",
            seq.horizon()
        )));
    }
    for (t, &gamma) in seq.gammas.iter().enumerate() {
        if gamma != schedule.gamma(t) {
            return Err(Error::LengthMismatch(format!(
                "sequence stepsize at t = {t} differs from the schedule"
            )));
        }
    }
    let params = &seq.params;
    let r0 = seq.r[0];

    if kind == LemmaKind::Unroll {
        // Check every prefix: r_t <= r0 e^{-a t / d} + c/(ad).
        let mut worst_diff = F::infinity();
        let mut worst = (F::zero(), F::zero());
        for (t, &rv) in seq.r.iter().enumerate() {
            let env = lemma_unroll_bound(params, r0, t)?;
            let diff = env - rv;
            if diff < worst_diff {
                worst_diff = diff;
                worst = (rv, env);
            }
        }
        return Ok(VerificationMargin {
            weighted_error: worst.0,
            bound_value: worst.1,
            margin: worst_diff,
            schedule_tag: kind.tag(),
        });
    }

    let observed = weighted_error(seq, schedule.weights(), horizon)?;
    let bound = kind.bound(params, r0, horizon)?;
    Ok(VerificationMargin {
        weighted_error: observed,
        bound_value: bound,
        margin: bound - observed,
        schedule_tag: kind.tag(),
    })
}

/// One cell of a verification campaign: a lemma, parameters and a horizon.
#[derive(Debug, Clone, Copy)]
pub struct CampaignCell<F> {
    pub lemma: LemmaKind,
    pub params: RecursionParams<F>,
    pub r0: F,
    pub horizon: usize,
    pub draws: usize,
}

/// Per-draw record, kept for the worst draw of each (cell, mode).
#[derive(Debug, Clone)]
pub struct MarginRecord {
    pub lemma_tag: &'static str,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub horizon: usize,
    pub mode: &'static str,
    pub seed: u64,
    pub weighted_error: f64,
    pub bound: f64,
    pub margin: f64,
}

impl MarginRecord {
    pub const CSV_HEADER: &'static str =
        "lemma_tag,a,b,c,d,T,mode,seed,weighted_error,bound,margin";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.lemma_tag,
            self.a,
            self.b,
            self.c,
            self.d,
            self.horizon,
            self.mode,
            self.seed,
            self.weighted_error,
            self.bound,
            self.margin
        )
    }

    /// Relative margin check: `margin >= -tol * bound`.
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.margin >= -rel_tol * self.bound
    }
}

/// Result of one (cell, mode) sweep: the worst draw plus all draws if asked.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub worst: MarginRecord,
    pub all: Option<Vec<MarginRecord>>,
}

/// A cell skipped because the lemma does not apply there.
#[derive(Debug, Clone)]
pub struct SkippedCell {
    pub lemma_tag: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignReport {
    pub outcomes: Vec<CellOutcome>,
    pub skipped: Vec<SkippedCell>,
}

impl CampaignReport {
    pub fn min_relative_margin(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|o| {
                if o.worst.bound > 0.0 {
                    o.worst.margin / o.worst.bound
                } else {
                    // Zero bound: only an exactly non-negative margin passes.
                    if o.worst.margin >= 0.0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_pass(&self, rel_tol: f64) -> bool {
        self.outcomes.iter().all(|o| o.worst.passes(rel_tol))
    }
}

/// Runs the margin campaign over all cells and both generation modes,
/// parallelized per (cell, mode). Seeds derive from
/// `(master_seed, lemma, parameters, draw index)`, so the outcome is
/// independent of scheduling order.
pub fn run_margin_campaign<F: Scalar>(
    cells: &[CampaignCell<F>],
    master_seed: u64,
    keep_all_draws: bool,
) -> Result<CampaignReport> {
    let tasks: Vec<(usize, GenMode)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, _)| [(i, GenMode::Tight), (i, GenMode::Slack)])
        .collect();

    let results: Vec<std::result::Result<CellOutcome, SkippedCell>> = tasks
        .par_iter()
        .map(|&(i, mode)| run_cell(&cells[i], mode, master_seed, keep_all_draws))
        .collect::<Result<Vec<_>>>()?;

    let mut report = CampaignReport::default();
    for r in results {
        match r {
            Ok(outcome) => report.outcomes.push(outcome),
            Err(skip) => report.skipped.push(skip),
        }
    }
    Ok(report)
}

fn run_cell<F: Scalar>(
    cell: &CampaignCell<F>,
    mode: GenMode,
    master_seed: u64,
    keep_all: bool,
) -> Result<std::result::Result<CellOutcome, SkippedCell>> {
    let params = cell.params;
    if cell.lemma.needs_positive_a() && !(params.a > F::zero()) {
        return Ok(Err(SkippedCell {
            lemma_tag: cell.lemma.tag(),
            reason: format!("requires a > 0 (cell has a = {})", params.a),
        }));
    }
    let schedule = match cell.lemma.schedule(&params, cell.r0, cell.horizon) {
        Ok(s) => s,
        Err(Error::ZeroHorizon(what)) | Err(Error::SublinearRequired(what)) => {
            return Ok(Err(SkippedCell {
                lemma_tag: cell.lemma.tag(),
                reason: format!("{what}: not applicable at this cell"),
            }));
        }
        Err(e) => return Err(e),
    };
    if schedule.is_degenerate() {
        return Ok(Err(SkippedCell {
            lemma_tag: cell.lemma.tag(),
            reason: "degenerate sublinear cell (r0 = 0, c > 0): stated bound is vacuous".into(),
        }));
    }
    // Bounds at T = 0 are undefined for some lemmas; surface as skip.
    if matches!(
        cell.lemma.bound(&params, cell.r0, cell.horizon),
        Err(Error::ZeroHorizon(_))
    ) {
        return Ok(Err(SkippedCell {
            lemma_tag: cell.lemma.tag(),
            reason: "bound undefined at T = 0".into(),
        }));
    }
    let gammas = schedule.gammas_vec();

    let cell_key = stream_id_from(&[
        cell.lemma as u64,
        params.a.to_f64().unwrap_or(0.0).to_bits(),
        params.b.to_f64().unwrap_or(0.0).to_bits(),
        params.c.to_f64().unwrap_or(0.0).to_bits(),
        params.d.to_f64().unwrap_or(0.0).to_bits(),
        cell.horizon as u64,
    ]);

    let mut worst: Option<MarginRecord> = None;
    let mut all = if keep_all {
        Some(Vec::with_capacity(cell.draws))
    } else {
        None
    };
    for draw in 0..cell.draws {
        let stream_id = stream_id_from(&[cell_key, draw as u64]);
        let stream = RngStream::new(master_seed, stream_id);
        let seq = generate_feasible_sequence(params, &gammas, cell.r0, mode, &stream)?;
        let vm = verify_lemma(&seq, &schedule, cell.lemma)?;
        let record = MarginRecord {
            lemma_tag: cell.lemma.tag(),
            a: params.a.to_f64().unwrap_or(f64::NAN),
            b: params.b.to_f64().unwrap_or(f64::NAN),
            c: params.c.to_f64().unwrap_or(f64::NAN),
            d: params.d.to_f64().unwrap_or(f64::NAN),
            horizon: cell.horizon,
            mode: mode.tag(),
            seed: stream_id,
            weighted_error: vm.weighted_error.to_f64().unwrap_or(f64::NAN),
            bound: vm.bound_value.to_f64().unwrap_or(f64::NAN),
            margin: vm.margin.to_f64().unwrap_or(f64::NAN),
        };
        let is_worse = match &worst {
            None => true,
            Some(w) => relative_margin(&record) < relative_margin(w),
        };
        if is_worse {
            worst = Some(record.clone());
        }
        if let Some(v) = all.as_mut() {
            v.push(record);
        }
    }
    Ok(Ok(CellOutcome {
        worst: worst.expect("draws >= 1"),
        all,
    }))
}

fn relative_margin(r: &MarginRecord) -> f64 {
    if r.bound > 0.0 {
        r.margin / r.bound
    } else if r.margin >= 0.0 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured evidence (run with `--nocapture` to see them).
//!
//! Tolerances are pinned here, in code:
//!   - recursion margins: >= -1e-9 * bound, every draw;
//!   - feasibility re-checks: relative 1e-12;
//!   - pathwise GD: relative 1e-12 on the distance envelope, descent
//!     margins >= -1e-10;
//!   - expectation-level bounds: mean <= bound + 3 CI99 halfwidths;
//!   - mu-convexity margins: >= -1e-10.

use std::path::PathBuf;
use std::time::Instant;

use sgdlab::engine::{run_campaign, run_sgd, RunConfig};
use sgdlab::oracles::{data, standard_instance_grid, ProblemOracle};
use sgdlab::recursion::{run_margin_campaign, CampaignCell, LemmaKind, RecursionParams};
use sgdlab::rng::RngStream;
use sgdlab::scalar::pairwise_sum;
use sgdlab::schedules::{StepWeightSchedule, WeightSeq};

type Oracle = ProblemOracle<f64>;
type Sched = StepWeightSchedule<f64>;
type Params = RecursionParams<f64>;

const MASTER_SEED: u64 = 20250808;
const Z99: f64 = 2.575829303548901;

fn ci99(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Z99 * (var / n).sqrt())
}

/// Criterion 1: two-phase recursion dominance over the full grid,
/// 10^4 feasible sequences per cell (5000 tight + 5000 slack), margin
/// >= -1e-9 * bound in every draw; runtime under two minutes.
#[test]
fn acceptance_01_two_phase_recursion_dominance() {
    let start = Instant::now();
    let mut cells = Vec::new();
    for &a in &[0.1, 1.0] {
        for &dm in &[2.0, 20.0] {
            for &c in &[0.0, 1.0, 100.0] {
                for &b in &[0.5, 1.0] {
                    for &t in &[1usize, 2, 3, 10, 100, 1000] {
                        cells.push(CampaignCell {
                            lemma: LemmaKind::TwoPhase,
                            params: Params::new(a, b, c, dm * a).unwrap(),
                            r0: 1.0,
                            horizon: t,
                            draws: 5000,
                        });
                    }
                }
            }
        }
    }
    let report = run_margin_campaign(&cells, MASTER_SEED, false).unwrap();
    let elapsed = start.elapsed();
    assert!(report.skipped.is_empty());
    assert_eq!(report.outcomes.len(), cells.len() * 2);
    let min_rel = report.min_relative_margin();
    assert!(report.all_pass(1e-9), "min relative margin {min_rel}");
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: two-phase dominance over {} cells x 10^4 draws, \
         min relative margin {min_rel:.3e}, {elapsed:?}",
        cells.len()
    );
}

/// Criterion 2: unrolling lemma on the same grid restricted to
/// gamma = 1/d; r_t <= r0 e^{-a t/d} + c/(ad) for every draw (checked on
/// every prefix), tolerance -1e-9 relative.
#[test]
fn acceptance_02_unrolling_dominance() {
    let mut cells = Vec::new();
    for &a in &[0.1, 1.0] {
        for &dm in &[2.0, 20.0] {
            for &c in &[0.0, 1.0, 100.0] {
                for &b in &[0.5, 1.0] {
                    for &t in &[1usize, 2, 3, 10, 100, 1000] {
                        cells.push(CampaignCell {
                            lemma: LemmaKind::Unroll,
                            params: Params::new(a, b, c, dm * a).unwrap(),
                            r0: 1.0,
                            horizon: t,
                            draws: 5000,
                        });
                    }
                }
            }
        }
    }
    let report = run_margin_campaign(&cells, MASTER_SEED ^ 2, false).unwrap();
    assert!(report.skipped.is_empty());
    let min_rel = report.min_relative_margin();
    assert!(report.all_pass(1e-9), "min relative margin {min_rel}");
    println!(
        "[PASS] criterion 2: unrolling envelope over {} cells x 10^4 draws, \
         min relative margin {min_rel:.3e}",
        cells.len()
    );
}

/// Criterion 3: sublinear lemma (a = 0) over a (d, c, r0, T, b) grid with the
/// tuned stepsize; uniform average of b s_t below the bound in every draw.
/// Degenerate (r0 = 0, c > 0) cells are skip-reported, never checked.
#[test]
fn acceptance_03_sublinear_dominance() {
    let mut cells = Vec::new();
    let mut degenerate = 0usize;
    for &d in &[0.2, 2.0, 20.0] {
        for &c in &[0.0, 1.0, 100.0] {
            for &r0 in &[0.0, 1.0, 10.0] {
                for &b in &[0.5, 1.0] {
                    for &t in &[1usize, 10, 100, 1000] {
                        if r0 == 0.0 && c > 0.0 {
                            degenerate += 2; // tight + slack
                        }
                        cells.push(CampaignCell {
                            lemma: LemmaKind::Sublinear,
                            params: Params::new(0.0, b, c, d).unwrap(),
                            r0,
                            horizon: t,
                            draws: 5000,
                        });
                    }
                }
            }
        }
    }
    let report = run_margin_campaign(&cells, MASTER_SEED ^ 3, false).unwrap();
    assert_eq!(report.skipped.len(), degenerate);
    let min_rel = report.min_relative_margin();
    assert!(report.all_pass(1e-9), "min relative margin {min_rel}");
    println!(
        "[PASS] criterion 3: sublinear dominance over {} cells x 10^4 draws \
         ({} degenerate cells skip-reported), min relative margin {min_rel:.3e}",
        report.outcomes.len() / 2,
        degenerate
    );
}

/// Criterion 4: deterministic GD on the (0.1, 1) quadratic with
/// gamma = 1/(2L): pathwise distance envelope (1 - mu gamma)^t R^2 at
/// relative 1e-12 for T in {10, 100, 1000}, and every per-step descent
/// margin >= -1e-10.
#[test]
fn acceptance_04_deterministic_gd_distance_and_descent() {
    let oracle = Oracle::noisy_quadratic(&[0.1, 1.0], &[0.0, 0.0], 0.0, MASTER_SEED).unwrap();
    let gamma = 1.0 / (2.0 * oracle.big_l());
    let u = 1.0 / 2.0f64.sqrt();
    let x0 = vec![u, u]; // R = 1 exactly up to rounding
    let mut worst_rel = f64::NEG_INFINITY;
    let mut worst_margin = f64::INFINITY;
    for &t in &[10usize, 100, 1000] {
        let schedule =
            Sched::user_constant(gamma, 2.0 * oracle.big_l(), t, WeightSeq::LastOnly).unwrap();
        let cfg = RunConfig::new(schedule, MASTER_SEED).with_descent_check();
        let res = run_sgd(&oracle, &x0, &cfg).unwrap();
        let trajectory = res.trajectory.as_ref().unwrap();
        for (step, x) in trajectory.iter().enumerate().take(t + 1) {
            let dist_sq: f64 = x.iter().map(|v| v * v).sum();
            let envelope = (1.0 - oracle.mu() * gamma).powi(step as i32);
            let rel = dist_sq / envelope - 1.0;
            worst_rel = worst_rel.max(rel);
            assert!(
                dist_sq <= envelope * (1.0 + 1e-12),
                "T={t} step {step}: {dist_sq} > {envelope}"
            );
        }
        for &m in res.descent_margins.as_ref().unwrap() {
            worst_margin = worst_margin.min(m);
            assert!(m >= -1e-10, "T={t}: descent margin {m}");
        }
    }
    println!(
        "[PASS] criterion 4: pathwise distance envelope (worst rel excess {worst_rel:.3e}) \
         and descent margins (worst {worst_margin:.3e}) at T in {{10, 100, 1000}}"
    );
}

/// Criterion 5: stochastic composite dominance. Noisy quadratic mu = L = 1,
/// sigma^2 = 1, R = 1, two-phase schedule, T in {100, 1000, 10000}, 1000
/// replicates: mean composite <= min of the two theorem branches plus three
/// CI halfwidths; runtime under five minutes.
#[test]
fn acceptance_05_stochastic_theorem_dominance() {
    let start = Instant::now();
    let oracle = Oracle::noisy_quadratic(&[1.0], &[0.0], 1.0, MASTER_SEED).unwrap();
    let x0 = vec![1.0];
    let mut lines = Vec::new();
    for &t in &[100usize, 1000, 10_000] {
        let schedule = Sched::two_phase(oracle.mu(), 2.0 * oracle.big_l(), t).unwrap();
        let agg = run_campaign(&oracle, &x0, &schedule, 1000, MASTER_SEED).unwrap();
        let bound = agg.bound.theorem_min;
        assert!(
            agg.mean_composite <= bound + 3.0 * agg.ci99_composite,
            "T={t}: mean {} > bound {bound} + 3ci {}",
            agg.mean_composite,
            agg.ci99_composite
        );
        lines.push(format!(
            "T={t}: mean {:.4e} <= bound {:.4e} (ratio {:.3})",
            agg.mean_composite,
            bound,
            agg.mean_composite / bound
        ));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 5: theorem dominance, 1000 replicates ({}), {elapsed:?}",
        lines.join("; ")
    );
}

/// Criterion 6: interpolation linear convergence. Orthogonal-design
/// interpolating least squares (m = 50, n = 10; mu = 0.1, L = 2 exactly):
/// sigma^2 is exactly zero and the composite decays at least geometrically,
/// composite(2T) <= composite(T) e^{-mu T/(4L)} (1 + 0.1) for gated pairs
/// with T >= 8L/mu = 160, checked over T in {64, 128, 256, 512}.
#[test]
fn acceptance_06_interpolation_linear_convergence() {
    let rows = data::orthogonal_design_rows::<f64>(50, 10, 1.0);
    let mut rng = RngStream::new(MASTER_SEED, 6);
    let planted = data::planted_solution::<f64>(10, &mut rng);
    let targets = data::planted_targets(&rows, &planted);
    let oracle = Oracle::finite_sum_least_squares(&rows, &targets, true, MASTER_SEED).unwrap();
    assert_eq!(
        oracle.sigma_sq(),
        0.0,
        "interpolating noise floor must be exactly zero"
    );
    assert!((oracle.mu() - 0.1).abs() < 1e-14);
    assert_eq!(oracle.big_l(), 2.0);

    let mu = oracle.mu();
    let big_l = oracle.big_l();
    let d = 2.0 * big_l;
    let u = 1.0 / 10.0f64.sqrt();
    let x0: Vec<f64> = oracle.x_star().iter().map(|x| x + u).collect();

    let horizons = [64usize, 128, 256, 512];
    let mut composites = Vec::new();
    for &t in &horizons {
        let schedule = Sched::two_phase(mu, d, t).unwrap();
        let agg = run_campaign(&oracle, &x0, &schedule, 200, MASTER_SEED).unwrap();
        composites.push(agg.mean_composite);
    }

    let gate = 8.0 * big_l / mu; // 160
    let mut checked = 0;
    for i in 0..horizons.len() - 1 {
        let (t, t2) = (horizons[i], horizons[i + 1]);
        assert_eq!(t2, 2 * t);
        if (t as f64) < gate {
            continue;
        }
        let rate = (-mu * t as f64 / (4.0 * big_l)).exp();
        let allowed = composites[i] * rate * 1.1;
        assert!(
            composites[i + 1] <= allowed,
            "composite({t2}) = {} > composite({t}) * e^(-mu T/4L) * 1.1 = {allowed}",
            composites[i + 1]
        );
        checked += 1;
    }
    assert!(
        checked >= 1,
        "the T >= 8L/mu gate must leave at least one pair"
    );
    println!(
        "[PASS] criterion 6: sigma^2 = 0 exactly; geometric decay verified on {checked} \
         gated pair(s); composites {composites:?}"
    );
}

/// Criterion 7: mu = 0 sublinear rate. Singular consistent least squares
/// with the tuned a = 0 stepsize and uniform averaging: mean function gap of
/// the average <= 2 L R^2 / T + 2 sigma R / sqrt(T) + 3 CI at
/// T in {100, 1000, 10000}.
#[test]
fn acceptance_07_mu_zero_sublinear_rate() {
    let mut rng = RngStream::new(MASTER_SEED, 7);
    let rows = data::low_rank_rows::<f64>(40, 10, 5, 1.0, &mut rng);
    let planted = data::planted_solution::<f64>(10, &mut rng.substream(1));
    let targets = data::planted_targets(&rows, &planted);
    let oracle = Oracle::finite_sum_least_squares(&rows, &targets, true, MASTER_SEED).unwrap();
    assert_eq!(oracle.mu(), 0.0, "singular instance must certify mu = 0");
    assert_eq!(
        oracle.sigma_sq(),
        0.0,
        "consistent instance has zero noise floor"
    );

    let big_l = oracle.big_l();
    let d = 2.0 * big_l;
    let u = 1.0 / 10.0f64.sqrt();
    let x0: Vec<f64> = oracle.x_star().iter().map(|x| x + u).collect();
    let r_sq: f64 = x0
        .iter()
        .zip(oracle.x_star())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();

    let mut lines = Vec::new();
    for &t in &[100usize, 1000, 10_000] {
        let schedule = Sched::sublinear(d, oracle.sigma_sq(), r_sq, t).unwrap();
        let agg = run_campaign(&oracle, &x0, &schedule, 300, MASTER_SEED).unwrap();
        let gaps: Vec<f64> = agg.per_replicate.iter().map(|r| r.f_gap_avg).collect();
        let (mean, ci) = ci99(&gaps);
        let bound = 2.0 * big_l * r_sq / t as f64
            + 2.0 * oracle.sigma_sq().sqrt() * r_sq.sqrt() / (t as f64).sqrt();
        assert!(
            mean <= bound + 3.0 * ci,
            "T={t}: mean f-gap {mean} > bound {bound} + 3ci {ci}"
        );
        lines.push(format!("T={t}: {mean:.4e} <= {bound:.4e}"));
    }
    println!(
        "[PASS] criterion 7: mu = 0 sublinear rate on the averaged gap ({})",
        lines.join("; ")
    );
}

/// Criterion 8: assumption validators across the standard instances at 20
/// random query points each: no second-moment violation flagged, no
/// mu-convexity margin below -1e-10.
#[test]
fn acceptance_08_assumption_validators() {
    let instances = standard_instance_grid::<f64>(MASTER_SEED);
    assert!(instances.len() >= 7);
    let mut worst_mu_margin = f64::INFINITY;
    let mut checked_points = 0usize;
    for (idx, oracle) in instances.iter().enumerate() {
        let mut point_rng = RngStream::new(MASTER_SEED, 800 + idx as u64);
        for point in 0..20u64 {
            let x: Vec<f64> = oracle
                .x_star()
                .iter()
                .map(|&xs| xs + point_rng.normal())
                .collect();
            let mut mc = point_rng.substream(point);
            let rep = oracle.check_smoothness_assumption(&x, 10_000, &mut mc);
            assert!(
                !rep.violation,
                "{} point {point}: lhs {} - ci {} > rhs {}",
                oracle.kind_tag(),
                rep.lhs_estimate,
                rep.ci_halfwidth,
                rep.rhs
            );
            let margin = oracle.check_mu_convexity(&x);
            worst_mu_margin = worst_mu_margin.min(margin);
            assert!(
                margin >= -1e-10,
                "{} point {point}: mu-convexity margin {margin}",
                oracle.kind_tag()
            );
            checked_points += 1;
        }
    }
    println!(
        "[PASS] criterion 8: {} instances x 20 points = {checked_points} checks, \
         no second-moment flag, worst mu-convexity margin {worst_mu_margin:.3e}",
        instances.len()
    );
}

/// Criterion 9: determinism. Re-running criterion 5's smallest cell through
/// the CLI with the same master seed yields byte-identical CSV output.
#[test]
fn acceptance_09_csv_determinism() {
    let fixture = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/determinism.toml");
    let dir = std::env::temp_dir().join(format!("sgdlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str| -> Vec<u8> {
        let out = dir.join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_sgdlab"))
            .args([
                "run",
                "--config",
                fixture.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert_eq!(status.status.code(), Some(0));
        std::fs::read(&out).unwrap()
    };
    let first = run("det_a.csv");
    let second = run("det_b.csv");
    assert_eq!(
        first, second,
        "same master seed must byte-reproduce the CSV"
    );
    assert!(first.len() > 1000, "per-replicate rows expected");
    println!(
        "[PASS] criterion 9: byte-identical CSV over two runs ({} bytes, 1000 replicate rows)",
        first.len()
    );
}

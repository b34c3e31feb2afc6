//! Experiment configuration: one TOML document describes one campaign.
//!
//! All randomness flows from `master_seed`; there is no ambient entropy
//! anywhere, so rerunning a config byte-reproduces its outputs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use sgdlab::oracles::{data, ProblemOracle};
use sgdlab::recursion::LemmaKind;
use sgdlab::rng::RngStream;
use sgdlab::schedules::{StepWeightSchedule, WeightSeq};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub master_seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub workers: usize,
    /// Also emit one CSV row per replicate (run/sweep modes).
    #[serde(default)]
    pub emit_replicates: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<AlgorithmConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion: Option<RecursionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleCheckConfig>,
}

fn default_replicates() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Run,
    Sweep,
    VerifyRecursion,
    CheckOracle,
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemConfig {
    /// Diagonal quadratic with Gaussian gradient noise; `x* = 0`.
    NoisyQuadratic {
        spectrum: Vec<f64>,
        #[serde(default)]
        sigma2: f64,
        #[serde(default = "default_r0")]
        r0: f64,
    },
    /// Finite-sum least squares on generated data.
    LeastSquares {
        rows: usize,
        cols: usize,
        #[serde(default)]
        interpolating: bool,
        #[serde(default)]
        design: Design,
        /// Restrict the data to this many leading coordinates (singular
        /// second moment when below `cols`).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
        /// Std of additive target noise for non-interpolating instances.
        #[serde(default)]
        target_noise: f64,
        #[serde(default = "default_r0")]
        r0: f64,
        #[serde(default)]
        require_mu_positive: bool,
    },
    /// L2-regularized logistic regression on generated data.
    Logistic {
        rows: usize,
        cols: usize,
        l2_penalty: f64,
        #[serde(default = "default_feature_scale")]
        feature_scale: f64,
        #[serde(default = "default_r0")]
        r0: f64,
    },
}

fn default_r0() -> f64 {
    1.0
}

fn default_feature_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    #[default]
    Gaussian,
    /// Rows cycle the scaled coordinate basis; exact `mu` and `L`.
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub schedules: Vec<ScheduleTag>,
    pub horizons: Vec<usize>,
    /// Stepsize for the user-constant family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleTag {
    ConstantLog,
    TwoPhase,
    Sublinear,
    ClassicConstant,
    UserConstant,
}

impl ScheduleTag {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleTag::ConstantLog => "constant_log",
            ScheduleTag::TwoPhase => "two_phase",
            ScheduleTag::Sublinear => "sublinear",
            ScheduleTag::ClassicConstant => "classic_constant",
            ScheduleTag::UserConstant => "user_constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursionConfig {
    pub a: Vec<f64>,
    /// Interpreted as multiples of `a` when `d_relative` (the default);
    /// absolute values otherwise. For `a = 0` cells the values are always
    /// absolute.
    pub d: Vec<f64>,
    #[serde(default = "default_true")]
    pub d_relative: bool,
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    pub horizons: Vec<usize>,
    #[serde(default = "default_r0_list")]
    pub r0: Vec<f64>,
    pub draws_per_cell: usize,
    pub lemmas: Vec<LemmaTag>,
    /// Emit every draw instead of only the worst draw per cell and mode.
    #[serde(default)]
    pub emit_all_draws: bool,
}

fn default_true() -> bool {
    true
}

fn default_r0_list() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaTag {
    ConstantLog,
    TwoPhase,
    Sublinear,
    Unroll,
    DecreasingLinear,
    DecreasingQuadratic,
}

impl From<LemmaTag> for LemmaKind {
    fn from(tag: LemmaTag) -> LemmaKind {
        match tag {
            LemmaTag::ConstantLog => LemmaKind::ConstantLog,
            LemmaTag::TwoPhase => LemmaKind::TwoPhase,
            LemmaTag::Sublinear => LemmaKind::Sublinear,
            LemmaTag::Unroll => LemmaKind::Unroll,
            LemmaTag::DecreasingLinear => LemmaKind::DecreasingLinear,
            LemmaTag::DecreasingQuadratic => LemmaKind::DecreasingQuadratic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_samples")]
    pub samples_per_point: usize,
    /// Query points are `x* + radius * z` with standard normal `z`.
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_points() -> usize {
    20
}
fn default_samples() -> usize {
    10_000
}
fn default_radius() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.replicates < 1 {
            return Err(CliError::Config(
                "field `replicates` must be >= 1 (got 0)".into(),
            ));
        }
        match self.mode {
            Mode::Run | Mode::Sweep => {
                let problem = self
                    .problem
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing [problem] block".into()))?;
                problem.validate()?;
                let alg = self
                    .algorithm
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing [algorithm] block".into()))?;
                if alg.horizons.is_empty() {
                    return Err(CliError::Config(
                        "field `algorithm.horizons` is empty".into(),
                    ));
                }
                if alg.schedules.is_empty() {
                    return Err(CliError::Config(
                        "field `algorithm.schedules` is empty".into(),
                    ));
                }
                if alg.schedules.contains(&ScheduleTag::UserConstant) && alg.gamma.is_none() {
                    return Err(CliError::Config(
                        "schedule `user-constant` needs field `algorithm.gamma`".into(),
                    ));
                }
            }
            Mode::VerifyRecursion => {
                let rec = self
                    .recursion
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing [recursion] block".into()))?;
                for (name, list) in [
                    ("recursion.a", &rec.a),
                    ("recursion.d", &rec.d),
                    ("recursion.c", &rec.c),
                    ("recursion.b", &rec.b),
                    ("recursion.r0", &rec.r0),
                ] {
                    if list.is_empty() {
                        return Err(CliError::Config(format!("field `{name}` is empty")));
                    }
                }
                if rec.horizons.is_empty() {
                    return Err(CliError::Config(
                        "field `recursion.horizons` is empty".into(),
                    ));
                }
                if rec.lemmas.is_empty() {
                    return Err(CliError::Config("field `recursion.lemmas` is empty".into()));
                }
                if rec.draws_per_cell == 0 {
                    return Err(CliError::Config(
                        "field `recursion.draws_per_cell` must be >= 1".into(),
                    ));
                }
            }
            Mode::CheckOracle => {
                let problem = self
                    .problem
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing [problem] block".into()))?;
                problem.validate()?;
            }
            Mode::Bound => {}
        }
        Ok(())
    }
}

impl ProblemConfig {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            ProblemConfig::NoisyQuadratic {
                spectrum,
                sigma2,
                r0,
            } => {
                if spectrum.is_empty() {
                    return Err(CliError::Config("field `problem.spectrum` is empty".into()));
                }
                if *sigma2 < 0.0 || *r0 < 0.0 {
                    return Err(CliError::Config(
                        "fields `problem.sigma2` and `problem.r0` must be >= 0".into(),
                    ));
                }
            }
            ProblemConfig::LeastSquares {
                rows, cols, rank, ..
            } => {
                if *rows == 0 || *cols == 0 {
                    return Err(CliError::Config(
                        "fields `problem.rows` and `problem.cols` must be >= 1".into(),
                    ));
                }
                if let Some(k) = rank {
                    if *k == 0 || k > cols {
                        return Err(CliError::Config(
                            "field `problem.rank` must be in 1..=cols".into(),
                        ));
                    }
                }
            }
            ProblemConfig::Logistic {
                rows,
                cols,
                l2_penalty,
                ..
            } => {
                if *rows == 0 || *cols == 0 {
                    return Err(CliError::Config(
                        "fields `problem.rows` and `problem.cols` must be >= 1".into(),
                    ));
                }
                if !(*l2_penalty > 0.0) {
                    return Err(CliError::Config(
                        "field `problem.l2_penalty` must be > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Builds the oracle plus the starting point `x0 = x* + r0 * u` with
    /// `u` the normalized all-ones direction.
    pub fn build(&self, master_seed: u64) -> Result<(ProblemOracle<f64>, Vec<f64>), CliError> {
        const DATA_STREAM: u64 = 0xDA7A;
        match self {
            ProblemConfig::NoisyQuadratic {
                spectrum,
                sigma2,
                r0,
            } => {
                let mut sorted = spectrum.clone();
                sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite spectrum"));
                let x_star = vec![0.0; sorted.len()];
                let oracle = ProblemOracle::noisy_quadratic(&sorted, &x_star, *sigma2, master_seed)
                    .map_err(CliError::numeric)?;
                let x0 = offset_start(oracle.x_star(), *r0);
                Ok((oracle, x0))
            }
            ProblemConfig::LeastSquares {
                rows,
                cols,
                interpolating,
                design,
                rank,
                target_noise,
                r0,
                require_mu_positive,
            } => {
                let mut rng = RngStream::new(master_seed, DATA_STREAM);
                let data_rows = match (design, rank) {
                    (Design::Orthogonal, _) => data::orthogonal_design_rows(*rows, *cols, 1.0),
                    (Design::Gaussian, None) => data::gaussian_rows(*rows, *cols, 1.0, &mut rng),
                    (Design::Gaussian, Some(k)) => {
                        data::low_rank_rows(*rows, *cols, *k, 1.0, &mut rng)
                    }
                };
                let planted = data::planted_solution(*cols, &mut rng.substream(1));
                let mut targets = data::planted_targets(&data_rows, &planted);
                if !*interpolating && *target_noise > 0.0 {
                    let mut nrng = rng.substream(2);
                    for t in targets.iter_mut() {
                        *t += *target_noise * nrng.normal();
                    }
                }
                let oracle = ProblemOracle::finite_sum_least_squares(
                    &data_rows,
                    &targets,
                    *interpolating,
                    master_seed,
                )
                .map_err(CliError::numeric)?;
                if *require_mu_positive {
                    oracle
                        .require_mu_positive()
                        .map_err(|e| CliError::Config(e.to_string()))?;
                }
                let x0 = offset_start(oracle.x_star(), *r0);
                Ok((oracle, x0))
            }
            ProblemConfig::Logistic {
                rows,
                cols,
                l2_penalty,
                feature_scale,
                r0,
            } => {
                let mut rng = RngStream::new(master_seed, DATA_STREAM);
                let data_rows = data::gaussian_rows(*rows, *cols, *feature_scale, &mut rng);
                let w = data::planted_solution(*cols, &mut rng.substream(1));
                let labels = data::planted_labels(&data_rows, &w, 0.3, &mut rng.substream(2));
                let oracle = ProblemOracle::logistic_regression(
                    &data_rows,
                    &labels,
                    *l2_penalty,
                    master_seed,
                )
                .map_err(CliError::numeric)?;
                let x0 = offset_start(oracle.x_star(), *r0);
                Ok((oracle, x0))
            }
        }
    }
}

fn offset_start(x_star: &[f64], r0: f64) -> Vec<f64> {
    let n = x_star.len();
    let u = 1.0 / (n as f64).sqrt();
    x_star.iter().map(|&x| x + r0 * u).collect()
}

/// Builds one schedule for an oracle at a horizon. `d = 2L` throughout, as
/// the engine's stepsize cap demands.
pub fn build_schedule(
    tag: ScheduleTag,
    oracle: &ProblemOracle<f64>,
    x0: &[f64],
    horizon: usize,
    gamma: Option<f64>,
) -> Result<StepWeightSchedule<f64>, CliError> {
    let mu = oracle.mu();
    let big_l = oracle.big_l();
    let d = 2.0 * big_l;
    let r_sq: f64 = x0
        .iter()
        .zip(oracle.x_star())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let sched = match tag {
        ScheduleTag::ConstantLog => {
            StepWeightSchedule::constant_log(mu, d, oracle.sigma_sq(), r_sq, horizon)
        }
        ScheduleTag::TwoPhase => StepWeightSchedule::two_phase(mu, d, horizon),
        ScheduleTag::Sublinear => {
            StepWeightSchedule::sublinear(d, oracle.sigma_sq(), r_sq, horizon)
        }
        ScheduleTag::ClassicConstant => {
            StepWeightSchedule::classic_constant(mu, big_l, r_sq, oracle.sigma_sq(), horizon)
        }
        ScheduleTag::UserConstant => {
            let g = gamma.expect("validated: user-constant requires gamma");
            StepWeightSchedule::user_constant(g, d, horizon, WeightSeq::Uniform)
        }
    };
    sched.map_err(|e| CliError::Config(format!("schedule {}: {e}", tag.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn fixtures() -> Vec<std::path::PathBuf> {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
        let mut out: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "toml"))
            .collect();
        out.sort();
        out
    }

    /// Serializing a parsed config and re-parsing yields an identical
    /// structure, for every shipped fixture.
    #[test]
    fn config_round_trip_is_identity() {
        let mut bad_seen = 0;
        for path in fixtures() {
            let text = std::fs::read_to_string(&path).unwrap();
            let parsed: ExperimentConfig = match toml::from_str(&text) {
                Ok(c) => c,
                Err(e) => panic!("{}: {e}", path.display()),
            };
            // Fixtures that are deliberately invalid still parse; they fail
            // validation instead.
            if parsed.validate().is_err() {
                bad_seen += 1;
            }
            let serialized = toml::to_string(&parsed).unwrap();
            let reparsed: ExperimentConfig = toml::from_str(&serialized).unwrap();
            assert_eq!(parsed, reparsed, "{}", path.display());
        }
        assert_eq!(bad_seen, 1, "exactly bad_replicates.toml fails validation");
    }

    #[test]
    fn validation_names_offending_field() {
        let text = r#"
mode = "run"
master_seed = 1
replicates = 0

[problem]
kind = "noisy-quadratic"
spectrum = [1.0]

[algorithm]
schedules = ["two-phase"]
horizons = [4]
"#;
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("replicates"), "{err}");
    }

    #[test]
    fn user_constant_requires_gamma() {
        let text = r#"
mode = "run"
master_seed = 1

[problem]
kind = "noisy-quadratic"
spectrum = [1.0]

[algorithm]
schedules = ["user-constant"]
horizons = [4]
"#;
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn quadratic_spectrum_is_sorted_before_use() {
        let problem = ProblemConfig::NoisyQuadratic {
            spectrum: vec![1.0, 0.1],
            sigma2: 0.0,
            r0: 1.0,
        };
        let (oracle, x0) = problem.build(3).unwrap();
        assert_eq!(oracle.mu(), 0.1);
        assert_eq!(oracle.big_l(), 1.0);
        // x0 sits at distance r0 from x*.
        let r: f64 = x0.iter().map(|x| x * x).sum::<f64>();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn require_mu_positive_rejects_singular_instances() {
        let problem = ProblemConfig::LeastSquares {
            rows: 12,
            cols: 6,
            interpolating: true,
            design: Design::Gaussian,
            rank: Some(3),
            target_noise: 0.0,
            r0: 1.0,
            require_mu_positive: true,
        };
        assert!(matches!(problem.build(5), Err(CliError::Config(_))));
    }
}

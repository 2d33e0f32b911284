use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spde_lab::{Error, Result};

/// Fully resolved run description; embedded in every artifact and accepted by `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// Monte Carlo moments of SDE/SPDE solutions, with a Lyapunov fit over several times.
    Simulate(SimulateArgs),
    /// Chaos-series tables (PAM second moment, geometric BM/fBm).
    Chaos(ChaosArgs),
    /// Existence conditions for Riesz/fractional noise.
    Check(CheckArgs),
    /// Dalang–Gronwall bounds a_n.
    Certificate(CertificateArgs),
    /// Feynman–Kac second moment of the PAM with fractional-Riesz noise.
    Fk(FkArgs),
    /// Empirical Hölder exponents of the linear heat equation.
    Holder(HolderArgs),
    /// Raw noise dumps.
    Noise(NoiseArgs),
}

impl Command {
    pub fn default_format(&self) -> Format {
        match self {
            Command::Simulate(_) | Command::Chaos(_) | Command::Certificate(_) | Command::Noise(_) => Format::Csv,
            Command::Check(_) | Command::Fk(_) | Command::Holder(_) => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SimModel {
    /// Geometric Brownian motion.
    Gbm,
    /// Geometric fBm (needs --hurst).
    Gfbm,
    /// Parabolic Anderson model, white noise, d = 1 (Euler scheme).
    Pam,
    /// Linear stochastic heat equation, white noise, d = 1.
    Heat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: SimModel,
    /// Terminal times; four or more enable the Lyapunov fit.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Moment orders.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    /// Time steps per run.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Spatial cells (SPDE models).
    #[arg(long, default_value_t = 128)]
    pub cells: usize,
    /// Spatial half-width L (SPDE models); defaults to 8√t.
    #[arg(long)]
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ChaosModel {
    /// Second moment of the white-noise PAM.
    Pam,
    /// Geometric Brownian motion at endpoint value --b.
    Bm,
    /// Geometric fBm at endpoint value --b (needs --hurst).
    Fbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ChaosArgs {
    #[arg(long, value_enum)]
    pub model: ChaosModel,
    #[arg(long)]
    pub t: f64,
    /// Truncation order; for the PAM it defaults to the smallest order meeting --tol.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub hurst: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Heat,
    Wave,
}

impl From<Op> for spde_lab::kernels::OperatorKind {
    fn from(op: Op) -> Self {
        match op {
            Op::Heat => spde_lab::kernels::OperatorKind::Heat,
            Op::Wave => spde_lab::kernels::OperatorKind::Wave,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub op: Op,
    /// Riesz order α of the spatial covariance.
    #[arg(long)]
    pub alpha: f64,
    /// Hurst index of fractional time; omitted means white in time.
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// g(s) = (4πs)^{-1/2}.
    Heat,
    /// g(s) = s/2.
    Wave,
    /// g ≡ --beta.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CertificateArgs {
    #[arg(long, value_enum)]
    pub profile: Profile,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct FkArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    #[arg(long, default_value_t = 64)]
    pub n_quad: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct HolderArgs {
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
    #[arg(long, default_value_t = 512)]
    pub cells: usize,
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 200)]
    pub replicas: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Lags in grid steps.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "2,4,8,16,32")]
    pub lags: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub burn_in: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Brownian path.
    Bm,
    /// Fractional Brownian path (needs --hurst).
    Fbm,
    /// Space-time white-noise cell increments.
    White,
    /// Homogeneous noise: fractional time if --hurst, Riesz space if --alpha.
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    pub kind: NoiseKind,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = 64)]
    pub cells: usize,
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Replica index of the dumped sample.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("--{name} must be positive, got {v}"))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        invalid(format!("--{name} must be at least 1"))
    }
}

fn required<T: Copy>(name: &str, v: Option<T>, why: &str) -> Result<T> {
    match v {
        Some(x) => Ok(x),
        None => invalid(format!("--{name} is required {why}")),
    }
}

impl RunConfig {
    /// Range checks that need no computation; run before anything is simulated.
    pub fn validate(&self) -> Result<()> {
        let allowed: &[Format] = match &self.command {
            Command::Simulate(_) | Command::Chaos(_) | Command::Certificate(_) => &[Format::Csv, Format::Json],
            Command::Check(_) | Command::Fk(_) | Command::Holder(_) => &[Format::Json],
            Command::Noise(n) => match n.kind {
                NoiseKind::Bm | NoiseKind::Fbm => &[Format::Csv, Format::Json],
                _ => &[Format::Csv, Format::Binary],
            },
        };
        if !allowed.contains(&self.format) {
            return invalid(format!("format {:?} is not available for this command", self.format));
        }
        if self.format == Format::Binary && self.output.is_none() {
            return invalid("binary output needs --output");
        }
        match &self.command {
            Command::Simulate(a) => {
                if a.t.is_empty() {
                    return invalid("at least one --t is required");
                }
                a.t.iter().try_for_each(|&t| positive("t", t))?;
                if let Some(p) = a.p.iter().find(|p| !(**p >= 1.0)) {
                    return invalid(format!("--p must be at least 1, got {p}"));
                }
                at_least_one("replicas", a.replicas)?;
                at_least_one("steps", a.steps)?;
                at_least_one("cells", a.cells)?;
                if let Some(l) = a.half_width {
                    positive("half-width", l)?;
                }
                if a.model == SimModel::Gfbm {
                    let h = required("hurst", a.hurst, "for --model gfbm")?;
                    if !(h > 0.0 && h < 1.0) {
                        return invalid(format!("--hurst must lie in (0, 1), got {h}"));
                    }
                }
            }
            Command::Chaos(a) => {
                positive("t", a.t)?;
                positive("tol", a.tol)?;
                if a.model != ChaosModel::Pam {
                    required("b", a.b, "for geometric chaos series")?;
                    required("n", a.n, "for geometric chaos series")?;
                }
                if a.model == ChaosModel::Fbm {
                    required("hurst", a.hurst, "for --model fbm")?;
                }
            }
            Command::Check(a) => at_least_one("dim", a.dim)?,
            Command::Certificate(a) => {
                positive("t", a.t)?;
                positive("m", a.m)?;
                at_least_one("replicas", a.replicas)?;
                if a.profile == Profile::Constant {
                    positive("beta", required("beta", a.beta, "for --profile constant")?)?;
                }
            }
            Command::Fk(a) => {
                positive("t", a.t)?;
                at_least_one("replicas", a.replicas)?;
                at_least_one("n-quad", a.n_quad)?;
            }
            Command::Holder(a) => {
                positive("t", a.t)?;
                positive("half-width", a.half_width)?;
                at_least_one("replicas", a.replicas)?;
            }
            Command::Noise(a) => {
                positive("t", a.t)?;
                positive("half-width", a.half_width)?;
                at_least_one("steps", a.steps)?;
                at_least_one("cells", a.cells)?;
                if a.kind == NoiseKind::Fbm {
                    required("hurst", a.hurst, "for --kind fbm")?;
                }
            }
        }
        Ok(())
    }
}

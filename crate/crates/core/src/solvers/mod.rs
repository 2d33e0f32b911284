//! Solution schemes: Itô and Walsh sums, Picard iteration for SDEs and the
//! stochastic heat equation, stochastic convolution, and the parabolic
//! Anderson model (chaos series and Euler time marching).

mod heat;
mod ito;
mod pam;

pub use heat::{
    linear_heat_1d_discrete_variance, slab_lag, solve_linear_heat_1d, solve_nonlinear_heat_picard,
    HeatConvolution,
};
pub use ito::{chaos_geometric, geometric_bm, ito_sum, solve_sde_picard, walsh_sum, ChaosKind};
pub use pam::{
    pam_chaos_series, pam_chaos_term_variance, pam_second_moment, pam_second_moment_closed,
    solve_pam_euler, PamEuler, PamScalar,
};

use serde::{Deserialize, Serialize};

/// Named smooth bounded nonlinearities with Lipschitz constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothName {
    Sin,
    Cos,
    Tanh,
    Atan,
}

/// Globally Lipschitz coefficient `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LipschitzFn {
    Identity,
    /// `σ(x) = a·x + b`.
    Affine { a: f64, b: f64 },
    BoundedSmooth { name: SmoothName },
}

impl LipschitzFn {
    pub fn constant(c: f64) -> Self {
        LipschitzFn::Affine { a: 0.0, b: c }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LipschitzFn::Identity => x,
            LipschitzFn::Affine { a, b } => a * x + b,
            LipschitzFn::BoundedSmooth { name } => match name {
                SmoothName::Sin => x.sin(),
                SmoothName::Cos => x.cos(),
                SmoothName::Tanh => x.tanh(),
                SmoothName::Atan => x.atan(),
            },
        }
    }

    /// `C_σ` with `|σ(x) - σ(y)| ≤ C_σ|x - y|`.
    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            LipschitzFn::Identity => 1.0,
            LipschitzFn::Affine { a, .. } => a.abs(),
            LipschitzFn::BoundedSmooth { .. } => 1.0,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            LipschitzFn::Identity => "identity".into(),
            LipschitzFn::Affine { a, b } => format!("affine({a},{b})"),
            LipschitzFn::BoundedSmooth { name } => {
                let n = serde_json::to_value(name).expect("names serialize");
                format!("bounded_smooth({})", n.as_str().unwrap_or_default())
            }
        }
    }
}

/// Picard iterates of replica 0 and the successive-difference profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    /// `X_0, X_1, ..., X_n` of the first replica, as node values (time-major for fields).
    pub iterates: Vec<Vec<f64>>,
    /// Entry `n-1` holds `max over grid nodes of mean over replicas |X_n - X_{n-1}|²`.
    pub sup_diffs: Vec<f64>,
    pub replicas: usize,
}

impl PicardTrace {
    /// `Ĥ_n` (or `M̂_n`), `n ≥ 1`.
    pub fn diff(&self, n: usize) -> f64 {
        self.sup_diffs[n - 1]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("traces always serialize")
    }
}

/// Truncated chaos expansion of a second moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosSeries {
    /// `v_1, ..., v_N`.
    pub term_variances: Vec<f64>,
    /// `1 + Σ_{n≤k} v_n` for `k = 0..=N`.
    pub partial_sums: Vec<f64>,
    pub truncation_order: usize,
    pub closed_form: Option<f64>,
}

impl ChaosSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series always serialize")
    }
}

/// `max over nodes` of each iterate block in a replica-summed difference buffer.
pub(crate) fn sup_of_means(summed: &[f64], n_iter: usize, replicas: usize) -> Vec<f64> {
    let len = summed.len() / n_iter;
    summed
        .chunks(len)
        .map(|block| block.iter().map(|a| a / replicas as f64).fold(0.0, f64::max))
        .collect()
}

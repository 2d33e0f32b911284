//! Moment estimation, Lyapunov exponents and intermittency, Feynman–Kac
//! second moments, and empirical Hölder exponents.

mod fk;
mod holder;

pub use fk::{fk_second_moment, pam_second_moment_mc, FkConfig, FkEstimate, PamMcConfig};
pub use holder::{
    holder_estimate, linear_heat_holder, HolderAccumulator, HolderAxis, HolderFit, HolderOptions,
};

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, input, Error, Result};
use crate::kernels::OperatorKind;
use crate::noise::{fmt17, FbmSampler, RngStream, TimeGrid};
use crate::parallel::map_replicas_with;
use crate::solvers::ChaosKind;

/// One `(t, p)` moment estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub model: String,
    pub t: f64,
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: usize,
}

/// Moment rows plus an optional fitted exponent and its closed-form value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub kappa: Option<f64>,
    pub fitted_lambda: Option<f64>,
    pub closed_form_lambda: Option<f64>,
}

impl MomentReport {
    pub fn new(rows: Vec<MomentRow>) -> Self {
        Self { rows, ..Default::default() }
    }

    /// Fit `λ̂` for order `p` against `t^κ` and attach it.
    pub fn fit(&mut self, p: f64, kappa: f64) -> Result<f64> {
        let l = lyapunov_fit(&self.rows, p, kappa)?;
        self.kappa = Some(kappa);
        self.fitted_lambda = Some(l);
        Ok(l)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,t,p,estimate,stderr,replicas\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.model,
                fmt17(r.t),
                fmt17(r.p),
                fmt17(r.estimate),
                fmt17(r.stderr),
                r.replicas
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Sample means of `|X|^p` with jackknife standard errors, one row per `p`.
pub fn estimate_moments(model: &str, t: f64, samples: &[f64], ps: &[f64]) -> Result<Vec<MomentRow>> {
    if samples.is_empty() {
        return input("no samples");
    }
    let n = samples.len();
    let mut rows = Vec::with_capacity(ps.len());
    for &p in ps {
        if !(p >= 1.0) {
            return domain(format!("moment order must be at least 1, got {p}"));
        }
        let vals: Vec<f64> = samples.iter().map(|x| x.abs().powf(p)).collect();
        let total: f64 = vals.iter().sum();
        let estimate = total / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            // leave-one-out means
            let nf = n as f64;
            let loo_mean = |v: f64| (total - v) / (nf - 1.0);
            let center = vals.iter().map(|&v| loo_mean(v)).sum::<f64>() / nf;
            let ss: f64 = vals.iter().map(|&v| (loo_mean(v) - center).powi(2)).sum();
            ((nf - 1.0) / nf * ss).sqrt()
        };
        rows.push(MomentRow { model: model.to_string(), t, p, estimate, stderr, replicas: n });
    }
    Ok(rows)
}

/// Least-squares slope of `log E|X(t)|^p` against `t^κ`.
///
/// Rows of order `p` whose relative standard error is 10% or more are
/// dropped before fitting; at least four distinct times must remain.
pub fn lyapunov_fit(rows: &[MomentRow], p: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return domain(format!("scale exponent must be positive, got {kappa}"));
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for r in rows.iter().filter(|r| r.p == p) {
        if !(r.estimate > 0.0) {
            return input(format!("nonpositive moment estimate {} at t = {}", r.estimate, r.t));
        }
        if r.stderr >= 0.1 * r.estimate {
            continue;
        }
        pts.push((r.t.powf(kappa), r.estimate.ln()));
    }
    let mut ts: Vec<f64> = pts.iter().map(|q| q.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 4 {
        return input(format!("need at least 4 distinct times for order {p}, got {}", ts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Models with tabulated moment Lyapunov exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LyapunovModel {
    /// Geometric Brownian motion `exp(B_t - t/2)`.
    Gbm,
    /// Parabolic Anderson model with space-time white noise, d = 1.
    PamWhite,
    /// Geometric fBm `exp(B^H_t - t^{2H}/2)`.
    Gfbm { hurst: f64 },
}

impl FromStr for LyapunovModel {
    type Err = Error;

    /// `gbm`, `pam_white`, or `gfbm:<H>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gbm" => Ok(LyapunovModel::Gbm),
            "pam_white" => Ok(LyapunovModel::PamWhite),
            _ => match s.strip_prefix("gfbm:").map(str::parse::<f64>) {
                Some(Ok(hurst)) => Ok(LyapunovModel::Gfbm { hurst }),
                _ => capability(format!("no Lyapunov table for model '{s}'")),
            },
        }
    }
}

/// `(λ_p, κ)`: `p(p-1)/2` with κ = 1 (GBM), `p(p²-1)/24` with κ = 1 (white
/// PAM), `p(p-1)/2` with κ = 2H (geometric fBm).
pub fn lyapunov_closed_form(model: LyapunovModel, p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0) {
        return domain(format!("moment order must be positive, got {p}"));
    }
    Ok(match model {
        LyapunovModel::Gbm => (p * (p - 1.0) / 2.0, 1.0),
        LyapunovModel::PamWhite => (p * (p * p - 1.0) / 24.0, 1.0),
        LyapunovModel::Gfbm { hurst } => {
            if !(hurst > 0.0 && hurst < 1.0) {
                return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
            }
            (p * (p - 1.0) / 2.0, 2.0 * hurst)
        }
    })
}

/// True iff `λ_p/p` is strictly increasing in `p` over the given orders.
pub fn intermittency_check(ps: &[f64], lambdas: &[f64]) -> bool {
    if ps.len() != lambdas.len() || ps.len() < 2 {
        return false;
    }
    let mut pairs: Vec<(f64, f64)> = ps.iter().copied().zip(lambdas.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.windows(2).all(|w| w[0].0 > 0.0 && w[1].0 > w[0].0 && w[1].1 / w[1].0 > w[0].1 / w[0].0)
}

/// Growth exponent ρ of `log E|u|^p ~ t^ρ` for fractional-Riesz noise:
/// `(4H - α)/(2 - α)` (heat), `(2H + 2 - α)/(3 - α)` (wave).
pub fn intermittency_exponent_predicted(op: OperatorKind, alpha: f64, hurst: f64) -> Result<f64> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return domain(format!("Hurst index must lie in (1/2, 1), got {hurst}"));
    }
    let cap = match op {
        OperatorKind::Heat => 2.0,
        OperatorKind::Wave => 3.0,
    };
    if !(alpha > 0.0 && alpha < cap) {
        return domain(format!("alpha must lie in (0, {cap}), got {alpha}"));
    }
    Ok(match op {
        OperatorKind::Heat => (4.0 * hurst - alpha) / (2.0 - alpha),
        OperatorKind::Wave => (2.0 * hurst + 2.0 - alpha) / (3.0 - alpha),
    })
}

/// Terminal values `X(T)` of geometric BM (`exp(B_T - T/2)`) or geometric fBm
/// (`exp(B^H_T - T^{2H}/2)`), one per replica, from paths on `grid`.
pub fn sample_geometric_terminal(kind: ChaosKind, grid: &TimeGrid, replicas: usize, seed: u64) -> Result<Vec<f64>> {
    if replicas == 0 {
        return input("at least one replica is required");
    }
    let t = grid.t_max();
    match kind {
        ChaosKind::Bm => Ok(map_replicas_with(
            replicas,
            || (),
            |_, i| {
                let mut rng = RngStream::replica(seed, i);
                let b = crate::noise::sample_bm_path(grid, &mut rng).last();
                (b - t / 2.0).exp()
            },
        )),
        ChaosKind::Fbm { hurst } => {
            let sampler = FbmSampler::new(hurst, grid)?;
            let var = t.powf(2.0 * hurst);
            Ok(map_replicas_with(
                replicas,
                || (),
                |_, i| {
                    let mut rng = RngStream::replica(seed, i);
                    (sampler.sample(&mut rng).last() - var / 2.0).exp()
                },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples_have_zero_error() {
        let rows = estimate_moments("c", 1.0, &[-2.0; 10], &[1.0, 3.0]).unwrap();
        assert_eq!(rows[1].estimate, 8.0);
        assert_eq!(rows[1].stderr, 0.0);
        assert!(estimate_moments("c", 1.0, &[], &[2.0]).is_err());
    }

    #[test]
    fn jackknife_of_mean_matches_classical_stderr() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37 % 11) as f64).sqrt()).collect();
        let row = &estimate_moments("x", 1.0, &xs, &[1.0]).unwrap()[0];
        let (_, se) = crate::parallel::mean_stderr(&xs);
        assert!((row.stderr - se).abs() < 1e-12);
    }

    #[test]
    fn model_names() {
        assert_eq!("gfbm:0.7".parse::<LyapunovModel>().unwrap(), LyapunovModel::Gfbm { hurst: 0.7 });
        assert!(matches!("kpz".parse::<LyapunovModel>(), Err(Error::Capability(_))));
    }
}

//! Fundamental solutions of the heat operator `∂_t - Δ/2` and the wave
//! operator, their squared-mass profiles, and the scalar covariance kernels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Heat,
    Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub dim: usize,
}

impl OperatorSpec {
    pub fn heat(dim: usize) -> Self {
        Self { kind: OperatorKind::Heat, dim }
    }

    pub fn wave(dim: usize) -> Self {
        Self { kind: OperatorKind::Wave, dim }
    }

    /// Kernel value `G(t, x)`, `x.len() == dim`.
    pub fn kernel(&self, t: f64, x: &[f64]) -> Result<f64> {
        crate::error::check_shape(self.dim, x.len())?;
        match self.kind {
            OperatorKind::Heat => heat_kernel(t, x),
            OperatorKind::Wave => wave_kernel(t, x),
        }
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `(2πt)^{-d/2} exp(-|x|²/(2t))` with `d = x.len()`.
pub fn heat_kernel(t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("heat kernel needs t > 0, got {t}"));
    }
    let d = x.len() as f64;
    Ok((2.0 * PI * t).powf(-d / 2.0) * (-norm2(x) / (2.0 * t)).exp())
}

/// One-dimensional heat kernel.
pub fn heat_kernel_1d(t: f64, x: f64) -> f64 {
    (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Wave kernel in d = 1 (`½·1{|x|<t}`) and d = 2 (`(2π)^{-1}(t²-|x|²)^{-1/2}·1{|x|<t}`).
pub fn wave_kernel(t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("wave kernel needs t > 0, got {t}"));
    }
    let r2 = norm2(x);
    match x.len() {
        1 => Ok(if r2 < t * t { 0.5 } else { 0.0 }),
        2 => Ok(if r2 < t * t { 1.0 / (2.0 * PI * (t * t - r2).sqrt()) } else { 0.0 }),
        3 => capability(
            "wave kernel in d = 3 is a measure-valued kernel (surface measure on the sphere |x| = t) and has no pointwise values",
        ),
        d => capability(format!("wave kernel in d = {d} is a distribution, not a function")),
    }
}

/// `g(s) = ∫ G(s, y)² dy` for the heat and wave operators in d = 1.
pub fn g_squared_integral(op: OperatorSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("g(s) needs s > 0, got {s}"));
    }
    match (op.kind, op.dim) {
        (OperatorKind::Heat, 1) => Ok(1.0 / (4.0 * PI * s).sqrt()),
        (OperatorKind::Wave, 1) => Ok(s / 2.0),
        (k, d) => capability(format!("closed-form g(s) is available for d = 1 only, got {k:?} in d = {d}")),
    }
}

/// `∫_0^t g(s) ds` for the d = 1 operators.
pub fn g_squared_cumulative(op: OperatorSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    match (op.kind, op.dim) {
        (OperatorKind::Heat, 1) => Ok((t / PI).sqrt()),
        (OperatorKind::Wave, 1) => Ok(t * t / 4.0),
        (k, d) => capability(format!("closed-form g(s) is available for d = 1 only, got {k:?} in d = {d}")),
    }
}

/// Riesz kernel `|x|^{-α}`; `α ∈ (0, d)` with `d = x.len()`.
pub fn riesz_kernel(alpha: f64, x: &[f64]) -> Result<f64> {
    let d = x.len();
    if !(alpha > 0.0 && alpha < d as f64) {
        return domain(format!("Riesz kernel needs alpha in (0, {d}), got {alpha}"));
    }
    let r = norm2(x).sqrt();
    if r == 0.0 {
        return domain("Riesz kernel is singular at x = 0; integrate over cells instead");
    }
    Ok(r.powf(-alpha))
}

/// Fractional time kernel `|t|^{2H-2}`, `H ∈ (1/2, 1)`, without the `α_H` factor.
pub fn gamma_fractional(hurst: f64, t: f64) -> Result<f64> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return domain(format!("fractional kernel needs H in (1/2, 1), got {hurst}"));
    }
    if t == 0.0 {
        return domain("fractional kernel is singular at t = 0; integrate over cells instead");
    }
    Ok(t.abs().powf(2.0 * hurst - 2.0))
}

/// `α_H = H(2H - 1)`.
pub fn alpha_h(hurst: f64) -> f64 {
    hurst * (2.0 * hurst - 1.0)
}

//! Existence conditions for random-field solutions (Dalang-type spectral
//! integrals), Hölder-order predictions, and the Dalang–Gronwall certificate.
//!
//! Finiteness is always decided from the exponents of the integrand; the
//! quadrature only supplies the value of integrals already known to be finite.

mod certificate;

pub use certificate::{dalang_gronwall_certificate, GProfile, GronwallCertificate};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{capability, domain, Error, Result};
use crate::kernels::OperatorKind;
use crate::quadrature::integrate;
use crate::special::log_gamma;

/// Value of a spectral integral, or the flag that it diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralEstimate {
    Finite(f64),
    Divergent,
}

impl IntegralEstimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            IntegralEstimate::Finite(v) => Some(*v),
            IntegralEstimate::Divergent => None,
        }
    }
}

impl Serialize for IntegralEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IntegralEstimate::Finite(v) => s.serialize_f64(*v),
            IntegralEstimate::Divergent => s.serialize_str("divergent"),
        }
    }
}

impl<'de> Deserialize<'de> for IntegralEstimate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n
                .as_f64()
                .map(IntegralEstimate::Finite)
                .ok_or_else(|| serde::de::Error::custom("estimate is not a float")),
            Value::String(s) if s == "divergent" => Ok(IntegralEstimate::Divergent),
            other => Err(serde::de::Error::custom(format!("invalid estimate {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// Outcome of an existence check; serializes as `{satisfied, estimate, method, parameters}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub satisfied: bool,
    pub estimate: IntegralEstimate,
    pub method: Method,
    pub parameters: BTreeMap<String, Value>,
}

impl ConditionVerdict {
    fn new(estimate: IntegralEstimate, method: Method, parameters: BTreeMap<String, Value>) -> Self {
        let satisfied = matches!(estimate, IntegralEstimate::Finite(_));
        Self { satisfied, estimate, method, parameters }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts always serialize")
    }

    /// One-line description used in error messages.
    pub fn summary(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "satisfied={} estimate={} ({})",
            self.satisfied,
            match self.estimate {
                IntegralEstimate::Finite(v) => format!("{v}"),
                IntegralEstimate::Divergent => "divergent".into(),
            },
            params.join(", ")
        )
    }
}

fn params(entries: &[(&str, Value)]) -> BTreeMap<String, Value> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Radial spectral measure on `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralMeasure {
    /// `c·dξ`: the spectral measure of white noise.
    Lebesgue { constant: f64 },
    /// `c·|ξ|^exponent dξ`; the Riesz kernel of order α has exponent `α - d`,
    /// the fractional time kernel of index H has exponent `1 - 2H` (d = 1).
    Radial { exponent: f64, constant: f64 },
    /// `c·Π|ξ_i|^{e_i} dξ`, a product (non-radial) density. Only representable;
    /// the checkers reject it.
    Axial { exponents: Vec<f64>, constant: f64 },
}

impl SpectralMeasure {
    pub fn lebesgue() -> Self {
        SpectralMeasure::Lebesgue { constant: 1.0 }
    }

    pub fn riesz(alpha: f64, dim: usize) -> Self {
        SpectralMeasure::Radial { exponent: alpha - dim as f64, constant: 1.0 }
    }

    pub fn fractional_time(hurst: f64) -> Self {
        SpectralMeasure::Radial { exponent: 1.0 - 2.0 * hurst, constant: 1.0 }
    }

    /// `(exponent, constant)` of a radial measure on `ℝ^dim`, checked to be tempered.
    fn radial_parts(&self, dim: usize) -> Result<(f64, f64)> {
        let (beta, c) = match self {
            SpectralMeasure::Lebesgue { constant } => (0.0, *constant),
            SpectralMeasure::Radial { exponent, constant } => (*exponent, *constant),
            SpectralMeasure::Axial { .. } => {
                return capability("only radial spectral measures are supported")
            }
        };
        if !(c > 0.0) || !c.is_finite() {
            return domain(format!("spectral constant must be positive, got {c}"));
        }
        if !(beta > -(dim as f64)) || !beta.is_finite() {
            return domain(format!(
                "density |ξ|^{beta} is not locally integrable on R^{dim}"
            ));
        }
        Ok((beta, c))
    }
}

/// Surface area of the unit sphere in `ℝ^d` (2 for d = 1).
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / log_gamma(h).expect("d >= 1").exp()
}

fn beta_fn(a: f64, b: f64) -> f64 {
    (log_gamma(a).expect("a > 0") + log_gamma(b).expect("b > 0") - log_gamma(a + b).expect("a+b > 0")).exp()
}

/// `∫_0^∞ f(r) dr` for `f` with power behaviour `r^{p0}` at 0 and `r^{p_inf}` at ∞
/// (`p0 > -1 > p_inf`), split at `scale` and mapped to `[0, 1]` so that both
/// pieces have bounded integrands.
fn power_law_integral<F: Fn(f64) -> f64>(
    f: F,
    p0: f64,
    p_inf: f64,
    scale: f64,
    rel_tol: f64,
) -> Result<f64> {
    debug_assert!(p0 > -1.0 && p_inf < -1.0);
    let s = scale;
    let a = p0 + 1.0;
    let e = -p_inf - 1.0;
    let near = integrate(
        |u: f64| {
            let r = s * u.powf(1.0 / a);
            f(r) * s * u.powf(1.0 / a - 1.0) / a
        },
        0.0,
        1.0,
        0.0,
        rel_tol,
    )?;
    let far = integrate(
        |w: f64| {
            let r = s * w.powf(-1.0 / e);
            f(r) * s * w.powf(-1.0 / e - 1.0) / e
        },
        0.0,
        1.0,
        0.0,
        rel_tol,
    )?;
    Ok(near.value + far.value)
}

/// `∫_0^∞ r^{a-1}(1 + r²)^{-κ} dr = ½B(a/2, κ - a/2)`, finite iff `0 < a < 2κ`.
fn radial_closed_form(a: f64, kappa: f64) -> IntegralEstimate {
    if a > 0.0 && a < 2.0 * kappa {
        IntegralEstimate::Finite(0.5 * beta_fn(a / 2.0, kappa - a / 2.0))
    } else {
        IntegralEstimate::Divergent
    }
}

/// Dalang's condition for the Riesz kernel of order α in `ℝ^d`: `α < d ∧ 2`.
pub fn check_dalang_riesz(alpha: f64, d: usize) -> Result<ConditionVerdict> {
    check_riesz_range(alpha, d)?;
    let est = match radial_closed_form(alpha, 1.0) {
        IntegralEstimate::Finite(v) => IntegralEstimate::Finite(sphere_area(d) * v),
        e => e,
    };
    Ok(ConditionVerdict::new(
        est,
        Method::ClosedForm,
        params(&[("alpha", alpha.into()), ("d", d.into()), ("kappa", 1.0.into())]),
    ))
}

fn check_riesz_range(alpha: f64, d: usize) -> Result<()> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    if !(alpha > 0.0 && alpha < d as f64) {
        return domain(format!("Riesz order alpha must lie in (0, {d}), got {alpha}"));
    }
    Ok(())
}

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.5 && hurst < 1.0) {
        return domain(format!("Hurst index must lie in (1/2, 1), got {hurst}"));
    }
    Ok(())
}

/// Exponent κ of `∫(1 + |ξ|²)^{-κ} μ(dξ)` for fractional-in-time noise:
/// `2H` (heat) or `H + ½` (wave).
pub fn fractional_kappa(op: OperatorKind, hurst: f64) -> f64 {
    match op {
        OperatorKind::Heat => 2.0 * hurst,
        OperatorKind::Wave => hurst + 0.5,
    }
}

/// Existence for fractional-in-time, Riesz-in-space noise: heat `α < 4H`, wave `α < 2H + 1`.
pub fn check_fractional(op: OperatorKind, alpha: f64, hurst: f64, d: usize) -> Result<ConditionVerdict> {
    check_hurst(hurst)?;
    check_riesz_range(alpha, d)?;
    let kappa = fractional_kappa(op, hurst);
    let est = match radial_closed_form(alpha, kappa) {
        IntegralEstimate::Finite(v) => IntegralEstimate::Finite(sphere_area(d) * v),
        e => e,
    };
    Ok(ConditionVerdict::new(
        est,
        Method::ClosedForm,
        params(&[
            ("op", op_name(op).into()),
            ("alpha", alpha.into()),
            ("hurst", hurst.into()),
            ("d", d.into()),
            ("kappa", kappa.into()),
        ]),
    ))
}

fn op_name(op: OperatorKind) -> &'static str {
    match op {
        OperatorKind::Heat => "heat",
        OperatorKind::Wave => "wave",
    }
}

/// `∫_{ℝ^d} (1 + |ξ|²)^{-κ} μ(dξ)` for a radial measure, by radial reduction.
pub fn dalang_integral_numeric(mu: &SpectralMeasure, kappa: f64, d: usize) -> Result<ConditionVerdict> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    if !(kappa > 0.0) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let (beta, c) = mu.radial_parts(d)?;
    let a = d as f64 + beta;
    let p_inf = a - 1.0 - 2.0 * kappa;
    let estimate = if p_inf >= -1.0 {
        IntegralEstimate::Divergent
    } else {
        let v = power_law_integral(|r| r.powf(a - 1.0) * (1.0 + r * r).powf(-kappa), a - 1.0, p_inf, 1.0, 1e-12)?;
        IntegralEstimate::Finite(c * sphere_area(d) * v)
    };
    Ok(ConditionVerdict::new(
        estimate,
        Method::Quadrature,
        params(&[("measure_exponent", beta.into()), ("constant", c.into()), ("d", d.into()), ("kappa", kappa.into())]),
    ))
}

/// Joint time-space condition for a noise with time spectral measure ν and
/// space spectral measure μ:
/// heat `∬ ν(dτ)μ(dξ) / (1 + τ² + |ξ|⁴) < ∞`,
/// wave `∬ ν(dτ)μ(dξ) (1 + |ξ|²)^{-1/2} / (1 + τ² + |ξ|²) < ∞`.
///
/// The τ-integral is evaluated by quadrature inside the radial ξ-quadrature;
/// finiteness comes from the combined tail exponent.
pub fn general_joint_condition(
    op: OperatorKind,
    nu: &SpectralMeasure,
    mu: &SpectralMeasure,
    d: usize,
) -> Result<ConditionVerdict> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    let (b, c_nu) = nu.radial_parts(1)?;
    let (beta, c_mu) = mu.radial_parts(d)?;
    if matches!(nu, SpectralMeasure::Radial { .. }) && !(b > -1.0 && b < 0.0) {
        return domain(format!("time measure exponent must lie in (-1, 0), got {b}"));
    }
    if matches!(mu, SpectralMeasure::Radial { .. }) && !(beta < 0.0) {
        return domain(format!(
            "space measure exponent {beta} corresponds to Riesz order alpha = {} outside (0, {d})",
            beta + d as f64
        ));
    }
    let a = d as f64 + beta;
    // inner(A) ~ A^{(b-1)/2}; A ~ r^4 (heat) or r^2 with an extra r^{-1} (wave)
    let p_inf = match op {
        OperatorKind::Heat => a - 1.0 + 2.0 * (b - 1.0),
        OperatorKind::Wave => a - 1.0 - 1.0 + (b - 1.0),
    };
    let estimate = if p_inf >= -1.0 {
        IntegralEstimate::Divergent
    } else {
        let inner = |big_a: f64| -> f64 {
            let v = power_law_integral(|t| t.powf(b) / (big_a + t * t), b, b - 2.0, big_a.sqrt(), 1e-12);
            2.0 * c_nu * v.unwrap_or(f64::NAN)
        };
        let outer = |r: f64| -> f64 {
            let r2 = r * r;
            let w = match op {
                OperatorKind::Heat => inner(1.0 + r2 * r2),
                OperatorKind::Wave => inner(1.0 + r2) / (1.0 + r2).sqrt(),
            };
            r.powf(a - 1.0) * w
        };
        let v = power_law_integral(outer, a - 1.0, p_inf, 1.0, 1e-9)?;
        if !v.is_finite() {
            return Err(Error::Numerical("inner time quadrature failed".into()));
        }
        IntegralEstimate::Finite(c_mu * sphere_area(d) * v)
    };
    Ok(ConditionVerdict::new(
        estimate,
        Method::Quadrature,
        params(&[
            ("op", op_name(op).into()),
            ("time_exponent", b.into()),
            ("space_exponent", beta.into()),
            ("d", d.into()),
        ]),
    ))
}

/// Parameters for [`predicted_holder`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolderInput {
    /// Spatial regularity index η of the noise, `η ∈ (0, 1)`.
    Eta { eta: f64 },
    /// Fractional time (H) and Riesz space (α) noise in dimension d.
    RieszFractional { alpha: f64, hurst: f64, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderOrders {
    pub time: f64,
    pub space: f64,
}

/// Predicted Hölder orders (without the ε loss). The space order is capped at 1.
pub fn predicted_holder(op: OperatorKind, input: HolderInput) -> Result<HolderOrders> {
    match (op, input) {
        (_, HolderInput::Eta { eta }) => {
            if !(eta > 0.0 && eta < 1.0) {
                return domain(format!("eta must lie in (0, 1), got {eta}"));
            }
            Ok(match op {
                OperatorKind::Heat => HolderOrders { time: (1.0 - eta) / 2.0, space: 1.0 - eta },
                OperatorKind::Wave => HolderOrders { time: 1.0 - eta, space: 1.0 - eta },
            })
        }
        (OperatorKind::Heat, HolderInput::RieszFractional { alpha, hurst, dim }) => {
            check_hurst(hurst)?;
            let cap = (dim as f64).min(2.0);
            if dim == 0 || !(alpha > 0.0 && alpha < cap) {
                return domain(format!("alpha must lie in (0, {cap}), got {alpha}"));
            }
            let k = 2.0 * hurst - alpha / 2.0;
            Ok(HolderOrders { time: k / 2.0, space: k.min(1.0) })
        }
        (OperatorKind::Wave, HolderInput::RieszFractional { .. }) => {
            capability("Hölder prediction for the wave equation takes the noise index eta")
        }
    }
}

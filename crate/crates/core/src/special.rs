//! Special functions: probabilists' Hermite polynomials, the standard normal
//! CDF and the log-gamma function.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{capability, domain, Result};

/// Default highest Hermite order accepted by [`hermite`].
pub const DEFAULT_HERMITE_MAX_ORDER: usize = 200;

const RESCALE_THRESHOLD: f64 = 1e300;

/// Hermite evaluator `H_n` with a configurable order cap.
///
/// Values are produced by the recurrence `H_{n+1} = x H_n - n H_{n-1}`;
/// no coefficient tables are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteTable {
    max_order: usize,
}

/// `mantissa * exp(log_scale)`; used when `|H_n(x)|` leaves the f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.mantissa
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

impl Default for HermiteTable {
    fn default() -> Self {
        Self::new(DEFAULT_HERMITE_MAX_ORDER)
    }
}

impl HermiteTable {
    pub fn new(max_order: usize) -> Self {
        Self { max_order }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.max_order {
            return capability(format!(
                "Hermite order {n} exceeds configured maximum {}",
                self.max_order
            ));
        }
        Ok(())
    }

    /// `H_n(x)`; may overflow to infinity for large `n` and `|x|`, see [`Self::eval_scaled`].
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.eval_scaled(n, x)?.value())
    }

    /// `H_n(x)` in scaled form, rescaling whenever the magnitude passes 1e300.
    pub fn eval_scaled(&self, n: usize, x: f64) -> Result<ScaledValue> {
        self.check(n)?;
        let mut prev = 1.0;
        if n == 0 {
            return Ok(ScaledValue { mantissa: prev, log_scale: 0.0 });
        }
        let mut cur = x;
        let mut log_scale = 0.0;
        for k in 1..n {
            let next = x * cur - k as f64 * prev;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_THRESHOLD {
                prev /= RESCALE_THRESHOLD;
                cur /= RESCALE_THRESHOLD;
                log_scale += RESCALE_THRESHOLD.ln();
            }
        }
        Ok(ScaledValue { mantissa: cur, log_scale })
    }

    /// `[H_0(x), ..., H_n(x)]` in one pass.
    pub fn eval_all(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check(n)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        if n >= 1 {
            out.push(x);
        }
        for k in 1..n {
            out.push(x * out[k] - k as f64 * out[k - 1]);
        }
        Ok(out)
    }
}

/// Probabilists' Hermite polynomial `H_n(x)` with the default order cap.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    HermiteTable::default().eval(n, x)
}

/// Complementary error function for `z >= 0`.
fn erfc_nonneg(z: f64) -> f64 {
    if z < 2.5 {
        // erf(z) = 2/sqrt(pi) e^{-z^2} sum_n 2^n z^{2n+1} / (1*3*...*(2n+1)), all terms positive
        let two_z2 = 2.0 * z * z;
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= two_z2 / (2.0 * n + 1.0);
            sum += term;
        }
        1.0 - 2.0 / PI.sqrt() * (-z * z).exp() * sum
    } else {
        // erfc(z) = e^{-z^2}/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), modified Lentz
        let tiny = 1e-300;
        let mut f = z;
        let mut c = z;
        let mut d = 0.0;
        for n in 1..500 {
            let a = n as f64 / 2.0;
            d = z + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = z + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-z * z).exp() / PI.sqrt() / f
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        erfc_nonneg(x)
    } else {
        2.0 - erfc_nonneg(-x)
    }
}

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let q = 0.5 * erfc_nonneg(x.abs() / SQRT_2);
    if x >= 0.0 {
        1.0 - q
    } else {
        q
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires finite x > 0, got {x}"));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) - x.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(hermite(0, 7.3).unwrap(), 1.0);
        assert_eq!(hermite(1, -2.5).unwrap(), -2.5);
        assert_eq!(hermite(2, 2.0).unwrap(), 3.0);
        assert_eq!(hermite(4, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn order_cap() {
        assert!(matches!(hermite(201, 1.0), Err(crate::Error::Capability(_))));
        assert!(HermiteTable::new(10).eval(11, 0.0).is_err());
    }

    #[test]
    fn scaled_form_survives_overflow() {
        let h = HermiteTable::default().eval_scaled(200, 40.0).unwrap();
        assert!(h.log_scale > 0.0);
        // leading term dominates: ln H_200(40) ~ 200 ln 40 - correction
        let lead = 200.0 * 40f64.ln();
        assert!((h.ln_abs() - lead).abs() < 20.0);
        assert!(h.mantissa.is_finite());
    }

    #[test]
    fn cdf_branches_meet() {
        let z = 2.5 * SQRT_2;
        let a = std_normal_cdf(z - 1e-12);
        let b = std_normal_cdf(z + 1e-12);
        assert!((a - b).abs() < 1e-13);
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(8.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_domain() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.0).is_err());
        assert_eq!(log_gamma(1.0).unwrap().abs() < 1e-15, true);
    }
}

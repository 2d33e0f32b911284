use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Result};
use crate::noise::RngStream;
use crate::parallel::map_replicas;

/// Kernel profile `g` of the Gronwall-type recursion `f_n(t) ≤ ∫ f_{n-1}(s) g(t-s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GProfile {
    /// `g ≡ β`, the classical Gronwall case.
    Constant { beta: f64 },
    /// `g(s) = (4πs)^{-1/2}`, heat equation in d = 1.
    Heat1d,
    /// `g(s) = s/2`, wave equation in d = 1.
    Wave1d,
}

impl GProfile {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            GProfile::Constant { beta } => *beta,
            GProfile::Heat1d => 1.0 / (4.0 * PI * s).sqrt(),
            GProfile::Wave1d => s / 2.0,
        }
    }

    /// `G(T) = ∫_0^T g`.
    pub fn total(&self, t: f64) -> f64 {
        match self {
            GProfile::Constant { beta } => beta * t,
            GProfile::Heat1d => (t / PI).sqrt(),
            GProfile::Wave1d => t * t / 4.0,
        }
    }

    /// Draw from the density `g/G(T)` on `[0, T]` by inversion of a uniform `u`.
    pub fn inverse_cdf(&self, t: f64, u: f64) -> f64 {
        match self {
            GProfile::Constant { .. } => t * u,
            GProfile::Heat1d => t * u * u,
            GProfile::Wave1d => t * u.sqrt(),
        }
    }
}

/// Monte Carlo bounds `M·a_n` with `a_n = G(T)^n P(S_n ≤ T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallCertificate {
    pub profile: GProfile,
    pub t_max: f64,
    pub m: f64,
    pub g_total: f64,
    pub replicas: usize,
    /// `a_0..a_{n_max}`, `a_0 = 1`.
    pub a: Vec<f64>,
    pub a_stderr: Vec<f64>,
    /// `M·a_n`.
    pub bounds: Vec<f64>,
    /// Partial sums `Σ_{k≤n} a_k`.
    pub root_sums_p1: Vec<f64>,
    /// Partial sums `Σ_{k≤n} a_k^{1/2}`.
    pub root_sums_p2: Vec<f64>,
}

impl GronwallCertificate {
    /// `Σ_{n<k≤n_max} a_k^{1/p}`, the remaining mass after index `n`.
    pub fn tail(&self, n: usize, p: u32) -> f64 {
        let sums = if p == 1 { &self.root_sums_p1 } else { &self.root_sums_p2 };
        sums[sums.len() - 1] - sums[n]
    }
}

/// Estimate `a_n` for `n ≤ n_max` with `S_n` a sum of i.i.d. draws from `g/G(T)`.
pub fn dalang_gronwall_certificate(
    profile: GProfile,
    t_max: f64,
    m: f64,
    n_max: usize,
    replicas: usize,
    seed: u64,
) -> Result<GronwallCertificate> {
    if !(t_max > 0.0) {
        return domain(format!("T must be positive, got {t_max}"));
    }
    if let GProfile::Constant { beta } = profile {
        if beta < 0.0 {
            return domain("g must be nonnegative");
        }
    }
    let g_total = profile.total(t_max);
    if !(g_total > 0.0) || !g_total.is_finite() {
        return input(format!("G(T) = {g_total}: degenerate kernel profile"));
    }
    if replicas == 0 {
        return input("at least one replica is required");
    }
    // per replica: the largest n with S_n ≤ T
    let reach: Vec<usize> = map_replicas(replicas, |i| {
        let mut rng = RngStream::replica(seed, i);
        let mut s = 0.0;
        let mut n = 0;
        while n < n_max {
            s += profile.inverse_cdf(t_max, rng.uniform());
            if s > t_max {
                break;
            }
            n += 1;
        }
        n
    });
    let mut counts = vec![0usize; n_max + 1];
    for r in reach {
        counts[r] += 1;
    }
    // P(S_n ≤ T) = #{reach ≥ n} / N
    let nf = replicas as f64;
    let mut at_least = replicas;
    let mut a = Vec::with_capacity(n_max + 1);
    let mut a_stderr = Vec::with_capacity(n_max + 1);
    for (n, c) in counts.iter().enumerate() {
        let p = at_least as f64 / nf;
        let g = g_total.powi(n as i32);
        a.push(g * p);
        a_stderr.push(g * (p * (1.0 - p) / nf).sqrt());
        at_least -= c;
    }
    let bounds = a.iter().map(|v| m * v).collect();
    let partial = |p: f64| {
        a.iter()
            .scan(0.0, |acc, v| {
                *acc += v.powf(1.0 / p);
                Some(*acc)
            })
            .collect::<Vec<f64>>()
    };
    Ok(GronwallCertificate {
        profile,
        t_max,
        m,
        g_total,
        replicas,
        root_sums_p1: partial(1.0),
        root_sums_p2: partial(2.0),
        a,
        a_stderr,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case_and_degenerate_input() {
        let c = dalang_gronwall_certificate(GProfile::Heat1d, 1.0, 2.5, 4, 100, 1).unwrap();
        assert_eq!(c.bounds[0], 2.5);
        assert_eq!(c.a[0], 1.0);
        let e = dalang_gronwall_certificate(GProfile::Constant { beta: 0.0 }, 1.0, 1.0, 4, 100, 1);
        assert!(e.is_err());
    }
}

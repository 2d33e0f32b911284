//! Independent reference computations and property checks shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use spde_lab::noise::{
    fbm_covariance, sample_bm_path, sample_white_noise_sheet, FbmSampler, RngStream, SpaceTimeGrid, TimeGrid,
};
use spde_lab::parallel::with_threads;
use spde_lab::solvers::{ito_sum, walsh_sum};
use spde_lab::special::{gamma, hermite, std_normal_cdf};

/// Φ by the Taylor series `½ + φ(x) Σ x^{2k+1}/(2k+1)!!`.
pub fn phi_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= x * x / (2.0 * k + 1.0);
        sum += term;
        k += 1.0;
    }
    0.5 + (-0.5 * x * x).exp() / (2.0 * PI).sqrt() * sum
}

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫ G(τ, y)² dy` for the 1-d heat kernel, by the trapezoidal rule on
/// `[-12√τ, 12√τ]` (spectrally accurate for Gaussians).
pub fn squared_heat_mass(tau: f64) -> f64 {
    const N: usize = 240;
    let s = tau.sqrt();
    let h = 24.0 * s / N as f64;
    let g = |y: f64| {
        let v = (-y * y / (2.0 * tau)).exp() / (2.0 * PI * tau).sqrt();
        v * v
    };
    let inner: f64 = (1..N).map(|k| g(-12.0 * s + k as f64 * h)).sum();
    h * (inner + 0.5 * (g(-12.0 * s) + g(12.0 * s)))
}

/// Variance of the n-th chaos term of the white-noise PAM at time `t`
/// (n = 2 or 3): the time simplex integral of `Π g(gaps)` where `g` is the
/// squared heat-kernel mass, with `gap = u²` substitutions removing the
/// endpoint singularities.
pub fn chaos_term_quadrature(n: usize, t: f64, tol: f64) -> f64 {
    // h(u) = g(u²)·2u, finite at u = 0
    let h = |u: f64| if u == 0.0 { 2.0 / (4.0 * PI).sqrt() } else { squared_heat_mass(u * u) * 2.0 * u };
    match n {
        2 => simpson(&|u1: f64| h(u1) * simpson(&|u2: f64| h(u2), 0.0, (t - u1 * u1).max(0.0).sqrt(), tol), 0.0, t.sqrt(), tol),
        3 => simpson(
            &|u1: f64| {
                let r1 = (t - u1 * u1).max(0.0);
                h(u1) * simpson(&|u2: f64| h(u2) * simpson(&h, 0.0, (r1 - u2 * u2).max(0.0).sqrt(), tol), 0.0, r1.sqrt(), tol)
            },
            0.0,
            t.sqrt(),
            tol,
        ),
        _ => panic!("oracle covers n = 2, 3"),
    }
}

/// `max_{n ≤ 30}` deviation of the truncated generating function from `e^{tx - t²/2}`.
pub fn hermite_generating_gap(t: f64, x: f64) -> f64 {
    let mut sum = 1.0;
    let mut fact = 1.0;
    for n in 1..=30 {
        fact *= n as f64;
        sum += t.powi(n as i32) / fact * hermite(n, x).unwrap();
    }
    (sum - (t * x - t * t / 2.0).exp()).abs()
}

pub fn hermite_recurrence_gap(n: usize, x: f64) -> f64 {
    let next = hermite(n + 1, x).unwrap();
    let rhs = x * hermite(n, x).unwrap() - n as f64 * hermite(n - 1, x).unwrap();
    (next - rhs).abs() / next.abs().max(rhs.abs()).max(1.0)
}

pub fn phi_symmetry_gap(x: f64) -> f64 {
    (std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs()
}

pub fn gamma_recurrence_gap(x: f64) -> f64 {
    let a = gamma(x + 1.0).unwrap();
    let b = x * gamma(x).unwrap();
    (a - b).abs() / a
}

/// Smallest eigenvalue of the fBm covariance matrix at `t_1..t_n`, relative to its trace.
pub fn fbm_min_eigen_ratio(hurst: f64, n: usize) -> f64 {
    let t: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
    let m = DMatrix::from_fn(n, n, |i, j| fbm_covariance(hurst, t[i], t[j]).unwrap());
    let trace = m.trace();
    let eig = SymmetricEigen::new(m);
    eig.eigenvalues.min() / trace
}

/// Whether the fBm sampler factorizes within the jitter budget.
pub fn fbm_factorizes(hurst: f64, n: usize) -> bool {
    let g = TimeGrid::new(1.0, n).unwrap();
    FbmSampler::new(hurst, &g).map(|s| s.jitter() <= 1e-10).unwrap_or(false)
}

/// RMS of `B_T² - 2Σ B dB - T` over replicas.
pub fn ito_residual_rms(n_steps: usize, replicas: usize, seed: u64) -> f64 {
    let g = TimeGrid::new(1.0, n_steps).unwrap();
    let mut acc = 0.0;
    for i in 0..replicas {
        let mut rng = RngStream::replica(seed, i);
        let b = sample_bm_path(&g, &mut rng);
        let db = b.increments();
        let r = b.last().powi(2) - 2.0 * ito_sum(&b.values[..n_steps], &db).unwrap() - 1.0;
        acc += r * r;
    }
    (acc / replicas as f64).sqrt()
}

/// Replica variance of a Walsh sum, the isometry value, and the standard
/// error of the variance estimate.
pub fn walsh_isometry(phi: &[f64], grid: &SpaceTimeGrid, replicas: usize, seed: u64) -> (f64, f64, f64) {
    let target: f64 = phi.iter().map(|p| p * p).sum::<f64>() * grid.dt() * grid.dx();
    let xs: Vec<f64> = (0..replicas)
        .map(|i| {
            let w = sample_white_noise_sheet(grid, &mut RngStream::replica(seed, i));
            walsh_sum(phi, &w).unwrap()
        })
        .collect();
    let n = replicas as f64;
    let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / n;
    (m2, target, ((m4 - m2 * m2) / n).sqrt())
}

/// Run `f` on one and on `threads` workers.
pub fn under_threads<T: Send, F: Fn() -> T + Send + Sync>(threads: usize, f: F) -> (T, T) {
    let a = with_threads(Some(1), &f).unwrap();
    let b = with_threads(Some(threads), &f).unwrap();
    (a, b)
}

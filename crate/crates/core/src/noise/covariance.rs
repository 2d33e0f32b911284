use serde::{Deserialize, Serialize};

use super::{NoiseSpec, SpaceKernel, TimeKernel};
use crate::error::{capability, check_shape, Result};
use crate::quadrature::GaussLegendre;

/// Axis-aligned space-time box `[t0, t1] × Π [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub t: (f64, f64),
    pub x: Vec<(f64, f64)>,
}

impl Cell {
    pub fn new(t: (f64, f64), x: Vec<(f64, f64)>) -> Self {
        Self { t, x }
    }
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// `∫_a ∫_b k(u - v) du dv` from an antiderivative `F` with `F'' = k`.
fn four_point<F: Fn(f64) -> f64>(a: (f64, f64), b: (f64, f64), f: F) -> f64 {
    f(a.1 - b.0) - f(a.0 - b.0) - f(a.1 - b.1) + f(a.0 - b.1)
}

/// Temporal factor `∬ γ(u - v) du dv` of two time intervals.
///
/// The fractional kernel carries the `α_H = H(2H-1)` normalization, so the
/// factor for `[0,t] × [0,s]` is exactly `R_H(t, s)`.
pub fn time_factor(a: (f64, f64), b: (f64, f64), kernel: &TimeKernel) -> Result<f64> {
    let kernel = NoiseSpec { time: *kernel, space: SpaceKernel::White }.resolved(1)?.time;
    Ok(match kernel {
        TimeKernel::Fractional { hurst } => {
            let h2 = 2.0 * hurst;
            four_point(a, b, |x| 0.5 * x.abs().powf(h2))
        }
        _ => overlap(a, b),
    })
}

/// `∫_A ∫_B |x - y|^{-α} dx dy` for boxes `A`, `B` in `ℝ^d`.
///
/// Exact antiderivative in d = 1; in d = 2, 3 the integral is rewritten as
/// `∫ |z|^{-α} w(z) dz` with `w` the (piecewise linear per axis) overlap
/// profile, split at the kinks of `w` and at 0, and integrated piecewise:
/// tensor Gauss–Legendre away from the origin, and a pyramid (Duffy) split with
/// the radial power integrated exactly on boxes with a corner at the origin.
pub fn riesz_cell_integral(a: &[(f64, f64)], b: &[(f64, f64)], alpha: f64) -> Result<f64> {
    check_shape(a.len(), b.len())?;
    let d = a.len();
    if !(alpha > 0.0 && alpha < d as f64) {
        return crate::error::domain(format!("Riesz kernel needs alpha in (0, {d}), got {alpha}"));
    }
    match d {
        1 => {
            let c = 1.0 / ((1.0 - alpha) * (2.0 - alpha));
            Ok(four_point(a[0], b[0], |x| c * x.abs().powf(2.0 - alpha)))
        }
        2 | 3 => Ok(riesz_by_quadrature(a, b, alpha, 16)),
        _ => capability(format!("Riesz cell integrals support d <= 3, got d = {d}")),
    }
}

/// Linear piece of an overlap profile: `[s, e]` with end values.
#[derive(Debug, Clone, Copy)]
struct Piece {
    s: f64,
    e: f64,
    ws: f64,
    we: f64,
}

impl Piece {
    fn at(&self, z: f64) -> f64 {
        self.ws + (self.we - self.ws) * (z - self.s) / (self.e - self.s)
    }

    fn touches_origin(&self) -> bool {
        self.s == 0.0 || self.e == 0.0
    }
}

fn profile_pieces(a: (f64, f64), b: (f64, f64)) -> Vec<Piece> {
    let w = |z: f64| overlap(a, (b.0 + z, b.1 + z));
    let mut knots = vec![a.0 - b.1, a.0 - b.0, a.1 - b.1, a.1 - b.0];
    let (lo, hi) = (a.0 - b.1, a.1 - b.0);
    if lo < 0.0 && hi > 0.0 {
        knots.push(0.0);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
        .windows(2)
        .filter(|k| k[1] > k[0])
        .map(|k| Piece { s: k[0], e: k[1], ws: w(k[0]), we: w(k[1]) })
        .filter(|p| p.ws > 0.0 || p.we > 0.0)
        .collect()
}

pub(crate) fn riesz_by_quadrature(a: &[(f64, f64)], b: &[(f64, f64)], alpha: f64, n: usize) -> f64 {
    let d = a.len();
    let gl = GaussLegendre::new(n);
    let pieces: Vec<Vec<Piece>> = (0..d).map(|i| profile_pieces(a[i], b[i])).collect();
    let mut total = 0.0;
    let mut choice = vec![0usize; d];
    loop {
        let boxp: Vec<Piece> = (0..d).map(|i| pieces[i][choice[i]]).collect();
        total += if boxp.iter().all(Piece::touches_origin) {
            corner_box(&boxp, alpha, &gl)
        } else {
            smooth_box(&boxp, alpha, &gl)
        };
        // odometer over piece combinations
        let mut axis = 0;
        loop {
            if axis == d {
                return total;
            }
            choice[axis] += 1;
            if choice[axis] < pieces[axis].len() {
                break;
            }
            choice[axis] = 0;
            axis += 1;
        }
    }
}

fn smooth_box(p: &[Piece], alpha: f64, gl: &GaussLegendre) -> f64 {
    let d = p.len();
    let rules: Vec<Vec<(f64, f64)>> = p.iter().map(|q| gl.mapped(q.s, q.e).collect()).collect();
    let n = gl.nodes.len();
    let mut idx = vec![0usize; d];
    let mut sum = 0.0;
    loop {
        let mut r2 = 0.0;
        let mut weight = 1.0;
        for i in 0..d {
            let (z, w) = rules[i][idx[i]];
            r2 += z * z;
            weight *= w * p[i].at(z);
        }
        sum += weight * r2.powf(-alpha / 2.0);
        let mut axis = 0;
        loop {
            if axis == d {
                return sum;
            }
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Box with a corner at the origin; every axis profile is linear in `|z_i|`.
fn corner_box(p: &[Piece], alpha: f64, gl: &GaussLegendre) -> f64 {
    let d = p.len();
    // per axis: extent h, and w = c + m·|z|
    let h: Vec<f64> = p.iter().map(|q| q.e - q.s).collect();
    let (c, m): (Vec<f64>, Vec<f64>) = p
        .iter()
        .zip(&h)
        .map(|(q, &hi)| {
            let (w0, wh) = if q.s == 0.0 { (q.ws, q.we) } else { (q.we, q.ws) };
            (w0, (wh - w0) / hi)
        })
        .unzip();
    let vol: f64 = h.iter().product();
    let outer: Vec<(f64, f64)> = gl.mapped(0.0, 1.0).collect();
    let n = outer.len();
    let mut total = 0.0;
    for j in 0..d {
        // pyramid where s_j = u is the largest scaled coordinate, s_i = u v_i
        let others: Vec<usize> = (0..d).filter(|&i| i != j).collect();
        let count = n.pow(others.len() as u32);
        for flat in 0..count {
            let mut rest = flat;
            let mut r2 = h[j] * h[j];
            let mut weight = 1.0;
            // polynomial in u: coefficients of Π (c_i + m_i h_i v_i u)
            let mut poly = vec![c[j], m[j] * h[j]];
            for &i in &others {
                let (v, w) = outer[rest % n];
                rest /= n;
                r2 += h[i] * h[i] * v * v;
                weight *= w;
                let lin = (c[i], m[i] * h[i] * v);
                let mut next = vec![0.0; poly.len() + 1];
                for (k, pk) in poly.iter().enumerate() {
                    next[k] += pk * lin.0;
                    next[k + 1] += pk * lin.1;
                }
                poly = next;
            }
            let radial: f64 = poly
                .iter()
                .enumerate()
                .map(|(k, pk)| pk / (d as f64 - alpha + k as f64))
                .sum();
            total += weight * r2.powf(-alpha / 2.0) * radial;
        }
    }
    vol * total
}

/// `∬ γ(t - s) f(x - y)` over two space-time cells.
pub fn cell_covariance(a: &Cell, b: &Cell, spec: &NoiseSpec) -> Result<f64> {
    check_shape(a.x.len(), b.x.len())?;
    let d = a.x.len();
    if !(1..=3).contains(&d) {
        return capability(format!("cell covariance supports d in 1..=3, got {d}"));
    }
    let spec = spec.resolved(d)?;
    let t = time_factor(a.t, b.t, &spec.time)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = match spec.space {
        SpaceKernel::Riesz { alpha } => riesz_cell_integral(&a.x, &b.x, alpha)?,
        _ => a.x.iter().zip(&b.x).map(|(&p, &q)| overlap(p, q)).product(),
    };
    Ok(t * x)
}

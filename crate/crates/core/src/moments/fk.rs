use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_fractional, ConditionVerdict};
use crate::error::{domain, input, Error, Result};
use crate::kernels::OperatorKind;
use crate::noise::{time_factor, HomogeneousSampler, NoiseSpec, RngStream, SpaceTimeGrid, TimeKernel};
use crate::parallel::{map_replicas_with, mean_stderr};
use crate::solvers::PamEuler;

/// Feynman–Kac estimate of `E u(t,x)²` for the parabolic Anderson model with
/// fractional-in-time (`H`), Riesz-in-space (`α`) noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FkConfig {
    pub t: f64,
    pub hurst: f64,
    pub alpha: f64,
    pub dim: usize,
    pub replicas: usize,
    /// Time cells per path; paths are sampled at cell midpoints.
    pub n_quad: usize,
    pub seed: u64,
    /// Multiplier on the interaction integral; 0 switches the interaction off.
    #[serde(default = "one")]
    pub coupling: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Same paths with the spatial floor halved.
    pub estimate_half_floor: f64,
    pub stderr_half_floor: f64,
    pub delta_floor: f64,
    pub n_quad: usize,
    pub replicas: usize,
    pub verdict: ConditionVerdict,
}

/// `E exp{c ∬ γ(r-s) |B¹_r - B²_s|^{-α} dr ds}` with `γ(u) = H(2H-1)|u|^{2H-2}`.
///
/// The time integral over each pair of cells is exact; the spatial factor is
/// evaluated at the path midpoints with `|B¹ - B²|` floored at half the
/// time step.
pub fn fk_second_moment(cfg: &FkConfig) -> Result<FkEstimate> {
    if !(cfg.t > 0.0) {
        return domain(format!("t must be positive, got {}", cfg.t));
    }
    let verdict = check_fractional(OperatorKind::Heat, cfg.alpha, cfg.hurst, cfg.dim)?;
    if !verdict.satisfied {
        return Err(Error::Divergent(Box::new(verdict)));
    }
    if cfg.alpha >= 2.0 {
        return domain(format!("alpha must lie in (0, d ∧ 2), got {}", cfg.alpha));
    }
    if cfg.replicas == 0 || cfg.n_quad == 0 {
        return input("replicas and quadrature cells must be positive");
    }
    if !(cfg.coupling >= 0.0) {
        return domain(format!("coupling must be nonnegative, got {}", cfg.coupling));
    }
    let nq = cfg.n_quad;
    let h = cfg.t / nq as f64;
    let kernel = TimeKernel::Fractional { hurst: cfg.hurst };
    let weights: Vec<f64> = (0..nq)
        .map(|lag| time_factor((0.0, h), (lag as f64 * h, (lag + 1) as f64 * h), &kernel))
        .collect::<Result<_>>()?;
    let delta = h / 2.0;
    let d = cfg.dim;
    let a2 = -cfg.alpha / 2.0;
    let floors = [delta * delta, delta * delta / 4.0];

    let samples: Vec<[f64; 2]> = map_replicas_with(
        cfg.replicas,
        || (vec![0.0; nq * d], vec![0.0; nq * d]),
        |(p1, p2), i| {
            let mut rng = RngStream::replica(cfg.seed, i);
            midpoint_path(&mut rng, h, d, p1);
            midpoint_path(&mut rng, h, d, p2);
            let mut acc = [0.0; 2];
            for j in 0..nq {
                let x = &p1[j * d..(j + 1) * d];
                for k in 0..nq {
                    let y = &p2[k * d..(k + 1) * d];
                    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                    let w = weights[j.abs_diff(k)];
                    for (a, f2) in acc.iter_mut().zip(floors) {
                        *a += w * r2.max(f2).powf(a2);
                    }
                }
            }
            acc.map(|a| (cfg.coupling * a).exp())
        },
    );
    if let Some(s) = samples.iter().find(|s| !(s[0] >= 1.0 && s[1] >= 1.0)) {
        return Err(Error::Numerical(format!("Feynman-Kac weight below 1: {s:?}")));
    }
    let (estimate, stderr) = mean_stderr(&samples.iter().map(|s| s[0]).collect::<Vec<_>>());
    let (estimate_half_floor, stderr_half_floor) = mean_stderr(&samples.iter().map(|s| s[1]).collect::<Vec<_>>());
    Ok(FkEstimate {
        estimate,
        stderr,
        estimate_half_floor,
        stderr_half_floor,
        delta_floor: delta,
        n_quad: nq,
        replicas: cfg.replicas,
        verdict,
    })
}

/// Standard Brownian motion in `ℝ^d` from 0 at times `(j + ½)h`, row-major.
fn midpoint_path(rng: &mut RngStream, h: f64, d: usize, out: &mut [f64]) {
    let nq = out.len() / d;
    let mut pos = vec![0.0; d];
    let mut sd = (h / 2.0).sqrt();
    for j in 0..nq {
        for (a, p) in pos.iter_mut().enumerate() {
            *p += sd * rng.standard_normal();
            out[j * d + a] = *p;
        }
        sd = h.sqrt();
    }
}

/// Direct Monte Carlo of `E u(t,0)²` for the 1-d parabolic Anderson model on a
/// periodic grid, driven by homogeneous noise cell masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PamMcConfig {
    pub t: f64,
    pub n_steps: usize,
    pub half_width: f64,
    pub n_cells: usize,
    pub noise: NoiseSpec,
    pub replicas: usize,
    pub seed: u64,
}

/// `(mean, stderr)` of the second moment at the cell nearest `x = 0`.
///
/// With noise white in time the estimator is `u²`. With colored time the
/// products are Wick-ordered (Skorohod solution): the scheme is run on
/// `W + iW'` and `W + iW''` with independent copies `W'`, `W''`, and
/// `Re(z₁z₂)` is unbiased for `E u⋄²`.
pub fn pam_second_moment_mc(cfg: &PamMcConfig) -> Result<(f64, f64)> {
    if cfg.replicas == 0 {
        return input("at least one replica is required");
    }
    let grid = SpaceTimeGrid::line(cfg.t, cfg.n_steps, cfg.half_width, cfg.n_cells)?;
    let spec = cfg.noise.resolved(1)?;
    let sampler = HomogeneousSampler::new(&grid, &spec)?;
    let pam = PamEuler::new(&grid)?;
    let i0 = grid.nearest_cell(0.0);
    let nx = grid.n_cells();
    let nt = cfg.n_steps;
    let wick = !matches!(spec.time, TimeKernel::White);
    let seeds = [1u64, 2, 3].map(|p| RngStream::derive_seed(cfg.seed, p));
    let samples: Vec<f64> = map_replicas_with(
        cfg.replicas,
        || (),
        |_, i| {
            let w = sampler.sample(&mut RngStream::replica(seeds[0], i));
            if !wick {
                let mut end = 0.0;
                pam.march(|k| &w.values[k * nx..(k + 1) * nx], |k, u: &[f64]| {
                    if k == nt {
                        end = u[i0];
                    }
                });
                return end * end;
            }
            let mut ends = [Complex64::new(0.0, 0.0); 2];
            for (c, seed) in seeds[1..].iter().enumerate() {
                let shift = sampler.sample(&mut RngStream::replica(*seed, i));
                let z: Vec<Complex64> =
                    w.values.iter().zip(&shift.values).map(|(a, b)| Complex64::new(*a, *b)).collect();
                pam.march(|k| &z[k * nx..(k + 1) * nx], |k, u: &[Complex64]| {
                    if k == nt {
                        ends[c] = u[i0];
                    }
                });
            }
            (ends[0] * ends[1]).re
        },
    );
    Ok(mean_stderr(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FkConfig {
        FkConfig { t: 0.25, hurst: 0.7, alpha: 0.5, dim: 1, replicas: 50, n_quad: 16, seed: 1, coupling: 1.0 }
    }

    #[test]
    fn zero_coupling_gives_one() {
        let e = fk_second_moment(&FkConfig { coupling: 0.0, ..cfg() }).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn rejects_inadmissible_parameters() {
        assert!(matches!(fk_second_moment(&FkConfig { alpha: 2.5, dim: 3, hurst: 0.55, ..cfg() }), Err(Error::Divergent(_))));
        assert!(matches!(fk_second_moment(&FkConfig { alpha: 2.5, dim: 3, hurst: 0.9, ..cfg() }), Err(Error::Domain(_))));
        assert!(matches!(fk_second_moment(&FkConfig { alpha: 1.0, ..cfg() }), Err(Error::Domain(_))));
    }

    #[test]
    fn white_time_pam_uses_plain_square() {
        let c = PamMcConfig {
            t: 0.1,
            n_steps: 4,
            half_width: 1.0,
            n_cells: 8,
            noise: NoiseSpec::white(),
            replicas: 20,
            seed: 3,
        };
        let (m, se) = pam_second_moment_mc(&c).unwrap();
        assert!(m > 0.0 && se > 0.0);
    }
}

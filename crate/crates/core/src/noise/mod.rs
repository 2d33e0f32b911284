//! Seeded Gaussian drivers: Brownian paths, white-noise sheets, fractional
//! Brownian motion and space-time homogeneous colored noise.

mod covariance;
mod fbm;
mod field;
mod homogeneous;
mod rng;

pub use covariance::{cell_covariance, riesz_cell_integral, time_factor, Cell};
pub use fbm::{fbm_covariance, sample_bm_path, sample_fbm_path, FbmSampler, DEFAULT_CHOLESKY_CAP};
pub use field::{fmt17, Field, FieldLayout, Path};
pub use homogeneous::{sample_homogeneous_noise, sample_white_noise_sheet, HomogeneousSampler};
pub use rng::RngStream;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform time grid on `[0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return domain(format!("t_max must be positive and finite, got {t_max}"));
        }
        if n_steps == 0 {
            return domain("n_steps must be at least 1");
        }
        Ok(Self { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    /// `t_0, ..., t_n`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.node(k)).collect()
    }
}

/// Uniform lattice over `[0, T] × [-L, L]^d`, `n_cells` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    time: TimeGrid,
    half_width: f64,
    n_cells: usize,
    dim: usize,
}

impl SpaceTimeGrid {
    pub fn new(time: TimeGrid, half_width: f64, n_cells: usize, dim: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return domain(format!("half-width must be positive and finite, got {half_width}"));
        }
        if n_cells == 0 {
            return domain("n_cells must be at least 1");
        }
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
        }
        let total = (n_cells as u64)
            .checked_pow(dim as u32)
            .and_then(|s| s.checked_mul(time.n_steps() as u64 + 1))
            .filter(|&c| c <= u32::MAX as u64);
        if total.is_none() {
            return domain("grid has too many cells");
        }
        Ok(Self { time, half_width, n_cells, dim })
    }

    /// One-dimensional grid helper.
    pub fn line(t_max: f64, n_steps: usize, half_width: f64, n_cells: usize) -> Result<Self> {
        Self::new(TimeGrid::new(t_max, n_steps)?, half_width, n_cells, 1)
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.time.dt()
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_cells as f64
    }

    /// Number of spatial cells, `n_cells^d`.
    pub fn space_len(&self) -> usize {
        self.n_cells.pow(self.dim as u32)
    }

    /// Center of cell `i` along one axis.
    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx()
    }

    /// Per-axis indices of a flat spatial index (axis 0 outermost).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.n_cells;
            flat /= self.n_cells;
        }
        idx
    }

    /// Index of the spatial cell whose center is closest to `x` (1-d grids).
    pub fn nearest_cell(&self, x: f64) -> usize {
        let i = ((x + self.half_width) / self.dx() - 0.5).round();
        i.clamp(0.0, (self.n_cells - 1) as f64) as usize
    }

    /// The space-time cell with time slab `k` and flat spatial index `flat`.
    pub fn cell(&self, k: usize, flat: usize) -> Cell {
        let dx = self.dx();
        let x = self
            .unflatten(flat)
            .into_iter()
            .map(|i| {
                let lo = -self.half_width + i as f64 * dx;
                (lo, lo + dx)
            })
            .collect();
        Cell { t: (self.time.node(k), self.time.node(k + 1)), x }
    }
}

/// Temporal covariance structure of a noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeKernel {
    White,
    /// `γ(t) = α_H |t|^{2H-2}` with `α_H = H(2H-1)`, `H ∈ (1/2, 1)`.
    Fractional { hurst: f64 },
    /// Spectral density `|τ|^exponent`, identified with the physical kernel it
    /// transforms to: exponent 0 is white, exponent `1-2H ∈ (-1, 0)` is fractional.
    RadialSpectral { exponent: f64 },
}

/// Spatial covariance structure of a noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceKernel {
    White,
    /// `f(x) = |x|^{-α}`, `α ∈ (0, d)`.
    Riesz { alpha: f64 },
    /// Spectral density `|ξ|^exponent`: exponent 0 is white, `α-d ∈ (-d, 0)` is Riesz.
    RadialSpectral { exponent: f64 },
}

/// Covariance description of a Gaussian noise, `E[W(φ)W(ψ)] = ∬ γ(t-s) f(x-y) φ ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub time: TimeKernel,
    pub space: SpaceKernel,
}

impl NoiseSpec {
    pub fn white() -> Self {
        Self { time: TimeKernel::White, space: SpaceKernel::White }
    }

    pub fn fractional_riesz(hurst: f64, alpha: f64) -> Self {
        Self { time: TimeKernel::Fractional { hurst }, space: SpaceKernel::Riesz { alpha } }
    }

    /// Check parameter ranges against dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        self.resolved(d).map(|_| ())
    }

    /// Canonical form: spectral exponents replaced by their physical-space kernels.
    pub fn resolved(&self, d: usize) -> Result<NoiseSpec> {
        let time = match self.time {
            TimeKernel::White => TimeKernel::White,
            TimeKernel::Fractional { hurst } => {
                if !(hurst > 0.5 && hurst < 1.0) {
                    return domain(format!("fractional time kernel needs H in (1/2, 1), got {hurst}"));
                }
                TimeKernel::Fractional { hurst }
            }
            TimeKernel::RadialSpectral { exponent } => {
                if exponent == 0.0 {
                    TimeKernel::White
                } else if exponent > -1.0 && exponent < 0.0 {
                    TimeKernel::Fractional { hurst: (1.0 - exponent) / 2.0 }
                } else {
                    return domain(format!(
                        "time spectral exponent must lie in (-1, 0], got {exponent}"
                    ));
                }
            }
        };
        let space = match self.space {
            SpaceKernel::White => SpaceKernel::White,
            SpaceKernel::Riesz { alpha } => {
                if !(alpha > 0.0 && alpha < d as f64) {
                    return domain(format!("Riesz kernel needs alpha in (0, {d}), got {alpha}"));
                }
                SpaceKernel::Riesz { alpha }
            }
            SpaceKernel::RadialSpectral { exponent } => {
                if exponent == 0.0 {
                    SpaceKernel::White
                } else if exponent > -(d as f64) && exponent < 0.0 {
                    SpaceKernel::Riesz { alpha: exponent + d as f64 }
                } else {
                    return domain(format!(
                        "space spectral exponent must lie in (-{d}, 0], got {exponent}"
                    ));
                }
            }
        };
        Ok(NoiseSpec { time, space })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        let t = TimeGrid::new(1.0, 4).unwrap();
        assert!(SpaceTimeGrid::new(t, 1.0, 4, 4).is_err());
        assert!(SpaceTimeGrid::new(t, -1.0, 4, 1).is_err());
        assert_eq!(t.nodes(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn cell_geometry() {
        let g = SpaceTimeGrid::new(TimeGrid::new(1.0, 2).unwrap(), 1.0, 4, 2).unwrap();
        assert_eq!(g.space_len(), 16);
        assert_eq!(g.unflatten(6), vec![1, 2]);
        let c = g.cell(1, 6);
        assert_eq!(c.t, (0.5, 1.0));
        assert_eq!(c.x, vec![(-0.5, 0.0), (0.0, 0.5)]);
        let line = SpaceTimeGrid::line(1.0, 1, 8.0, 512).unwrap();
        assert!(line.center(line.nearest_cell(0.0)).abs() <= line.dx() / 2.0);
    }

    #[test]
    fn spectral_forms_resolve() {
        let s = NoiseSpec {
            time: TimeKernel::RadialSpectral { exponent: -0.4 },
            space: SpaceKernel::RadialSpectral { exponent: -0.5 },
        };
        let r = s.resolved(1).unwrap();
        assert_eq!(r.time, TimeKernel::Fractional { hurst: 0.7 });
        assert_eq!(r.space, SpaceKernel::Riesz { alpha: 0.5 });
        assert!(NoiseSpec::fractional_riesz(0.4, 0.5).validate(1).is_err());
        assert!(NoiseSpec::fractional_riesz(0.7, 1.0).validate(1).is_err());
    }
}

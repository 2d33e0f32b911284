use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{
    cell_covariance, fbm::DEFAULT_CHOLESKY_CAP, time_factor, Cell, Field, FieldLayout, NoiseSpec,
    RngStream, SpaceKernel, SpaceTimeGrid, TimeKernel,
};
use crate::error::{capability, Result};
use crate::linalg::cholesky_with_jitter;

/// Space-time white noise on the grid: i.i.d. `N(0, Δt·Δx^d)` cell masses.
pub fn sample_white_noise_sheet(grid: &SpaceTimeGrid, rng: &mut RngStream) -> Field {
    let sd = (grid.dt() * grid.dx().powi(grid.dim() as i32)).sqrt();
    let mut f = Field::zeros(*grid, FieldLayout::Cells);
    rng.fill_standard_normal(&mut f.values);
    for v in &mut f.values {
        *v *= sd;
    }
    f
}

#[derive(Debug, Clone)]
enum Factor {
    Scaled(f64),
    Dense(DMatrix<f64>),
}

impl Factor {
    fn from_covariance(cov: DMatrix<f64>) -> Result<Self> {
        Ok(Factor::Dense(cholesky_with_jitter(cov)?.0))
    }
}

/// Sampler for homogeneous Gaussian cell masses.
///
/// The cell covariance is a product of a time factor and a space factor, so
/// the covariance matrix is a Kronecker product and the masses are drawn as
/// `L_t Z L_xᵀ` with one Cholesky factor per axis group. The cap applies to
/// each factor separately.
#[derive(Debug, Clone)]
pub struct HomogeneousSampler {
    grid: SpaceTimeGrid,
    time: Factor,
    space: Factor,
}

impl HomogeneousSampler {
    pub fn new(grid: &SpaceTimeGrid, spec: &NoiseSpec) -> Result<Self> {
        Self::with_cap(grid, spec, DEFAULT_CHOLESKY_CAP)
    }

    pub fn with_cap(grid: &SpaceTimeGrid, spec: &NoiseSpec, cap: usize) -> Result<Self> {
        let spec = spec.resolved(grid.dim())?;
        let nt = grid.time().n_steps();
        let ns = grid.space_len();
        let time = match spec.time {
            TimeKernel::Fractional { .. } => {
                if nt > cap {
                    return capability(format!("{nt} time slabs exceed Cholesky cap {cap}"));
                }
                let tg = grid.time();
                let slabs: Vec<(f64, f64)> = (0..nt).map(|k| (tg.node(k), tg.node(k + 1))).collect();
                let mut cov = DMatrix::zeros(nt, nt);
                for i in 0..nt {
                    for j in 0..=i {
                        let v = time_factor(slabs[i], slabs[j], &spec.time)?;
                        cov[(i, j)] = v;
                        cov[(j, i)] = v;
                    }
                }
                Factor::from_covariance(cov)?
            }
            _ => Factor::Scaled(grid.dt().sqrt()),
        };
        let space = match spec.space {
            SpaceKernel::Riesz { .. } => {
                if ns > cap {
                    return capability(format!("{ns} spatial cells exceed Cholesky cap {cap}"));
                }
                // unit time factor: covariance depends only on the cell offset
                let space_only = NoiseSpec { time: TimeKernel::White, space: spec.space };
                let mut by_offset: HashMap<Vec<usize>, f64> = HashMap::new();
                let mut cov = DMatrix::zeros(ns, ns);
                let idx: Vec<Vec<usize>> = (0..ns).map(|f| grid.unflatten(f)).collect();
                for i in 0..ns {
                    for j in 0..=i {
                        let mut key: Vec<usize> =
                            idx[i].iter().zip(&idx[j]).map(|(a, b)| a.abs_diff(*b)).collect();
                        key.sort_unstable();
                        let v = match by_offset.get(&key) {
                            Some(v) => *v,
                            None => {
                                let a = grid.cell(0, i);
                                let b = grid.cell(0, j);
                                let unit_t = Cell { t: (0.0, 1.0), x: a.x };
                                let unit_s = Cell { t: (0.0, 1.0), x: b.x };
                                let v = cell_covariance(&unit_t, &unit_s, &space_only)?;
                                by_offset.insert(key, v);
                                v
                            }
                        };
                        cov[(i, j)] = v;
                        cov[(j, i)] = v;
                    }
                }
                Factor::from_covariance(cov)?
            }
            _ => Factor::Scaled(grid.dx().powi(grid.dim() as i32).sqrt()),
        };
        Ok(Self { grid: *grid, time, space })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn sample(&self, rng: &mut RngStream) -> Field {
        let nt = self.grid.time().n_steps();
        let ns = self.grid.space_len();
        let mut z = vec![0.0; nt * ns];
        rng.fill_standard_normal(&mut z);
        let mut m = DMatrix::from_row_slice(nt, ns, &z);
        match &self.time {
            Factor::Scaled(s) => m *= *s,
            Factor::Dense(l) => m = l * m,
        }
        match &self.space {
            Factor::Scaled(s) => m *= *s,
            Factor::Dense(l) => m *= l.transpose(),
        }
        let mut values = Vec::with_capacity(nt * ns);
        for k in 0..nt {
            for j in 0..ns {
                values.push(m[(k, j)]);
            }
        }
        Field { grid: self.grid, layout: FieldLayout::Cells, values }
    }
}

/// One draw of homogeneous noise cell masses; see [`HomogeneousSampler`].
pub fn sample_homogeneous_noise(
    grid: &SpaceTimeGrid,
    spec: &NoiseSpec,
    rng: &mut RngStream,
) -> Result<Field> {
    Ok(HomogeneousSampler::new(grid, spec)?.sample(rng))
}

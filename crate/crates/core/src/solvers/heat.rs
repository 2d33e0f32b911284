use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{sup_of_means, LipschitzFn, PicardTrace};
use crate::error::{capability, check_shape, domain, Error, Result};
use crate::kernels::heat_kernel_1d;
use crate::noise::{sample_white_noise_sheet, Field, FieldLayout, RngStream, SpaceTimeGrid};
use crate::parallel::ordered_sum;

/// Effective kernel time for a noise slab `m` steps before the evaluation time.
///
/// `τ_m = Δt/(4(√m - √(m-1))²)` is chosen so that `Δt·g(τ_m) = ∫_{(m-1)Δt}^{mΔt} g(s) ds`
/// with `g(s) = (4πs)^{-1/2}`: each slab carries its exact share of the
/// variance, including the slab adjacent to the evaluation time (`τ_1 = Δt/4`).
pub fn slab_lag(dt: f64, m: usize) -> f64 {
    let r = (m as f64).sqrt() + ((m - 1) as f64).sqrt();
    dt * r * r / 4.0
}

/// Discrete stochastic convolution `u(t_k, x_i) = Σ_{j<k} Σ_l G(τ_{k-j}, x_i - y_l) S_j(l)`
/// on a periodic 1-d grid, evaluated for all nodes at once with FFTs in space
/// and (zero-padded) in time.
pub struct HeatConvolution {
    grid: SpaceTimeGrid,
    nt: usize,
    nx: usize,
    padded: usize,
    taps: Vec<f64>,
    spectrum: Vec<Complex64>,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_t: Arc<dyn Fft<f64>>,
    ifft_t: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for HeatConvolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeatConvolution").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl HeatConvolution {
    pub fn new(grid: &SpaceTimeGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return capability(format!("heat stochastic convolution is implemented for d = 1, got d = {}", grid.dim()));
        }
        let nt = grid.time().n_steps();
        let nx = grid.n_cells();
        let dt = grid.dt();
        let dx = grid.dx();
        let mut taps = vec![0.0; nt * nx];
        for m in 1..=nt {
            let tau = slab_lag(dt, m);
            for l in 0..nx {
                let dist = l.min(nx - l) as f64 * dx;
                taps[(m - 1) * nx + l] = heat_kernel_1d(tau, dist);
            }
        }
        let padded = (2 * nt).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft_x = planner.plan_fft_forward(nx);
        let ifft_x = planner.plan_fft_inverse(nx);
        let fft_t = planner.plan_fft_forward(padded);
        let ifft_t = planner.plan_fft_inverse(padded);
        let mut rows = vec![Complex64::new(0.0, 0.0); padded * nx];
        for m in 1..=nt {
            for l in 0..nx {
                rows[m * nx + l] = Complex64::new(taps[(m - 1) * nx + l], 0.0);
            }
        }
        fft_x.process(&mut rows[..(nt + 1) * nx]);
        let mut spectrum = transpose(&rows, padded, nx);
        fft_t.process(&mut spectrum);
        Ok(Self { grid: *grid, nt, nx, padded, taps, spectrum, fft_x, ifft_x, fft_t, ifft_t })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// `G(τ_m, distance of l cells)`, `m ≥ 1`.
    pub fn kernel(&self, m: usize, l: usize) -> f64 {
        self.taps[(m - 1) * self.nx + l]
    }

    /// Convolve cell sources (`n_steps × n_cells`) into node values
    /// (`(n_steps + 1) × n_cells`), adding the constant `initial`.
    pub fn convolve(&self, source: &[f64], initial: f64, out: &mut [f64]) -> Result<()> {
        let (nt, nx, p) = (self.nt, self.nx, self.padded);
        check_shape(nt * nx, source.len())?;
        check_shape((nt + 1) * nx, out.len())?;
        let mut rows = vec![Complex64::new(0.0, 0.0); p * nx];
        for (r, s) in rows.iter_mut().zip(source) {
            r.re = *s;
        }
        self.fft_x.process(&mut rows[..nt * nx]);
        let mut cols = transpose(&rows, p, nx);
        self.fft_t.process(&mut cols);
        for (c, k) in cols.iter_mut().zip(&self.spectrum) {
            *c *= k;
        }
        self.ifft_t.process(&mut cols);
        for q in 0..=nt {
            for l in 0..nx {
                rows[q * nx + l] = cols[l * p + q];
            }
        }
        self.ifft_x.process(&mut rows[..(nt + 1) * nx]);
        let scale = 1.0 / (p * nx) as f64;
        for (o, r) in out.iter_mut().zip(&rows) {
            *o = initial + r.re * scale;
        }
        // nothing reaches t_0
        out[..nx].iter_mut().for_each(|v| *v = initial);
        Ok(())
    }

    /// Single node value `Σ_{j<k} Σ_l G(τ_{k-j}, x_i - y_l) S_j(l)` by direct summation.
    pub fn point(&self, source: &[f64], k: usize, i: usize) -> Result<f64> {
        let nx = self.nx;
        check_shape(self.nt * nx, source.len())?;
        if k > self.nt || i >= nx {
            return domain(format!("node ({k}, {i}) outside the grid"));
        }
        let mut acc = 0.0;
        for j in 0..k {
            let row = &source[j * nx..(j + 1) * nx];
            let taps = &self.taps[(k - j - 1) * nx..(k - j) * nx];
            // taps are indexed by the circular offset i - l
            let (right, left) = row.split_at(i + 1);
            for (l, s) in right.iter().enumerate() {
                acc += taps[i - l] * s;
            }
            for (o, s) in left.iter().enumerate() {
                acc += taps[nx - 1 - o] * s;
            }
        }
        Ok(acc)
    }

    /// Linear solution `u = Σ G·W` for a white-noise cell field.
    pub fn solve_linear(&self, noise: &Field) -> Result<Field> {
        self.check_noise(noise)?;
        let mut out = Field::zeros(self.grid, FieldLayout::Nodes);
        self.convolve(&noise.values, 0.0, &mut out.values)?;
        Ok(out)
    }

    /// Exact variance of the discrete linear solution at node time `t_k` under white noise.
    pub fn discrete_variance(&self, k: usize) -> f64 {
        let w = self.grid.dt() * self.grid.dx();
        self.taps[..k.min(self.nt) * self.nx].iter().map(|g| g * g).sum::<f64>() * w
    }

    fn check_noise(&self, noise: &Field) -> Result<()> {
        if noise.grid != self.grid || noise.layout != FieldLayout::Cells {
            return Err(Error::Input("noise field must be a cell field on the solver grid".into()));
        }
        Ok(())
    }
}

fn transpose(rows: &[Complex64], n_rows: usize, n_cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); rows.len()];
    for r in 0..n_rows {
        for c in 0..n_cols {
            out[c * n_rows + r] = rows[r * n_cols + c];
        }
    }
    out
}

/// Mild solution of `∂_t u = ½∂_x² u + Ẇ`, `u(0) = 0`, on a periodic 1-d grid.
pub fn solve_linear_heat_1d(grid: &SpaceTimeGrid, noise: &Field) -> Result<Field> {
    HeatConvolution::new(grid)?.solve_linear(noise)
}

/// Exact variance of the discrete linear solution at time `t_k` (white noise).
pub fn linear_heat_1d_discrete_variance(grid: &SpaceTimeGrid, k: usize) -> Result<f64> {
    Ok(HeatConvolution::new(grid)?.discrete_variance(k))
}

/// Picard iteration `u_{n+1} = u0 + Σ G·σ(u_n)·W` for the 1-d stochastic heat
/// equation with constant initial value `u0`, left-endpoint evaluation of `σ(u_n)`.
pub fn solve_nonlinear_heat_picard(
    sigma: &LipschitzFn,
    grid: &SpaceTimeGrid,
    u0: f64,
    n_iter: usize,
    replicas: usize,
    seed: u64,
) -> Result<PicardTrace> {
    if n_iter == 0 {
        return domain("n_iter must be at least 1");
    }
    if replicas == 0 {
        return domain("at least one replica is required");
    }
    let conv = HeatConvolution::new(grid)?;
    let nx = grid.n_cells();
    let nt = grid.time().n_steps();
    let nodes = (nt + 1) * nx;
    let iterate = |i: usize, mut visit: Box<dyn FnMut(usize, &[f64], &[f64]) + '_>| -> Result<()> {
        let mut rng = RngStream::replica(seed, i);
        let noise = sample_white_noise_sheet(grid, &mut rng);
        let mut prev = vec![u0; nodes];
        let mut next = vec![0.0; nodes];
        let mut source = vec![0.0; nt * nx];
        for n in 1..=n_iter {
            for (s, (u, w)) in source.iter_mut().zip(prev.iter().zip(&noise.values)) {
                *s = sigma.eval(*u) * w;
            }
            conv.convolve(&source, u0, &mut next)?;
            visit(n, &prev, &next);
            std::mem::swap(&mut prev, &mut next);
        }
        Ok(())
    };
    let summed = ordered_sum(
        replicas,
        n_iter * nodes,
        || (),
        |_, i, out| {
            iterate(
                i,
                Box::new(|n, prev, next| {
                    let block = &mut out[(n - 1) * nodes..n * nodes];
                    for (o, (a, b)) in block.iter_mut().zip(next.iter().zip(prev)) {
                        *o = (a - b) * (a - b);
                    }
                }),
            )
            .expect("shapes fixed by the grid");
        },
    );
    let mut iterates = vec![vec![u0; nodes]];
    iterate(0, Box::new(|_, _, next| iterates.push(next.to_vec())))?;
    Ok(PicardTrace { iterates, sup_diffs: sup_of_means(&summed, n_iter, replicas), replicas })
}

use nalgebra::DMatrix;

use super::{Path, RngStream, TimeGrid};
use crate::error::{capability, domain, Result};
use crate::linalg::cholesky_with_jitter;

/// Largest covariance matrix dimension factorized by default.
pub const DEFAULT_CHOLESKY_CAP: usize = 2048;

/// `R_H(t, s) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2`.
pub fn fbm_covariance(hurst: f64, t: f64, s: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
    }
    if t < 0.0 || s < 0.0 {
        return domain("fBm covariance needs nonnegative times");
    }
    let h2 = 2.0 * hurst;
    Ok(0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2)))
}

/// Brownian motion at the grid nodes, `B_0 = 0`.
pub fn sample_bm_path(grid: &TimeGrid, rng: &mut RngStream) -> Path {
    let sd = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.n_steps() + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..grid.n_steps() {
        b += sd * rng.standard_normal();
        values.push(b);
    }
    Path { grid: *grid, values }
}

/// Exact fBm sampler: Cholesky factor of the covariance at `t_1..t_n`.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    grid: TimeGrid,
    hurst: f64,
    lower: DMatrix<f64>,
    jitter: f64,
}

impl FbmSampler {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        Self::with_cap(hurst, grid, DEFAULT_CHOLESKY_CAP)
    }

    pub fn with_cap(hurst: f64, grid: &TimeGrid, cap: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
        }
        let n = grid.n_steps();
        if n > cap {
            return capability(format!("fBm grid with {n} nodes exceeds Cholesky cap {cap}"));
        }
        let t: Vec<f64> = (1..=n).map(|k| grid.node(k)).collect();
        let h2 = 2.0 * hurst;
        let cov = DMatrix::from_fn(n, n, |i, j| {
            0.5 * (t[i].powf(h2) + t[j].powf(h2) - (t[i] - t[j]).abs().powf(h2))
        });
        let (lower, jitter) = cholesky_with_jitter(cov)?;
        Ok(Self { grid: *grid, hurst, lower, jitter })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Relative diagonal jitter used by the factorization (0 when none was needed).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample(&self, rng: &mut RngStream) -> Path {
        let n = self.grid.n_steps();
        let mut z = vec![0.0; n];
        rng.fill_standard_normal(&mut z);
        let mut values = vec![0.0; n + 1];
        for i in 0..n {
            let mut acc = 0.0;
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                acc += self.lower[(i, j)] * zj;
            }
            values[i + 1] = acc;
        }
        Path { grid: self.grid, values }
    }
}

/// fBm path with Hurst index `hurst` at the grid nodes, `B^H_0 = 0`.
pub fn sample_fbm_path(hurst: f64, grid: &TimeGrid, rng: &mut RngStream) -> Result<Path> {
    Ok(FbmSampler::new(hurst, grid)?.sample(rng))
}

use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::ChaosSeries;
use crate::error::{capability, domain, Error, Result};
use crate::kernels::heat_kernel_1d;
use crate::noise::{Field, FieldLayout, SpaceTimeGrid};
use crate::special::{log_gamma, std_normal_cdf};

/// Variance `(t/4)^{n/2}/Γ(n/2+1)` of the n-th chaos term of the parabolic
/// Anderson model driven by space-time white noise in d = 1 (`∂_t - ½∂_x²`).
pub fn pam_chaos_term_variance(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return domain("chaos order must be at least 1");
    }
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let h = n as f64 / 2.0;
    Ok((h * (t / 4.0).ln() - log_gamma(h + 1.0)?).exp())
}

/// `E u(t,x)² = 2 e^{t/4} Φ(√(t/2))`.
pub fn pam_second_moment_closed(t: f64) -> f64 {
    2.0 * (t / 4.0).exp() * std_normal_cdf((t / 2.0).sqrt())
}

/// `(1 + Σ_{n≤N} v_n, 2e^{t/4}Φ(√(t/2)))`.
pub fn pam_second_moment(t: f64, n_terms: usize) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let mut sum = 1.0;
    for n in 1..=n_terms {
        sum += pam_chaos_term_variance(n, t)?;
    }
    Ok((sum, pam_second_moment_closed(t)))
}

/// Chaos table for the second moment. With `n_terms = None` the order is the
/// smallest `N` whose tail bound `(v_{N+1} + v_{N+2})/(1 - q)`,
/// `q = (t/4)/((N+1)/2 + 1)`, is below `tol`.
pub fn pam_chaos_series(t: f64, n_terms: Option<usize>, tol: f64) -> Result<ChaosSeries> {
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let n = match n_terms {
        Some(n) => n,
        None => {
            if !(tol > 0.0) {
                return domain("truncation tolerance must be positive");
            }
            let mut n = 1usize;
            loop {
                let q = (t / 4.0) / ((n as f64 + 1.0) / 2.0 + 1.0);
                if q < 1.0 {
                    let bound = (pam_chaos_term_variance(n + 1, t)? + pam_chaos_term_variance(n + 2, t)?) / (1.0 - q);
                    if bound < tol {
                        break n;
                    }
                }
                n += 1;
                if n > 100_000 {
                    return Err(Error::Numerical("chaos truncation order search did not terminate".into()));
                }
            }
        }
    };
    let term_variances: Vec<f64> = (1..=n).map(|k| pam_chaos_term_variance(k, t)).collect::<Result<_>>()?;
    let mut partial_sums = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    partial_sums.push(acc);
    for v in &term_variances {
        acc += v;
        partial_sums.push(acc);
    }
    Ok(ChaosSeries {
        term_variances,
        partial_sums,
        truncation_order: n,
        closed_form: Some(pam_second_moment_closed(t)),
    })
}

/// Scalars the Euler scheme can march: real fields, and complex fields for
/// Wick-ordered (Skorohod) moment estimators.
pub trait PamScalar: Copy + Send + Sync + Add<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> {
    fn from_real(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_real(0.0)
    }
}

impl PamScalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
}

impl PamScalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// One-step mild-form marching for `∂_t u = ½∂_x² u + u·Ẇ`, `u(0) ≡ 1`:
/// `u_{k+1}(x) = Σ_y G(Δt, x - y) u_k(y) (Δx + W_k(y))`, periodic in space.
///
/// The kernel samples are rescaled so that `Σ_y G Δx = 1`; otherwise the
/// Riemann-sum mass error compounds over steps once `Δx` exceeds `√Δt`.
#[derive(Debug, Clone)]
pub struct PamEuler {
    grid: SpaceTimeGrid,
    /// `G(Δt, l·Δx)` for `l = 0..=radius`, scaled to unit mass on the grid.
    taps: Vec<f64>,
}

impl PamEuler {
    pub fn new(grid: &SpaceTimeGrid) -> Result<Self> {
        if grid.dim() != 1 {
            return capability(format!("Euler scheme is implemented for d = 1, got d = {}", grid.dim()));
        }
        let dt = grid.dt();
        let dx = grid.dx();
        let g0 = heat_kernel_1d(dt, 0.0);
        let half = grid.n_cells() / 2;
        let mut taps = vec![g0];
        for l in 1..=half {
            let g = heat_kernel_1d(dt, l as f64 * dx);
            if g < 1e-18 * g0 {
                break;
            }
            taps.push(g);
        }
        // unit discrete mass, counted the way `step` wraps
        let nx = grid.n_cells();
        let mass: f64 = taps
            .iter()
            .enumerate()
            .map(|(l, g)| if l == 0 || 2 * l == nx { *g } else { 2.0 * g })
            .sum::<f64>()
            * dx;
        taps.iter_mut().for_each(|g| *g /= mass);
        Ok(Self { grid: *grid, taps })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// Kernel half-width in cells.
    pub fn radius(&self) -> usize {
        self.taps.len() - 1
    }

    /// One step: `out_i = Σ_l G(Δt, (i-l)Δx)·u_l·(Δx + w_l)`.
    pub fn step<T: PamScalar>(&self, u: &[T], w: &[T], scratch: &mut [T], out: &mut [T]) {
        let nx = u.len();
        let dx = self.grid.dx();
        for ((s, ui), wi) in scratch.iter_mut().zip(u).zip(w) {
            *s = *ui * (*wi + T::from_real(dx));
        }
        let r = self.radius().min(nx / 2);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = scratch[i] * self.taps[0];
            for l in 1..=r {
                let a = scratch[(i + l) % nx];
                let b = scratch[(i + nx - l) % nx];
                // avoid double counting the antipodal cell on even grids
                if 2 * l == nx {
                    acc = acc + a * self.taps[l];
                } else {
                    acc = acc + (a + b) * self.taps[l];
                }
            }
            *o = acc;
        }
    }

    /// March from `u ≡ 1` through all slabs; `noise(k)` returns slab `k`.
    /// `visit(k, u_k)` is called for every node time.
    pub fn march<'a, T, N, V>(&self, mut noise: N, mut visit: V)
    where
        T: PamScalar + 'a,
        N: FnMut(usize) -> &'a [T],
        V: FnMut(usize, &[T]),
    {
        let nx = self.grid.n_cells();
        let mut u = vec![T::from_real(1.0); nx];
        let mut next = vec![T::zero(); nx];
        let mut scratch = vec![T::zero(); nx];
        visit(0, &u);
        for k in 0..self.grid.time().n_steps() {
            self.step(&u, noise(k), &mut scratch, &mut next);
            std::mem::swap(&mut u, &mut next);
            visit(k + 1, &u);
        }
    }

    /// Real solution at every node for a white-noise (or any) cell field.
    pub fn solve(&self, noise: &Field) -> Result<Field> {
        if noise.grid != self.grid || noise.layout != FieldLayout::Cells {
            return Err(Error::Input("noise field must be a cell field on the solver grid".into()));
        }
        let mut out = Field::zeros(self.grid, FieldLayout::Nodes);
        self.march(|k| noise.slice(k), |k, u: &[f64]| out.slice_mut(k).copy_from_slice(u));
        Ok(out)
    }
}

/// Euler approximation of the parabolic Anderson model on a periodic 1-d grid.
pub fn solve_pam_euler(grid: &SpaceTimeGrid, noise: &Field) -> Result<Field> {
    PamEuler::new(grid)?.solve(noise)
}

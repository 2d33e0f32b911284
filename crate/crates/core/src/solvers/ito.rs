use serde::{Deserialize, Serialize};

use super::{sup_of_means, LipschitzFn, PicardTrace};
use crate::error::{capability, check_shape, domain, Result};
use crate::noise::{sample_bm_path, Field, Path, RngStream, TimeGrid};
use crate::parallel::ordered_sum;
use crate::special::DEFAULT_HERMITE_MAX_ORDER;

/// `Σ_k X(t_k)(B_{t_{k+1}} - B_{t_k})` with left-endpoint integrand values.
pub fn ito_sum(integrand: &[f64], increments: &[f64]) -> Result<f64> {
    check_shape(increments.len(), integrand.len())?;
    Ok(integrand.iter().zip(increments).map(|(x, db)| x * db).sum())
}

/// `Σ_cells φ(cell)·W(cell)` for a step integrand on the noise cells.
pub fn walsh_sum(integrand: &[f64], noise: &Field) -> Result<f64> {
    check_shape(noise.values.len(), integrand.len())?;
    Ok(integrand.iter().zip(&noise.values).map(|(x, w)| x * w).sum())
}

/// Picard iterates `X_0 ≡ x0`, `X_{n+1}(t) = x0 + ∫_0^t σ(X_n(s)) dB_s` on one path.
fn picard_iterates(sigma: &LipschitzFn, x0: f64, dbs: &[f64], n_iter: usize) -> Vec<Vec<f64>> {
    let nodes = dbs.len() + 1;
    let mut its = Vec::with_capacity(n_iter + 1);
    its.push(vec![x0; nodes]);
    for n in 0..n_iter {
        let prev: &Vec<f64> = &its[n];
        let mut next = Vec::with_capacity(nodes);
        let mut acc = x0;
        next.push(acc);
        for (k, db) in dbs.iter().enumerate() {
            acc += sigma.eval(prev[k]) * db;
            next.push(acc);
        }
        its.push(next);
    }
    its
}

/// Picard iteration for `dX = σ(X) dB`, `X(0) = x0`, over `replicas` Brownian paths.
///
/// All iterates of a replica share one path. With `x0 = 0` this is the
/// iteration started from `X_0 ≡ 0`.
pub fn solve_sde_picard(
    sigma: &LipschitzFn,
    x0: f64,
    grid: &TimeGrid,
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
    let nodes = grid.n_steps() + 1;
    let run = |i: usize| {
        let mut rng = RngStream::replica(seed, i);
        let path = sample_bm_path(grid, &mut rng);
        picard_iterates(sigma, x0, &path.increments(), n_iter)
    };
    let summed = ordered_sum(
        replicas,
        n_iter * nodes,
        || (),
        |_, i, out| {
            let its = run(i);
            for n in 1..=n_iter {
                for k in 0..nodes {
                    let d = its[n][k] - its[n - 1][k];
                    out[(n - 1) * nodes + k] = d * d;
                }
            }
        },
    );
    Ok(PicardTrace { iterates: run(0), sup_diffs: sup_of_means(&summed, n_iter, replicas), replicas })
}

/// `exp(B_t - t/2)` pointwise.
pub fn geometric_bm(path: &Path) -> Path {
    let values = path
        .values
        .iter()
        .enumerate()
        .map(|(k, b)| (b - path.grid.node(k) / 2.0).exp())
        .collect();
    Path { grid: path.grid, values }
}

/// Driving process of a geometric chaos series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChaosKind {
    Bm,
    Fbm { hurst: f64 },
}

/// `1 + Σ_{1≤n≤N} s^n/n!·H_n(b/s)` with `s = t^{1/2}` (Brownian) or `t^H` (fBm).
///
/// Terms follow `c_{n+1} = (b·c_n - s²·c_{n-1})/(n+1)`, the Hermite recurrence
/// rescaled by `s^n/n!`, which stays finite as `s → 0`.
pub fn chaos_geometric(kind: ChaosKind, t: f64, b: f64, n_terms: usize) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    if n_terms > DEFAULT_HERMITE_MAX_ORDER {
        return capability(format!(
            "chaos order {n_terms} exceeds Hermite maximum {DEFAULT_HERMITE_MAX_ORDER}"
        ));
    }
    let s2 = match kind {
        ChaosKind::Bm => t,
        ChaosKind::Fbm { hurst } => {
            if !(hurst > 0.0 && hurst < 1.0) {
                return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
            }
            t.powf(2.0 * hurst)
        }
    };
    if n_terms == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = b;
    let mut sum = 1.0 + b;
    for n in 1..n_terms {
        let next = (b * cur - s2 * prev) / (n as f64 + 1.0);
        prev = cur;
        cur = next;
        sum += cur;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_and_zero() {
        let dbs = [0.1, -0.3, 0.25];
        assert!((ito_sum(&[1.0; 3], &dbs).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(ito_sum(&[0.0; 3], &dbs).unwrap(), 0.0);
        assert!(ito_sum(&[0.0; 2], &dbs).is_err());
    }

    #[test]
    fn constant_sigma_is_fixed_after_one_step() {
        let g = TimeGrid::new(1.0, 16).unwrap();
        let tr = solve_sde_picard(&LipschitzFn::constant(1.0), 0.0, &g, 3, 4, 5).unwrap();
        assert!(tr.diff(1) > 0.0);
        assert_eq!(tr.diff(2), 0.0);
        assert_eq!(tr.iterates[1], tr.iterates[3]);
        let mut rng = RngStream::replica(5, 0);
        let b = sample_bm_path(&g, &mut rng).values;
        assert!(tr.iterates[1].iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-14));
        let z = solve_sde_picard(&LipschitzFn::constant(0.0), 0.0, &g, 3, 4, 5).unwrap();
        assert!(z.iterates.iter().all(|it| it.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn chaos_limits() {
        assert!((chaos_geometric(ChaosKind::Bm, 1e-12, 0.0, 60).unwrap() - 1.0).abs() < 1e-11);
        assert!(chaos_geometric(ChaosKind::Bm, 1.0, 0.0, 201).is_err());
        let p = Path::zeros(TimeGrid::new(1.0, 2).unwrap());
        let g = geometric_bm(&p);
        assert_eq!(g.values[0], 1.0);
        assert!((g.values[2] - (-0.5f64).exp()).abs() < 1e-15);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, input, Result};
use crate::noise::{sample_white_noise_sheet, Field, FieldLayout, RngStream, SpaceTimeGrid};
use crate::parallel::ordered_sum;
use crate::solvers::HeatConvolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderAxis {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderOptions {
    pub p: f64,
    /// Lags in grid steps.
    pub lags: Vec<usize>,
    /// Leading fraction of the time record excluded from base points.
    pub burn_in: f64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self { p: 2.0, lags: vec![2, 4, 8, 16, 32], burn_in: 0.5 }
    }
}

/// Fitted exponent with the increment norms it was fitted on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub axis: HolderAxis,
    pub exponent: f64,
    pub lags: Vec<usize>,
    /// `(mean |Δ_h u|^p)^{1/p}` per lag.
    pub norms: Vec<f64>,
    pub replicas: usize,
}

/// Running sums of `|Δ_h u|^p` over an ensemble of fields.
#[derive(Debug, Clone)]
pub struct HolderAccumulator {
    axis: HolderAxis,
    opts: HolderOptions,
    sums: Vec<f64>,
    counts: Vec<usize>,
    replicas: usize,
}

impl HolderAccumulator {
    pub fn new(axis: HolderAxis, opts: HolderOptions) -> Result<Self> {
        if !(opts.p >= 1.0) {
            return domain(format!("p must be at least 1, got {}", opts.p));
        }
        if !(0.0..1.0).contains(&opts.burn_in) {
            return domain(format!("burn-in fraction must lie in [0, 1), got {}", opts.burn_in));
        }
        let n = opts.lags.len();
        Ok(Self { axis, opts, sums: vec![0.0; n], counts: vec![0; n], replicas: 0 })
    }

    pub fn add(&mut self, field: &Field) -> Result<()> {
        let counts = increment_sums(field, self.axis, &self.opts, &mut self.sums)?;
        self.counts = counts;
        self.replicas += 1;
        Ok(())
    }

    pub fn finish(&self) -> Result<HolderFit> {
        fit(self.axis, &self.opts, &self.sums, &self.counts, self.replicas)
    }
}

fn first_base(n_times: usize, burn_in: f64) -> usize {
    ((n_times - 1) as f64 * burn_in).ceil() as usize
}

/// Add `Σ |Δ_h u|^p` per lag into `sums`; returns the number of terms per lag.
fn increment_sums(field: &Field, axis: HolderAxis, opts: &HolderOptions, sums: &mut [f64]) -> Result<Vec<usize>> {
    let nt = field.n_times();
    let ns = field.n_space();
    let k0 = first_base(nt, opts.burn_in);
    let p = opts.p;
    let pow = |d: f64| if p == 2.0 { d * d } else { d.abs().powf(p) };
    let mut counts = vec![0; opts.lags.len()];
    match axis {
        HolderAxis::Time => {
            for (li, &h) in opts.lags.iter().enumerate() {
                if h == 0 || k0 + h >= nt {
                    continue;
                }
                let mut s = 0.0;
                for k in k0..nt - h {
                    let (a, b) = (field.slice(k), field.slice(k + h));
                    s += a.iter().zip(b).map(|(x, y)| pow(y - x)).sum::<f64>();
                }
                sums[li] += s;
                counts[li] = (nt - h - k0) * ns;
            }
        }
        HolderAxis::Space => {
            if field.grid.dim() != 1 {
                return capability("spatial Hölder fit is implemented for d = 1");
            }
            for (li, &h) in opts.lags.iter().enumerate() {
                if h == 0 || h >= ns {
                    continue;
                }
                let mut s = 0.0;
                for k in k0..nt {
                    let row = field.slice(k);
                    // periodic grid: wrap around
                    s += (0..ns).map(|i| pow(row[(i + h) % ns] - row[i])).sum::<f64>();
                }
                sums[li] += s;
                counts[li] = (nt - k0) * ns;
            }
        }
    }
    Ok(counts)
}

fn fit(axis: HolderAxis, opts: &HolderOptions, sums: &[f64], counts: &[usize], replicas: usize) -> Result<HolderFit> {
    let mut lags = Vec::new();
    let mut norms = Vec::new();
    for ((&h, &s), &c) in opts.lags.iter().zip(sums).zip(counts) {
        if c == 0 {
            continue;
        }
        let norm = (s / (c * replicas) as f64).powf(1.0 / opts.p);
        if !(norm > 0.0) {
            return input(format!("zero increments at lag {h}: exponent undefined"));
        }
        lags.push(h);
        norms.push(norm);
    }
    if lags.len() < 3 {
        return input(format!("need at least 3 usable lags, got {}", lags.len()));
    }
    let xs: Vec<f64> = lags.iter().map(|&h| (h as f64).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(HolderFit { axis, exponent: sxy / sxx, lags, norms, replicas })
}

/// Slope of `log ‖Δ_h u‖_p` against `log h` over an ensemble.
pub fn holder_estimate(fields: &[Field], axis: HolderAxis, opts: &HolderOptions) -> Result<HolderFit> {
    if fields.is_empty() {
        return input("empty ensemble");
    }
    let mut acc = HolderAccumulator::new(axis, opts.clone())?;
    for f in fields {
        acc.add(f)?;
    }
    acc.finish()
}

/// Time and space fits for the linear 1-d heat equation with white noise,
/// accumulated replica by replica.
pub fn linear_heat_holder(
    grid: &SpaceTimeGrid,
    replicas: usize,
    seed: u64,
    opts: &HolderOptions,
) -> Result<(HolderFit, HolderFit)> {
    if replicas == 0 {
        return input("at least one replica is required");
    }
    // option validation only
    HolderAccumulator::new(HolderAxis::Time, opts.clone())?;
    let conv = HeatConvolution::new(grid)?;
    let nl = opts.lags.len();
    let zero = Field::zeros(*grid, FieldLayout::Nodes);
    let mut probe = vec![0.0; nl];
    let time_counts = increment_sums(&zero, HolderAxis::Time, opts, &mut probe)?;
    let space_counts = increment_sums(&zero, HolderAxis::Space, opts, &mut probe)?;
    let sums = ordered_sum(
        replicas,
        2 * nl,
        || Field::zeros(*grid, FieldLayout::Nodes),
        |u, i, out| {
            let mut rng = RngStream::replica(seed, i);
            let noise = sample_white_noise_sheet(grid, &mut rng);
            conv.convolve(&noise.values, 0.0, &mut u.values).expect("shapes fixed by the grid");
            let (t, s) = out.split_at_mut(nl);
            increment_sums(u, HolderAxis::Time, opts, t).expect("validated options");
            increment_sums(u, HolderAxis::Space, opts, s).expect("validated options");
        },
    );
    Ok((
        fit(HolderAxis::Time, opts, &sums[..nl], &time_counts, replicas)?,
        fit(HolderAxis::Space, opts, &sums[nl..], &space_counts, replicas)?,
    ))
}

use serde::Serialize;
use serde_json::{json, Value};

use spde_lab::conditions::{
    check_dalang_riesz, check_fractional, dalang_gronwall_certificate, dalang_integral_numeric, fractional_kappa,
    general_joint_condition, predicted_holder, GProfile, HolderInput, SpectralMeasure,
};
use spde_lab::kernels::OperatorKind;
use spde_lab::moments::{
    estimate_moments, fk_second_moment, intermittency_exponent_predicted, linear_heat_holder, lyapunov_closed_form,
    sample_geometric_terminal, FkConfig, HolderOptions, LyapunovModel, MomentReport,
};
use spde_lab::noise::{
    fmt17, sample_bm_path, sample_fbm_path, sample_homogeneous_noise, sample_white_noise_sheet, Field, NoiseSpec,
    Path, RngStream, SpaceKernel, SpaceTimeGrid, TimeGrid, TimeKernel,
};
use spde_lab::parallel::map_replicas_with;
use spde_lab::solvers::{chaos_geometric, pam_chaos_series, ChaosKind, HeatConvolution, PamEuler};
use spde_lab::{Error, Result};

use crate::config::*;

/// Command output before the config/version envelope is added.
pub enum Artifact {
    /// CSV text with header row.
    Csv(String),
    Json(Value),
    /// A field written as SPDF1.
    Binary(Field),
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types always serialize")
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn execute(cfg: &RunConfig) -> Result<Artifact> {
    let json = cfg.format == Format::Json;
    match &cfg.command {
        Command::Simulate(a) => simulate(a, cfg.seed, json),
        Command::Chaos(a) => chaos(a, json),
        Command::Check(a) => check(a).map(Artifact::Json),
        Command::Certificate(a) => certificate(a, cfg.seed, json),
        Command::Fk(a) => {
            let est = fk_second_moment(&FkConfig {
                t: a.t,
                hurst: a.hurst,
                alpha: a.alpha,
                dim: a.dim,
                replicas: a.replicas,
                n_quad: a.n_quad,
                seed: cfg.seed,
                coupling: 1.0,
            })?;
            Ok(Artifact::Json(to_value(&est)))
        }
        Command::Holder(a) => holder(a, cfg.seed),
        Command::Noise(a) => noise(a, cfg.seed, cfg.format),
    }
}

/// Fills in defaults that depend on other parameters so the embedded config is complete.
pub fn resolve(cmd: &mut Command) {
    if let Command::Simulate(a) = cmd {
        if a.half_width.is_none() && matches!(a.model, SimModel::Pam | SimModel::Heat) {
            let t_max = a.t.iter().copied().fold(0.0, f64::max);
            a.half_width = Some(8.0 * t_max.sqrt());
        }
    }
}

fn spde_point_samples(a: &SimulateArgs, t: f64, seed: u64) -> Result<Vec<f64>> {
    let l = a.half_width.expect("resolved before execution");
    let grid = SpaceTimeGrid::line(t, a.steps, l, a.cells)?;
    let i0 = grid.nearest_cell(0.0);
    let nt = a.steps;
    match a.model {
        SimModel::Pam => {
            let solver = PamEuler::new(&grid)?;
            Ok(map_replicas_with(a.replicas, || (), |_, r| {
                let noise = sample_white_noise_sheet(&grid, &mut RngStream::replica(seed, r));
                let mut value = 0.0;
                solver.march(|k| noise.slice(k), |k, u: &[f64]| {
                    if k == nt {
                        value = u[i0];
                    }
                });
                value
            }))
        }
        SimModel::Heat => {
            let conv = HeatConvolution::new(&grid)?;
            let values = map_replicas_with(a.replicas, || (), |_, r| {
                let noise = sample_white_noise_sheet(&grid, &mut RngStream::replica(seed, r));
                conv.point(&noise.values, nt, i0)
            });
            values.into_iter().collect()
        }
        SimModel::Gbm | SimModel::Gfbm => unreachable!("SDE models are sampled from paths"),
    }
}

fn simulate(a: &SimulateArgs, seed: u64, json: bool) -> Result<Artifact> {
    let name = match a.model {
        SimModel::Gbm => "gbm",
        SimModel::Gfbm => "gfbm",
        SimModel::Pam => "pam",
        SimModel::Heat => "heat",
    };
    let mut rows = Vec::new();
    for (j, &t) in a.t.iter().enumerate() {
        let run_seed = RngStream::derive_seed(seed, j as u64);
        let samples = match a.model {
            SimModel::Gbm => sample_geometric_terminal(ChaosKind::Bm, &TimeGrid::new(t, a.steps)?, a.replicas, run_seed)?,
            SimModel::Gfbm => {
                let kind = ChaosKind::Fbm { hurst: a.hurst.expect("validated") };
                sample_geometric_terminal(kind, &TimeGrid::new(t, a.steps)?, a.replicas, run_seed)?
            }
            SimModel::Pam | SimModel::Heat => spde_point_samples(a, t, run_seed)?,
        };
        rows.extend(estimate_moments(name, t, &samples, &a.p)?);
    }
    let mut report = MomentReport::new(rows);
    let closed = match a.model {
        SimModel::Gbm => Some(LyapunovModel::Gbm),
        SimModel::Gfbm => Some(LyapunovModel::Gfbm { hurst: a.hurst.expect("validated") }),
        SimModel::Pam => Some(LyapunovModel::PamWhite),
        SimModel::Heat => None,
    };
    let mut distinct: Vec<f64> = a.t.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if let Some(model) = closed {
        if distinct.len() >= 4 {
            let p = a.p[0];
            let (lambda, kappa) = lyapunov_closed_form(model, p)?;
            report.closed_form_lambda = Some(lambda);
            // a fit can fail on noisy rows; the table is still reported
            if report.fit(p, kappa).is_err() {
                report.kappa = Some(kappa);
            }
        }
    }
    if json {
        Ok(Artifact::Json(to_value(&report)))
    } else {
        Ok(Artifact::Csv(report.to_csv()))
    }
}

fn chaos(a: &ChaosArgs, json: bool) -> Result<Artifact> {
    match a.model {
        ChaosModel::Pam => {
            let series = pam_chaos_series(a.t, a.n, a.tol)?;
            if json {
                return Ok(Artifact::Json(to_value(&series)));
            }
            let closed = series.closed_form.map(fmt17).unwrap_or_default();
            let rows = series.partial_sums.iter().enumerate().map(|(n, s)| {
                let v = if n == 0 { 1.0 } else { series.term_variances[n - 1] };
                vec![n.to_string(), fmt17(v), fmt17(*s), closed.clone()]
            });
            Ok(Artifact::Csv(csv_table("n,term_variance,partial_sum,closed_form", rows)))
        }
        ChaosModel::Bm | ChaosModel::Fbm => {
            let b = a.b.expect("validated");
            let n = a.n.expect("validated");
            let (kind, s2) = match a.model {
                ChaosModel::Bm => (ChaosKind::Bm, a.t),
                _ => {
                    let h = a.hurst.expect("validated");
                    (ChaosKind::Fbm { hurst: h }, a.t.powf(2.0 * h))
                }
            };
            let closed = (b - s2 / 2.0).exp();
            let sums = (0..=n).map(|k| chaos_geometric(kind, a.t, b, k)).collect::<Result<Vec<f64>>>()?;
            if json {
                return Ok(Artifact::Json(json!({ "partial_sums": sums, "closed_form": closed })));
            }
            let rows = sums.iter().enumerate().map(|(k, s)| vec![k.to_string(), fmt17(*s), fmt17(closed)]);
            Ok(Artifact::Csv(csv_table("n,partial_sum,closed_form", rows)))
        }
    }
}

fn check(a: &CheckArgs) -> Result<Value> {
    let op: OperatorKind = a.op.into();
    let d = a.dim;
    let space = SpectralMeasure::riesz(a.alpha, d);
    let (closed, numeric, joint) = match a.hurst {
        None => (
            check_dalang_riesz(a.alpha, d)?,
            dalang_integral_numeric(&space, 1.0, d)?,
            general_joint_condition(op, &SpectralMeasure::lebesgue(), &space, d)?,
        ),
        Some(h) => (
            check_fractional(op, a.alpha, h, d)?,
            dalang_integral_numeric(&space, fractional_kappa(op, h), d)?,
            general_joint_condition(op, &SpectralMeasure::fractional_time(h), &space, d)?,
        ),
    };
    let agree = closed.satisfied == numeric.satisfied && closed.satisfied == joint.satisfied;
    if !agree {
        return Err(Error::Numerical(format!(
            "closed-form, quadrature and joint verdicts disagree: {}, {}, {}",
            closed.satisfied, numeric.satisfied, joint.satisfied
        )));
    }
    let mut out = json!({
        "satisfied": closed.satisfied,
        "closed_form": closed,
        "quadrature": numeric,
        "joint": joint,
    });
    if let (Some(h), true) = (a.hurst, closed.satisfied) {
        if let Ok(rho) = intermittency_exponent_predicted(op, a.alpha, h) {
            out["growth_exponent"] = json!(rho);
        }
        if let Ok(o) = predicted_holder(op, HolderInput::RieszFractional { alpha: a.alpha, hurst: h, dim: d }) {
            out["holder"] = to_value(&o);
        }
    }
    Ok(out)
}

fn certificate(a: &CertificateArgs, seed: u64, json: bool) -> Result<Artifact> {
    let profile = match a.profile {
        Profile::Heat => GProfile::Heat1d,
        Profile::Wave => GProfile::Wave1d,
        Profile::Constant => GProfile::Constant { beta: a.beta.expect("validated") },
    };
    let cert = dalang_gronwall_certificate(profile, a.t, a.m, a.n_max, a.replicas, seed)?;
    if json {
        return Ok(Artifact::Json(to_value(&cert)));
    }
    let rows = (0..cert.a.len()).map(|n| {
        vec![
            n.to_string(),
            fmt17(cert.a[n]),
            fmt17(cert.a_stderr[n]),
            fmt17(cert.bounds[n]),
            fmt17(cert.root_sums_p1[n]),
            fmt17(cert.root_sums_p2[n]),
        ]
    });
    Ok(Artifact::Csv(csv_table("n,a,a_stderr,bound,root_sum_p1,root_sum_p2", rows)))
}

fn holder(a: &HolderArgs, seed: u64) -> Result<Artifact> {
    let grid = SpaceTimeGrid::line(a.t, a.steps, a.half_width, a.cells)?;
    let opts = HolderOptions { p: a.p, lags: a.lags.clone(), burn_in: a.burn_in };
    let (time, space) = linear_heat_holder(&grid, a.replicas, seed, &opts)?;
    let predicted = predicted_holder(OperatorKind::Heat, HolderInput::Eta { eta: 0.5 })?;
    Ok(Artifact::Json(json!({ "time": time, "space": space, "predicted": predicted })))
}

fn path_csv(path: &Path) -> String {
    let rows = path.grid.nodes().into_iter().zip(&path.values).map(|(t, v)| vec![fmt17(t), fmt17(*v)]);
    csv_table("t,value", rows)
}

fn noise(a: &NoiseArgs, seed: u64, format: Format) -> Result<Artifact> {
    let mut rng = RngStream::new(seed, a.stream);
    match a.kind {
        NoiseKind::Bm | NoiseKind::Fbm => {
            let grid = TimeGrid::new(a.t, a.steps)?;
            let path = match a.kind {
                NoiseKind::Bm => sample_bm_path(&grid, &mut rng),
                _ => sample_fbm_path(a.hurst.expect("validated"), &grid, &mut rng)?,
            };
            Ok(match format {
                Format::Json => Artifact::Json(json!({ "t": grid.nodes(), "values": path.values })),
                _ => Artifact::Csv(path_csv(&path)),
            })
        }
        NoiseKind::White | NoiseKind::Homogeneous => {
            let grid = SpaceTimeGrid::new(TimeGrid::new(a.t, a.steps)?, a.half_width, a.cells, a.dim)?;
            let field = if a.kind == NoiseKind::White {
                sample_white_noise_sheet(&grid, &mut rng)
            } else {
                let spec = NoiseSpec {
                    time: a.hurst.map_or(TimeKernel::White, |hurst| TimeKernel::Fractional { hurst }),
                    space: a.alpha.map_or(SpaceKernel::White, |alpha| SpaceKernel::Riesz { alpha }),
                };
                sample_homogeneous_noise(&grid, &spec, &mut rng)?
            };
            Ok(match format {
                Format::Binary => Artifact::Binary(field),
                _ => {
                    let mut buf = Vec::new();
                    field.write_csv(&mut buf)?;
                    Artifact::Csv(String::from_utf8(buf).expect("csv is ascii"))
                }
            })
        }
    }
}

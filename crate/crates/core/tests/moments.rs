use std::f64::consts::E;

use spde_lab::kernels::OperatorKind::{Heat, Wave};
use spde_lab::moments::{
    estimate_moments, fk_second_moment, holder_estimate, intermittency_check, intermittency_exponent_predicted,
    lyapunov_closed_form, lyapunov_fit, sample_geometric_terminal, FkConfig, HolderAxis, HolderOptions,
    LyapunovModel, MomentReport, MomentRow,
};
use spde_lab::noise::{Field, FieldLayout, SpaceTimeGrid, TimeGrid};
use spde_lab::solvers::ChaosKind;
use spde_lab::Error;

fn rows(ts: &[f64], p: f64, log_moment: impl Fn(f64) -> f64) -> Vec<MomentRow> {
    ts.iter()
        .map(|&t| MomentRow { model: "exact".into(), t, p, estimate: log_moment(t).exp(), stderr: 0.0, replicas: 1 })
        .collect()
}

#[test]
fn moment_estimates() {
    let r = estimate_moments("c", 1.0, &[-1.5; 40], &[1.0, 2.0, 3.5]).unwrap();
    for row in &r {
        assert!((row.estimate - 1.5f64.powf(row.p)).abs() < 1e-12);
        assert_eq!(row.stderr, 0.0);
        assert_eq!(row.replicas, 40);
    }
    assert!(matches!(estimate_moments("c", 1.0, &[], &[2.0]), Err(Error::Input(_))));
    assert!(matches!(estimate_moments("c", 1.0, &[1.0], &[0.5]), Err(Error::Domain(_))));
}

#[test]
fn geometric_second_moments() {
    let grid = TimeGrid::new(1.0, 8).unwrap();
    for kind in [ChaosKind::Bm, ChaosKind::Fbm { hurst: 0.75 }] {
        let xs = sample_geometric_terminal(kind, &grid, 100_000, 17).unwrap();
        let row = &estimate_moments("geo", 1.0, &xs, &[2.0]).unwrap()[0];
        assert!((row.estimate - E).abs() <= 3.0 * row.stderr, "{kind:?}: {} ± {}", row.estimate, row.stderr);
    }
}

#[test]
fn stderr_scales_with_replicas() {
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let se = |n: usize| {
        let xs = sample_geometric_terminal(ChaosKind::Bm, &grid, n, 18).unwrap();
        estimate_moments("gbm", 1.0, &xs, &[1.0]).unwrap()[0].stderr
    };
    let ratio = se(20_000) / se(40_000);
    assert!((ratio / 2f64.sqrt() - 1.0).abs() <= 0.2, "{ratio}");
}

#[test]
fn lyapunov_fits() {
    let ts = [0.5, 1.0, 1.5, 2.0, 3.0];
    assert!((lyapunov_fit(&rows(&ts, 3.0, |t| 3.0 * t), 3.0, 1.0).unwrap() - 3.0).abs() < 1e-10);
    assert!((lyapunov_fit(&rows(&ts, 2.0, |t| t.powf(1.5)), 2.0, 1.5).unwrap() - 1.0).abs() < 1e-10);
    assert!(lyapunov_fit(&rows(&ts, 2.0, |_| 0.7), 2.0, 1.0).unwrap().abs() < 1e-12);

    assert!(matches!(lyapunov_fit(&rows(&ts[..3], 2.0, |t| t), 2.0, 1.0), Err(Error::Input(_))));
    let mut bad = rows(&ts, 2.0, |t| t);
    bad[2].estimate = 0.0;
    assert!(matches!(lyapunov_fit(&bad, 2.0, 1.0), Err(Error::Input(_))));
    // noisy rows are dropped, leaving too few times
    let mut noisy = rows(&ts[..4], 2.0, |t| t);
    noisy[0].stderr = noisy[0].estimate;
    assert!(matches!(lyapunov_fit(&noisy, 2.0, 1.0), Err(Error::Input(_))));
}

#[test]
fn closed_form_exponents() {
    assert_eq!(lyapunov_closed_form(LyapunovModel::PamWhite, 2.0).unwrap(), (0.25, 1.0));
    assert_eq!(lyapunov_closed_form(LyapunovModel::PamWhite, 3.0).unwrap(), (1.0, 1.0));
    assert_eq!(lyapunov_closed_form(LyapunovModel::Gbm, 1.0).unwrap().0, 0.0);
    assert_eq!(lyapunov_closed_form(LyapunovModel::Gfbm { hurst: 0.75 }, 2.0).unwrap(), (1.0, 1.5));
    assert!(matches!("wave_pam".parse::<LyapunovModel>(), Err(Error::Capability(_))));
    assert_eq!("gfbm:0.6".parse::<LyapunovModel>().unwrap(), LyapunovModel::Gfbm { hurst: 0.6 });
}

#[test]
fn lyapunov_recovery_on_exact_curves() {
    let ts = [0.5, 1.0, 2.0, 3.0, 4.0];
    for model in [LyapunovModel::Gbm, LyapunovModel::PamWhite, LyapunovModel::Gfbm { hurst: 0.65 }] {
        for p in [2.0, 3.0, 4.0] {
            let (l, k) = lyapunov_closed_form(model, p).unwrap();
            let fit = lyapunov_fit(&rows(&ts, p, |t| 0.3 + l * t.powf(k)), p, k).unwrap();
            assert!((fit - l).abs() < 1e-8, "{model:?} p={p}");
        }
    }
}

#[test]
fn intermittency() {
    let ps = [2.0, 3.0, 4.0];
    let pam: Vec<f64> = ps.iter().map(|&p| lyapunov_closed_form(LyapunovModel::PamWhite, p).unwrap().0).collect();
    assert!(intermittency_check(&ps, &pam));
    let gbm: Vec<f64> = ps.iter().map(|&p| lyapunov_closed_form(LyapunovModel::Gbm, p).unwrap().0).collect();
    assert!(intermittency_check(&ps, &gbm));
    assert!(!intermittency_check(&ps, &[0.6, 0.9, 1.2]));
    assert!(!intermittency_check(&[2.0], &[1.0]));
}

#[test]
fn predicted_growth_exponents() {
    assert!((intermittency_exponent_predicted(Heat, 1.0, 0.75).unwrap() - 2.0).abs() < 1e-15);
    assert!((intermittency_exponent_predicted(Wave, 1.0, 0.75).unwrap() - 1.25).abs() < 1e-15);
    assert!((intermittency_exponent_predicted(Heat, 1e-9, 0.5 + 1e-9).unwrap() - 1.0).abs() < 1e-8);
    assert!(matches!(intermittency_exponent_predicted(Heat, 2.0, 0.75), Err(Error::Domain(_))));
    assert!(matches!(intermittency_exponent_predicted(Wave, 3.0, 0.75), Err(Error::Domain(_))));
    assert!(intermittency_exponent_predicted(Wave, 2.5, 0.75).is_ok());

    for op in [Heat, Wave] {
        let hs: Vec<f64> = (1..10).map(|k| 0.5 + k as f64 * 0.05).collect();
        let alphas: Vec<f64> = (1..10).map(|k| k as f64 * 0.19).collect();
        for &a in &alphas {
            let rho: Vec<f64> = hs.iter().map(|&h| intermittency_exponent_predicted(op, a, h).unwrap()).collect();
            assert!(rho.windows(2).all(|w| w[1] > w[0]));
        }
        for &h in &hs {
            let rho: Vec<f64> = alphas.iter().map(|&a| intermittency_exponent_predicted(op, a, h).unwrap()).collect();
            assert!(rho.windows(2).all(|w| w[1] > w[0]));
        }
    }
}

fn fk(t: f64) -> FkConfig {
    FkConfig { t, hurst: 0.7, alpha: 0.5, dim: 1, replicas: 2000, n_quad: 16, seed: 19, coupling: 1.0 }
}

#[test]
fn feynman_kac_limits() {
    let off = fk_second_moment(&FkConfig { coupling: 0.0, ..fk(1.0) }).unwrap();
    assert_eq!((off.estimate, off.stderr), (1.0, 0.0));

    let small = fk_second_moment(&fk(1e-4)).unwrap();
    assert!((small.estimate - 1.0).abs() < 1e-2, "{}", small.estimate);
    let larger = fk_second_moment(&fk(0.25)).unwrap();
    assert!(larger.estimate > small.estimate);
    assert!(larger.estimate >= 1.0 && larger.estimate_half_floor >= larger.estimate);
    assert_eq!(larger.delta_floor, 0.25 / 16.0 / 2.0);
    assert!(larger.verdict.satisfied);

    let in_2d = fk_second_moment(&FkConfig { dim: 2, alpha: 1.5, ..fk(0.25) }).unwrap();
    assert!(in_2d.estimate >= 1.0);
    assert!(matches!(
        fk_second_moment(&FkConfig { dim: 3, alpha: 2.5, hurst: 0.55, ..fk(0.25) }),
        Err(Error::Divergent(_))
    ));
}

#[test]
fn holder_edge_cases() {
    let grid = SpaceTimeGrid::line(1.0, 64, 1.0, 64).unwrap();
    let mut linear = Field::zeros(grid, FieldLayout::Nodes);
    for k in 0..=64 {
        let t = linear.time_coordinate(k);
        linear.slice_mut(k).iter_mut().for_each(|v| *v = t);
    }
    let fit = holder_estimate(&[linear], HolderAxis::Time, &HolderOptions::default()).unwrap();
    assert!((fit.exponent - 1.0).abs() < 1e-10);

    let mut constant = Field::zeros(grid, FieldLayout::Nodes);
    constant.values.iter_mut().for_each(|v| *v = 2.0);
    assert!(matches!(holder_estimate(&[constant.clone()], HolderAxis::Time, &HolderOptions::default()), Err(Error::Input(_))));
    assert!(matches!(holder_estimate(&[constant], HolderAxis::Space, &HolderOptions::default()), Err(Error::Input(_))));
    assert!(matches!(holder_estimate(&[], HolderAxis::Time, &HolderOptions::default()), Err(Error::Input(_))));

    // u(t, x) = sin(πx) on the periodic grid: smooth in space, exponent near 1
    let mut smooth = Field::zeros(grid, FieldLayout::Nodes);
    for k in 0..=64 {
        for i in 0..64 {
            smooth.slice_mut(k)[i] = (std::f64::consts::PI * grid.center(i)).sin();
        }
    }
    let opts = HolderOptions { lags: vec![1, 2, 4], ..HolderOptions::default() };
    let fit = holder_estimate(&[smooth], HolderAxis::Space, &opts).unwrap();
    assert!((fit.exponent - 1.0).abs() < 0.05, "{}", fit.exponent);
}

#[test]
fn report_serialization() {
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let xs = sample_geometric_terminal(ChaosKind::Bm, &grid, 1000, 20).unwrap();
    let mut report = MomentReport::new(estimate_moments("gbm", 1.0, &xs, &[1.0, 2.0]).unwrap());
    let csv = report.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "model,t,p,estimate,stderr,replicas");
    assert_eq!(lines.len(), 3);
    let cols: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(cols[0], "gbm");
    assert_eq!(cols[3].parse::<f64>().unwrap(), report.rows[1].estimate);
    assert_eq!(cols[5], "1000");

    report.rows = rows(&[1.0, 2.0, 3.0, 4.0], 2.0, |t| t);
    assert!((report.fit(2.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    let back: MomentReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.kappa, Some(1.0));
}

mod support;

use spde_lab::special::{gamma, hermite, log_gamma, std_normal_cdf, HermiteTable};
use spde_lab::Error;

#[test]
fn hermite_examples() {
    assert_eq!(hermite(2, 2.0).unwrap(), 3.0);
    assert_eq!(hermite(0, 7.3).unwrap(), 1.0);
    assert_eq!(hermite(4, 0.0).unwrap(), 3.0);
    for x in [-2.5, -0.3, 0.0, 1.7, 4.0] {
        assert_eq!(hermite(1, x).unwrap(), x);
        let h4 = x.powi(4) - 6.0 * x * x + 3.0;
        assert!((hermite(4, x).unwrap() - h4).abs() <= 1e-12 * h4.abs().max(1.0));
    }
}

#[test]
fn hermite_order_cap() {
    assert!(matches!(hermite(201, 0.5), Err(Error::Capability(_))));
    assert!(hermite(200, 0.5).is_ok());
    let small = HermiteTable::new(10);
    assert!(matches!(small.eval(11, 1.0), Err(Error::Capability(_))));
    assert_eq!(small.eval_all(3, 2.0).unwrap(), vec![1.0, 2.0, 3.0, 2.0]);
}

#[test]
fn hermite_scaled_form_for_large_values() {
    let table = HermiteTable::new(200);
    let v = table.eval_scaled(200, 500.0).unwrap();
    // leading term x^n dominates for |x| ≫ n
    let lead = 200.0 * 500f64.ln();
    assert!((v.ln_abs() - lead).abs() < 0.5, "{} vs {lead}", v.ln_abs());
    let moderate = table.eval_scaled(30, 2.0).unwrap();
    assert!((moderate.value() - hermite(30, 2.0).unwrap()).abs() <= 1e-9 * moderate.value().abs());
}

#[test]
fn normal_cdf_examples() {
    assert_eq!(std_normal_cdf(0.0), 0.5);
    assert!((std_normal_cdf(8.0) - 1.0).abs() <= 1e-12);
    assert!((std_normal_cdf(0.70710678) - 0.76024994).abs() <= 1e-8);
    assert!((std_normal_cdf(0.70710678) - support::phi_series(0.70710678)).abs() <= 1e-14);
}

#[test]
fn normal_cdf_against_series_oracle() {
    for k in -60..=60 {
        let x = k as f64 * 0.1;
        let (got, want) = (std_normal_cdf(x), support::phi_series(x));
        assert!((got - want).abs() <= 1e-12, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn log_gamma_examples() {
    assert!(log_gamma(1.0).unwrap().abs() <= 1e-14);
    assert!((log_gamma(0.5).unwrap() - std::f64::consts::PI.sqrt().ln()).abs() <= 1e-13);
    assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() <= 1e-13);
    let mut fact = 1.0;
    for n in 1..=20 {
        let g = gamma(n as f64).unwrap();
        assert!((g - fact).abs() <= 1e-12 * fact, "Γ({n})");
        fact *= n as f64;
    }
}

#[test]
fn log_gamma_domain() {
    for x in [0.0, -1.0, -0.5, f64::NAN] {
        assert!(matches!(log_gamma(x), Err(Error::Domain(_))), "x = {x}");
    }
}

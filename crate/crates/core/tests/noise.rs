mod support;

use spde_lab::noise::{
    cell_covariance, fbm_covariance, sample_bm_path, sample_fbm_path, sample_homogeneous_noise,
    sample_white_noise_sheet, Cell, FbmSampler, Field, FieldLayout, HomogeneousSampler, NoiseSpec, RngStream,
    SpaceTimeGrid, TimeGrid, TimeKernel,
};
use spde_lab::parallel::map_replicas;
use spde_lab::Error;

/// Mean of `xs` and its standard error.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn within(xs: &[f64], target: f64) -> bool {
    let (m, se) = mean_se(xs);
    (m - target).abs() <= 3.0 * se
}

#[test]
fn brownian_paths() {
    let one = TimeGrid::new(1.0, 1).unwrap();
    for seed in [0, 1, 99] {
        assert_eq!(sample_bm_path(&one, &mut RngStream::new(seed, 0)).values[0], 0.0);
    }

    let n = 1000;
    let g = TimeGrid::new(1.0, n).unwrap();
    let inc = sample_bm_path(&g, &mut RngStream::new(42, 0)).increments();
    let dt = g.dt();
    let var = inc.iter().map(|x| x * x).sum::<f64>() / n as f64;
    assert!((var - dt).abs() <= 3.0 * (2.0 / n as f64).sqrt() * dt, "{var} vs {dt}");

    let g = TimeGrid::new(1.0, 2).unwrap();
    let prods = map_replicas(10_000, |i| {
        let b = sample_bm_path(&g, &mut RngStream::replica(5, i));
        b.values[1] * b.values[2]
    });
    assert!(within(&prods, 0.5));
}

#[test]
fn white_noise_sheet() {
    let grid = SpaceTimeGrid::line(0.5, 4, 1.0, 8).unwrap();
    let sheets: Vec<Field> = map_replicas(10_000, |i| sample_white_noise_sheet(&grid, &mut RngStream::replica(8, i)));
    let cell = |c: usize| sheets.iter().map(|w| w.values[c]).collect::<Vec<_>>();
    let a = cell(3);
    let b = cell(17);
    assert!(within(&a, 0.0));
    assert!(within(&a.iter().map(|x| x * x).collect::<Vec<_>>(), grid.dt() * grid.dx()));
    assert!(within(&a.iter().zip(&b).map(|(x, y)| x * y).collect::<Vec<_>>(), 0.0));
    assert_eq!(sheets[0].values.len(), 4 * 8);
}

#[test]
fn fbm_covariance_examples() {
    for h in [0.3, 0.5, 0.75] {
        assert!((fbm_covariance(h, 1.7, 1.7).unwrap() - 1.7f64.powf(2.0 * h)).abs() < 1e-14);
    }
    assert!((fbm_covariance(0.75, 1.0, 2.0).unwrap() - 1.4142136).abs() < 1e-7);
    assert!((fbm_covariance(0.5, 0.3, 0.8).unwrap() - 0.3).abs() < 1e-15);
    for h in [0.0, 1.0, -0.2, 1.5] {
        assert!(matches!(fbm_covariance(h, 1.0, 1.0), Err(Error::Domain(_))));
    }
}

#[test]
fn fbm_paths() {
    let g = TimeGrid::new(1.0, 2).unwrap();
    let replicas = 10_000;

    let half = FbmSampler::new(0.5, &g).unwrap();
    let inc: Vec<f64> = map_replicas(replicas, |i| {
        let p = half.sample(&mut RngStream::replica(21, i));
        (p.values[2] - p.values[1]).powi(2)
    });
    assert!(within(&inc, g.dt()));

    let s = FbmSampler::new(0.75, &g).unwrap();
    let paths = map_replicas(replicas, |i| s.sample(&mut RngStream::replica(22, i)));
    let prods: Vec<f64> = paths.iter().map(|p| p.values[1] * p.values[2]).collect();
    assert!(within(&prods, fbm_covariance(0.75, 0.5, 1.0).unwrap()));
    let incs: Vec<f64> = paths.iter().map(|p| (p.values[2] - p.values[1]).powi(2)).collect();
    assert!(within(&incs, 0.5f64.powf(1.5)));
    assert!(paths.iter().all(|p| p.values[0] == 0.0));
}

#[test]
fn fbm_cholesky_cap() {
    let g = TimeGrid::new(1.0, 4096).unwrap();
    assert!(matches!(sample_fbm_path(0.7, &g, &mut RngStream::new(1, 0)), Err(Error::Capability(_))));
}

#[test]
fn fbm_self_similarity() {
    let h = 0.7;
    let a: f64 = 4.0;
    let g = TimeGrid::new(1.0, 4).unwrap();
    let s = FbmSampler::new(h, &g).unwrap();
    let paths = map_replicas(20_000, |i| s.sample(&mut RngStream::replica(23, i)));
    // B_{a t} with t = 1/4 against a^{2H} B_t; disjoint replica halves keep the two estimates independent
    let near: Vec<f64> = paths[..10_000].iter().map(|p| p.values[1].powi(2) * a.powf(2.0 * h)).collect();
    let far: Vec<f64> = paths[10_000..].iter().map(|p| p.values[4].powi(2)).collect();
    let (m1, s1) = mean_se(&near);
    let (m2, s2) = mean_se(&far);
    assert!((m1 - m2).abs() <= 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn fbm_quadratic_variation_trend() {
    let qv = |h: f64, n: usize| {
        let g = TimeGrid::new(1.0, n).unwrap();
        let s = FbmSampler::new(h, &g).unwrap();
        let sums = map_replicas(100, |i| s.sample(&mut RngStream::replica(24, i)).increments().iter().map(|d| d * d).sum::<f64>());
        sums.iter().sum::<f64>() / sums.len() as f64
    };
    let ns: Vec<usize> = (4..=10).map(|k| 1 << k).collect();
    let persistent: Vec<f64> = ns.iter().map(|&n| qv(0.75, n)).collect();
    let rough: Vec<f64> = ns.iter().map(|&n| qv(0.25, n)).collect();
    assert!(persistent.windows(2).all(|w| w[1] < w[0]), "{persistent:?}");
    assert!(rough.windows(2).all(|w| w[1] > w[0]), "{rough:?}");
}

#[test]
fn cell_covariance_examples() {
    let white = NoiseSpec::white();
    let c = Cell::new((0.0, 0.25), vec![(0.5, 0.75)]);
    assert!((cell_covariance(&c, &c, &white).unwrap() - 0.0625).abs() < 1e-15);

    // pure-time factor of [0,t]×[0,1] against [0,s]×[0,1]
    let frac = NoiseSpec { time: TimeKernel::Fractional { hurst: 0.7 }, space: spde_lab::noise::SpaceKernel::White };
    let (t, s) = (0.8, 1.3);
    let a = Cell::new((0.0, t), vec![(0.0, 1.0)]);
    let b = Cell::new((0.0, s), vec![(0.0, 1.0)]);
    assert!((cell_covariance(&a, &b, &frac).unwrap() - fbm_covariance(0.7, t, s).unwrap()).abs() < 1e-12);

    // Riesz, two unit intervals ten apart, against a midpoint-rule double integral
    let alpha = 0.5;
    let riesz = NoiseSpec { time: TimeKernel::White, space: spde_lab::noise::SpaceKernel::Riesz { alpha } };
    let a = Cell::new((0.0, 1.0), vec![(0.0, 1.0)]);
    let b = Cell::new((0.0, 1.0), vec![(10.0, 11.0)]);
    let n = 800;
    let h = 1.0 / n as f64;
    let mut oracle = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = 10.0 + (j as f64 + 0.5) * h;
            oracle += (y - x).powf(-alpha) * h * h;
        }
    }
    assert!((cell_covariance(&a, &b, &riesz).unwrap() - oracle).abs() < 1e-6);
}

#[test]
fn homogeneous_noise_law() {
    let grid = SpaceTimeGrid::line(1.0, 4, 1.0, 4).unwrap();
    let white = HomogeneousSampler::new(&grid, &NoiseSpec::white()).unwrap();
    let samples = map_replicas(10_000, |i| white.sample(&mut RngStream::replica(31, i)));
    let sq: Vec<f64> = samples.iter().map(|f| f.values[5].powi(2)).collect();
    assert!(within(&sq, grid.dt() * grid.dx()));

    let spec = NoiseSpec::fractional_riesz(0.7, 0.5);
    let colored = HomogeneousSampler::new(&grid, &spec).unwrap();
    let samples = map_replicas(10_000, |i| colored.sample(&mut RngStream::replica(32, i)));
    let nx = grid.n_cells();
    let (p, q) = ((0, 0), (1, 1));
    let prods: Vec<f64> = samples.iter().map(|f| f.values[p.0 * nx + p.1] * f.values[q.0 * nx + q.1]).collect();
    let target = cell_covariance(&grid.cell(p.0, p.1), &grid.cell(q.0, q.1), &spec).unwrap();
    assert!(within(&prods, target), "target {target}, got {:?}", mean_se(&prods));
    for c in 0..samples[0].values.len() {
        assert!(within(&samples.iter().map(|f| f.values[c]).collect::<Vec<_>>(), 0.0), "cell {c}");
    }
}

#[test]
fn reproducible_across_workers() {
    let grid = SpaceTimeGrid::line(0.5, 8, 1.0, 16).unwrap();
    let spec = NoiseSpec::fractional_riesz(0.8, 0.3);
    let (one, many) = support::under_threads(4, || {
        map_replicas(16, |i| sample_homogeneous_noise(&grid, &spec, &mut RngStream::replica(9, i)).unwrap().values)
    });
    assert_eq!(one, many);
    let again = sample_homogeneous_noise(&grid, &spec, &mut RngStream::replica(9, 3)).unwrap();
    assert_eq!(again.values, one[3]);
    assert_ne!(one[0], one[1]);
}

#[test]
fn field_containers() {
    let grid = SpaceTimeGrid::line(1.0, 3, 2.0, 4).unwrap();
    let f = sample_white_noise_sheet(&grid, &mut RngStream::new(4, 0));
    let mut bin = Vec::new();
    f.write_binary(&mut bin).unwrap();
    assert_eq!(&bin[..5], b"SPDF1");
    let back = Field::read_binary(bin.as_slice()).unwrap();
    assert_eq!(back.values, f.values);
    assert_eq!(back.layout, FieldLayout::Cells);

    let mut csv = Vec::new();
    f.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,value");
    assert_eq!(lines.len(), 1 + 3 * 4);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![1.0 / 6.0, -1.5, f.values[0]]);
}

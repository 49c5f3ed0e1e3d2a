use std::f64::consts::{PI, SQRT_2};

use conjprob::ball_geometry::{intersection_volume_mc, BallConfiguration, DomainSpec};
use conjprob::ec_heuristic::ec_prediction;
use conjprob::estimate::stream_rng;
use conjprob::mc_sim::{
    compare_asymptotic, estimate_conjunction_probability, estimate_pickands, sample_field,
    simulate_sup_min, FieldGrid, FieldModel, FieldSampler, PickandsPlan, SimulationPlan,
};
use conjprob::special_fn::gaussian_pdf;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Exact value of the discretised Pickands functional. Each
/// `t ↦ √2 t ξ - t² + E` is concave and positive at 0, so the grid maximum is
/// non-positive iff the value at the first grid point `a` is.
fn pickands_exact(n: usize, a: f64) -> f64 {
    let p1 = simpson(
        |z| gaussian_pdf(z) * (1.0 - (-(a * a - SQRT_2 * a * z)).exp()),
        -40.0,
        a / SQRT_2,
        200_000,
    );
    (1.0 - (1.0 - p1).powi(n as i32)) / a
}

fn interval_plan(n: usize, t: f64, u: f64, replicates: u64, seed: u64) -> SimulationPlan {
    SimulationPlan::new(n, DomainSpec::interval(t).unwrap(), 0.02, u, replicates, seed).unwrap()
}

struct Moments {
    n: f64,
    sx: Vec<f64>,
    sxx: Vec<f64>,
    sxy: f64,
    sxxyy: f64,
}

fn moments(sampler: &FieldSampler, draws: u64, seed: u64, pair: (usize, usize)) -> Moments {
    let len = sampler.len();
    let mut m = Moments { n: draws as f64, sx: vec![0.0; len], sxx: vec![0.0; len], sxy: 0.0, sxxyy: 0.0 };
    let mut rng = stream_rng(seed, 0);
    let mut x = vec![0.0; len];
    for _ in 0..draws {
        sampler.sample_into(&mut rng, &mut x);
        for ((sx, sxx), v) in m.sx.iter_mut().zip(&mut m.sxx).zip(&x) {
            *sx += v;
            *sxx += v * v;
        }
        let p = x[pair.0] * x[pair.1];
        m.sxy += p;
        m.sxxyy += p * p;
    }
    m
}

#[test]
fn field_marginals_are_standard_normal() {
    let model = FieldModel::squared_exponential(1).unwrap();
    let grid = FieldGrid::Cartesian(vec![(0..=40).map(|k| k as f64 * 0.1).collect()]);
    let sampler = FieldSampler::new(&model, &grid).unwrap();
    assert_eq!(sampler.method_name(), "dense");
    let draws = 100_000u64;
    let m = moments(&sampler, draws, 3, (0, 10));
    for i in 0..sampler.len() {
        assert!((sampler.implied_covariance(i, i) - 1.0).abs() <= 1e-9);
        let mean = m.sx[i] / m.n;
        let var = m.sxx[i] / m.n - mean * mean;
        // se of the mean is 1/√N, of the variance √(2/N)
        assert!(mean.abs() <= 4.0 / m.n.sqrt(), "point {i}: mean {mean}");
        assert!((var - 1.0).abs() <= 4.0 * (2.0 / m.n).sqrt(), "point {i}: var {var}");
    }
}

#[test]
fn single_point_is_standard_normal() {
    let model = FieldModel::squared_exponential(2).unwrap();
    let grid = FieldGrid::Points(vec![vec![0.3, -1.0]]);
    let sampler = FieldSampler::new(&model, &grid).unwrap();
    assert!((sampler.implied_covariance(0, 0) - 1.0).abs() <= 1e-9);
    let m = moments(&sampler, 100_000, 11, (0, 0));
    let var = m.sxx[0] / m.n - (m.sx[0] / m.n).powi(2);
    assert!((var - 1.0).abs() <= 4.0 * (2.0 / m.n).sqrt());
    let one = sample_field(&model, &grid, 4).unwrap();
    assert_eq!(one, sample_field(&model, &grid, 4).unwrap());
}

#[test]
fn correlation_at_lags_one_and_ten() {
    let model = FieldModel::squared_exponential(1).unwrap();
    for (lag, target) in [(1.0f64, (-0.5f64).exp()), (10.0, (-50.0f64).exp())] {
        let grid = FieldGrid::Points(vec![vec![0.0], vec![lag]]);
        let sampler = FieldSampler::new(&model, &grid).unwrap();
        assert!((sampler.implied_covariance(0, 1) - target).abs() < 1e-9);
        let m = moments(&sampler, 100_000, 21, (0, 1));
        let cov = m.sxy / m.n;
        let se = ((m.sxxyy / m.n - cov * cov) / m.n).sqrt();
        assert!((cov - target).abs() <= 4.0 * se, "lag {lag}: {cov} vs {target} (se {se})");
    }
}

#[test]
fn long_line_uses_spectral_synthesis() {
    let model = FieldModel::squared_exponential(1).unwrap();
    let grid = FieldGrid::Cartesian(vec![(0..3200).map(|k| k as f64 * 0.02).collect()]);
    let sampler = FieldSampler::new(&model, &grid).unwrap();
    assert_eq!(sampler.method_name(), "spectral");
    assert!((sampler.implied_covariance(0, 0) - 1.0).abs() <= 1e-6);
    assert!((sampler.implied_covariance(0, 50) - (-0.5f64).exp()).abs() <= 1e-6);
    // pooled over the line: variance and lag-one correlation
    let mut rng = stream_rng(8, 0);
    let (mut s2, mut s11, mut count, mut pairs) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..60 {
        let x = sampler.sample(&mut rng);
        s2 += x.iter().map(|v| v * v).sum::<f64>();
        count += x.len() as f64;
        s11 += x.iter().zip(&x[50..]).map(|(a, b)| a * b).sum::<f64>();
        pairs += (x.len() - 50) as f64;
    }
    assert!((s2 / count - 1.0).abs() < 0.05, "{}", s2 / count);
    assert!((s11 / pairs - (-0.5f64).exp()).abs() < 0.05, "{}", s11 / pairs);
}

#[test]
fn oversized_grids_are_rejected() {
    let model = FieldModel::squared_exponential(1).unwrap();
    let far = FieldGrid::Points(vec![vec![0.0], vec![150.0]]);
    assert!(FieldSampler::new(&model, &far).is_err());
    let many = FieldGrid::Points((0..3500).map(|k| vec![k as f64 * 0.01]).collect());
    assert!(FieldSampler::new(&model, &many).is_err());
}

#[test]
fn conjunction_examples() {
    let all = estimate_conjunction_probability(&interval_plan(1, 10.0, -10.0, 1000, 1), None).unwrap();
    assert_eq!(all.mean, 1.0);
    let one = estimate_conjunction_probability(&interval_plan(1, 10.0, 1.5, 5000, 2), None).unwrap();
    let two = estimate_conjunction_probability(&interval_plan(2, 10.0, 1.5, 5000, 2), None).unwrap();
    let se = (one.std_error.powi(2) + two.std_error.powi(2)).sqrt();
    assert!(two.mean + 4.0 * se < one.mean, "{one:?} {two:?}");
}

#[test]
fn single_field_agrees_with_ec_prediction() {
    let plan = interval_plan(1, 10.0, 3.0, 100_000, 7);
    let est = estimate_conjunction_probability(&plan, None).unwrap();
    let ec = ec_prediction(1, 1, 3.0, &DomainSpec::interval(10.0).unwrap()).unwrap();
    assert!((est.mean - ec).abs() <= 4.0 * est.std_error, "{est:?} vs {ec}");
}

#[test]
fn comparison_table() {
    let plan = interval_plan(2, 10.0, 2.0, 2000, 5);
    assert!(compare_asymptotic(&plan, &[], None).unwrap().is_empty());
    let rows = compare_asymptotic(&plan, &[1.5, 2.0], None).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].u, 2.0);
    let direct = estimate_conjunction_probability(&plan, None).unwrap();
    assert_eq!(rows[1].empirical, direct.mean);
    assert!((rows[1].ratio - rows[1].empirical / rows[1].asymptotic).abs() < 1e-15);
    assert!(rows[0].empirical >= rows[1].empirical);
}

#[test]
fn pickands_matches_exact_discretisation() {
    for n in 1..=3 {
        let plan = PickandsPlan::new(n, 0.02, 12.0, 1_000_000, 13).unwrap();
        let est = estimate_pickands(&plan, None);
        let exact = pickands_exact(n, 0.02);
        assert!((est.mean - exact).abs() <= 4.0 * est.std_error, "n={n}: {est:?} vs {exact}");
    }
}

#[test]
fn pickands_discretisation_limit() {
    // the a ↓ 0 limit of the exact discretised value is n/√π
    for n in 1..=3 {
        let limit = n as f64 / PI.sqrt();
        assert!((pickands_exact(n, 1e-4) - limit).abs() < 1e-3 * limit);
    }
}

#[test]
fn pickands_properties() {
    let est = |n: usize, a: f64, t_max: f64| {
        estimate_pickands(&PickandsPlan::new(n, a, t_max, 1_000_000, 29).unwrap(), None)
    };
    let (h1, h2, h3) = (est(1, 0.02, 12.0), est(2, 0.02, 12.0), est(3, 0.02, 12.0));
    assert!(h1.mean < h2.mean && h2.mean < h3.mean);
    let longer = est(2, 0.02, 16.0);
    assert!((longer.mean - h2.mean).abs() < h2.std_error);
    let finer = est(2, 0.01, 12.0);
    let se = (finer.std_error.powi(2) + h2.std_error.powi(2)).sqrt();
    assert!((finer.mean - h2.mean).abs() < 2.0 * se, "{finer:?} {h2:?}");
    assert!(PickandsPlan::new(1, 0.2, 12.0, 10, 0).is_err());
    assert!(PickandsPlan::new(1, 0.02, 5.0, 10, 0).is_err());
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let plan = interval_plan(2, 5.0, 1.0, 1500, 99);
    let a = simulate_sup_min(&plan, Some(1)).unwrap();
    let b = simulate_sup_min(&plan, Some(3)).unwrap();
    assert_eq!(a, b);
    let p = PickandsPlan::new(2, 0.02, 12.0, 50_000, 3).unwrap();
    assert_eq!(estimate_pickands(&p, Some(1)), estimate_pickands(&p, Some(4)));
    let c = BallConfiguration::new(2, vec![1.0, 0.7, 1.2]).unwrap();
    assert_eq!(
        intersection_volume_mc(&c, 50_000, 8, Some(1)).unwrap(),
        intersection_volume_mc(&c, 50_000, 8, Some(2)).unwrap()
    );
    let other_seed = intersection_volume_mc(&c, 50_000, 9, Some(1)).unwrap();
    assert_ne!(other_seed.mean, intersection_volume_mc(&c, 50_000, 8, Some(1)).unwrap().mean);
}

#[test]
fn plan_validation() {
    let dom = DomainSpec::interval(10.0).unwrap();
    assert!(SimulationPlan::new(1, dom.clone(), 0.2, 1.0, 1000, 0).is_err());
    assert!(SimulationPlan::new(1, dom.clone(), 0.02, 1.0, 999, 0).is_err());
    assert!(SimulationPlan::new(0, dom, 0.02, 1.0, 1000, 0).is_err());
    assert!(SimulationPlan::new(1, DomainSpec::ball(2, 1.0).unwrap(), 0.02, 1.0, 1000, 0).is_err());
}

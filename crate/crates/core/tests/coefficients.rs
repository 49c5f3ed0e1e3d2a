use std::f64::consts::PI;

use conjprob::asymptotics::{
    conjunction_probability_asymptotic, proposition1_coefficient, theorem1_coefficient,
};
use conjprob::ball_geometry::{intersection_volume_polynomial, DomainSpec, VolumePolynomial};
use conjprob::ec_heuristic::{
    b_constants, ec_densities, ec_prediction, ec_volume_term_coefficient, identity_check, RMatrix,
};
use conjprob::special_fn::{gaussian_pdf, gaussian_tail, hermite, log_gamma};
use conjprob::Error;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gamma(x: f64) -> f64 {
    log_gamma(x).unwrap().exp()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn leading_constant_special_cases() {
    for n in 1..=10 {
        let c = theorem1_coefficient(n, 1).unwrap();
        assert!(rel(c.leading_constant, n as f64 / (2.0 * PI).sqrt()) < 1e-11);
        assert_eq!((c.power_of_u, c.phi_power), (1 - n as i64, n));
        let nf = n as f64;
        let two = theorem1_coefficient(n, 2).unwrap().leading_constant;
        assert!(rel(two, (nf + nf * (nf - 1.0) * PI / 4.0) / (2.0 * PI)) < 1e-11);
    }
    for d in 1..=12usize {
        let df = d as f64;
        let sum: f64 = (0..=d)
            .map(|j| binom(d, j) * gamma(1.0 + j as f64 / 2.0) * gamma(1.0 + (df - j as f64) / 2.0))
            .sum();
        let expected = sum / ((2.0 * PI).powf(df / 2.0) * gamma(1.0 + df / 2.0));
        assert!(rel(theorem1_coefficient(2, d).unwrap().leading_constant, expected) < 1e-11);
        let single = theorem1_coefficient(1, d).unwrap().leading_constant;
        assert!(rel(single, (2.0 * PI).powf(-df / 2.0)) < 1e-12);
    }
    assert!((theorem1_coefficient(2, 1).unwrap().leading_constant - 0.797_884_560_8).abs() < 1e-10);
    assert!((theorem1_coefficient(2, 2).unwrap().leading_constant - 0.568_310).abs() < 1e-6);
}

#[test]
fn leading_constant_errors() {
    assert!(matches!(theorem1_coefficient(9, 8), Err(Error::Size(_))));
    assert!(theorem1_coefficient(0, 3).is_err());
    assert!(theorem1_coefficient(8, 8).unwrap().leading_constant > 0.0);
}

#[test]
fn general_engine_examples() {
    let p = intersection_volume_polynomial(2, 1).unwrap();
    assert!(rel(proposition1_coefficient(&p, 2, 1).unwrap().leading_constant, 2.0 / (2.0 * PI).sqrt()) < 1e-12);
    let p = intersection_volume_polynomial(3, 2).unwrap();
    let c = proposition1_coefficient(&p, 3, 2).unwrap();
    assert!(rel(c.leading_constant, (3.0 + 1.5 * PI) / (2.0 * PI)) < 1e-12);
    assert_eq!(c.power_of_u, 2 - 3);
    for d in 1..=5 {
        let single = VolumePolynomial::from_terms(1, d, vec![(vec![0], 1.0)]).unwrap();
        let c = proposition1_coefficient(&single, 1, d).unwrap();
        assert!(rel(c.leading_constant, (2.0 * PI).powf(-(d as f64) / 2.0)) < 1e-12);
    }
    let mixed = VolumePolynomial::from_terms(2, 1, vec![(vec![1, 0], 1.0), (vec![1, 1], 1.0)]).unwrap();
    assert!(matches!(proposition1_coefficient(&mixed, 2, 1), Err(Error::Inhomogeneous { .. })));
}

#[test]
fn routes_agree() {
    for n in 1..=6 {
        for d in 1..=8 {
            let direct = theorem1_coefficient(n, d).unwrap().leading_constant;
            let poly = intersection_volume_polynomial(n, d).unwrap();
            let engine = proposition1_coefficient(&poly, n, d).unwrap();
            assert!(rel(engine.leading_constant, direct) < 1e-11, "n={n} d={d}");
            assert_eq!(engine.power_of_u, d as i64 - n as i64);
        }
    }
}

#[test]
fn asymptotic_probability_examples() {
    let phi3 = gaussian_pdf(3.0);
    let p = conjunction_probability_asymptotic(2, 1, 3.0, 10.0).unwrap();
    assert!(rel(p, phi3 * phi3 / 3.0 * 10.0 * 2.0 / (2.0 * PI).sqrt()) < 1e-12);
    assert!((p - 5.224e-5).abs() < 1e-8);
    let p1 = conjunction_probability_asymptotic(1, 1, 3.0, 10.0).unwrap();
    assert!((p1 - 0.017_680).abs() < 1e-6);
    assert!(rel(p1, ec_densities(1, 3.0).rho[1] * 10.0) < 1e-12);
    let p20 = conjunction_probability_asymptotic(2, 1, 2.5, 20.0).unwrap();
    assert!((p20 - 1.961e-3).abs() < 1e-6);
    for (n, d) in [(1, 1), (2, 2), (3, 3)] {
        let a = conjunction_probability_asymptotic(n, d, 2.0, 3.0).unwrap();
        let b = conjunction_probability_asymptotic(n, d, 2.0, 6.0).unwrap();
        assert!(rel(b, 2.0 * a) < 1e-14);
    }
    assert!(conjunction_probability_asymptotic(2, 1, 0.0, 1.0).is_err());
}

#[test]
fn ec_densities_by_definition() {
    for d in 0..=6 {
        let e = ec_densities(d, 2.3);
        assert_eq!(e.rho.len(), d + 1);
        assert_eq!(e.rho[0], gaussian_tail(2.3));
        for i in 1..=d {
            let def = (2.0 * PI).powf(-(i as f64 + 1.0) / 2.0) * hermite(i - 1, 2.3) * (-2.3f64 * 2.3 / 2.0).exp();
            assert!(rel(e.rho[i], def) < 1e-13);
        }
    }
    let b = b_constants(3);
    assert_eq!(b[0], 1.0);
    assert!(rel(b[1], 1.0 / PI.sqrt()) < 1e-13 && rel(b[2], 0.5) < 1e-13);
}

/// Full dense matrix power, independent of the library's triangular product.
fn dense_prediction(n: usize, d: usize, u: f64, mu: &[f64]) -> f64 {
    let rho = ec_densities(d, u).rho;
    let b = b_constants(d);
    let r: Vec<Vec<f64>> = (0..=d)
        .map(|i| (0..=d).map(|j| if j >= i { rho[j - i] / b[j - i] } else { 0.0 }).collect())
        .collect();
    let mut p: Vec<Vec<f64>> = (0..=d).map(|i| (0..=d).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..n {
        p = (0..=d)
            .map(|i| (0..=d).map(|j| (0..=d).map(|k| p[i][k] * r[k][j]).sum()).collect())
            .collect();
    }
    (0..=d).map(|j| p[0][j] * mu[j] * b[j]).sum()
}

#[test]
fn prediction_matches_dense_power() {
    for (n, sides) in [(1, vec![10.0]), (2, vec![3.0, 4.0]), (4, vec![1.0, 2.0, 3.0]), (3, vec![5.0])] {
        let dom = if sides.len() == 1 { DomainSpec::interval(sides[0]) } else { DomainSpec::cuboid(sides.clone()) }
            .unwrap();
        for &u in &[1.0, 2.5, 4.0] {
            let got = ec_prediction(n, sides.len(), u, &dom).unwrap();
            let want = dense_prediction(n, sides.len(), u, &dom.minkowski);
            assert!(rel(got, want) < 1e-13, "n={n} {sides:?} u={u}");
        }
    }
}

#[test]
fn prediction_examples() {
    let dom = DomainSpec::interval(10.0).unwrap();
    assert!((ec_prediction(1, 1, 3.0, &dom).unwrap() - 0.019_030).abs() < 1e-6);
    for &t in &[1.0, 7.5, 20.0] {
        for &u in &[1.5, 3.0] {
            let dom = DomainSpec::interval(t).unwrap();
            let q = gaussian_tail(u);
            let want = q * q + 2.0 * q * gaussian_pdf(u) * t / (2.0 * PI).sqrt();
            assert!(rel(ec_prediction(2, 1, u, &dom).unwrap(), want) < 1e-13);
        }
    }
    let ball = DomainSpec::ball(2, 1.5).unwrap();
    let e = ec_densities(2, 2.0).rho;
    let sum: f64 = e.iter().zip(&ball.minkowski).map(|(r, m)| r * m).sum();
    assert!(rel(ec_prediction(1, 2, 2.0, &ball).unwrap(), sum) < 1e-14);
    assert!(ec_prediction(1, 3, 2.0, &ball).is_err());
}

#[test]
fn matrix_structure() {
    let r = RMatrix::new(3, 2.0);
    let p = r.pow(5);
    let rho0 = gaussian_tail(2.0);
    for i in 0..=3 {
        assert_eq!(p.entries[i][i], rho0 * rho0 * rho0 * rho0 * rho0);
        for j in 0..i {
            assert_eq!(p.entries[i][j], 0.0);
        }
        for j in i..=3 {
            assert_eq!(p.entries[i][j], p.entries[0][j - i]);
        }
    }
}

#[test]
fn volume_term_and_identity() {
    for d in 1..=8 {
        assert!(rel(ec_volume_term_coefficient(1, d).unwrap(), (2.0 * PI).powf(-(d as f64) / 2.0)) < 1e-13);
    }
    assert!(rel(ec_volume_term_coefficient(2, 2).unwrap(), (2.0 + PI / 2.0) / (2.0 * PI)) < 1e-12);
    assert!(rel(ec_volume_term_coefficient(3, 1).unwrap(), 3.0 / (2.0 * PI).sqrt()) < 1e-12);
    for n in 1..=6 {
        for d in 1..=8 {
            assert!(identity_check(n, d).unwrap() <= 1e-10, "n={n} d={d}");
        }
    }
    assert!(identity_check(5, 6).unwrap() <= 1e-10);
}

/// The volume coefficient is the `u^{d-n} φ^n` coefficient of the EC
/// prediction: the prediction over a large box, divided by the leading-order
/// function, approaches it as `u` grows.
#[test]
fn volume_term_is_leading_order_of_prediction() {
    let (n, d) = (2usize, 2usize);
    let side = 1e4;
    let dom = DomainSpec::cuboid(vec![side; d]).unwrap();
    let coeff = ec_volume_term_coefficient(n, d).unwrap();
    let ratio = |u: f64| {
        ec_prediction(n, d, u, &dom).unwrap()
            / (u.powi(d as i32 - n as i32) * gaussian_pdf(u).powi(n as i32) * side.powi(d as i32) * coeff)
    };
    let (r1, r2) = (ratio(5.0), ratio(20.0));
    assert!((r2 - 1.0).abs() < (r1 - 1.0).abs());
    assert!((r2 - 1.0).abs() < 1e-2);
}

proptest! {
    #[test]
    fn single_field_reduction(u in 1.0f64..5.0, sides in prop::collection::vec(0.1f64..20.0, 1..=3)) {
        let d = sides.len();
        let dom = if d == 1 { DomainSpec::interval(sides[0]) } else { DomainSpec::cuboid(sides) }.unwrap();
        let rho = ec_densities(d, u).rho;
        let direct: f64 = rho.iter().zip(&dom.minkowski).map(|(r, m)| r * m).sum();
        prop_assert!(rel(ec_prediction(1, d, u, &dom).unwrap(), direct) <= 1e-14);
    }

    #[test]
    fn leading_constant_positive(n in 1usize..=8, d in 1usize..=8) {
        prop_assert!(theorem1_coefficient(n, d).unwrap().leading_constant > 0.0);
    }
}

use std::f64::consts::PI;

use dirichlet_strips::arith::primes_up_to;
use dirichlet_strips::characters::build_character_group;
use dirichlet_strips::dseries::algebra::{convolve, inverse, unit};
use dirichlet_strips::dseries::{
    evaluate, evaluate_derivative, log_local_factor, orthogonality_report, parse_series, Precision, Series, SeriesSpec,
};
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn chi1() -> SeriesSpec {
    parse_series("L(mod=5,value(2)=i)").unwrap()
}

fn chi4() -> SeriesSpec {
    parse_series("L(mod=4,primitive)").unwrap()
}

// Catalan's constant from its alternating series, summed pairwise.
fn catalan_oracle() -> f64 {
    let mut s = 0.0;
    let mut k = 400_000i64;
    while k >= 0 {
        let t = 1.0 / ((2 * k + 1) as f64).powi(2);
        s += if k % 2 == 0 { t } else { -t };
        k -= 1;
    }
    s
}

#[test]
fn catalan_constant() {
    let r = evaluate(&chi4(), c(2.0, 0.0), 1e-10).unwrap();
    assert!((r.value.re - catalan_oracle()).abs() < 1e-10, "{r:?}");
    assert!((r.value.re - 0.915_965_594_2).abs() < 1e-10);
    assert!(r.value.im.abs() < 1e-15);
}

#[test]
fn zeta_derivative_at_two() {
    // zeta(2) (gamma + log 2 pi - 12 log A), A the Glaisher-Kinkelin constant
    let gamma = 0.577_215_664_901_532_9;
    let log_a = 0.248_754_477_033_784_3;
    let oracle = PI * PI / 6.0 * (gamma + (2.0 * PI).ln() - 12.0 * log_a);
    let r = evaluate_derivative(&SeriesSpec::Zeta, c(2.0, 0.0), 1e-10).unwrap();
    assert!((r.value.re - oracle).abs() < 1e-8, "{} vs {oracle}", r.value.re);
    assert!((r.value.re + 0.937_548_254_3).abs() < 1e-8);

    let h = 1e-4;
    let zp = evaluate(&SeriesSpec::Zeta, c(2.0 + h, 0.0), 1e-13).unwrap().value;
    let zm = evaluate(&SeriesSpec::Zeta, c(2.0 - h, 0.0), 1e-13).unwrap().value;
    assert!((r.value - (zp - zm) / (2.0 * h)).norm() < 1e-6);
}

#[test]
fn derivative_of_constant_series_vanishes() {
    let e = SeriesSpec::Explicit(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    for s in [c(2.0, 0.0), c(1.5, 30.0)] {
        assert_eq!(evaluate_derivative(&e, s, 1e-10).unwrap().value, c(0.0, 0.0));
    }
}

#[test]
fn derivative_matches_finite_difference_off_axis() {
    let s = Series::new(chi1()).unwrap();
    let z = c(1.7, 123.4);
    let h = 1e-5;
    let d = s.evaluate_derivative(z, Precision::Eps(1e-12)).unwrap();
    let fp = s.evaluate(z + h, Precision::Eps(1e-13)).unwrap().value;
    let fm = s.evaluate(z - h, Precision::Eps(1e-13)).unwrap().value;
    assert!((d.value - (fp - fm) / (2.0 * h)).norm() < 1e-6);
}

#[test]
fn near_one_caps_plain_truncation_but_em_evaluates() {
    let t = dirichlet_strips::dseries::truncation_length(&SeriesSpec::Zeta, 1.01, 1e-8).unwrap();
    assert!(t.capped);
    let r = evaluate(&SeriesSpec::Zeta, c(1.01, 0.0), 1e-8).unwrap();
    // zeta(1 + x) = 1/x + gamma + O(x)
    assert!((r.value.re - (100.0 + 0.577_215_664_9)).abs() < 1e-2);
    assert!(!r.warning);
}

#[test]
fn grid_matches_direct_evaluation() {
    let s = Series::new(SeriesSpec::Zeta).unwrap();
    let g = s.evaluate_grid(2.0, 0.0, 100.0, 0.01, Precision::Eps(1e-10)).unwrap();
    assert_eq!(g.values.len(), 10_001);
    for k in (0..g.values.len()).step_by(100) {
        let t = k as f64 * 0.01;
        let d = s.evaluate(c(2.0, t), Precision::Eps(1e-12)).unwrap().value;
        assert!((g.values[k] - d).norm() < 1e-9, "t = {t}");
    }
}

#[test]
fn grid_is_independent_of_partitioning() {
    let s = Series::new(chi1()).unwrap();
    let whole = s.evaluate_grid(3.0, 0.0, 40.0, 0.01, Precision::Eps(1e-10)).unwrap();
    // The second half on its own, starting at an unaligned index.
    let k0 = 1500;
    let part = s.evaluate_grid(3.0, k0 as f64 * 0.01, 40.0, 0.01, Precision::Eps(1e-10)).unwrap();
    let mut worst = 0.0f64;
    for (j, z) in part.values.iter().enumerate() {
        worst = worst.max((z - whole.values[k0 + j]).norm());
    }
    assert!(worst < 1e-12);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let again = pool.install(|| s.evaluate_grid(3.0, 0.0, 40.0, 0.01, Precision::Eps(1e-10)).unwrap());
    assert_eq!(whole, again);
}

#[test]
fn linearity_and_conjugation() {
    let a = c(0.3, -1.2);
    let b = c(-2.0, 0.5);
    let lin = SeriesSpec::linear(vec![(a, chi1()), (b, SeriesSpec::Zeta)]);
    for s in [c(1.5, 0.0), c(2.5, 17.0), c(8.0, -3.0)] {
        let l = evaluate(&lin, s, 1e-11).unwrap();
        let f1 = evaluate(&chi1(), s, 1e-11).unwrap();
        let f2 = evaluate(&SeriesSpec::Zeta, s, 1e-11).unwrap();
        let tol = l.tail_bound + a.norm() * f1.tail_bound + b.norm() * f2.tail_bound + 1e-13;
        assert!((l.value - (a * f1.value + b * f2.value)).norm() <= tol);
    }
    // real coefficients: F(conj s) = conj F(s)
    let real = parse_series("lin(0.5*L(mod=5,value(2)=i) + 0.5*conj(L(mod=5,value(2)=i)) + 2*L(mod=4,primitive))").unwrap();
    let s = c(1.8, 42.0);
    let up = evaluate(&real, s, 1e-10).unwrap().value;
    let down = evaluate(&real, s.conj(), 1e-10).unwrap().value;
    assert!((up - down.conj()).norm() <= 1e-12);
}

#[test]
fn euler_product_consistency() {
    let s = c(3.0, 0.0);
    let ps = primes_up_to(10_000);
    for spec in [SeriesSpec::Zeta, chi1()] {
        let log_sum: Complex64 = ps.iter().map(|&p| log_local_factor(&spec, p, s, 40).unwrap()).sum();
        let direct = evaluate(&spec, s, 1e-12).unwrap().value;
        assert!((log_sum.exp() - direct).norm() < 1e-6);
    }
}

#[test]
fn orthogonality_of_mod5_characters() {
    let grid: Vec<f64> = (4..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let diag = orthogonality_report(&chi1(), &chi1(), &grid).unwrap();
    assert!((0.8..=1.2).contains(&diag.fitted_slope), "{}", diag.fitted_slope);
    let off = orthogonality_report(&chi1(), &chi1().conj(), &grid).unwrap();
    assert!(off.partial_sums.iter().all(|z| z.norm() <= 3.0));
}

#[test]
fn every_character_series_is_nonvanishing_on_scanned_lines() {
    for chi in build_character_group(7) {
        let s = Series::new(SeriesSpec::character(chi)).unwrap();
        let row = s.row_min(1.5, 0.0, 60.0, 0.05, Precision::Eps(1e-10)).unwrap();
        assert!(row.min_modulus > row.tail_bound);
    }
}

fn rational_vec() -> impl Strategy<Value = Vec<Ratio<i64>>> {
    (1i64..=5, prop::collection::vec(-3i64..=3, 1..40)).prop_map(|(lead, rest)| {
        let mut v = vec![Ratio::from_integer(lead)];
        v.extend(rest.into_iter().map(Ratio::from_integer));
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_round_trip_is_exact(a in rational_vec(), n in 1usize..=200) {
        let inv = inverse(&a, n).unwrap();
        let id = convolve(&a, &inv, n);
        prop_assert_eq!(id, unit::<Ratio<i64>>(n));
    }

    #[test]
    fn complex_round_trip(re in prop::collection::vec(-2.0f64..2.0, 1..30), im in prop::collection::vec(-2.0f64..2.0, 1..30), n in 1usize..=200) {
        let mut a: Vec<Complex64> = re.iter().zip(im.iter().chain(std::iter::repeat(&0.0))).map(|(&x, &y)| c(x, y)).collect();
        a[0] = c(1.0, 0.5);
        let spec = SeriesSpec::convolution(SeriesSpec::Explicit(a.clone()), SeriesSpec::inverse(SeriesSpec::Explicit(a)));
        let id = spec.coefficients(n).unwrap();
        prop_assert!((id[0] - c(1.0, 0.0)).norm() < 1e-10);
        for z in &id[1..] {
            prop_assert!(z.norm() < 1e-10);
        }
    }

    #[test]
    fn euler_kinds_round_trip(idx in 0usize..4, n in 1usize..=200) {
        let chi = build_character_group(5).swap_remove(idx);
        let l = SeriesSpec::character(chi);
        let id = SeriesSpec::convolution(l.clone(), SeriesSpec::inverse(l)).coefficients(n).unwrap();
        prop_assert_eq!(id[0], c(1.0, 0.0));
        prop_assert!(id[1..].iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn tail_bound_is_monotone_in_terms(sigma in 1.2f64..10.0, a in 1usize..500, b in 1usize..500) {
        let s = Series::new(SeriesSpec::Zeta).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let x = s.evaluate(c(sigma, 0.0), Precision::Terms(lo)).unwrap().tail_bound;
        let y = s.evaluate(c(sigma, 0.0), Precision::Terms(hi)).unwrap().tail_bound;
        prop_assert!(y <= x);
    }

    #[test]
    fn rigorous_mode_meets_its_bound(sigma in 1.05f64..6.0, t in -300.0f64..300.0) {
        let s = Series::new(chi1()).unwrap();
        let fine = s.evaluate(c(sigma, t), Precision::Eps(1e-13)).unwrap();
        let coarse = s.evaluate(c(sigma, t), Precision::Eps(1e-7)).unwrap();
        prop_assert!((fine.value - coarse.value).norm() <= coarse.tail_bound + fine.tail_bound + 1e-12);
    }
}

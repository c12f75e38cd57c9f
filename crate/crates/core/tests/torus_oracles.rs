use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use dirichlet_strips::dseries::{parse_series, SeriesSpec};
use dirichlet_strips::torus::{
    kappa_bounds, kappa_integrals, kw_time_average, torus_integral, verify_k0_decay, LocalFactorProduct, TorusFunction,
    TrigPoly,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mod5_pair() -> Vec<SeriesSpec> {
    let l = parse_series("L(mod=5,value(2)=i)").unwrap();
    vec![l.clone(), l.conj()]
}

fn random_trig(rng: &mut ChaCha8Rng) -> TrigPoly {
    let mut terms = Vec::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if rng.gen_bool(0.3) {
                terms.push((vec![a, b], c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            }
        }
    }
    terms.push((vec![0, 0], c(rng.gen_range(-1.0..1.0), 0.0)));
    TrigPoly::new(2, terms).unwrap()
}

#[test]
fn single_frequency_averages_out() {
    let h = TorusFunction::Trig(TrigPoly::new(1, vec![(vec![1], c(1.0, 0.0))]).unwrap());
    let v = kw_time_average(&h, &[2f64.ln()], 0.0, 1e4, 1e-3).unwrap();
    // exact antiderivative: |(e^{i w T} - 1) / (i w T)| <= 2 / (w T)
    let w = TAU * 2f64.ln();
    assert!(v.norm() <= 2.0 / (w * 1e4) + 1e-9);
    let h2 = TorusFunction::Trig(TrigPoly::new(2, vec![(vec![1, -1], c(1.0, 0.0))]).unwrap());
    let v2 = kw_time_average(&h2, &[2f64.ln(), 3f64.ln()], 0.0, 1e4, 1e-3).unwrap();
    assert!(v2.norm() <= 0.02);
    assert_eq!(torus_integral(&h2).unwrap().value, c(0.0, 0.0));
}

#[test]
fn kronecker_weyl_for_random_polynomials() {
    let seed = 7_331u64;
    println!("seed = {seed}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lam = [2f64.ln(), 3f64.ln()];
    for _ in 0..10 {
        let h = TorusFunction::Trig(random_trig(&mut rng));
        let avg = kw_time_average(&h, &lam, 0.0, 1e4, 1e-3).unwrap();
        let int = torus_integral(&h).unwrap().value;
        assert!((avg - int).norm() <= 0.02);
    }
}

#[test]
fn torus_integral_oracles() {
    let t = TrigPoly::new(2, vec![(vec![0, 0], c(3.0, -1.0)), (vec![1, 2], c(5.0, 5.0))]).unwrap();
    assert_eq!(torus_integral(&TorusFunction::Trig(t)).unwrap().value, c(3.0, -1.0));
    let h = TorusFunction::custom(1, |th| c((c(1.0, 0.0) - Complex64::from_polar(0.25, TAU * th[0])).norm_sqr(), 0.0));
    assert!((torus_integral(&h).unwrap().value - (1.0 + 1.0 / 16.0)).norm() < 1e-12);
    let f = LocalFactorProduct::new(&mod5_pair(), vec![2, 3], 1.0, vec![c(0.0, 0.0); 2]).unwrap();
    assert!((torus_integral(&TorusFunction::LocalFactor(f)).unwrap().value - 1.0).norm() < 1e-12);
}

// Periodic trapezoid rule: spectrally accurate for these smooth integrands.
fn trapezoid_k0(basis: &[SeriesSpec], p: u64, sigma: f64, y: &[Complex64]) -> Complex64 {
    let f = LocalFactorProduct::new(basis, vec![p], sigma, y.to_vec()).unwrap();
    let n = 20_000;
    (0..n).map(|k| f.eval(&[k as f64 / n as f64])).sum::<Complex64>() / n as f64
}

#[test]
fn kappa_matches_trapezoid_oracle() {
    let b = mod5_pair();
    for (p, sigma, y) in [(2, 1.0, vec![c(0.3, 0.1), c(-1.0, 2.0)]), (13, 1.5, vec![c(40.0, 0.0), c(0.0, 40.0)])] {
        let k = kappa_integrals(&b, p, sigma, &y, 0).unwrap();
        assert!((k.k0 - trapezoid_k0(&b, p, sigma, &y)).norm() < 1e-9);
    }
}

#[test]
fn kappa_trivial_cases_and_bounds() {
    let b = mod5_pair();
    let ys = [
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.3, 0.0), c(0.0, 0.1)],
        vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
        vec![c(3.0, 0.0), c(0.0, -2.0)],
    ];
    for p in [2u64, 3, 7, 13] {
        for sigma in [1.0, 1.5, 2.0, 8.0] {
            for y in &ys {
                let k = kappa_integrals(&b, p, sigma, y, 0).unwrap();
                let bd = kappa_bounds(&b, p, sigma, y, 0).unwrap();
                assert!(k.k0.norm() <= 1.0 + 1e-12);
                assert!(k.k1.norm() <= bd.k1 + 1e-12, "p={p} sigma={sigma} y={y:?}");
                assert!(k.k2.norm() <= bd.k2_full + 1e-12);
                if y.iter().all(|z| z.norm() == 0.0) {
                    assert!((k.k0 - 1.0).norm() < 1e-12);
                    assert!(k.k2.re >= 0.0 && k.k2.im.abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn zeta_k0_is_bounded() {
    let z = [SeriesSpec::Zeta];
    for r in [0.1, 1.0, 10.0, 100.0] {
        assert!(kappa_integrals(&z, 2, 1.0, &[c(r, 0.0)], 0).unwrap().k0.norm() <= 1.0 + 1e-12);
    }
}

#[test]
fn k0_decays_for_qualifying_primes() {
    let b = mod5_pair();
    let dir = vec![vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]];
    let norms: Vec<f64> = (0..=12).map(|k| 2f64.powi(k)).collect();
    for p in [11u64, 19, 29, 31] {
        let r = verify_k0_decay(&b, 1.0, p, &dir, &norms).unwrap();
        let f = &r.fits[0];
        assert!(f.qualifies);
        assert!(f.exponent <= -0.4, "p = {p}: {}", f.exponent);
        assert!(!f.flagged);
        assert!(f.k0_abs[0] > 0.99);
    }
    let r = verify_k0_decay(&b, 1.0, 17, &dir, &norms).unwrap();
    assert!(!r.fits[0].qualifies);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn local_factor_is_periodic(a in 0.0f64..1.0, b in 0.0f64..1.0, yr in -5.0f64..5.0, yi in -5.0f64..5.0) {
        let f = LocalFactorProduct::new(&mod5_pair(), vec![2, 7], 1.2, vec![c(yr, yi), c(yi, -yr)]).unwrap();
        let h = TorusFunction::LocalFactor(f);
        let v = h.eval(&[a, b]);
        prop_assert!((v - h.eval(&[a + 1.0, b])).norm() < 1e-12);
        prop_assert!((v - h.eval(&[a, b + 1.0])).norm() < 1e-12);
    }
}

use dirichlet_strips::characters::{build_character_group, root_number};
use dirichlet_strips::dseries::{evaluate, parse_series, Precision, Series, SeriesSpec};
use dirichlet_strips::scanner::Range;
use dirichlet_strips::strips::{
    check_det_condition, construct_funceq, construct_k_holes, construct_one_hole, hyperplane_basis, inductive_step,
    limit_vector, mod5_basis, paper_closed_form_coefficients, projective_distance, ratio_constant, Basis, HoleConfig,
};
use dirichlet_strips::Error;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coarse() -> HoleConfig {
    HoleConfig { t: Range::new(0.0, 200.0, 0.05), sigma_step: 0.1, ..HoleConfig::default() }
}

fn chi4() -> SeriesSpec {
    parse_series("L(mod=4,primitive)").unwrap()
}

// Printed values end in an ellipsis: leading decimals, truncated.
fn agrees(z: Complex64, re: f64, im: f64) -> bool {
    let t = |x: f64, w: f64| (x * 1e8).trunc() == (w * 1e8).round();
    t(z.re, re) && t(z.im, im)
}

#[test]
fn printed_constants() {
    let p = paper_closed_form_coefficients().unwrap();
    assert!(agrees(p.entries[0], -0.08260584, -0.99658995), "{}", p.entries[0]);
    assert!(agrees(p.entries[1], 1.00000059, 0.00375400), "{}", p.entries[1]);
    assert!(agrees(p.entries[2], -0.91739597, 0.99283727), "{}", p.entries[2]);
    assert!(agrees(ratio_constant().unwrap(), 0.99997181, 0.00750790));
}

#[test]
fn closed_forms_agree_with_rigorous_evaluation() {
    let b = mod5_basis();
    let v = |s: &SeriesSpec, x: f64| evaluate(s, c(x, 0.0), 1e-15).unwrap().value;
    let (l8, lb8, z8) = (v(&b[0], 8.0), v(&b[1], 8.0), v(&b[2], 8.0));
    let (l16, lb16, z16) = (v(&b[0], 16.0), v(&b[1], 16.0), v(&b[2], 16.0));
    let c1 = -(lb16 * z8 - lb8 * z16) / (l16 * z8 - l8 * z16) / lb8;
    let c2 = 1.0 / lb8;
    let c3 = (l8 * lb16 - lb8 * l16) / (z8 * l16 - l8 * z16) / lb8;
    let p = paper_closed_form_coefficients().unwrap();
    for (a, b) in p.entries.iter().zip([c1, c2, c3]) {
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }
    assert!((ratio_constant().unwrap() - l8 / lb8).norm() < 1e-12);
}

#[test]
fn determinant_examples() {
    assert!((check_det_condition(&mod5_basis()).unwrap().norm() - 4.0).abs() < 1e-12);
    assert!(matches!(
        check_det_condition(&[SeriesSpec::Zeta, SeriesSpec::Zeta]),
        Err(Error::SingularCoefficientMatrix { .. })
    ));
    assert!((check_det_condition(&[SeriesSpec::Zeta, chi4()]).unwrap() + 1.0).norm() < 1e-14);
}

#[test]
fn hyperplane_generators_annihilate() {
    let b = Basis::new(mod5_basis()).unwrap();
    let vs = hyperplane_basis(&b, 8.0).unwrap();
    assert_eq!(vs.len(), 2);
    for v in &vs {
        let (l, _) = b.combination_at(&v.entries, 8.0).unwrap();
        let scale: f64 = b.values(8.0).unwrap().iter().zip(&v.entries).map(|((f, _), x)| (f * x).norm()).sum();
        assert!(l.norm() <= 1e-10 * scale);
    }
    let twin = Basis::new(vec![SeriesSpec::Zeta, SeriesSpec::linear(vec![(c(1.0, 0.0), SeriesSpec::Zeta)])]).unwrap();
    let v = &hyperplane_basis(&twin, 3.0).unwrap()[0];
    assert!((v.entries[0] + v.entries[1]).norm() < 1e-15);
}

#[test]
fn inductive_and_limit_vectors_agree() {
    let b = Basis::new(mod5_basis()).unwrap();
    let level1 = hyperplane_basis(&b, 8.0).unwrap();
    let level2 = inductive_step(&b, &level1, 16.0).unwrap();
    assert_eq!(level2.len(), 1);
    let v = &level2[0];
    for s in [8.0, 16.0] {
        assert!(b.combination_at(&v.entries, s).unwrap().0.norm() <= 1e-8);
    }
    let direct = limit_vector(&b, &[8.0, 16.0]).unwrap();
    let paper = paper_closed_form_coefficients().unwrap();
    assert!(projective_distance(&v.entries, &direct.entries) < 1e-10);
    assert!(projective_distance(&direct.entries, &paper.entries) < 1e-7);

    // Repeating a point leaves a vanishing pivot.
    assert!(matches!(inductive_step(&b, &level1, 8.0), Err(Error::PivotVanishes { .. })));

    // v_2(8, inf) is the large-sigma limit of the inductive vectors.
    let lim = limit_vector(&b, &[8.0]).unwrap();
    let far = inductive_step(&b, &level1, 40.0).unwrap().remove(0);
    let mut far_n = far.entries.clone();
    let d = far_n[2];
    far_n.iter_mut().for_each(|z| *z /= d);
    let diff: f64 = lim.entries.iter().zip(&far_n).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!(diff < 1e-6, "{diff}");
    assert!(b.combination_at(&lim.entries, 8.0).unwrap().0.norm() <= 1e-8);
    let a1: Complex64 = lim.entries.iter().sum();
    assert!(a1.norm() < 1e-10);
}

#[test]
fn limit_vector_at_infinity() {
    let b = Basis::new(mod5_basis()).unwrap();
    let v = limit_vector(&b, &[]).unwrap();
    let rows = [[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]];
    for r in rows {
        let s: Complex64 = r.iter().zip(&v.entries).map(|(a, x)| a * x).sum();
        assert!(s.norm() < 1e-10);
    }
    let two = Basis::new(vec![SeriesSpec::Zeta, chi4()]).unwrap();
    let w = limit_vector(&two, &[]).unwrap();
    assert!((w.entries[0] + 1.0).norm() < 1e-14);
}

#[test]
fn order_of_rows_does_not_matter() {
    use dirichlet_strips::strips::null_vector;
    let b = Basis::new(mod5_basis()).unwrap();
    let f: Vec<Complex64> = b.values(9.0).unwrap().into_iter().map(|(f, _)| f).collect();
    let a = b.coefficient_rows(1).unwrap().remove(0);
    let x = null_vector(&[f.clone(), a.clone()], 3).unwrap();
    let y = null_vector(&[a, f], 3).unwrap();
    let d: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    assert!(d < 1e-10);
}

#[test]
fn forced_three_term_construction() {
    let cfg = HoleConfig { forced_betas: Some(vec![8.0, 16.0]), ..coarse() };
    let (cv, cert) = construct_k_holes(&mod5_basis(), &cfg).unwrap();
    assert!(cert.zeros_ok(), "{:?}", cert.residuals);
    assert!(cert.strips_ok());
    assert_eq!(cert.strips.len(), 2);
    let paper = paper_closed_form_coefficients().unwrap();
    assert!(projective_distance(&cv.entries, &paper.entries) < 1e-7);
    // Independent re-evaluation with more terms.
    let spec = cv.combination();
    for b in [8.0, 16.0] {
        let r = Series::new(spec.clone()).unwrap().evaluate(c(b, 0.0), Precision::Terms(400)).unwrap().value;
        assert!(r.norm() <= 1e-8);
    }
    // Scale invariance.
    let z = c(2.0, -3.0);
    let scaled = cv.scaled(z);
    let r8 = evaluate(&scaled.combination(), c(8.0, 0.0), 1e-14).unwrap().value;
    assert!(r8.norm() <= 1e-8 * z.norm());
}

#[test]
fn one_hole_zeta_and_chi4() {
    let (cv, cert) = construct_one_hole(&[SeriesSpec::Zeta, chi4()], &coarse()).unwrap();
    assert!(cert.zeros_ok());
    assert!(cert.strips_ok(), "{cert:?}");
    assert!(cert.strips[0].hi < cert.betas[0]);
    let (cv2, cert2) = construct_one_hole(&[SeriesSpec::Zeta, chi4()], &coarse()).unwrap();
    assert_eq!(cv.entries, cv2.entries);
    assert_eq!(cert.betas, cert2.betas);

    let z = c(0.0, 5.0);
    let s = cv.scaled(z).combination();
    let r = evaluate(&s, c(cert.betas[0], 0.0), 1e-14).unwrap().value.norm();
    assert!(r <= 1e-8 * 5.0);

    let zero_at_one = SeriesSpec::Explicit(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(construct_one_hole(&[zero_at_one.clone(), zero_at_one], &coarse()).is_err());
}

#[test]
fn searched_three_term_construction() {
    let (cv, cert) = construct_k_holes(&mod5_basis(), &coarse()).unwrap();
    assert_eq!(cert.betas.len(), 2);
    assert!(cert.betas[0] < cert.betas[1]);
    assert!(cert.zeros_ok(), "{:?}", cert.residuals);
    assert!(cert.strips_ok(), "{:?}", cert.strips);
    assert_eq!(cv.entries.len(), 3);
}

#[test]
fn k_holes_with_two_functions_is_one_hole() {
    let (a, _) = construct_k_holes(&[SeriesSpec::Zeta, chi4()], &coarse()).unwrap();
    let (b, _) = construct_one_hole(&[SeriesSpec::Zeta, chi4()], &coarse()).unwrap();
    assert_eq!(a.entries, b.entries);
}

fn w35() -> Vec<SeriesSpec> {
    let prim: Vec<_> = build_character_group(35).into_iter().filter(|x| x.is_primitive()).collect();
    let even: Vec<_> = prim.iter().filter(|x| x.parity() == 1).cloned().collect();
    let odd: Vec<_> = prim.iter().filter(|x| x.parity() == -1).cloned().collect();
    let set = if even.len() >= odd.len() { even } else { odd };
    set.into_iter().map(SeriesSpec::character).collect()
}

#[test]
fn root_numbers_of_w35_are_distinct() {
    let set = w35();
    assert!(set.len() >= 3);
    let omegas: Vec<Complex64> = set
        .iter()
        .map(|s| match s {
            SeriesSpec::CharacterL(chi) => root_number(chi).unwrap().omega,
            _ => unreachable!(),
        })
        .collect();
    for (i, w) in omegas.iter().enumerate() {
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let a = w.sqrt();
        assert!((a.conj() * w - a).norm() < 1e-12);
        for v in &omegas[..i] {
            assert!((w - v).norm() > 1e-6);
        }
    }
}

#[test]
fn funceq_construction_mod35() {
    let basis: Vec<SeriesSpec> = w35().into_iter().take(3).collect();
    let (cv, cert) = construct_funceq(&basis, &[1.0], &coarse()).unwrap();
    let fe = cert.funceq.as_ref().unwrap();
    assert!(cert.zeros_ok(), "{:?}", cert.residuals);
    assert!(cert.strips_ok());
    assert!(fe.max_imag <= 1e-10);
    assert!(fe.identity_error <= 1e-12);
    assert!(fe.modulus_error <= 1e-12);
    assert_eq!(cv.entries.len(), 3);
    assert!(matches!(construct_funceq(&basis, &[0.0], &coarse()), Err(Error::InvalidInput(_))));
    let same = vec![basis[0].clone(), basis[0].clone(), basis[0].clone()];
    assert!(matches!(construct_funceq(&same, &[1.0], &coarse()), Err(Error::AllRootNumbersEqual)));
}

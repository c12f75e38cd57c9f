//! Linear combinations `L_c = sum c_j F_j` with zeros placed at chosen real
//! points `beta_1 < beta_2 < ...` and scanned zero-free strips in between.
//!
//! Lower bounds on strips come from grid scans, so every certificate is
//! scan-supported rather than proved.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::root_number;
use crate::dseries::tail::plain_tail_bound;
use crate::dseries::{parse_series, Precision, Series, SeriesSpec};
use crate::error::{Error, Result};
use crate::scanner::{min_modulus_scan, Range, ScanConfig};

/// Accuracy of point evaluations on the real axis.
const REAL_EVAL: Precision = Precision::Eps(1e-14);

/// Ordered list of basis functions with cached coefficients.
#[derive(Debug, Clone)]
pub struct Basis {
    specs: Vec<SeriesSpec>,
    series: Vec<Series>,
}

impl Basis {
    pub fn new(specs: Vec<SeriesSpec>) -> Result<Self> {
        if specs.len() < 2 {
            return Err(Error::InvalidInput("a basis needs at least two functions".into()));
        }
        let series = specs.iter().cloned().map(Series::new).collect::<Result<_>>()?;
        Ok(Self { specs, series })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[SeriesSpec] {
        &self.specs
    }

    /// `(F_j(sigma), tail bound)` for every j.
    pub fn values(&self, sigma: f64) -> Result<Vec<(Complex64, f64)>> {
        self.series
            .iter()
            .map(|s| {
                let r = s.evaluate(Complex64::new(sigma, 0.0), REAL_EVAL)?;
                Ok((r.value, r.tail_bound))
            })
            .collect()
    }

    /// Rows `(a_1(n), ..., a_N(n))` for `n = 1..=rows`.
    pub fn coefficient_rows(&self, rows: usize) -> Result<Vec<Vec<Complex64>>> {
        let cols: Vec<_> = self.series.iter().map(|s| s.coefficients(rows.max(1))).collect::<Result<_>>()?;
        Ok((0..rows).map(|n| cols.iter().map(|c| c[n]).collect()).collect())
    }

    /// `L_x(sigma)` and a bound on its evaluation error.
    pub fn combination_at(&self, x: &[Complex64], sigma: f64) -> Result<(Complex64, f64)> {
        let v = self.values(sigma)?;
        Ok(x.iter().zip(&v).fold((Complex64::new(0.0, 0.0), 0.0), |(acc, tb), (xj, (f, t))| (acc + xj * f, tb + xj.norm() * t)))
    }

    pub fn combination(&self, x: &[Complex64]) -> SeriesSpec {
        SeriesSpec::linear(x.iter().copied().zip(self.specs.iter().cloned()).collect())
    }

    /// `max_j sum_n |a_j(n)| n^{-sigma}`, an upper bound for `|F_j|` on `Re s >= sigma`.
    pub fn modulus_bound(&self, sigma: f64) -> Result<f64> {
        let mut m = 0.0f64;
        for s in &self.series {
            let n = s.truncation_length(sigma, 1e-8)?.terms;
            let a = s.coefficients(n)?;
            let head: f64 = a[..n].iter().enumerate().map(|(i, z)| z.norm() * ((i + 1) as f64).powf(-sigma)).sum();
            m = m.max(head + plain_tail_bound(s.coeff_bound(), None, n, sigma, false));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    OneHole { beta: f64 },
    KHoles { betas: Vec<f64>, forced: bool },
    Funceq { beta: f64, tau: Vec<f64>, alphas: Vec<Complex64> },
    PaperClosedForm { terms: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub entries: Vec<Complex64>,
    pub basis: Vec<SeriesSpec>,
    pub provenance: Provenance,
}

impl CoefficientVector {
    pub fn combination(&self) -> SeriesSpec {
        SeriesSpec::linear(self.entries.iter().copied().zip(self.basis.iter().cloned()).collect())
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self { entries: self.entries.iter().map(|c| c * z).collect(), ..self.clone() }
    }
}

/// A level-`h` vector with the real points where its combination vanishes;
/// `None` marks a point at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisVector {
    pub level: usize,
    pub sigmas: Vec<Option<f64>>,
    pub entries: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripBound {
    pub lo: f64,
    pub hi: f64,
    /// Scanned minimum of `|L_c|` on the strip.
    pub delta: f64,
    /// Lower bound the construction relied on, if any.
    pub epsilon: Option<f64>,
    /// Bound on `|F_j|` used to size the perturbation, if any.
    pub m_bound: Option<f64>,
}

impl StripBound {
    /// `delta >= epsilon / 2` (vacuous when no epsilon was used).
    pub fn consistent(&self) -> bool {
        self.delta > 0.0 && self.epsilon.map_or(true, |e| self.delta >= e / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuncEqChecks {
    pub omegas: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
    /// `max |Im v_beta|`
    pub max_imag: f64,
    /// `max_j |conj(alpha_j) omega_j - alpha_j|`
    pub identity_error: f64,
    /// `max_j ||omega_j| - 1|`
    pub modulus_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleCertificate {
    pub betas: Vec<f64>,
    /// `|L_c(beta_l)|`
    pub residuals: Vec<f64>,
    pub strips: Vec<StripBound>,
    pub scan_t: Range,
    pub scan_sigma_step: f64,
    pub zero_tol: f64,
    pub funceq: Option<FuncEqChecks>,
    /// Always true: strip bounds come from finite grid scans.
    pub scan_supported: bool,
}

impl HoleCertificate {
    pub fn zeros_ok(&self) -> bool {
        self.residuals.iter().all(|&r| r <= self.zero_tol)
    }

    pub fn strips_ok(&self) -> bool {
        self.strips.iter().all(StripBound::consistent)
            && self.strips.windows(2).all(|w| w[0].hi < w[1].lo)
            && self.strips.iter().zip(&self.betas).all(|(s, b)| s.hi < *b)
    }
}

/// Parameters shared by the constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleConfig {
    /// t-grid for strip scans.
    pub t: Range,
    pub sigma_step: f64,
    pub precision: Precision,
    /// Lowest real part considered for the first strip.
    pub start_sigma: f64,
    /// Width `sigma_2 - sigma_1` of each strip.
    pub strip_width: f64,
    pub beta_step: f64,
    pub sigma_cap: f64,
    pub zero_tol: f64,
    /// Minimum accepted for a scanned strip bound.
    pub min_epsilon: f64,
    /// Place the zeros here instead of searching (k-holes only).
    pub forced_betas: Option<Vec<f64>>,
}

impl Default for HoleConfig {
    fn default() -> Self {
        Self {
            t: Range::new(0.0, 2000.0, 0.01),
            sigma_step: 0.05,
            precision: Precision::Eps(1e-13),
            start_sigma: 2.0,
            strip_width: 1.0,
            beta_step: 1.0,
            sigma_cap: 60.0,
            zero_tol: 1e-8,
            min_epsilon: 1e-12,
            forced_betas: None,
        }
    }
}

const DET_TOL: f64 = 1e-12;
const NULL_TOL: f64 = 1e-10;

fn det(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// `det (a_j(n))_{n, j <= N}`.
pub fn check_det_condition(basis: &[SeriesSpec]) -> Result<Complex64> {
    let b = Basis::new(basis.to_vec())?;
    let d = det(&b.coefficient_rows(b.len())?);
    if d.norm() <= DET_TOL {
        return Err(Error::SingularCoefficientMatrix { det_abs: d.norm() });
    }
    Ok(d)
}

/// Generators `v_j = (-1/F_1, 0, .., 1/F_j, .., 0)`, j = 2..N, of the
/// hyperplane `sum F_j(sigma) x_j = 0`.
pub fn hyperplane_basis(basis: &Basis, sigma: f64) -> Result<Vec<BasisVector>> {
    let v = basis.values(sigma)?;
    for (i, (f, tb)) in v.iter().enumerate() {
        if f.norm() <= 10.0 * tb || f.norm() == 0.0 {
            return Err(Error::EvaluationTooClose { index: i + 1, sigma, value: f.norm(), bound: *tb });
        }
    }
    let n = basis.len();
    Ok((1..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[0] = -1.0 / v[0].0;
            e[j] = 1.0 / v[j].0;
            BasisVector { level: 1, sigmas: vec![Some(sigma)], entries: e }
        })
        .collect())
}

/// One elimination step: the first vector of `level` is the pivot, the
/// remaining ones are made to vanish at `sigma_h` as well.
pub fn inductive_step(basis: &Basis, level: &[BasisVector], sigma_h: f64) -> Result<Vec<BasisVector>> {
    let (pivot, rest) = level.split_first().ok_or_else(|| Error::InvalidInput("empty level".into()))?;
    if let Some(prev) = pivot.sigmas.iter().flatten().copied().reduce(f64::max) {
        if sigma_h < prev {
            return Err(Error::InvalidInput(format!("sigma {sigma_h} is below an earlier point {prev}")));
        }
    }
    let stage = pivot.level + 1;
    let (lp, tp) = basis.combination_at(&pivot.entries, sigma_h)?;
    if lp.norm() <= 10.0 * tp.max(1e-15 * pivot.entries.iter().map(|z| z.norm()).sum::<f64>()) {
        return Err(Error::PivotVanishes { stage, value: lp.norm(), bound: tp });
    }
    let mut sigmas = pivot.sigmas.clone();
    sigmas.push(Some(sigma_h));
    rest.iter()
        .map(|v| {
            let (lv, _) = basis.combination_at(&v.entries, sigma_h)?;
            let r = lv / lp;
            let e: Vec<Complex64> = v.entries.iter().zip(&pivot.entries).map(|(a, b)| a - r * b).collect();
            if e.iter().all(|z| z.norm() == 0.0) {
                return Err(Error::ZeroVector);
            }
            Ok(BasisVector { level: stage, sigmas: sigmas.clone(), entries: e })
        })
        .collect()
}

/// Generator of the null space of the system with rows `F(sigma_l)` for
/// the given points and `a(n)`, `n = 1..N-m`, normalized so the last
/// nonzero entry is 1.
pub fn limit_vector(basis: &Basis, finite_sigmas: &[f64]) -> Result<BasisVector> {
    let n = basis.len();
    let m = finite_sigmas.len() + 1;
    if m > n {
        return Err(Error::InvalidInput(format!("at most {} finite points for {n} functions", n - 1)));
    }
    if finite_sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("points must be strictly increasing".into()));
    }
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
    for &s in finite_sigmas {
        rows.push(basis.values(s)?.into_iter().map(|(f, _)| f).collect());
    }
    rows.extend(basis.coefficient_rows(n - m)?);
    let entries = null_vector(&rows, n)?;
    let mut sigmas: Vec<Option<f64>> = finite_sigmas.iter().map(|&s| Some(s)).collect();
    sigmas.resize(n - 1, None);
    Ok(BasisVector { level: m, sigmas, entries })
}

/// One-dimensional null space of the `(n-1) x n` system `rows`.
pub fn null_vector(rows: &[Vec<Complex64>], n: usize) -> Result<Vec<Complex64>> {
    // Pad with zero rows to a square matrix so the SVD exposes all of V.
    let a = DMatrix::from_fn(n, n, |i, j| rows.get(i).map_or(Complex64::new(0.0, 0.0), |r| r[j]));
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Err(Error::RankDeficient { nullity: n });
    }
    let nullity = s.iter().filter(|&&x| x <= NULL_TOL * smax).count();
    if nullity != 1 {
        return Err(Error::RankDeficient { nullity });
    }
    let k = (0..n).min_by(|&i, &j| s[i].total_cmp(&s[j])).unwrap();
    let v: Vec<Complex64> = (0..n).map(|j| vt[(k, j)].conj()).collect();
    normalize_last(v)
}

fn normalize_last(v: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let last = v.iter().rposition(|z| z.norm() > 1e-12 * big).ok_or(Error::ZeroVector)?;
    let d = v[last];
    Ok(v.into_iter().map(|z| z / d).collect())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn strip_scan(spec: &SeriesSpec, lo: f64, hi: f64, cfg: &HoleConfig) -> Result<(f64, f64)> {
    let series = Series::new(spec.clone())?;
    let mut sc = ScanConfig::new(Range::new(lo, hi, cfg.sigma_step.min(hi - lo)), cfg.t);
    sc.precision = cfg.precision;
    let r = min_modulus_scan(&series, &sc)?;
    Ok((r.floor(), r.max_tail_bound()))
}

/// Lowest strip `[s, s + width]`, `s >= from`, on which the scanned minimum
/// of `|L|` is at least `cfg.min_epsilon` and ten times the evaluation error.
fn find_strip(spec: &SeriesSpec, from: f64, stage: usize, cfg: &HoleConfig) -> Result<(f64, f64, f64)> {
    let mut lo = from.max(cfg.start_sigma);
    let mut worst = f64::INFINITY;
    while lo + cfg.strip_width < cfg.sigma_cap {
        let hi = lo + cfg.strip_width;
        let (eps, tail) = strip_scan(spec, lo, hi, cfg)?;
        if eps >= cfg.min_epsilon && eps > 10.0 * tail {
            return Ok((lo, hi, eps));
        }
        worst = worst.min(eps);
        lo += 0.5 * cfg.strip_width;
    }
    Err(Error::EpsilonZero { stage, min: worst })
}

fn certify(basis: &Basis, c: &[Complex64], betas: &[f64], strips: Vec<StripBound>, cfg: &HoleConfig) -> Result<HoleCertificate> {
    let spec = basis.combination(c);
    let residuals = betas.iter().map(|&b| Ok(basis.combination_at(c, b)?.0.norm())).collect::<Result<_>>()?;
    let strips = strips
        .into_iter()
        .map(|s| Ok(StripBound { delta: strip_scan(&spec, s.lo, s.hi, cfg)?.0, ..s }))
        .collect::<Result<_>>()?;
    Ok(HoleCertificate {
        betas: betas.to_vec(),
        residuals,
        strips,
        scan_t: cfg.t,
        scan_sigma_step: cfg.sigma_step,
        zero_tol: cfg.zero_tol,
        funceq: None,
        scan_supported: true,
    })
}

fn beta_grid(from: f64, cfg: &HoleConfig) -> impl Iterator<Item = f64> + '_ {
    (1..).map(move |k| from + k as f64 * cfg.beta_step).take_while(move |&b| b <= cfg.sigma_cap + 1e-9)
}

/// One zero at `beta` and one scanned zero-free strip below it.
pub fn construct_one_hole(basis: &[SeriesSpec], cfg: &HoleConfig) -> Result<(CoefficientVector, HoleCertificate)> {
    let b = Basis::new(basis.to_vec())?;
    let n = b.len();
    let a1 = b.coefficient_rows(1)?.remove(0);
    if a1.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidInput("all a_j(1) vanish".into()));
    }
    // A point of the hyperplane sum c_j a_j(1) = 0.
    let c0 = match limit_vector(&b, &[]) {
        Ok(v) if n == 2 || v.entries.iter().any(|z| z.norm() > 0.0) => v.entries,
        _ => {
            let i = a1.iter().position(|z| z.norm() > 0.0).unwrap();
            let k = if i == 0 { 1 } else { 0 };
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[k] = a1[i];
            v[i] = -a1[k];
            if norm(&v) == 0.0 {
                v[k] = Complex64::new(1.0, 0.0);
                v[i] = -a1[k] / a1[i];
            }
            normalize_last(v)?
        }
    };
    let spec0 = b.combination(&c0);
    let (s1, s2, eps) = find_strip(&spec0, cfg.start_sigma, 1, cfg)?;
    let m = b.modulus_bound(s1)?;
    let target = eps / (4.0 * (n as f64).sqrt() * m);
    for beta in beta_grid(s2, cfg) {
        let f: Vec<Complex64> = b.values(beta)?.into_iter().map(|(f, _)| f).collect();
        let l0: Complex64 = c0.iter().zip(&f).map(|(c, f)| c * f).sum();
        let fn2: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        if l0.norm() / fn2.sqrt() < target {
            let r = l0 / fn2;
            let c: Vec<Complex64> = c0.iter().zip(&f).map(|(c, f)| c - r * f.conj()).collect();
            let strip = StripBound { lo: s1, hi: s2, delta: 0.0, epsilon: Some(eps), m_bound: Some(m) };
            let cert = certify(&b, &c, &[beta], vec![strip], cfg)?;
            let cv = CoefficientVector { entries: c, basis: basis.to_vec(), provenance: Provenance::OneHole { beta } };
            return Ok((cv, cert));
        }
    }
    Err(Error::BetaNotFound { stage: 1, cap: cfg.sigma_cap })
}

/// `N - 1` zeros `beta_1 < ... < beta_{N-1}` with a scanned strip below each.
pub fn construct_k_holes(basis: &[SeriesSpec], cfg: &HoleConfig) -> Result<(CoefficientVector, HoleCertificate)> {
    let n = basis.len();
    if n == 2 && cfg.forced_betas.is_none() {
        return construct_one_hole(basis, cfg);
    }
    check_det_condition(basis)?;
    let b = Basis::new(basis.to_vec())?;
    if b.coefficient_rows(1)?[0].iter().any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidInput("every a_j(1) must be nonzero".into()));
    }
    if let Some(betas) = &cfg.forced_betas {
        return forced_holes(&b, betas, cfg);
    }
    let mut betas: Vec<f64> = Vec::new();
    let mut strips: Vec<StripBound> = Vec::new();
    let mut current = limit_vector(&b, &[])?;
    let mut delta_prev = f64::INFINITY;
    let mut s11 = None;
    for h in 1..n {
        let spec = b.combination(&current.entries);
        let from = betas.last().map_or(cfg.start_sigma, |&x| x + 0.5 * cfg.beta_step);
        let (lo, hi, scanned) = find_strip(&spec, from, h, cfg)?;
        let s11 = *s11.get_or_insert(lo);
        let eps = delta_prev.min(scanned);
        let m = b.modulus_bound(s11)?;
        let target = eps / (2.0 * (n as f64).sqrt() * m);
        let mut found = None;
        for beta in beta_grid(hi, cfg) {
            let mut pts = betas.clone();
            pts.push(beta);
            let next = match limit_vector(&b, &pts) {
                Ok(v) => v,
                Err(Error::RankDeficient { .. }) => continue,
                Err(e) => return Err(e),
            };
            if diff_norm(&current.entries, &next.entries) < target {
                found = Some((beta, next));
                break;
            }
        }
        let (beta, next) = found.ok_or(Error::BetaNotFound { stage: h, cap: cfg.sigma_cap })?;
        betas.push(beta);
        strips.push(StripBound { lo, hi, delta: 0.0, epsilon: Some(eps), m_bound: Some(m) });
        delta_prev = eps / 2.0;
        current = next;
    }
    let c = current.entries;
    let cert = certify(&b, &c, &betas, strips, cfg)?;
    let cv = CoefficientVector { entries: c, basis: basis.to_vec(), provenance: Provenance::KHoles { betas, forced: false } };
    Ok((cv, cert))
}

fn forced_holes(b: &Basis, betas: &[f64], cfg: &HoleConfig) -> Result<(CoefficientVector, HoleCertificate)> {
    if betas.len() != b.len() - 1 {
        return Err(Error::InvalidInput(format!("expected {} betas", b.len() - 1)));
    }
    let v = limit_vector(b, betas)?;
    let strips = betas
        .iter()
        .enumerate()
        .map(|(l, &beta)| {
            let lo = if l == 0 { beta - 1.0 } else { betas[l - 1] + 0.25 };
            StripBound { lo: lo.max(cfg.start_sigma), hi: beta - 0.25, delta: 0.0, epsilon: None, m_bound: None }
        })
        .collect();
    let cert = certify(b, &v.entries, betas, strips, cfg)?;
    let cv = CoefficientVector {
        entries: v.entries,
        basis: b.specs().to_vec(),
        provenance: Provenance::KHoles { betas: betas.to_vec(), forced: true },
    };
    Ok((cv, cert))
}

/// Mod-5 basis `(L(chi_1), L(conj chi_1), zeta)` with `chi_1(2) = i`.
pub fn mod5_basis() -> Vec<SeriesSpec> {
    let l = parse_series("L(mod=5,value(2)=i)").expect("valid series");
    vec![l.clone(), l.conj(), SeriesSpec::Zeta]
}

/// The explicit three-term combination with zeros at 8 and 16, from the
/// closed forms in `L(8, .)`, `L(16, .)`, `zeta(8)`, `zeta(16)`.
pub fn paper_closed_form_coefficients() -> Result<CoefficientVector> {
    paper_closed_form_with_terms(70_000)
}

pub fn paper_closed_form_with_terms(terms: usize) -> Result<CoefficientVector> {
    let basis = mod5_basis();
    let ev = |spec: &SeriesSpec, s: f64| -> Result<Complex64> {
        Ok(Series::new(spec.clone())?.evaluate(Complex64::new(s, 0.0), Precision::Terms(terms))?.value)
    };
    let (l8, l8b, z8) = (ev(&basis[0], 8.0)?, ev(&basis[1], 8.0)?, ev(&basis[2], 8.0)?);
    let (l16, l16b, z16) = (ev(&basis[0], 16.0)?, ev(&basis[1], 16.0)?, ev(&basis[2], 16.0)?);
    let c2 = 1.0 / l8b;
    let c1 = -c2 * (l16b * z8 - l8b * z16) / (l16 * z8 - l8 * z16);
    let c3 = c2 * (l8 * l16b - l8b * l16) / (z8 * l16 - l8 * z16);
    Ok(CoefficientVector { entries: vec![c1, c2, c3], basis, provenance: Provenance::PaperClosedForm { terms } })
}

/// `L(8, chi_1) / L(8, conj chi_1)`.
pub fn ratio_constant() -> Result<Complex64> {
    let b = mod5_basis();
    let s = Complex64::new(8.0, 0.0);
    let a = Series::new(b[0].clone())?.evaluate(s, REAL_EVAL)?.value;
    let c = Series::new(b[1].clone())?.evaluate(s, REAL_EVAL)?.value;
    Ok(a / c)
}

/// `min_phi || a/|a| - e^{i phi} b/|b| ||`.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    // Optimal phase aligns b with a.
    let phase = if inner.norm() > 0.0 { inner.conj() / inner.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x / na - phase * y / nb).norm_sqr()).sum::<f64>().sqrt()
}

/// Zero at `beta` for a combination preserving the shared functional
/// equation of same-modulus, same-parity primitive characters.
pub fn construct_funceq(basis: &[SeriesSpec], tau: &[f64], cfg: &HoleConfig) -> Result<(CoefficientVector, HoleCertificate)> {
    let n = basis.len();
    if n < 3 {
        return Err(Error::InvalidInput("need at least three characters".into()));
    }
    if tau.len() != n - 2 || tau.iter().all(|&t| t == 0.0) {
        return Err(Error::InvalidInput(format!("tau must be a nonzero vector of length {}", n - 2)));
    }
    let chars: Vec<_> = basis
        .iter()
        .map(|s| match s {
            SeriesSpec::CharacterL(chi) => Ok(chi.clone()),
            _ => Err(Error::IncompatibleFunctionalEquations("basis entries must be character L-functions".into())),
        })
        .collect::<Result<_>>()?;
    let (q, par) = (chars[0].modulus(), chars[0].parity());
    if chars.iter().any(|c| c.modulus() != q || c.parity() != par) {
        return Err(Error::IncompatibleFunctionalEquations("characters must share modulus and parity".into()));
    }
    let omegas: Vec<Complex64> = chars.iter().map(|c| Ok(root_number(c)?.omega)).collect::<Result<_>>()?;
    if omegas.iter().all(|w| (w - omegas[0]).norm() <= 1e-12) {
        return Err(Error::AllRootNumbersEqual);
    }
    let alphas: Vec<Complex64> = omegas.iter().map(|w| w.sqrt()).collect();
    // Pivot pair with the best-conditioned 2x2 block.
    let mut pivot = (0, 1);
    let mut best = -1.0;
    for h in 0..n {
        for k in h + 1..n {
            let v = (alphas[h] * alphas[k].conj()).im.abs();
            if v > best {
                best = v;
                pivot = (h, k);
            }
        }
    }
    let b = Basis::new(basis.to_vec())?;
    let a1 = b.coefficient_rows(1)?.remove(0);
    let weights = |f: &[Complex64]| -> Vec<Complex64> { alphas.iter().zip(f).map(|(a, f)| a.conj() * f).collect() };
    let v_inf = real_solution(&weights(&a1), pivot, tau, f64::INFINITY)?;
    let c0: Vec<Complex64> = alphas.iter().zip(&v_inf).map(|(a, v)| a.conj() * v).collect();
    let spec0 = b.combination(&c0);
    let (s1, s2, eps) = find_strip(&spec0, cfg.start_sigma, 1, cfg)?;
    let m = b.modulus_bound(s1)?;
    let target = eps / (2.0 * (n as f64).sqrt() * m);
    for beta in beta_grid(s2, cfg) {
        let f: Vec<Complex64> = b.values(beta)?.into_iter().map(|(f, _)| f).collect();
        let v = match real_solution(&weights(&f), pivot, tau, beta) {
            Ok(v) => v,
            Err(Error::DimensionCollapse { .. }) => continue,
            Err(e) => return Err(e),
        };
        let c: Vec<Complex64> = alphas.iter().zip(&v).map(|(a, v)| a.conj() * v).collect();
        if diff_norm(&c0, &c) < target {
            let strip = StripBound { lo: s1, hi: s2, delta: 0.0, epsilon: Some(eps), m_bound: Some(m) };
            let mut cert = certify(&b, &c, &[beta], vec![strip], cfg)?;
            cert.funceq = Some(FuncEqChecks {
                max_imag: v.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
                identity_error: alphas.iter().zip(&omegas).map(|(a, w)| (a.conj() * w - a).norm()).fold(0.0, f64::max),
                modulus_error: omegas.iter().map(|w| (w.norm() - 1.0).abs()).fold(0.0, f64::max),
                omegas,
                alphas: alphas.clone(),
            });
            let cv = CoefficientVector {
                entries: c,
                basis: basis.to_vec(),
                provenance: Provenance::Funceq { beta, tau: tau.to_vec(), alphas },
            };
            return Ok((cv, cert));
        }
    }
    Err(Error::BetaNotFound { stage: 1, cap: cfg.sigma_cap })
}

/// Real `x` with `sum w_j x_j = 0`, the non-pivot coordinates set to `tau`.
fn real_solution(w: &[Complex64], pivot: (usize, usize), tau: &[f64], sigma: f64) -> Result<Vec<Complex64>> {
    let (h, k) = pivot;
    let d = w[h].re * w[k].im - w[h].im * w[k].re;
    let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if d.abs() <= 1e-10 * scale * scale {
        return Err(Error::DimensionCollapse { sigma });
    }
    let mut x = vec![0.0; w.len()];
    let free = (0..w.len()).filter(|&j| j != h && j != k);
    for (j, &t) in free.zip(tau) {
        x[j] = t;
    }
    let r: Complex64 = w.iter().zip(&x).map(|(wj, xj)| wj * xj).sum();
    // Solve w_h x_h + w_k x_k = -r over the reals.
    x[h] = (-r.re * w[k].im + r.im * w[k].re) / d;
    x[k] = (-w[h].re * r.im + w[h].im * r.re) / d;
    Ok(x.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

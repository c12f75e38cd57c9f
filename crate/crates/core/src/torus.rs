//! Functions on the torus `[0,1]^n`: Kronecker-Weyl time averages, torus
//! integrals and the oscillatory local-factor integrals `K0, K1, K2`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::dseries::{log_derivative_local, log_local, EulerData, SeriesSpec};
use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, gauss_legendre};

/// `sum_m c_m e^{2 pi i <m, theta>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub dim: usize,
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl TrigPoly {
    pub fn new(dim: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if terms.iter().any(|(m, _)| m.len() != dim) {
            return Err(Error::InvalidInput("multi-index length differs from the dimension".into()));
        }
        Ok(Self { dim, terms })
    }

    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let x: f64 = m.iter().zip(theta).map(|(&k, &t)| k as f64 * t).sum();
                c * Complex64::from_polar(1.0, TAU * x)
            })
            .sum()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.terms.iter().filter(|(m, _)| m.iter().all(|&k| k == 0)).map(|(_, c)| c).sum()
    }
}

/// `theta -> exp(i sum_m sum_h Re(conj(y_h) log F_{h,p_m}(sigma + 2 pi i theta_m / log p_m)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactorProduct {
    pub basis: Vec<EulerData>,
    pub primes: Vec<u64>,
    pub sigma: f64,
    pub y: Vec<Complex64>,
}

impl LocalFactorProduct {
    pub fn new(basis: &[SeriesSpec], primes: Vec<u64>, sigma: f64, y: Vec<Complex64>) -> Result<Self> {
        let basis = euler_basis(basis)?;
        if y.len() != basis.len() {
            return Err(Error::InvalidInput("y must have one entry per basis function".into()));
        }
        if primes.iter().any(|&p| !is_prime(p)) {
            return Err(Error::InvalidInput("local factors need prime indices".into()));
        }
        Ok(Self { basis, primes, sigma, y })
    }

    fn phase_at(&self, p: u64, theta: f64) -> f64 {
        phase(&self.basis, &self.y, p, self.sigma, theta)
    }

    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        let x: f64 = self.primes.iter().zip(theta).map(|(&p, &t)| self.phase_at(p, t)).sum();
        Complex64::from_polar(1.0, x)
    }
}

type TorusFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum TorusFunction {
    Trig(TrigPoly),
    LocalFactor(LocalFactorProduct),
    /// Any 1-periodic function of `dim` variables.
    Custom { dim: usize, f: TorusFn },
}

impl fmt::Debug for TorusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trig(t) => f.debug_tuple("Trig").field(t).finish(),
            Self::LocalFactor(l) => f.debug_tuple("LocalFactor").field(l).finish(),
            Self::Custom { dim, .. } => f.debug_struct("Custom").field("dim", dim).finish_non_exhaustive(),
        }
    }
}

impl TorusFunction {
    pub fn custom(dim: usize, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::Custom { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Trig(t) => t.dim,
            Self::LocalFactor(l) => l.primes.len(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        match self {
            Self::Trig(t) => t.eval(theta),
            Self::LocalFactor(l) => l.eval(theta),
            Self::Custom { f, .. } => f(theta),
        }
    }
}

/// Composite trapezoid value of `(1 / (T2 - T1)) int_{T1}^{T2} H(lambda t) dt`.
pub fn kw_time_average(h: &TorusFunction, lambdas: &[f64], t1: f64, t2: f64, quad_step: f64) -> Result<Complex64> {
    if lambdas.len() != h.dim() {
        return Err(Error::InvalidInput("one frequency per torus coordinate".into()));
    }
    for (i, a) in lambdas.iter().enumerate() {
        if lambdas[..i].contains(a) {
            return Err(Error::InvalidInput("frequencies must be pairwise distinct".into()));
        }
    }
    if !(t2 > t1) || !(quad_step > 0.0) {
        return Err(Error::InvalidInput("need T2 > T1 and a positive step".into()));
    }
    let n = ((t2 - t1) / quad_step).ceil().max(1.0) as usize;
    let step = (t2 - t1) / n as f64;
    let total = match h {
        // Each term is a pure exponential; its trapezoid sum is geometric.
        TorusFunction::Trig(tp) => tp
            .terms
            .iter()
            .map(|(m, c)| {
                let w: f64 = TAU * m.iter().zip(lambdas).map(|(&k, &l)| k as f64 * l).sum::<f64>();
                c * trapezoid_exponential(w, t1, step, n)
            })
            .sum(),
        _ => {
            const CHUNK: usize = 1 << 14;
            let chunks = (n + 1).div_ceil(CHUNK);
            let parts: Vec<Complex64> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut theta = vec![0.0; lambdas.len()];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in c * CHUNK..((c + 1) * CHUNK).min(n + 1) {
                        let t = t1 + k as f64 * step;
                        for (th, l) in theta.iter_mut().zip(lambdas) {
                            *th = l * t;
                        }
                        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                        acc += h.eval(&theta) * w;
                    }
                    acc
                })
                .collect();
            parts.into_iter().sum::<Complex64>() * step
        }
    };
    Ok(total / (t2 - t1))
}

fn trapezoid_exponential(w: f64, t1: f64, step: f64, n: usize) -> Complex64 {
    let z = Complex64::from_polar(1.0, w * step);
    let zn = Complex64::from_polar(1.0, w * step * n as f64);
    let geo = if (z - 1.0).norm() < 1e-300 {
        Complex64::new(n as f64 + 1.0, 0.0)
    } else {
        (Complex64::new(1.0, 0.0) - zn * z) / (Complex64::new(1.0, 0.0) - z)
    };
    (geo - (zn + 1.0) * 0.5) * step * Complex64::from_polar(1.0, w * t1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusIntegral {
    pub value: Complex64,
    /// Difference to the half-order rule; zero for exact evaluations.
    pub error_estimate: f64,
}

const TENSOR_MAX_DIM: usize = 4;

/// `int_{[0,1]^n} H`.
pub fn torus_integral(h: &TorusFunction) -> Result<TorusIntegral> {
    if let TorusFunction::Trig(t) = h {
        return Ok(TorusIntegral { value: t.constant_term(), error_estimate: 0.0 });
    }
    let n = h.dim();
    if n > TENSOR_MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let fine = tensor_gauss(h, 64);
    let coarse = tensor_gauss(h, 32);
    Ok(TorusIntegral { value: fine, error_estimate: (fine - coarse).norm() })
}

fn tensor_gauss(h: &TorusFunction, nodes: usize) -> Complex64 {
    let (x, w) = gauss_legendre::<f64>(nodes);
    let n = h.dim();
    if n == 0 {
        return h.eval(&[]);
    }
    let total = nodes.pow(n as u32);
    let per_first = total / nodes;
    let parts: Vec<Complex64> = (0..nodes)
        .into_par_iter()
        .map(|i0| {
            let mut theta = vec![0.0; n];
            let mut acc = Complex64::new(0.0, 0.0);
            for rest in 0..per_first {
                let mut r = rest;
                let mut weight = w[i0];
                theta[0] = x[i0];
                for th in theta.iter_mut().skip(1) {
                    let k = r % nodes;
                    r /= nodes;
                    *th = x[k];
                    weight *= w[k];
                }
                acc += h.eval(&theta) * weight;
            }
            acc
        })
        .collect();
    parts.into_iter().sum()
}

fn euler_basis(basis: &[SeriesSpec]) -> Result<Vec<EulerData>> {
    if basis.is_empty() {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    basis.iter().map(|b| b.euler_data().ok_or(Error::NoEulerProduct)).collect()
}

fn point(p: u64, sigma: f64, theta: f64) -> Complex64 {
    Complex64::new(sigma, TAU * theta / (p as f64).ln())
}

fn phase(basis: &[EulerData], y: &[Complex64], p: u64, sigma: f64, theta: f64) -> f64 {
    let s = point(p, sigma, theta);
    basis.iter().zip(y).map(|(e, yh)| (log_local(e, p, s) * yh.conj()).re).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaTriple {
    pub k0: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub p: u64,
    pub sigma: f64,
    pub y: Vec<Complex64>,
    pub j: usize,
}

const KAPPA_TOL: f64 = 1e-10;

fn check_kappa_input(basis: &[SeriesSpec], p: u64, sigma: f64, y: &[Complex64], j: usize) -> Result<Vec<EulerData>> {
    let e = euler_basis(basis)?;
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if !(sigma >= 1.0) {
        return Err(Error::InvalidInput("sigma must be at least 1".into()));
    }
    if y.len() != e.len() || j >= e.len() {
        return Err(Error::InvalidInput("y and j must match the basis".into()));
    }
    Ok(e)
}

/// Interior phase extrema on a sampling grid, used as subdivision points.
fn phase_breaks(e: &[EulerData], y: &[Complex64], p: u64, sigma: f64) -> Vec<f64> {
    const SAMPLES: usize = 4096;
    let v: Vec<f64> = (0..=SAMPLES).map(|k| phase(e, y, p, sigma, k as f64 / SAMPLES as f64)).collect();
    (1..SAMPLES)
        .filter(|&k| (v[k] - v[k - 1]) * (v[k + 1] - v[k]) <= 0.0)
        .map(|k| k as f64 / SAMPLES as f64)
        .collect()
}

/// The integrals over `theta in [0, 1]` of `e^{i phase}`, `e^{i phase} F_j'/F_j`
/// and `e^{i phase} |F_j'/F_j|^2`.
pub fn kappa_integrals(basis: &[SeriesSpec], p: u64, sigma: f64, y: &[Complex64], j: usize) -> Result<KappaTriple> {
    let e = check_kappa_input(basis, p, sigma, y, j)?;
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let breaks = if norm > 1e3 { phase_breaks(&e, y, p, sigma) } else { Vec::new() };
    let osc = |theta: f64| Complex64::from_polar(1.0, phase(&e, y, p, sigma, theta));
    let ld = |theta: f64| log_derivative_local(&e[j], p, point(p, sigma, theta));
    let k0 = adaptive_simpson(&osc, 0.0, 1.0, KAPPA_TOL, &breaks)?;
    let k1 = adaptive_simpson(&|t| osc(t) * ld(t), 0.0, 1.0, KAPPA_TOL, &breaks)?;
    let k2 = adaptive_simpson(&|t| osc(t) * ld(t).norm_sqr(), 0.0, 1.0, KAPPA_TOL, &breaks)?;
    Ok(KappaTriple { k0, k1, k2, p, sigma, y: y.to_vec(), j })
}

/// Explicit bounds for `|K1|` and `|K2|`, with `K_F` the number of local roots
/// of `F` (so `|b_F(p^k)| <= K_F`) and exponent `theta_F = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaBounds {
    /// `|y| K_j sqrt(sum K_h^2) log p / p^{2 sigma}`
    pub k1: f64,
    /// `K_j^2 log^2 p / p^{2 sigma}`
    pub k2: f64,
    /// `K_j^2 log^2 p p^{-2 sigma} / (1 - p^{-sigma})^2`, which also covers
    /// the higher prime powers in `F_j'/F_j`.
    pub k2_full: f64,
}

pub fn local_root_count(spec: &SeriesSpec) -> Result<usize> {
    Ok(spec.euler_data().ok_or(Error::NoEulerProduct)?.roots.len())
}

pub fn kappa_bounds(basis: &[SeriesSpec], p: u64, sigma: f64, y: &[Complex64], j: usize) -> Result<KappaBounds> {
    let e = check_kappa_input(basis, p, sigma, y, j)?;
    let k: Vec<f64> = e.iter().map(|d| d.roots.len() as f64).collect();
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let lp = (p as f64).ln();
    let x = (p as f64).powf(-sigma);
    let k2 = k[j] * k[j] * lp * lp * x * x;
    Ok(KappaBounds {
        k1: norm * k[j] * k.iter().map(|v| v * v).sum::<f64>().sqrt() * lp * x * x,
        k2,
        k2_full: k2 / ((1.0 - x) * (1.0 - x)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionFit {
    pub direction: Vec<Complex64>,
    /// `|sum_j conj(u_j) a_j(p)| >= 1` for the unit direction `u`.
    pub qualifies: bool,
    pub norms: Vec<f64>,
    pub k0_abs: Vec<f64>,
    /// Least-squares slope of `log |K0|` against `log |y|`.
    pub exponent: f64,
    /// Smallest `A` with `|K0| <= A p^{sigma/2} / sqrt|y|` on the samples.
    pub a_empirical: f64,
    /// Exponent above `-0.4`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub p: u64,
    pub sigma: f64,
    pub fits: Vec<DirectionFit>,
}

/// Decay of `|K0|` along rays `y = r u`, assuming a diagonal orthogonality
/// constant of 1 for every basis element.
pub fn verify_k0_decay(basis: &[SeriesSpec], sigma: f64, p: u64, directions: &[Vec<Complex64>], norms: &[f64]) -> Result<DecayReport> {
    if norms.len() < 2 || norms.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("need at least two positive norms".into()));
    }
    let coeffs: Vec<Complex64> =
        basis.iter().map(|b| Ok(b.coefficients(p as usize)?[p as usize - 1])).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..directions.len()).flat_map(|d| (0..norms.len()).map(move |k| (d, k))).collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(d, k)| {
            let y: Vec<Complex64> = directions[d].iter().map(|u| u * norms[k]).collect();
            Ok(kappa_integrals(basis, p, sigma, &y, 0)?.k0.norm())
        })
        .collect::<Result<_>>()?;
    let lx: Vec<f64> = norms.iter().map(|r| r.ln()).collect();
    let fits = directions
        .iter()
        .enumerate()
        .map(|(d, u)| {
            let len = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let k0_abs = values[d * norms.len()..(d + 1) * norms.len()].to_vec();
            let ly: Vec<f64> = k0_abs.iter().map(|v| v.max(1e-300).ln()).collect();
            let exponent = slope(&lx, &ly);
            let a_empirical = k0_abs
                .iter()
                .zip(norms)
                .map(|(v, r)| v * (r * len).sqrt() / (p as f64).powf(sigma / 2.0))
                .fold(0.0, f64::max);
            let proj: Complex64 = u.iter().zip(&coeffs).map(|(uj, a)| uj.conj() * a).sum();
            DirectionFit {
                direction: u.clone(),
                qualifies: proj.norm() >= len * (1.0 - 1e-12),
                norms: norms.iter().map(|r| r * len).collect(),
                k0_abs,
                exponent,
                a_empirical,
                flagged: exponent > -0.5 + 0.1,
            }
        })
        .collect();
    Ok(DecayReport { p, sigma, fits })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

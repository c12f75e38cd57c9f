//! Vertical-line scans of `|L(sigma + it)|`, zero-free strip detection,
//! zero counting by the argument principle and Newton refinement.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dseries::tail::SIGMA_MIN;
use crate::dseries::{Precision, Series};
use crate::error::{Error, Result};

/// `lo, lo + step, ...` up to `hi` (inclusive, with a little slack).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step }
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidInput(format!("{what} step must be positive")));
        }
        if !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidInput(format!("{what} range has lo > hi")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub sigma: Range,
    pub t: Range,
    pub precision: Precision,
    /// Strip detection level; `None` means 10x the largest tail bound.
    pub threshold: Option<f64>,
    /// Scan `t` over `[-t.hi, -t.lo] U [t.lo, t.hi]` instead of `[t.lo, t.hi]`.
    pub symmetric: bool,
}

impl ScanConfig {
    pub fn new(sigma: Range, t: Range) -> Self {
        Self { sigma, t, precision: Precision::Eps(1e-10), threshold: None, symmetric: false }
    }

    pub fn validate(&self) -> Result<()> {
        self.sigma.validate("sigma")?;
        self.t.validate("t")?;
        if self.sigma.lo < SIGMA_MIN - 1e-12 {
            return Err(Error::SigmaTooSmall { sigma: self.sigma.lo, min: SIGMA_MIN });
        }
        if let Some(th) = self.threshold {
            if !(th > 0.0) {
                return Err(Error::InvalidInput("threshold must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub sigma: f64,
    pub min_modulus: f64,
    pub argmin_t: f64,
    pub max_modulus: f64,
    pub tail_bound: f64,
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub config: ScanConfig,
    /// Human readable notes, e.g. rows whose tail bound missed the target.
    pub warnings: Vec<String>,
}

impl ScanResult {
    pub fn max_tail_bound(&self) -> f64 {
        self.rows.iter().map(|r| r.tail_bound).fold(0.0, f64::max)
    }

    pub fn default_threshold(&self) -> f64 {
        self.config.threshold.unwrap_or(10.0 * self.max_tail_bound())
    }

    pub fn floor(&self) -> f64 {
        self.rows.iter().map(|r| r.min_modulus).fold(f64::INFINITY, f64::min)
    }
}

/// Callback receiving `(rows_done, rows_total)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

fn scan_row(series: &Series, sigma: f64, cfg: &ScanConfig) -> Result<ScanRow> {
    let t = cfg.t;
    let mut r = series.row_min(sigma, t.lo, t.hi, t.step, cfg.precision)?;
    if cfg.symmetric {
        let neg = series.row_min(sigma, -t.hi, -t.lo, t.step, cfg.precision)?;
        if neg.min_modulus < r.min_modulus {
            r.min_modulus = neg.min_modulus;
            r.argmin_t = neg.argmin_t;
        }
        r.max_modulus = r.max_modulus.max(neg.max_modulus);
        r.tail_bound = r.tail_bound.max(neg.tail_bound);
        r.warning |= neg.warning;
    }
    Ok(ScanRow {
        sigma,
        min_modulus: r.min_modulus,
        argmin_t: r.argmin_t,
        max_modulus: r.max_modulus,
        tail_bound: r.tail_bound,
        warning: r.warning,
    })
}

/// Row minima of `|L|` over the t-grid, one row per sigma grid point.
/// Rows are distributed over the current rayon pool.
pub fn min_modulus_scan(series: &Series, cfg: &ScanConfig) -> Result<ScanResult> {
    min_modulus_scan_with_progress(series, cfg, None)
}

pub fn min_modulus_scan_with_progress(series: &Series, cfg: &ScanConfig, progress: Option<Progress<'_>>) -> Result<ScanResult> {
    cfg.validate()?;
    let sigmas = cfg.sigma.points();
    let done = AtomicUsize::new(0);
    let total = sigmas.len();
    let rows: Vec<ScanRow> = sigmas
        .par_iter()
        .map(|&s| {
            let r = scan_row(series, s, cfg);
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(p) = progress {
                p(d, total);
            }
            r
        })
        .collect::<Result<_>>()?;
    let warnings = rows
        .iter()
        .filter(|r| r.warning)
        .map(|r| format!("sigma = {}: tail bound {:e} above the requested accuracy", r.sigma, r.tail_bound))
        .collect();
    Ok(ScanResult { rows, config: *cfg, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub lo: f64,
    pub hi: f64,
    /// Smallest row minimum inside the strip.
    pub min_modulus: f64,
}

/// Maximal runs of rows with `min_modulus >= threshold`, dropping runs
/// shorter than three sigma steps.
pub fn detect_zero_free_strips(result: &ScanResult, threshold: f64) -> Vec<Strip> {
    let step = result.config.sigma.step;
    let mut out = Vec::new();
    let mut cur: Option<Strip> = None;
    let close = |s: Strip, out: &mut Vec<Strip>| {
        if s.hi - s.lo >= 3.0 * step - 1e-9 * step {
            out.push(s);
        }
    };
    for r in &result.rows {
        if r.min_modulus >= threshold {
            cur = Some(match cur {
                Some(s) => Strip { hi: r.sigma, min_modulus: s.min_modulus.min(r.min_modulus), ..s },
                None => Strip { lo: r.sigma, hi: r.sigma, min_modulus: r.min_modulus },
            });
        } else if let Some(s) = cur.take() {
            close(s, &mut out);
        }
    }
    if let Some(s) = cur {
        close(s, &mut out);
    }
    out
}

/// Closed box `[sigma_lo, sigma_hi] x [t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Self {
        Self { sigma_lo, sigma_hi, t_lo, t_hi }
    }

    /// Square of half-width `r` around `z`.
    pub fn around(z: Complex64, r: f64) -> Self {
        Self::new(z.re - r, z.re + r, z.im - r, z.im + r)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_lo, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_lo),
            Complex64::new(self.sigma_hi, self.t_hi),
            Complex64::new(self.sigma_lo, self.t_hi),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: i64,
    /// `(1 / 2 pi i) * contour integral of L'/L`.
    pub raw: Complex64,
    /// Distance of `raw` from the integer `count`.
    pub residual: f64,
}

const BOUNDARY_SAMPLES: usize = 64;
const MAX_DEPTH: usize = 20;
const CONTOUR_EPS: f64 = 1e-12;

fn log_derivative(series: &Series, s: Complex64) -> Result<(Complex64, Complex64)> {
    let p = Precision::Eps(CONTOUR_EPS);
    let f = series.evaluate(s, p)?.value;
    let d = series.evaluate_derivative(s, p)?.value;
    Ok((f, d / f))
}

struct Edge<'a> {
    series: &'a Series,
    a: Complex64,
    b: Complex64,
}

impl Edge<'_> {
    fn f(&self, x: f64) -> Result<Complex64> {
        let s = self.a + (self.b - self.a) * x;
        Ok(log_derivative(self.series, s)?.1 * (self.b - self.a))
    }

    #[allow(clippy::too_many_arguments)]
    fn adapt(&self, x0: f64, x1: f64, f0: Complex64, f1: Complex64, tol: f64, depth: usize) -> Result<Complex64> {
        let h = x1 - x0;
        let xm = 0.5 * (x0 + x1);
        let fm = self.f(xm)?;
        let t1 = (f0 + f1) * (0.5 * h);
        let t2 = (f0 + fm * 2.0 + f1) * (0.25 * h);
        if (t2 - t1).norm() <= tol {
            return Ok(t2 + (t2 - t1) / 3.0);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence(format!("edge subdivision depth {MAX_DEPTH} exceeded")));
        }
        Ok(self.adapt(x0, xm, f0, fm, tol * 0.5, depth + 1)? + self.adapt(xm, x1, fm, f1, tol * 0.5, depth + 1)?)
    }
}

/// Number of zeros of `L` inside `rect`, from the argument principle.
pub fn count_zeros_rectangle(series: &Series, rect: &Rectangle) -> Result<ZeroCount> {
    if !(rect.sigma_lo >= SIGMA_MIN - 1e-12) {
        return Err(Error::SigmaTooSmall { sigma: rect.sigma_lo, min: SIGMA_MIN });
    }
    if !(rect.sigma_hi > rect.sigma_lo && rect.t_hi > rect.t_lo) {
        return Err(Error::InvalidInput("rectangle must have positive width and height".into()));
    }
    let corners = rect.corners();
    // Boundary must stay clear of zeros.
    let mut min_abs = f64::INFINITY;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        for k in 0..BOUNDARY_SAMPLES {
            let s = a + (b - a) * (k as f64 / BOUNDARY_SAMPLES as f64);
            min_abs = min_abs.min(series.evaluate(s, Precision::Eps(CONTOUR_EPS))?.value.norm());
        }
    }
    if !(min_abs > 100.0 * CONTOUR_EPS) {
        return Err(Error::BoundaryTooClose { min: min_abs });
    }

    let mut tol = 0.02;
    for _ in 0..4 {
        let mut total = Complex64::new(0.0, 0.0);
        for e in 0..4 {
            let edge = Edge { series, a: corners[e], b: corners[(e + 1) % 4] };
            let h = 1.0 / BOUNDARY_SAMPLES as f64;
            let mut f0 = edge.f(0.0)?;
            for k in 0..BOUNDARY_SAMPLES {
                let x1 = (k + 1) as f64 * h;
                let f1 = edge.f(x1)?;
                total += edge.adapt(k as f64 * h, x1, f0, f1, tol * h / 4.0, 0)?;
                f0 = f1;
            }
        }
        let raw = total / Complex64::new(0.0, 2.0 * PI);
        let count = raw.re.round();
        let residual = (raw - count).norm();
        if residual < 0.25 {
            return Ok(ZeroCount { count: count as i64, raw, residual });
        }
        tol *= 0.1;
    }
    Err(Error::NoConvergence("contour integral is not close to an integer".into()))
}

const NEWTON_STEPS: usize = 50;

/// Newton iteration for a zero of `L` starting at `seed`.
pub fn refine_zero(series: &Series, seed: Complex64) -> Result<Complex64> {
    let p = Precision::Eps(1e-13);
    let mut s = seed;
    for _ in 0..NEWTON_STEPS {
        let f = series.evaluate(s, p)?.value;
        let d = series.evaluate_derivative(s, p)?.value;
        if d.norm() == 0.0 {
            return Err(Error::Diverged(format!("vanishing derivative at {s}")));
        }
        let step = f / d;
        if step.norm() > 10.0 {
            return Err(Error::Diverged(format!("step of size {:.3e} from {s}", step.norm())));
        }
        let next = s - step;
        if next.re < SIGMA_MIN {
            return Err(Error::Diverged(format!("left the half-plane at {next}")));
        }
        s = next;
        if f.norm() <= 1e-10 && step.norm() <= 1e-11 {
            let f_end = series.evaluate(s, p)?.value;
            if f_end.norm() <= 1e-10 {
                return Ok(s);
            }
        }
    }
    Err(Error::Diverged(format!("no convergence in {NEWTON_STEPS} steps from {seed}")))
}

/// Empirical bracket for the supremum of real parts of zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaStar {
    /// Largest real part among confirmed zeros.
    pub sigma_low: f64,
    /// Smallest grid sigma above `sigma_low` from which every row up to one
    /// unit higher (or the end of the grid) stays above `10 * zero_tol`.
    pub sigma_high: Option<f64>,
    pub zeros: Vec<Complex64>,
    /// Rows with a small minimum whose refinement failed; treated as
    /// truncation artifacts or zeros outside reach of Newton's method.
    pub unconfirmed: Vec<ScanRow>,
    /// Always true: the bracket is scan-supported, not proved.
    pub empirical: bool,
}

pub fn estimate_sigma_star(series: &Series, cfg: &ScanConfig, zero_tol: f64) -> Result<SigmaStar> {
    let scan = min_modulus_scan(series, cfg)?;
    sigma_star_from_scan(series, &scan, zero_tol)
}

pub fn sigma_star_from_scan(series: &Series, scan: &ScanResult, zero_tol: f64) -> Result<SigmaStar> {
    let candidates: Vec<&ScanRow> = scan.rows.iter().filter(|r| r.min_modulus <= zero_tol).collect();
    let refined: Vec<(ScanRow, Result<Complex64>)> = candidates
        .par_iter()
        .map(|r| (**r, refine_zero(series, Complex64::new(r.sigma, r.argmin_t))))
        .collect();
    let mut zeros: Vec<Complex64> = Vec::new();
    let mut unconfirmed = Vec::new();
    for (row, res) in refined {
        match res {
            Ok(z) => {
                if !zeros.iter().any(|w| (w - z).norm() < 1e-6) {
                    zeros.push(z);
                }
            }
            Err(_) => unconfirmed.push(row),
        }
    }
    if zeros.is_empty() {
        return Err(Error::NoZerosFound);
    }
    zeros.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let sigma_low = zeros[0].re;
    let level = 10.0 * zero_tol;
    let rows = &scan.rows;
    let mut sigma_high = None;
    for (i, r) in rows.iter().enumerate() {
        if r.sigma <= sigma_low {
            continue;
        }
        let ok = rows[i..].iter().take_while(|q| q.sigma <= r.sigma + 1.0 + 1e-12).all(|q| q.min_modulus > level);
        if ok {
            sigma_high = Some(r.sigma);
            break;
        }
    }
    Ok(SigmaStar { sigma_low, sigma_high, zeros, unconfirmed, empirical: true })
}

/// Run `f` on a dedicated pool with `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    pool.install(f)
}

//! Evaluation on an arithmetic progression of heights `t_k = t0 + k dt`.
//!
//! Each term is carried as a rotor `r_n = a(n) n^{-sigma} e^{-i t log n}`
//! that is advanced by one complex multiply per step. Rotors are re-seeded
//! from scratch at every global index that is a multiple of [`RESEED`], so
//! the result at a given `k` does not depend on how the range is split
//! between workers.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use super::eval::{Precision, Series};
use super::tail::{self, TailMethod};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const RESEED: usize = 1024;

const LANES: usize = 8;

/// Amplitudes and logarithms of the nonzero terms at a fixed real part.
#[derive(Debug, Clone)]
pub struct RowTerms {
    pub amp: Vec<Complex64>,
    pub logs: Vec<f64>,
}

impl RowTerms {
    pub fn new(coeffs: &[Complex64], sigma: f64) -> Self {
        let mut amp = Vec::new();
        let mut logs = Vec::new();
        for (i, &a) in coeffs.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let l = ((i + 1) as f64).ln();
            amp.push(a * (-sigma * l).exp());
            logs.push(l);
        }
        Self { amp, logs }
    }
}

/// Partial sums `sum_n r_n(t_k)` for `k = k0 .. k0 + count` (`count <= RESEED`
/// is not required, but only `k0` is seeded exactly).
pub fn rotor_block<T: Real>(terms: &RowTerms, t0: f64, dt: f64, k0: usize, count: usize) -> Vec<Complex<T>> {
    let n = terms.amp.len();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    let mut wr = Vec::with_capacity(n);
    let mut wi = Vec::with_capacity(n);
    let t_start = t0 + k0 as f64 * dt;
    for (a, &l) in terms.amp.iter().zip(&terms.logs) {
        let (s, c) = (-t_start * l).sin_cos();
        let r = a * Complex64::new(c, s);
        re.push(T::lit(r.re));
        im.push(T::lit(r.im));
        let (s, c) = (-dt * l).sin_cos();
        wr.push(T::lit(c));
        wi.push(T::lit(s));
    }
    // Pad to a multiple of LANES with inert zero rotors.
    let padded = (n + LANES - 1) / LANES * LANES;
    for v in [&mut re, &mut im, &mut wr, &mut wi] {
        v.resize(padded, T::zero());
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut sr = [T::zero(); LANES];
        let mut si = [T::zero(); LANES];
        for (((re, im), wr), wi) in re
            .chunks_exact_mut(LANES)
            .zip(im.chunks_exact_mut(LANES))
            .zip(wr.chunks_exact(LANES))
            .zip(wi.chunks_exact(LANES))
        {
            for l in 0..LANES {
                let (a, b) = (re[l], im[l]);
                sr[l] += a;
                si[l] += b;
                re[l] = a * wr[l] - b * wi[l];
                im[l] = a * wi[l] + b * wr[l];
            }
        }
        let mut tr = T::zero();
        let mut ti = T::zero();
        for l in 0..LANES {
            tr += sr[l];
            ti += si[l];
        }
        out.push(Complex::new(tr, ti));
    }
    out
}

/// Number of grid points in `t0, t0 + dt, ..., <= t1`.
pub fn grid_len(t0: f64, t1: f64, dt: f64) -> usize {
    ((t1 - t0) / dt + 1e-9).floor() as usize + 1
}

/// Values on a t-grid together with the plan that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub values: Vec<Complex64>,
    pub tail_bound: f64,
    pub terms_used: usize,
    pub warning: bool,
}

/// Minimum of `|F|` along one vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMin {
    pub sigma: f64,
    pub min_modulus: f64,
    pub argmin_t: f64,
    pub max_modulus: f64,
    pub tail_bound: f64,
    pub warning: bool,
}

struct PreparedRow {
    terms: RowTerms,
    sigma: f64,
    n: usize,
    em: Option<usize>,
    bound: f64,
    warning: bool,
}

impl Series {
    fn prepare_row(&self, sigma: f64, t0: f64, t1: f64, dt: f64, precision: Precision) -> Result<PreparedRow> {
        if !(dt > 0.0) || !(t1 >= t0) {
            return Err(Error::InvalidInput(format!("bad t-grid {t0}:{t1}:{dt}")));
        }
        let t_abs = t0.abs().max(t1.abs());
        let plan = self.plan(sigma, t_abs, precision, false)?;
        let coeffs = self.coefficients(plan.terms)?;
        let em = match plan.method {
            TailMethod::EulerMaclaurin { order } => Some(order),
            TailMethod::Truncate => None,
        };
        let warning = plan.warning || matches!(precision, Precision::Eps(e) if !(plan.bound <= e));
        Ok(PreparedRow {
            terms: RowTerms::new(&coeffs[..plan.terms], sigma),
            sigma,
            n: plan.terms,
            em,
            bound: plan.bound,
            warning,
        })
    }

    fn block(&self, row: &PreparedRow, t0: f64, dt: f64, b: usize, len: usize) -> Vec<Complex64> {
        let k0 = b * RESEED;
        let count = RESEED.min(len - k0);
        let mut v = rotor_block::<f64>(&row.terms, t0, dt, k0, count);
        if let Some(order) = row.em {
            let per = self.periodicity().unwrap();
            for (j, z) in v.iter_mut().enumerate() {
                let t = t0 + (k0 + j) as f64 * dt;
                *z += tail::em_tail(per, row.n, Complex64::new(row.sigma, t), order, false);
            }
        }
        v
    }

    /// `F(sigma + i t_k)` for `t_k = t0 + k dt <= t1`.
    pub fn evaluate_grid(&self, sigma: f64, t0: f64, t1: f64, dt: f64, precision: Precision) -> Result<GridValues> {
        let row = self.prepare_row(sigma, t0, t1, dt, precision)?;
        let len = grid_len(t0, t1, dt);
        let blocks = (len + RESEED - 1) / RESEED;
        let parts: Vec<Vec<Complex64>> = (0..blocks).into_par_iter().map(|b| self.block(&row, t0, dt, b, len)).collect();
        Ok(GridValues {
            values: parts.into_iter().flatten().collect(),
            tail_bound: row.bound,
            terms_used: row.n,
            warning: row.warning,
        })
    }

    /// Minimum and maximum of `|F(sigma + i t_k)|` over the grid. The first
    /// index attaining the minimum wins.
    pub fn row_min(&self, sigma: f64, t0: f64, t1: f64, dt: f64, precision: Precision) -> Result<RowMin> {
        let row = self.prepare_row(sigma, t0, t1, dt, precision)?;
        let len = grid_len(t0, t1, dt);
        let blocks = (len + RESEED - 1) / RESEED;
        let parts: Vec<(f64, usize, f64)> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let v = self.block(&row, t0, dt, b, len);
                let mut best = (f64::INFINITY, b * RESEED, 0.0f64);
                for (j, z) in v.iter().enumerate() {
                    let m = z.norm();
                    if m < best.0 {
                        best.0 = m;
                        best.1 = b * RESEED + j;
                    }
                    best.2 = best.2.max(m);
                }
                best
            })
            .collect();
        let mut min = f64::INFINITY;
        let mut arg = 0usize;
        let mut max = 0.0f64;
        for (m, k, mx) in parts {
            if m < min {
                min = m;
                arg = k;
            }
            max = max.max(mx);
        }
        Ok(RowMin {
            sigma,
            min_modulus: min,
            argmin_t: t0 + arg as f64 * dt,
            max_modulus: max,
            tail_bound: row.bound,
            warning: row.warning,
        })
    }
}

//! Lower bounds for radii of convexity of coefficient-bounded power series,
//! the Alexander-Remak coefficient criterion and a direct curvature test.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult<T> {
    pub radius: T,
    /// Coefficient bound; `None` for the bounded-coefficient radius R1.
    pub k: Option<T>,
    /// `|P(radius)|` for the normalized polynomial `P`.
    pub residual: T,
    /// Width of the final bisection bracket.
    pub bracket: T,
}

/// Polynomial with real coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T>(pub Vec<T>);

impl<T: Real> Poly<T> {
    pub fn eval(&self, x: T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly<T> {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * T::from_usize_lossy(k)).collect())
    }

    fn add(&self, other: &Poly<T>, scale: T) -> Poly<T> {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|k| self.0.get(k).copied().unwrap_or_else(T::zero) + scale * other.0.get(k).copied().unwrap_or_else(T::zero))
            .collect())
    }

    /// `(1 - X)^m`
    pub fn one_minus_x_pow(m: usize) -> Poly<T> {
        let mut c = vec![T::zero(); m + 1];
        let mut binom = 1.0f64;
        for (k, ck) in c.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *ck = T::lit(sign * binom);
            binom = binom * (m - k) as f64 / (k + 1) as f64;
        }
        Poly(c)
    }
}

fn lits<T: Real>(c: &[f64]) -> Poly<T> {
    Poly(c.iter().map(|&x| T::lit(x)).collect())
}

/// `2(1-X)^4 - 1 - 4X - X^2`
pub fn r1_polynomial<T: Real>() -> Poly<T> {
    Poly::one_minus_x_pow(4).add(&lits(&[1.0, 4.0, 1.0]), -T::lit(0.5)).scaled(T::lit(2.0))
}

impl<T: Real> Poly<T> {
    fn scaled(&self, s: T) -> Poly<T> {
        Poly(self.0.iter().map(|&c| c * s).collect())
    }
}

/// `lhs(X) = (1-X)^m / K`, written so the coefficients stay O(1): for
/// `K <= 1` as `K lhs - (1-X)^m`, otherwise as `lhs - (1-X)^m / K`.
fn balanced<T: Real>(lhs: &[f64], m: usize, k: T) -> Poly<T> {
    let l = lits::<T>(lhs);
    let rhs = Poly::one_minus_x_pow(m);
    if k <= T::one() {
        l.scaled(k).add(&rhs, -T::one())
    } else {
        l.add(&rhs, -T::one() / k)
    }
}

/// `X^3 - 3X^2 + 4X = (1-X)^3 / K`
pub fn r2_polynomial<T: Real>(k: T) -> Poly<T> {
    balanced(&[0.0, 4.0, -3.0, 1.0], 3, k)
}

/// `X^5 - 5X^4 + 11X^3 + X^2 + 16X = (1-X)^5 / K`
pub fn r3_polynomial<T: Real>(k: T) -> Poly<T> {
    balanced(&[0.0, 16.0, 1.0, 11.0, -5.0, 1.0], 5, k)
}

const SCAN_POINTS: usize = 10_000;

/// Smallest root of `p` in `(0, 1)`: first sign change on a uniform grid,
/// bisection down to the bracket limit, then Newton polishing kept inside
/// the bracket.
pub fn smallest_root_in_unit_interval<T: Real>(p: &Poly<T>) -> Option<(T, T)> {
    let n = SCAN_POINTS;
    let mut prev_x = T::zero();
    let mut prev_neg = p.eval(prev_x) < T::zero();
    let mut bracket = None;
    for i in 1..=n {
        let x = T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let v = p.eval(x);
        if v == T::zero() {
            return Some((x, T::zero()));
        }
        if (v < T::zero()) != prev_neg {
            bracket = Some((prev_x, x));
            break;
        }
        prev_x = x;
        prev_neg = v < T::zero();
    }
    let (mut lo, mut hi) = bracket?;
    let width_target = T::lit(1e-14);
    let flo_neg = p.eval(lo) < T::zero();
    while hi - lo > width_target {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = p.eval(mid);
        if v == T::zero() {
            lo = mid;
            hi = mid;
            break;
        }
        if (v < T::zero()) == flo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dp = p.derivative();
    let mut x = (lo + hi) * T::lit(0.5);
    for _ in 0..3 {
        let d = dp.eval(x);
        if d == T::zero() {
            break;
        }
        let nx = x - p.eval(x) / d;
        if nx >= lo && nx <= hi {
            x = nx;
        }
    }
    Some((x, hi - lo))
}

fn radius<T: Real>(p: Poly<T>, k: Option<T>) -> RadiusResult<T> {
    let (radius, bracket) = smallest_root_in_unit_interval(&p).expect("polynomial changes sign on (0, 1)");
    RadiusResult { radius, k, residual: p.eval(radius).abs(), bracket }
}

pub fn radius_r1<T: Real>() -> RadiusResult<T> {
    radius(r1_polynomial(), None)
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::InvalidInput(format!("K must be positive and finite, got {k}")));
    }
    Ok(())
}

pub fn radius_r2<T: Real>(k: T) -> Result<RadiusResult<T>> {
    check_k(k)?;
    Ok(radius(r2_polynomial(k), Some(k)))
}

pub fn radius_r3<T: Real>(k: T) -> Result<RadiusResult<T>> {
    check_k(k)?;
    Ok(radius(r3_polynomial(k), Some(k)))
}

/// Bound on `|b(n)|` beyond the explicitly listed coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailModel<T> {
    /// `b(n) = 0` for `n > N_cut`.
    Zero,
    /// `|b(n)| <= a * ratio^n`.
    Geometric { a: T, ratio: T },
    /// `|b(n)| <= k * n^m`.
    Power { k: T, m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemakCheck<T> {
    pub holds: bool,
    pub sum: T,
    /// `1 - sum`
    pub margin: T,
}

/// `sum_{n >= 1} n^j x^n` via Eulerian numbers.
fn polylog_neg<T: Real>(j: u32, x: T) -> T {
    if j == 0 {
        return x / (T::one() - x);
    }
    let j = j as usize;
    // Eulerian numbers A(j, k), k = 0..j-1
    let mut a = vec![1.0f64];
    for n in 2..=j {
        let mut next = vec![0.0; n];
        for k in 0..n {
            let left = if k >= 1 { a[k - 1] * (n - k) as f64 } else { 0.0 };
            let here = if k < a.len() { a[k] * (k + 1) as f64 } else { 0.0 };
            next[k] = left + here;
        }
        a = next;
    }
    let num = a.iter().rev().fold(T::zero(), |acc, &c| acc * x + T::lit(c));
    x * num / (T::one() - x).powi(j as i32 + 1)
}

/// `sum_{n >= 2} n^2 |b(n)| r^{n-1} + tail <= 1`. `bounds[i]` bounds `|b(i + 2)|`.
pub fn check_alexander_remak<T: Real>(bounds: &[T], tail: TailModel<T>, r: T) -> Result<RemakCheck<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let n_cut = bounds.len() + 1;
    let mut sum = T::zero();
    // Sum from the smallest terms up for accuracy.
    for (i, &b) in bounds.iter().enumerate().rev() {
        let n = T::from_usize_lossy(i + 2);
        sum += n * n * b * r.powi(i as i32 + 1);
    }
    let tail_sum = match tail {
        TailModel::Zero => T::zero(),
        TailModel::Geometric { a, ratio } => {
            let x = ratio * r;
            if x >= T::one() {
                return Err(Error::DivergentTail((x).to_f64_lossy()));
            }
            // a / r * sum_{n > N} n^2 x^n
            let full = polylog_neg(2, x);
            let head: T = (1..=n_cut).map(|n| T::from_usize_lossy(n * n) * x.powi(n as i32)).sum();
            a / r * (full - head)
        }
        TailModel::Power { k, m } => {
            if r >= T::one() {
                return Err(Error::DivergentTail(r.to_f64_lossy()));
            }
            // k / r * sum_{n > N} n^{m+2} r^n
            let full = polylog_neg(m + 2, r);
            let head: T = (1..=n_cut).map(|n| T::from_usize_lossy(n).powi(m as i32 + 2) * r.powi(n as i32)).sum();
            k / r * (full - head)
        }
    };
    let sum = sum + tail_sum;
    Ok(RemakCheck { holds: sum <= T::one(), sum, margin: T::one() - sum })
}

/// Convexity test for the image of `|z| = r` under `f(z) = sum coeffs[n] z^n`:
/// the signed curvature keeps one sign and the tangent turns exactly once
/// (a locally convex curve may otherwise wind several times).
pub fn curve_convexity_check<T: Real>(coeffs: &[Complex<T>], r: T, samples: usize) -> Result<bool> {
    if samples == 0 || !(r > T::zero()) {
        return Err(Error::InvalidInput("need r > 0 and at least one sample".into()));
    }
    let mut sign = 0i8;
    let mut turning = T::zero();
    let mut first: Option<Complex<T>> = None;
    let mut last: Option<Complex<T>> = None;
    for s in 0..samples {
        let theta = T::TAU() * T::from_usize_lossy(s) / T::from_usize_lossy(samples);
        let z = Complex::from_polar(r, theta);
        let (mut d1, mut d2) = (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
        for (n, &c) in coeffs.iter().enumerate().rev() {
            // Horner for f' and f'' from termwise derivatives.
            let nf = T::from_usize_lossy(n);
            if n >= 1 {
                d1 = d1 * z + c * nf;
            }
            if n >= 2 {
                d2 = d2 * z + c * (nf * (nf - T::one()));
            }
        }
        // d1 accumulated sum n c_n z^{n-1}; d2 sum n(n-1) c_n z^{n-2}.
        if d1.norm() < T::lit(1e-12) {
            return Err(Error::DerivativeVanishes { theta: theta.to_f64_lossy() });
        }
        let i = Complex::new(T::zero(), T::one());
        let w1 = i * z * d1;
        let w2 = -(z * d1 + z * z * d2);
        let curv = (w1.conj() * w2).im / w1.norm().powi(3);
        if let Some(prev) = last {
            turning += (w1 / prev).arg();
        } else {
            first = Some(w1);
        }
        last = Some(w1);
        let sg = if curv > T::zero() {
            1
        } else if curv < T::zero() {
            -1
        } else {
            0
        };
        if sg == 0 {
            return Ok(false);
        }
        if sign == 0 {
            sign = sg;
        } else if sg != sign {
            return Ok(false);
        }
    }
    if let (Some(a), Some(b)) = (first, last) {
        turning += (a / b).arg();
    }
    let turns = (turning / T::TAU()).abs();
    Ok((turns - T::one()).abs() < T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r1_signs_and_residual() {
        let p = r1_polynomial::<f64>();
        assert_eq!(p.eval(0.0), 1.0);
        assert!(p.eval(0.2) < 0.0);
        let r = radius_r1::<f64>();
        assert!(r.residual <= 1e-13 && r.bracket <= 1e-14);
    }

    #[test]
    fn polylog_matches_direct_sum() {
        for j in 0..6 {
            let x = 0.37f64;
            let direct: f64 = (1..400).map(|n| (n as f64).powi(j) * x.powi(n)).sum();
            assert!((polylog_neg(j as u32, x) - direct).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn geometric_tail_divergence() {
        let e = check_alexander_remak(&[0.0f64], TailModel::Geometric { a: 1.0, ratio: 2.0 }, 0.6);
        assert!(matches!(e, Err(Error::DivergentTail(_))));
        let ok = check_alexander_remak(&[], TailModel::Geometric { a: 0.01, ratio: 1.0 }, 0.5).unwrap();
        let direct: f64 = (2..200).map(|n| (n * n) as f64 * 0.01 * 0.5f64.powi(n - 1)).sum();
        assert!((ok.sum - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(radius_r2(0.0f64).is_err());
        assert!(radius_r3(-1.0f64).is_err());
    }

    #[test]
    fn generic_f32() {
        let r = radius_r3(1.0f32).unwrap();
        assert!((r.radius - 0.048_516_244).abs() < 1e-5);
    }
}

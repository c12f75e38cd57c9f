//! Quadrature rules: Gauss-Legendre and adaptive Simpson.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let nf = T::from_usize_lossy(n);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + half)).cos();
        let mut dp = one;
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, z);
            for k in 2..=n {
                let kf = T::from_usize_lossy(k);
                let p2 = ((two * kf - one) * z * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { one } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - one);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        if n == 1 {
            z = T::zero();
            dp = one;
        }
        let wi = two / ((one - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1]
        x[i] = half * (one - z);
        x[n - 1 - i] = half * (one + z);
        w[i] = half * wi;
        w[n - 1 - i] = half * wi;
    }
    if n == 1 {
        w[0] = one;
    }
    (x, w)
}

/// Adaptive Simpson rule for a complex integrand on `[a, b]` with absolute
/// tolerance `tol`. `breaks` are extra subdivision points (e.g. where the
/// integrand oscillates fastest).
pub fn adaptive_simpson<T: Real, F>(f: &F, a: T, b: T, tol: T, breaks: &[T]) -> Result<Complex<T>>
where
    F: Fn(T) -> Complex<T>,
{
    let mut pts = vec![a];
    let mut inner: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(inner);
    pts.push(b);
    let pieces = T::from_usize_lossy(pts.len() - 1);
    let mut total = Complex::new(T::zero(), T::zero());
    for w in pts.windows(2) {
        // Start from 8 panels so symmetric integrands cannot fool the first test.
        let eight = T::lit(8.0);
        let h = (w[1] - w[0]) / eight;
        for k in 0..8 {
            let x0 = w[0] + h * T::from_usize_lossy(k);
            let x1 = if k == 7 { w[1] } else { x0 + h };
            let xm = (x0 + x1) * T::lit(0.5);
            let (f0, fm, f1) = (f(x0), f(xm), f(x1));
            let whole = simpson(x0, x1, f0, fm, f1);
            total = total + step(f, x0, x1, f0, fm, f1, whole, tol / (pieces * eight), 0)?;
        }
    }
    Ok(total)
}

const MAX_DEPTH: usize = 48;

fn simpson<T: Real>(a: T, b: T, fa: Complex<T>, fm: Complex<T>, fb: Complex<T>) -> Complex<T> {
    (fa + fm * T::lit(4.0) + fb) * ((b - a) / T::lit(6.0))
}

#[allow(clippy::too_many_arguments)]
fn step<T: Real, F>(
    f: &F,
    a: T,
    b: T,
    fa: Complex<T>,
    fm: Complex<T>,
    fb: Complex<T>,
    whole: Complex<T>,
    tol: T,
    depth: usize,
) -> Result<Complex<T>>
where
    F: Fn(T) -> Complex<T>,
{
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let lm = (a + m) * half;
    let rm = (m + b) * half;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if diff.norm() <= T::lit(15.0) * tol || (b - a) <= T::epsilon() * (a.abs() + b.abs()) {
        return Ok(left + right + diff / T::lit(15.0));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence(format!("adaptive Simpson exceeded depth {MAX_DEPTH}")));
    }
    Ok(step(f, a, m, fa, flm, fm, left, tol * half, depth + 1)? + step(f, m, b, fm, frm, fb, right, tol * half, depth + 1)?)
}

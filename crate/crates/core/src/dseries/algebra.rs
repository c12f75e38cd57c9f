//! Dirichlet convolution and inversion over any commutative ring with
//! division by the leading coefficient.
//!
//! Vectors are 0-based: `a[0]` is the coefficient of `1^{-s}`.

use std::ops::Neg;

use num_traits::Num;

/// `(a * b)(n) = sum_{d | n} a(d) b(n/d)` for `n = 1..=len`.
pub fn convolve<T>(a: &[T], b: &[T], len: usize) -> Vec<T>
where
    T: Num + Clone,
{
    let mut out = vec![T::zero(); len];
    for d in 1..=len.min(a.len()) {
        let ad = &a[d - 1];
        if ad.is_zero() {
            continue;
        }
        let mut m = 1;
        while d * m <= len && m <= b.len() {
            out[d * m - 1] = out[d * m - 1].clone() + ad.clone() * b[m - 1].clone();
            m += 1;
        }
    }
    out
}

/// Dirichlet inverse of `a`, or `None` if `a(1) = 0`.
pub fn inverse<T>(a: &[T], len: usize) -> Option<Vec<T>>
where
    T: Num + Clone + Neg<Output = T>,
{
    if a.is_empty() || a[0].is_zero() {
        return None;
    }
    let inv1 = T::one() / a[0].clone();
    let mut out = vec![T::zero(); len];
    // acc[n] collects sum_{d | n, d > 1} a(d) b(n/d) as b is filled in.
    let mut acc = vec![T::zero(); len];
    for n in 1..=len {
        let bn = if n == 1 { inv1.clone() } else { -(inv1.clone() * acc[n - 1].clone()) };
        if !bn.is_zero() {
            let mut d = 2;
            while n * d <= len && d <= a.len() {
                let ad = &a[d - 1];
                if !ad.is_zero() {
                    acc[n * d - 1] = acc[n * d - 1].clone() + ad.clone() * bn.clone();
                }
                d += 1;
            }
        }
        out[n - 1] = bn;
    }
    Some(out)
}

/// The identity element `(1, 0, 0, ...)`.
pub fn unit<T: Num + Clone>(len: usize) -> Vec<T> {
    let mut v = vec![T::zero(); len];
    if len > 0 {
        v[0] = T::one();
    }
    v
}

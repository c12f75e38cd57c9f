//! Local Euler factors.

use num_complex::Complex64;

use super::spec::{EulerData, SeriesSpec};
use crate::error::{Error, Result};

/// Truncated `sum_{k <= k_max} b(p^k) p^{-ks}` for the local logarithm, with
/// `b(p^k) = sum_i sign_i alpha_i(p)^k / k`.
pub fn log_local_factor(spec: &SeriesSpec, p: u64, s: Complex64, k_max: usize) -> Result<Complex64> {
    let e = spec.euler_data().ok_or(Error::NoEulerProduct)?;
    Ok(log_local_factor_data(&e, p, s, k_max))
}

pub fn log_local_factor_data(e: &EulerData, p: u64, s: Complex64, k_max: usize) -> Complex64 {
    let x = (-s * (p as f64).ln()).exp();
    let mut total = Complex64::new(0.0, 0.0);
    for (alpha, sign) in e.local_roots(p) {
        let z = alpha * x;
        let mut pw = Complex64::new(1.0, 0.0);
        for k in 1..=k_max {
            pw *= z;
            total += pw * (sign / k as f64);
        }
    }
    total
}

/// Bound on the terms dropped by [`log_local_factor`].
pub fn log_local_factor_tail(e: &EulerData, p: u64, sigma: f64, k_max: usize) -> f64 {
    let x = (p as f64).powf(-sigma);
    e.roots.len() as f64 * x.powi(k_max as i32 + 1) / (1.0 - x)
}

/// Closed form `log F_p(s) = -sum_i sign_i log(1 - alpha_i p^{-s})`.
pub fn log_local(e: &EulerData, p: u64, s: Complex64) -> Complex64 {
    let x = (-s * (p as f64).ln()).exp();
    e.local_roots(p)
        .into_iter()
        .map(|(alpha, sign)| -(Complex64::new(1.0, 0.0) - alpha * x).ln() * sign)
        .sum()
}

/// Closed form `F_p'(s) / F_p(s) = -sum_i sign_i alpha_i p^{-s} log p / (1 - alpha_i p^{-s})`.
pub fn log_derivative_local(e: &EulerData, p: u64, s: Complex64) -> Complex64 {
    let lp = (p as f64).ln();
    let x = (-s * lp).exp();
    e.local_roots(p)
        .into_iter()
        .map(|(alpha, sign)| {
            let z = alpha * x;
            -z * lp / (Complex64::new(1.0, 0.0) - z) * sign
        })
        .sum()
}

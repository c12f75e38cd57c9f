//! Truncation planning: how many terms to sum and how to bound (or
//! correct for) the rest.
//!
//! Two strategies are available. Plain truncation bounds the tail with the
//! coefficient growth model. For eventually periodic coefficients the tail
//! can instead be split into residue classes and each class summed in closed
//! form by Euler-Maclaurin, leaving a remainder that decays like
//! `(q|s| / 2 pi u)^{2p}`; this makes the planner usable down to `sigma = 1.01`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::spec::{CoeffBound, Periodicity};
use crate::arith::primes_up_to;

/// Default cap on the number of terms.
pub const N_MAX: usize = 10_000_000;

/// Smallest real part accepted by the evaluators.
pub const SIGMA_MIN: f64 = 1.01;

/// Highest Euler-Maclaurin order tried by the planner.
pub const EM_MAX_ORDER: usize = 15;

/// `B_2, B_4, ..., B_30`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// `B_{2k} / (2k)!` for `k = 1..=15`.
fn em_coefficients() -> &'static [f64; 15] {
    static C: OnceLock<[f64; 15]> = OnceLock::new();
    C.get_or_init(|| {
        let mut out = [0.0; 15];
        let mut fact = 1.0f64;
        for k in 1..=15 {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            out[k - 1] = BERNOULLI[k - 1] / fact;
        }
        out
    })
}

/// `2 zeta(2p) / (2 pi)^{2p}`, which bounds `|B_{2p}(x - [x])| / (2p)!`.
fn em_remainder_constant(p: usize) -> f64 {
    let z: f64 = (1..200).map(|n| (n as f64).powi(-2 * p as i32)).sum();
    2.0 * z / (2.0 * PI).powi(2 * p as i32)
}

/// How the evaluator should treat the terms beyond `terms`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailMethod {
    /// Drop them; `bound` covers the error.
    Truncate,
    /// Add the Euler-Maclaurin tail of order `order`; `bound` covers its remainder.
    EulerMaclaurin { order: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub terms: usize,
    pub method: TailMethod,
    /// Bound on the total error for every `s` with the planned real part
    /// and `|Im s| <= t_max`.
    pub bound: f64,
    /// Set when the requested accuracy could not be met.
    pub warning: bool,
}

/// Result of [`truncation_length`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub terms: usize,
    pub bound: f64,
    pub capped: bool,
}

/// `D_delta = prod_{p < 2^{1/delta}} max_k (k+1) / p^{k delta}`, so that
/// `d(n) <= D_delta n^delta`.
pub fn divisor_constant(delta: f64) -> f64 {
    let limit = 2f64.powf(1.0 / delta).ceil() as usize;
    let mut log_d = 0.0;
    for p in primes_up_to(limit) {
        let pf = p as f64;
        if pf >= 2f64.powf(1.0 / delta) {
            continue;
        }
        let mut best = 0.0f64;
        for k in 1..200 {
            let v = ((k + 1) as f64).ln() - k as f64 * delta * pf.ln();
            best = best.max(v);
            if v < best - 5.0 {
                break;
            }
        }
        log_d += best;
    }
    log_d.exp()
}

const DELTAS: [f64; 8] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5];

fn divisor_constants() -> &'static [f64; 8] {
    static D: OnceLock<[f64; 8]> = OnceLock::new();
    D.get_or_init(|| {
        let mut out = [0.0; 8];
        for (o, &d) in out.iter_mut().zip(&DELTAS) {
            *o = divisor_constant(d);
        }
        out
    })
}

/// `sum_{n > N} n^{-a}` bound (`a > 1`), optionally log-weighted.
fn power_tail(n: usize, a: f64, log_weighted: bool) -> f64 {
    let nf = n.max(1) as f64;
    if !log_weighted {
        return nf.powf(1.0 - a) / (a - 1.0);
    }
    let l = nf.ln();
    let integral = nf.powf(1.0 - a) * (l / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)));
    // x^{-a} log x decreases only for x > e^{1/a}; add its maximum otherwise.
    if l * a >= 1.0 {
        integral
    } else {
        integral + 1.0 / (std::f64::consts::E * a)
    }
}

/// Rigorous bound on `sum_{n > N} |a(n)| (log n)^j n^{-sigma}` (`j` = 0 or 1).
pub fn plain_tail_bound(bound: &CoeffBound, coeffs: Option<&[Complex64]>, n: usize, sigma: f64, log_weighted: bool) -> f64 {
    match *bound {
        CoeffBound::Constant(c) => c * power_tail(n, sigma, log_weighted),
        CoeffBound::DivisorPower { c, m } => {
            let mut best = f64::INFINITY;
            for (&delta, &dd) in DELTAS.iter().zip(divisor_constants()) {
                let a = sigma - m as f64 * delta;
                if a <= 1.0 {
                    continue;
                }
                best = best.min(c * dd.powi(m as i32) * power_tail(n, a, log_weighted));
            }
            best
        }
        CoeffBound::Finite { .. } => match coeffs {
            Some(a) => a
                .iter()
                .enumerate()
                .skip(n)
                .map(|(i, z)| {
                    let k = (i + 1) as f64;
                    let w = if log_weighted { k.ln() } else { 1.0 };
                    z.norm() * w * k.powf(-sigma)
                })
                .sum(),
            None => f64::INFINITY,
        },
        CoeffBound::Unknown => f64::INFINITY,
    }
}

/// Smallest `N <= n_max` whose plain tail bound is at most `eps`.
pub fn truncation_length(
    bound: &CoeffBound,
    coeffs: Option<&[Complex64]>,
    sigma: f64,
    eps: f64,
    n_max: usize,
    log_weighted: bool,
) -> Truncation {
    if let CoeffBound::Finite { .. } = bound {
        if let Some(a) = coeffs {
            let mut tail = 0.0;
            let mut n = a.len();
            while n > 0 {
                let k = n as f64;
                let w = if log_weighted { k.ln() } else { 1.0 };
                let add = a[n - 1].norm() * w * k.powf(-sigma);
                if tail + add > eps {
                    break;
                }
                tail += add;
                n -= 1;
            }
            return Truncation { terms: n.max(1), bound: plain_tail_bound(bound, coeffs, n.max(1), sigma, log_weighted), capped: false };
        }
    }
    let f = |n: usize| plain_tail_bound(bound, coeffs, n, sigma, log_weighted);
    let at_cap = f(n_max);
    if !(at_cap <= eps) {
        return Truncation { terms: n_max, bound: at_cap, capped: true };
    }
    let (mut lo, mut hi) = (1usize, n_max);
    if f(lo) <= eps {
        return Truncation { terms: 1, bound: f(1), capped: false };
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Truncation { terms: hi, bound: f(hi), capped: false }
}

/// `prod_{i<k} |sigma + i + i t|`.
fn pochhammer_abs(sigma: f64, t: f64, k: usize) -> f64 {
    (0..k).map(|i| (sigma + i as f64).hypot(t)).product()
}

/// Remainder bound for one residue class whose first tail index is `u`.
pub fn em_remainder(sigma: f64, t_abs: f64, q: f64, u: f64, p: usize, log_weighted: bool) -> f64 {
    let a = sigma + 2.0 * p as f64;
    let base = em_remainder_constant(p) * pochhammer_abs(sigma, t_abs, 2 * p) * q.powi(2 * p as i32 - 1);
    let decay = u.powf(1.0 - a);
    if !log_weighted {
        return base * decay / (a - 1.0);
    }
    let s_inv: f64 = (0..2 * p).map(|i| 1.0 / (sigma + i as f64).hypot(t_abs)).sum();
    base * decay * (s_inv / (a - 1.0) + u.ln() / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)))
}

/// Bound on the EM remainder summed over residue classes, using `u >= N + 1`.
fn em_total_bound(per: &Periodicity, n: usize, sigma: f64, t_abs: f64, p: usize, log_weighted: bool) -> f64 {
    let weight: f64 = per.pattern.iter().map(|z| z.norm()).sum();
    if weight == 0.0 {
        return 0.0;
    }
    weight * em_remainder(sigma, t_abs, per.period as f64, (n + 1) as f64, p, log_weighted)
}

/// Cheapest plan reaching `eps` at real part `sigma` for all `|t| <= t_abs`.
pub fn plan(
    bound: &CoeffBound,
    periodic: Option<&Periodicity>,
    coeffs_hint: Option<&[Complex64]>,
    sigma: f64,
    t_abs: f64,
    eps: f64,
    n_max: usize,
    log_weighted: bool,
) -> Plan {
    let plain = truncation_length(bound, coeffs_hint, sigma, eps, n_max, log_weighted);
    let mut best = Plan {
        terms: plain.terms,
        method: TailMethod::Truncate,
        bound: plain.bound,
        warning: plain.capped,
    };
    let per = match periodic {
        Some(p) if !matches!(bound, CoeffBound::Finite { .. }) => p,
        _ => return best,
    };
    for p in 1..=EM_MAX_ORDER {
        let f = |n: usize| em_total_bound(per, n, sigma, t_abs, p, log_weighted);
        let lo0 = per.offset.max(1);
        let cap = if best.warning { n_max } else { best.terms.min(n_max) };
        if cap < lo0 || !(f(cap) <= eps) {
            continue;
        }
        let (mut lo, mut hi) = (lo0, cap);
        if f(lo) <= eps {
            hi = lo;
        } else {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if f(mid) <= eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        if best.warning || hi < best.terms {
            best = Plan { terms: hi, method: TailMethod::EulerMaclaurin { order: p }, bound: f(hi), warning: false };
        }
    }
    best
}

/// Euler-Maclaurin value of `sum_{n > N} a(n) n^{-s}` (or of the
/// derivative `-sum a(n) log n n^{-s}` when `derivative` is set), with
/// `a` periodic beyond `N >= offset`.
pub fn em_tail(per: &Periodicity, n: usize, s: Complex64, p: usize, derivative: bool) -> Complex64 {
    let q = per.period;
    let qf = q as f64;
    let coeffs = em_coefficients();
    let one = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let a = per.pattern[r - 1];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        // first index n' > N with n' = r (mod q)
        let m = if n < r { 0 } else { (n - r) / q + 1 };
        let u = (r + q * m) as f64;
        let rho = qf / u;
        let lu = u.ln();
        let pw = (-s * lu).exp();
        let mut g = Complex64::new(u / qf, 0.0) / (s - one) + 0.5;
        let mut dg = -Complex64::new(u / qf, 0.0) / ((s - one) * (s - one));
        // (s)_{2k-1} rho^{2k-1} and the running sum of 1/(s+i)
        let mut poch = s * rho;
        let mut harmonic = one / s;
        for (k, &c) in coeffs.iter().enumerate().take(p) {
            let k = k + 1;
            g += poch * c;
            if derivative {
                dg += poch * harmonic * c;
            }
            if k < p {
                let i1 = (2 * k - 1) as f64;
                let i2 = (2 * k) as f64;
                poch = poch * (s + i1) * (s + i2) * rho * rho;
                if derivative {
                    harmonic += one / (s + i1) + one / (s + i2);
                }
            }
        }
        let term = if derivative { pw * (dg - g * lu) } else { pw * g };
        total += a * term;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_model_examples() {
        let b = CoeffBound::Constant(1.0);
        let t = truncation_length(&b, None, 8.0, 1e-9, N_MAX, false);
        assert_eq!(t.terms, 15);
        assert!(!t.capped);
        let t = truncation_length(&b, None, 2.0, 10.0, N_MAX, false);
        assert_eq!(t.terms, 1);
        let t = truncation_length(&b, None, 1.01, 1e-8, N_MAX, false);
        assert!(t.capped);
        assert!(t.bound > 1e-8);
    }

    #[test]
    fn bounds_are_monotone() {
        let b = CoeffBound::DivisorPower { c: 1.0, m: 1 };
        let mut prev = f64::INFINITY;
        for n in [1usize, 10, 100, 1000, 10_000] {
            let v = plain_tail_bound(&b, None, n, 3.0, true);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn divisor_constant_dominates() {
        let d = divisor_constant(0.25);
        for n in 1..5000u64 {
            assert!(crate::arith::divisor_count(n) as f64 <= d * (n as f64).powf(0.25) + 1e-9);
        }
    }

    #[test]
    fn em_tail_matches_direct_sum() {
        let per = Periodicity { offset: 0, period: 1, pattern: vec![Complex64::new(1.0, 0.0)] };
        let s = Complex64::new(3.0, 2.0);
        let direct: Complex64 = (11..200_000).map(|n| (-s * (n as f64).ln()).exp()).sum();
        let rest = 200_000f64.powf(-2.0) / 2.0;
        let em = em_tail(&per, 10, s, 6, false);
        assert!((em - direct).norm() < rest + 1e-12, "{em} vs {direct}");
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spec::SeriesSpec;
use crate::arith::primes_up_to;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub x_grid: Vec<f64>,
    pub partial_sums: Vec<Complex64>,
    /// Least-squares slope of `Re(partial sum)` against `log log x`.
    pub fitted_slope: f64,
}

/// `sum_{p <= x} a_i(p) conj(a_j(p)) / p`.
pub fn orthogonality_partial_sum(a: &SeriesSpec, b: &SeriesSpec, x: f64) -> Result<Complex64> {
    let r = orthogonality_report(a, b, &[x])?;
    Ok(r.partial_sums[0])
}

/// Partial sums on an increasing grid of cutoffs, plus the fitted slope.
pub fn orthogonality_report(a: &SeriesSpec, b: &SeriesSpec, x_grid: &[f64]) -> Result<OrthogonalityReport> {
    if x_grid.is_empty() || x_grid[0] < 2.0 || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("cutoffs must be >= 2 and strictly increasing".into()));
    }
    let x_max = *x_grid.last().unwrap() as usize;
    let ca = a.coefficients(x_max)?;
    let cb = b.coefficients(x_max)?;
    let primes = primes_up_to(x_max);
    let mut sums = Vec::with_capacity(x_grid.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut it = primes.iter().peekable();
    for &x in x_grid {
        while let Some(&&p) = it.peek() {
            if p as f64 > x {
                break;
            }
            let i = p as usize - 1;
            acc += ca[i] * cb[i].conj() / p as f64;
            it.next();
        }
        sums.push(acc);
    }
    let xs: Vec<f64> = x_grid.iter().map(|x| x.ln().ln()).collect();
    let fitted_slope = if xs.len() >= 2 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = sums.iter().map(|z| z.re).sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&sums).map(|(x, y)| (x - mx) * (y.re - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(OrthogonalityReport { x_grid: x_grid.to_vec(), partial_sums: sums, fitted_slope })
}

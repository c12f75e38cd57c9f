use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spec::{CoeffBound, EulerData, Periodicity, SeriesSpec};
use super::tail::{self, Plan, TailMethod, N_MAX, SIGMA_MIN};
use crate::error::{Error, Result};

/// Accuracy request for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Precision {
    /// Choose the number of terms so the rigorous error bound is `<= eps`.
    Eps(f64),
    /// Sum exactly the first `N` terms, without tail correction.
    Terms(usize),
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Eps(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: usize,
    pub warning: bool,
}

/// A series together with its memoised coefficient prefix.
///
/// Cheap to share behind an `Arc`; the cache only ever grows.
#[derive(Debug)]
pub struct Series {
    spec: SeriesSpec,
    bound: CoeffBound,
    periodic: Option<Periodicity>,
    euler: Option<EulerData>,
    cache: RwLock<Arc<Vec<Complex64>>>,
    n_max: usize,
}

impl Clone for Series {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            bound: self.bound,
            periodic: self.periodic.clone(),
            euler: self.euler.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
            n_max: self.n_max,
        }
    }
}

impl Series {
    pub fn new(spec: SeriesSpec) -> Result<Self> {
        // Surface NonInvertible at construction.
        let first = spec.coefficients(16)?;
        let bound = spec.coeff_bound();
        let periodic = spec.periodicity();
        let euler = spec.euler_data();
        Ok(Self { spec, bound, periodic, euler, cache: RwLock::new(Arc::new(first)), n_max: N_MAX })
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max.max(1);
        self
    }

    pub fn spec(&self) -> &SeriesSpec {
        &self.spec
    }

    pub fn coeff_bound(&self) -> &CoeffBound {
        &self.bound
    }

    pub fn periodicity(&self) -> Option<&Periodicity> {
        self.periodic.as_ref()
    }

    pub fn euler_data(&self) -> Option<&EulerData> {
        self.euler.as_ref()
    }

    /// At least `n` coefficients, `a(1)` first.
    pub fn coefficients(&self, n: usize) -> Result<Arc<Vec<Complex64>>> {
        {
            let c = self.cache.read().unwrap();
            if c.len() >= n {
                return Ok(c.clone());
            }
        }
        let mut w = self.cache.write().unwrap();
        if w.len() < n {
            let grow = n.max(w.len() + w.len() / 2);
            *w = Arc::new(self.spec.coefficients(grow)?);
        }
        Ok(w.clone())
    }

    fn finite_prefix(&self) -> Option<Vec<Complex64>> {
        match &self.spec {
            SeriesSpec::Explicit(v) => Some(v.clone()),
            _ => None,
        }
    }

    fn check_sigma(sigma: f64) -> Result<()> {
        if !(sigma >= SIGMA_MIN - 1e-12) {
            return Err(Error::SigmaTooSmall { sigma, min: SIGMA_MIN });
        }
        Ok(())
    }

    /// Plan for all points with real part `sigma` and `|t| <= t_abs`.
    pub fn plan(&self, sigma: f64, t_abs: f64, precision: Precision, derivative: bool) -> Result<Plan> {
        Self::check_sigma(sigma)?;
        let finite = self.finite_prefix();
        Ok(match precision {
            Precision::Eps(eps) => tail::plan(
                &self.bound,
                self.periodic.as_ref(),
                finite.as_deref(),
                sigma,
                t_abs,
                eps,
                self.n_max,
                derivative,
            ),
            Precision::Terms(n) => {
                let n = n.max(1);
                Plan {
                    terms: n,
                    method: TailMethod::Truncate,
                    bound: tail::plain_tail_bound(&self.bound, finite.as_deref(), n, sigma, derivative),
                    warning: false,
                }
            }
        })
    }

    /// Number of terms `truncation_length` would pick under plain truncation.
    pub fn truncation_length(&self, sigma: f64, eps: f64) -> Result<tail::Truncation> {
        Self::check_sigma(sigma)?;
        let finite = self.finite_prefix();
        Ok(tail::truncation_length(&self.bound, finite.as_deref(), sigma, eps, self.n_max, false))
    }

    fn eval_with(&self, s: Complex64, precision: Precision, derivative: bool) -> Result<EvalResult> {
        let plan = self.plan(s.re, s.im.abs(), precision, derivative)?;
        let a = self.coefficients(plan.terms)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &an) in a[..plan.terms].iter().enumerate() {
            if an.re == 0.0 && an.im == 0.0 {
                continue;
            }
            let l = ((i + 1) as f64).ln();
            let mag = (-s.re * l).exp();
            let (sn, cs) = (s.im * l).sin_cos();
            let mut term = an * Complex64::new(mag * cs, -mag * sn);
            if derivative {
                term *= -l;
            }
            acc += term;
        }
        if let TailMethod::EulerMaclaurin { order } = plan.method {
            acc += tail::em_tail(self.periodic.as_ref().unwrap(), plan.terms, s, order, derivative);
        }
        let warning = plan.warning || matches!(precision, Precision::Eps(e) if !(plan.bound <= e));
        Ok(EvalResult { value: acc, tail_bound: plan.bound, terms_used: plan.terms, warning })
    }

    pub fn evaluate(&self, s: Complex64, precision: Precision) -> Result<EvalResult> {
        self.eval_with(s, precision, false)
    }

    /// `F'(s) = -sum a(n) log(n) n^{-s}`.
    pub fn evaluate_derivative(&self, s: Complex64, precision: Precision) -> Result<EvalResult> {
        self.eval_with(s, precision, true)
    }
}

/// `a(1..=n)` for a spec.
pub fn coefficients(spec: &SeriesSpec, n: usize) -> Result<Vec<Complex64>> {
    spec.coefficients(n)
}

pub fn evaluate(spec: &SeriesSpec, s: Complex64, eps: f64) -> Result<EvalResult> {
    Series::new(spec.clone())?.evaluate(s, Precision::Eps(eps))
}

pub fn evaluate_derivative(spec: &SeriesSpec, s: Complex64, eps: f64) -> Result<EvalResult> {
    Series::new(spec.clone())?.evaluate_derivative(s, Precision::Eps(eps))
}

/// Plain-truncation length for the spec's growth model.
pub fn truncation_length(spec: &SeriesSpec, sigma: f64, eps: f64) -> Result<tail::Truncation> {
    Series::new(spec.clone())?.truncation_length(sigma, eps)
}

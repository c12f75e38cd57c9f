use std::fmt;

use num_complex::Complex64;

use super::algebra;
use crate::arith::lcm;
use crate::characters::{build_character_group, DirichletCharacter};
use crate::error::{Error, Result};

/// Symbolic description of a Dirichlet series.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesSpec {
    Zeta,
    CharacterL(DirichletCharacter),
    Conj(Box<SeriesSpec>),
    Linear(Vec<(Complex64, SeriesSpec)>),
    Convolution(Box<SeriesSpec>, Box<SeriesSpec>),
    Inverse(Box<SeriesSpec>),
    /// Finitely many coefficients `a(1..=len)`, zero beyond.
    Explicit(Vec<Complex64>),
}

/// Model for `|a(n)|` used by the truncation bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffBound {
    /// `|a(n)| <= c`.
    Constant(f64),
    /// `|a(n)| <= c d(n)^m` with `d` the divisor function.
    DivisorPower { c: f64, m: u32 },
    /// Coefficients vanish beyond the stored prefix; `l1` is their absolute sum.
    Finite { l1: f64 },
    Unknown,
}

/// `a(n) = pattern[(n - 1) % period]` for every `n > offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodicity {
    pub offset: usize,
    pub period: usize,
    pub pattern: Vec<Complex64>,
}

const MAX_PERIOD: usize = 100_000;

/// Euler product data: `F_p(s) = prod_i (1 - chi_i(p) p^{-s})^{-sign_i}`.
///
/// Zeta is a single root given by the character modulo 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerData {
    pub roots: Vec<(DirichletCharacter, i8)>,
}

impl EulerData {
    /// Local roots `(alpha_i(p), sign_i)` at the prime `p`.
    pub fn local_roots(&self, p: u64) -> Vec<(Complex64, f64)> {
        self.roots.iter().map(|(chi, sign)| (chi.value(p), *sign as f64)).collect()
    }
}

fn trivial_character() -> DirichletCharacter {
    build_character_group(1).pop().unwrap()
}

impl SeriesSpec {
    pub fn character(chi: DirichletCharacter) -> Self {
        SeriesSpec::CharacterL(chi)
    }

    pub fn conj(self) -> Self {
        SeriesSpec::Conj(Box::new(self))
    }

    pub fn linear(terms: Vec<(Complex64, SeriesSpec)>) -> Self {
        SeriesSpec::Linear(terms)
    }

    pub fn convolution(a: SeriesSpec, b: SeriesSpec) -> Self {
        SeriesSpec::Convolution(Box::new(a), Box::new(b))
    }

    pub fn inverse(a: SeriesSpec) -> Self {
        SeriesSpec::Inverse(Box::new(a))
    }

    /// `a(1..=n)`.
    pub fn coefficients(&self, n: usize) -> Result<Vec<Complex64>> {
        Ok(match self {
            SeriesSpec::Zeta => vec![Complex64::new(1.0, 0.0); n],
            SeriesSpec::CharacterL(chi) => {
                let q = chi.modulus() as usize;
                let period: Vec<Complex64> = (1..=q as u64).map(|k| chi.value(k)).collect();
                (0..n).map(|i| period[i % q]).collect()
            }
            SeriesSpec::Conj(inner) => inner.coefficients(n)?.into_iter().map(|z| z.conj()).collect(),
            SeriesSpec::Linear(terms) => {
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (c, s) in terms {
                    for (o, a) in out.iter_mut().zip(s.coefficients(n)?) {
                        *o += c * a;
                    }
                }
                out
            }
            SeriesSpec::Convolution(a, b) => algebra::convolve(&a.coefficients(n)?, &b.coefficients(n)?, n),
            SeriesSpec::Inverse(a) => algebra::inverse(&a.coefficients(n.max(1))?, n).ok_or(Error::NonInvertible)?,
            SeriesSpec::Explicit(v) => (0..n).map(|i| v.get(i).copied().unwrap_or_default()).collect(),
        })
    }

    /// Euler product data, when the series has one.
    pub fn euler_data(&self) -> Option<EulerData> {
        match self {
            SeriesSpec::Zeta => Some(EulerData { roots: vec![(trivial_character(), 1)] }),
            SeriesSpec::CharacterL(chi) => Some(EulerData { roots: vec![(chi.clone(), 1)] }),
            SeriesSpec::Conj(inner) => inner.euler_data().map(|e| EulerData {
                roots: e.roots.into_iter().map(|(c, s)| (c.conj(), s)).collect(),
            }),
            SeriesSpec::Convolution(a, b) => {
                let mut ea = a.euler_data()?;
                ea.roots.extend(b.euler_data()?.roots);
                Some(ea)
            }
            SeriesSpec::Inverse(a) => a.euler_data().map(|e| EulerData {
                roots: e.roots.into_iter().map(|(c, s)| (c, -s)).collect(),
            }),
            SeriesSpec::Linear(_) | SeriesSpec::Explicit(_) => None,
        }
    }

    pub fn has_euler_product(&self) -> bool {
        self.euler_data().is_some()
    }

    /// Growth model for the coefficients.
    pub fn coeff_bound(&self) -> CoeffBound {
        if let Some(e) = self.euler_data() {
            // Every local root has modulus <= 1, so |a(n)| <= d_r(n) <= d(n)^{r-1}.
            let r = e.roots.len() as u32;
            return match r {
                0 => CoeffBound::Finite { l1: 1.0 },
                1 => CoeffBound::Constant(1.0),
                _ => CoeffBound::DivisorPower { c: 1.0, m: r - 1 },
            };
        }
        match self {
            SeriesSpec::Explicit(v) => CoeffBound::Finite { l1: v.iter().map(|z| z.norm()).sum() },
            SeriesSpec::Conj(inner) => inner.coeff_bound(),
            SeriesSpec::Linear(terms) => {
                let mut acc = CoeffBound::Finite { l1: 0.0 };
                for (c, s) in terms {
                    acc = add_bounds(acc, scale_bound(s.coeff_bound(), c.norm()));
                }
                acc
            }
            SeriesSpec::Convolution(a, b) => conv_bounds(a.coeff_bound(), b.coeff_bound()),
            _ => CoeffBound::Unknown,
        }
    }

    /// Eventual periodicity of the coefficients, if any.
    pub fn periodicity(&self) -> Option<Periodicity> {
        match self {
            SeriesSpec::Zeta => Some(Periodicity { offset: 0, period: 1, pattern: vec![Complex64::new(1.0, 0.0)] }),
            SeriesSpec::CharacterL(chi) => {
                let q = chi.modulus();
                Some(Periodicity { offset: 0, period: q as usize, pattern: (1..=q).map(|n| chi.value(n)).collect() })
            }
            SeriesSpec::Conj(inner) => inner.periodicity().map(|p| Periodicity {
                pattern: p.pattern.iter().map(|z| z.conj()).collect(),
                ..p
            }),
            SeriesSpec::Explicit(v) => Some(Periodicity {
                offset: v.len(),
                period: 1,
                pattern: vec![Complex64::new(0.0, 0.0)],
            }),
            SeriesSpec::Linear(terms) => {
                let parts: Vec<(Complex64, Periodicity)> = terms
                    .iter()
                    .map(|(c, s)| s.periodicity().map(|p| (*c, p)))
                    .collect::<Option<_>>()?;
                let mut offset = 0;
                let mut period = 1u64;
                for (_, p) in &parts {
                    offset = offset.max(p.offset);
                    period = lcm(period, p.period as u64);
                    if period as usize > MAX_PERIOD {
                        return None;
                    }
                }
                let period = period as usize;
                // Pattern indexed by (n - 1) % period, valid for n > offset.
                let mut pattern = vec![Complex64::new(0.0, 0.0); period];
                for (r, slot) in pattern.iter_mut().enumerate() {
                    for (c, p) in &parts {
                        *slot += c * p.pattern[r % p.period];
                    }
                }
                Some(Periodicity { offset, period, pattern })
            }
            SeriesSpec::Convolution(..) | SeriesSpec::Inverse(_) => None,
        }
    }

    /// True when every coefficient is real.
    pub fn has_real_coefficients(&self, n: usize) -> bool {
        self.coefficients(n).map(|v| v.iter().all(|z| z.im == 0.0)).unwrap_or(false)
    }
}

fn scale_bound(b: CoeffBound, k: f64) -> CoeffBound {
    match b {
        CoeffBound::Constant(c) => CoeffBound::Constant(c * k),
        CoeffBound::DivisorPower { c, m } => CoeffBound::DivisorPower { c: c * k, m },
        CoeffBound::Finite { l1 } => CoeffBound::Finite { l1: l1 * k },
        CoeffBound::Unknown => CoeffBound::Unknown,
    }
}

/// Bound for a sum. Finite parts do not contribute to tails.
fn add_bounds(a: CoeffBound, b: CoeffBound) -> CoeffBound {
    use CoeffBound::*;
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (Finite { l1: x }, Finite { l1: y }) => Finite { l1: x + y },
        (Finite { .. }, o) | (o, Finite { .. }) => o,
        (Constant(x), Constant(y)) => Constant(x + y),
        (Constant(x), DivisorPower { c, m }) | (DivisorPower { c, m }, Constant(x)) => DivisorPower { c: c + x, m },
        (DivisorPower { c: c1, m: m1 }, DivisorPower { c: c2, m: m2 }) => DivisorPower { c: c1 + c2, m: m1.max(m2) },
    }
}

fn conv_bounds(a: CoeffBound, b: CoeffBound) -> CoeffBound {
    use CoeffBound::*;
    let split = |x: CoeffBound| match x {
        Constant(c) => Some((c, 0)),
        DivisorPower { c, m } => Some((c, m)),
        _ => None,
    };
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (Finite { l1: x }, Finite { l1: y }) => Finite { l1: x * y },
        (Finite { l1 }, o) | (o, Finite { l1 }) => scale_bound(o, l1),
        _ => {
            let (c1, m1) = split(a).unwrap();
            let (c2, m2) = split(b).unwrap();
            DivisorPower { c: c1 * c2, m: m1 + m2 + 1 }
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    let re = format!("{:?}", z.re);
    if z.im == 0.0 {
        return re;
    }
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "-" } else { "+" };
    format!("{re}{sign}{:?}i", z.im.abs())
}

impl fmt::Display for SeriesSpec {
    /// Canonical mini-language form; parses back to an equal spec.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSpec::Zeta => write!(f, "zeta"),
            SeriesSpec::CharacterL(chi) => write!(f, "L(mod={},index={})", chi.modulus(), chi.index()),
            SeriesSpec::Conj(s) => write!(f, "conj({s})"),
            SeriesSpec::Linear(terms) => {
                write!(f, "lin(")?;
                for (i, (c, s)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({})*{s}", fmt_complex(*c))?;
                }
                write!(f, ")")
            }
            SeriesSpec::Convolution(a, b) => write!(f, "conv({a},{b})"),
            SeriesSpec::Inverse(a) => write!(f, "inv({a})"),
            SeriesSpec::Explicit(v) => {
                write!(f, "explicit(")?;
                for (i, z) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", fmt_complex(*z))?;
                }
                write!(f, ")")
            }
        }
    }
}

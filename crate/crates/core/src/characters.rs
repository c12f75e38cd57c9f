//! Dirichlet characters modulo `q`.
//!
//! The unit group `(Z/q)^x` is split by the Chinese remainder theorem into
//! cyclic factors, each with a fixed generator. A character is the vector of
//! exponents it assigns to those generators, so products and comparisons are
//! integer arithmetic. Complex values appear only in [`DirichletCharacter::value`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{discrete_log, divisors, factorize, gcd, lcm, primitive_root_prime_power, totient};
use crate::error::{Error, Result};

/// One cyclic factor of the unit group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicFactor {
    /// The prime power this factor lives in.
    pub prime_power: u64,
    pub generator: u64,
    pub order: u64,
}

/// Cyclic decomposition of `(Z/q)^x` together with the discrete-log table of
/// every residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    pub modulus: u64,
    pub factors: Vec<CyclicFactor>,
    /// `logs[n]` holds the exponents of `n` on each factor, or `None` when
    /// `gcd(n, q) > 1`.
    logs: Vec<Option<Vec<u64>>>,
}

impl UnitGroup {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let mut factors = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            if p == 2 {
                if e >= 2 {
                    factors.push(CyclicFactor { prime_power: pe, generator: pe - 1, order: 2 });
                }
                if e >= 3 {
                    factors.push(CyclicFactor { prime_power: pe, generator: 5, order: 1 << (e - 2) });
                }
            } else {
                factors.push(CyclicFactor {
                    prime_power: pe,
                    generator: primitive_root_prime_power(p, e),
                    order: pe / p * (p - 1),
                });
            }
        }

        let mut logs = vec![None; q as usize];
        for n in 0..q {
            if gcd(n, q) != 1 {
                continue;
            }
            let mut v = Vec::with_capacity(factors.len());
            let mut i = 0;
            while i < factors.len() {
                let f = &factors[i];
                let r = n % f.prime_power;
                if f.prime_power % 2 == 0 {
                    // 2^e: r = (-1)^a 5^b
                    let a = if r % 4 == 1 { 0 } else { 1 };
                    v.push(a);
                    if i + 1 < factors.len() && factors[i + 1].prime_power == f.prime_power {
                        let g = &factors[i + 1];
                        let rr = if a == 0 { r } else { f.prime_power - r };
                        v.push(discrete_log(g.generator, rr, g.prime_power, g.order).expect("5 generates"));
                        i += 1;
                    }
                } else {
                    v.push(discrete_log(f.generator, r, f.prime_power, f.order).expect("primitive root"));
                }
                i += 1;
            }
            logs[n as usize] = Some(v);
        }
        Self { modulus: q, factors, logs }
    }

    /// Group exponent: lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, f| lcm(acc, f.order))
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|f| f.order).product()
    }

    pub fn log(&self, n: u64) -> Option<&[u64]> {
        self.logs[(n % self.modulus) as usize].as_deref()
    }
}

/// A Dirichlet character with exact root-of-unity values.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    /// Exponent assigned to each cyclic factor generator.
    exps: Vec<u64>,
    order: u64,
    /// `table[n] = Some(k)` means `chi(n) = e(k / order)`.
    table: Vec<Option<u64>>,
    parity: i8,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    fn from_exponents(group: Arc<UnitGroup>, exps: Vec<u64>) -> Self {
        let order = group
            .factors
            .iter()
            .zip(&exps)
            .fold(1, |acc, (f, &k)| lcm(acc, f.order / gcd(k, f.order)));
        let q = group.modulus;
        let table: Vec<Option<u64>> = (0..q)
            .map(|n| {
                group.log(n).map(|l| {
                    // sum_i k_i l_i / ord_i, expressed over `order`
                    let mut acc = 0u64;
                    for ((f, &k), &li) in group.factors.iter().zip(&exps).zip(l) {
                        let num = (k * li) % f.order;
                        acc = (acc + num * order / f.order % order) % order;
                    }
                    acc
                })
            })
            .collect();
        let parity = match table[((q + q - 1) % q) as usize] {
            Some(k) if 2 * k == order => -1,
            _ => 1,
        };
        Self { group, exps, order, table, parity }
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `chi(-1)`, as +1 or -1.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// `0` for even characters, `1` for odd ones.
    pub fn parity_exponent(&self) -> u32 {
        if self.parity < 0 {
            1
        } else {
            0
        }
    }

    /// Exponents on the CRT generators.
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    /// `Some(k)` with `chi(n) = e(k/order)`, or `None` if `gcd(n, q) > 1`.
    pub fn value_exponent(&self, n: u64) -> Option<u64> {
        self.table[(n % self.group.modulus) as usize]
    }

    pub fn value_exponent_signed(&self, n: i64) -> Option<u64> {
        let q = self.group.modulus as i64;
        self.value_exponent(n.rem_euclid(q) as u64)
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self.value_exponent(n) {
            Some(k) => root_of_unity(k, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Pointwise product, computed on exponents.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus());
        let exps = self
            .group
            .factors
            .iter()
            .zip(self.exps.iter().zip(&other.exps))
            .map(|(f, (&a, &b))| (a + b) % f.order)
            .collect();
        Self::from_exponents(self.group.clone(), exps)
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .group
            .factors
            .iter()
            .zip(&self.exps)
            .map(|(f, &a)| (f.order - a) % f.order)
            .collect();
        Self::from_exponents(self.group.clone(), exps)
    }

    /// Smallest `d | q` from which the character is induced.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus();
        for d in divisors(q) {
            let induced = (1..q)
                .filter(|&n| n % d == 1 % d && gcd(n, q) == 1)
                .all(|n| self.value_exponent(n) == Some(0));
            if induced {
                return d;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// Index in the canonical (lexicographic exponent-tuple) order.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for (f, &k) in self.group.factors.iter().zip(&self.exps) {
            idx = idx * f.order as usize + k as usize;
        }
        idx
    }
}

/// `e(k/m) = exp(2 pi i k/m)`, exact at multiples of a quarter turn.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    if (4 * k) % m == 0 {
        return match 4 * k / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * k as f64 / m as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// All `phi(q)` characters modulo `q`, in canonical index order.
pub fn build_character_group(q: u64) -> Vec<DirichletCharacter> {
    let group = Arc::new(UnitGroup::new(q));
    let mut out = Vec::with_capacity(totient(q) as usize);
    let orders: Vec<u64> = group.factors.iter().map(|f| f.order).collect();
    let total: u64 = orders.iter().product();
    for idx in 0..total {
        let mut exps = vec![0u64; orders.len()];
        let mut rem = idx;
        for (slot, &o) in exps.iter_mut().zip(&orders).rev() {
            *slot = rem % o;
            rem /= o;
        }
        out.push(DirichletCharacter::from_exponents(group.clone(), exps));
    }
    out
}

/// Number of primitive characters modulo `q`.
pub fn primitive_count(q: u64) -> u64 {
    let mut out = 1u64;
    for (p, e) in factorize(q) {
        let f = if e == 1 {
            p - 2
        } else {
            let pe = p.pow(e);
            pe / p / p * (p - 1) * (p - 1)
        };
        out *= f;
    }
    out
}

/// Gauss sum `sum_{n mod q} chi(n) e(n/q)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus();
    (1..=q).map(|n| chi.value(n) * root_of_unity(n % q, q)).sum()
}

/// Root number data of a primitive character.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootNumber {
    pub omega: Complex64,
    pub gauss_sum: Complex64,
    /// Parity exponent: 0 for even, 1 for odd characters.
    pub a: u32,
}

/// `omega = tau(chi) / (i^a sqrt(q))`.
pub fn root_number(chi: &DirichletCharacter) -> Result<RootNumber> {
    let conductor = chi.conductor();
    if conductor != chi.modulus() {
        return Err(Error::NonPrimitive { modulus: chi.modulus(), conductor });
    }
    let tau = gauss_sum(chi);
    let a = chi.parity_exponent();
    let ia = if a == 1 { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
    let omega = tau / (ia * (chi.modulus() as f64).sqrt());
    Ok(RootNumber { omega, gauss_sum: tau, a })
}

/// Exact value used in character constraints: `e(num/den)`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactValue {
    Zero,
    Root { num: i64, den: u64 },
}

/// One condition in a character selector such as `mod=5, value(2)=i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharConstraint {
    Index(usize),
    Value { n: i64, value: ExactValue },
    Primitive,
    Parity(i8),
    Order(u64),
}

impl CharConstraint {
    pub fn holds(&self, chi: &DirichletCharacter) -> bool {
        match *self {
            CharConstraint::Index(i) => chi.index() == i,
            CharConstraint::Primitive => chi.is_primitive(),
            CharConstraint::Parity(p) => chi.parity() == p,
            CharConstraint::Order(o) => chi.order() == o,
            CharConstraint::Value { n, value } => match (chi.value_exponent_signed(n), value) {
                (None, ExactValue::Zero) => true,
                (Some(k), ExactValue::Root { num, den }) => {
                    // k/order == num/den (mod 1)
                    let ord = chi.order() as i128;
                    let den = den as i128;
                    let lhs = k as i128 * den;
                    let rhs = num as i128 * ord;
                    (lhs - rhs).rem_euclid(ord * den) == 0
                }
                _ => false,
            },
        }
    }
}

/// The unique character modulo `q` satisfying all constraints.
pub fn resolve_character(q: u64, constraints: &[CharConstraint]) -> Result<DirichletCharacter> {
    if q == 0 {
        return Err(Error::CharacterResolution("modulus must be positive".into()));
    }
    let matches: Vec<_> = build_character_group(q)
        .into_iter()
        .filter(|chi| constraints.iter().all(|c| c.holds(chi)))
        .collect();
    match matches.len() {
        1 => Ok(matches.into_iter().next().unwrap()),
        0 => Err(Error::CharacterResolution(format!("no character mod {q} matches {constraints:?}"))),
        k => Err(Error::CharacterResolution(format!("{k} characters mod {q} match {constraints:?}"))),
    }
}

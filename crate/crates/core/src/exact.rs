//! Exact arithmetic in the field generated by square roots of integers.
//!
//! A value is a finite sum `Σ q_s √s` over squarefree radicands `s` with
//! rational `q_s`. Distinct squarefree roots are linearly independent over
//! the rationals, so equality and zero tests are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{c, ComplexMatrix};

pub type Rational = Ratio<i128>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct SqrtNum {
    terms: BTreeMap<u64, Rational>,
}

/// Split `n` into `k² · s` with `s` squarefree; returns `(k, s)`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut k = 1;
    let mut s = 1;
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += 1;
    }
    s *= rest;
    (k, s)
}

impl SqrtNum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Self { terms }
    }

    pub fn int(n: i128) -> Self {
        Self::rational(Rational::from_integer(n))
    }

    /// `q · √n` for a nonnegative integer `n`.
    pub fn scaled_sqrt(q: Rational, n: u64) -> Self {
        if n == 0 || q.is_zero() {
            return Self::zero();
        }
        let (k, s) = squarefree_split(n);
        let mut terms = BTreeMap::new();
        terms.insert(s, q * Rational::from_integer(k as i128));
        Self { terms }
    }

    pub fn sqrt(n: u64) -> Self {
        Self::scaled_sqrt(Rational::one(), n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term `(q, s)` when the value is `q √s`.
    pub fn as_monomial(&self) -> Option<(Rational, u64)> {
        if self.terms.len() == 1 {
            let (s, q) = self.terms.iter().next().unwrap();
            Some((*q, *s))
        } else {
            None
        }
    }

    /// Inverse of a monomial `q √s`, which is `√s / (q s)`.
    pub fn monomial_inverse(&self) -> Option<Self> {
        let (q, s) = self.as_monomial()?;
        Some(Self::scaled_sqrt(
            Rational::one() / (q * Rational::from_integer(s as i128)),
            s,
        ))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, q)| q.to_f64().unwrap_or(f64::NAN) * (*s as f64).sqrt())
            .sum()
    }

    fn insert(&mut self, s: u64, q: Rational) {
        let entry = self.terms.entry(s).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }
}

impl fmt::Debug for SqrtNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SqrtNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, q) in &self.terms {
            if !first {
                write!(f, " {} ", if q.is_negative() { "-" } else { "+" })?;
            } else if q.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = q.abs();
            match (*s, a.is_one()) {
                (1, _) => write!(f, "{a}")?,
                (s, true) => write!(f, "√{s}")?,
                (s, false) => write!(f, "{a}√{s}")?,
            }
        }
        Ok(())
    }
}

impl Add for &SqrtNum {
    type Output = SqrtNum;
    fn add(self, rhs: &SqrtNum) -> SqrtNum {
        let mut out = self.clone();
        for (s, q) in &rhs.terms {
            out.insert(*s, *q);
        }
        out
    }
}

impl Sub for &SqrtNum {
    type Output = SqrtNum;
    fn sub(self, rhs: &SqrtNum) -> SqrtNum {
        self + &(-rhs)
    }
}

impl Neg for &SqrtNum {
    type Output = SqrtNum;
    fn neg(self) -> SqrtNum {
        SqrtNum {
            terms: self.terms.iter().map(|(s, q)| (*s, -*q)).collect(),
        }
    }
}

impl Mul for &SqrtNum {
    type Output = SqrtNum;
    fn mul(self, rhs: &SqrtNum) -> SqrtNum {
        let mut out = SqrtNum::zero();
        for (s1, q1) in &self.terms {
            for (s2, q2) in &rhs.terms {
                let (k, s) = squarefree_split(s1 * s2);
                out.insert(s, q1 * q2 * Rational::from_integer(k as i128));
            }
        }
        out
    }
}

/// Dense square matrix over [`SqrtNum`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    n: usize,
    data: Vec<SqrtNum>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![SqrtNum::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, SqrtNum::int(1));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &SqrtNum {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SqrtNum) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SqrtNum::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, k: &SqrtNum) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &out.data[i * n + j] + &(a * b);
                    out.data[i * n + j] = cur;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| c(self.get(i, j).to_f64()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(36), (6, 1));
        assert_eq!(squarefree_split(7), (1, 7));
        assert_eq!(squarefree_split(1), (1, 1));
    }

    #[test]
    fn root_products_are_exact() {
        let a = SqrtNum::sqrt(6);
        let b = SqrtNum::sqrt(3);
        let prod = &a * &b;
        assert_eq!(prod, SqrtNum::scaled_sqrt(Rational::from_integer(3), 2));
        let sq = &a * &a;
        assert_eq!(sq, SqrtNum::int(6));
        let diff = &(&a + &b) - &b;
        assert_eq!(diff, a);
    }

    #[test]
    fn monomial_inverse_roundtrip() {
        let a = SqrtNum::scaled_sqrt(Rational::new(3, 2), 5);
        let inv = a.monomial_inverse().unwrap();
        assert_eq!(&a * &inv, SqrtNum::int(1));
    }

    #[test]
    fn display_is_readable() {
        let a = &SqrtNum::sqrt(2) + &SqrtNum::int(-3);
        assert_eq!(a.to_string(), "-3 + √2");
    }
}

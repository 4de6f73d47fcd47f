//! Exact sparse multivariate polynomials over the integers.
//!
//! Terms are kept in graded-lexicographic order, highest term first, with
//! `x0 > x1 > x2 > ...`. Two equal polynomials always have identical term
//! vectors, so derived equality and the canonical text form agree.

mod gcd;
mod parse;
mod roots;
mod univariate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gcd::{content_wrt, gcd, squarefree_part};
pub use parse::ParsePolyError;
pub use roots::{count_distinct_real_roots, count_distinct_real_roots_dense};
pub use univariate::{discriminant, resultant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial has degree 0 in {0}")]
    DegreeZero(Var),
    #[error("polynomial has degree {degree} in {var}, at least 2 required")]
    DegreeTooLow { var: Var, degree: u32 },
    #[error("the zero polynomial has infinitely many roots")]
    ZeroPolynomial,
    #[error("polynomial is not univariate: {0}")]
    Multivariate(String),
}

/// A variable, identified by its position in the owning problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Exponent vector, indexed by variable, with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        Monomial(exponents)
    }

    pub fn var(v: Var, exp: u32) -> Self {
        let mut e = vec![0; v.0 + 1];
        e[v.0] = exp;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.get(v.0).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.exponent(v) > 0
    }

    /// Variables occurring with a positive exponent.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| Var(i))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let e = (0..n)
            .map(|i| self.0.get(i).unwrap_or(&0) + other.0.get(i).unwrap_or(&0))
            .collect();
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        let e = other
            .0
            .iter()
            .enumerate()
            .map(|(i, b)| b - self.0.get(i).unwrap_or(&0))
            .collect();
        Monomial::new(e)
    }

    fn with_exponent(&self, v: Var, exp: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= v.0 {
            e.resize(v.0 + 1, 0);
        }
        e[v.0] = exp;
        Monomial::new(e)
    }

    fn permuted(&self, perm: &[Var]) -> Monomial {
        let mut e = vec![0; perm.iter().map(|v| v.0 + 1).max().unwrap_or(0)];
        for (i, &x) in self.0.iter().enumerate() {
            e[perm[i].0] += x;
        }
        Monomial::new(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let n = self.0.len().max(other.0.len());
                for i in 0..n {
                    let a = self.0.get(i).unwrap_or(&0);
                    let b = other.0.get(i).unwrap_or(&0);
                    if a != b {
                        return a.cmp(b);
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub monomial: Monomial,
    pub coeff: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<Term>,
}

impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let o = a
                .monomial
                .cmp(&b.monomial)
                .then_with(|| a.coeff.cmp(&b.coeff));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::monomial(Monomial::one(), c.into())
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v, 1), BigInt::one())
    }

    pub fn monomial(m: Monomial, coeff: BigInt) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Polynomial {
                terms: vec![Term { monomial: m, coeff }],
            }
        }
    }

    /// Collects terms, merging equal monomials and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_default() += c;
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<Monomial, BigInt>) -> Self {
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(monomial, coeff)| Term { monomial, coeff })
            .collect();
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.monomial.is_one())
    }

    /// The coefficient of the monomial 1.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .last()
            .filter(|t| t.monomial.is_one())
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    }

    /// Leading term under the canonical order.
    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms
            .first()
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    }

    /// Max total degree over terms; 0 for constants and for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.monomial.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .iter()
            .map(|t| t.monomial.exponent(v))
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.monomial.contains(v))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.iter().flat_map(|t| t.monomial.vars()).collect()
    }

    /// Coefficients with respect to `v`, indexed by power of `v`.
    pub fn coefficients_wrt(&self, v: Var) -> Vec<Polynomial> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); d + 1];
        for t in &self.terms {
            let e = t.monomial.exponent(v) as usize;
            buckets[e].push((t.monomial.with_exponent(v, 0), t.coeff.clone()));
        }
        buckets.into_iter().map(Polynomial::from_terms).collect()
    }

    /// Inverse of [`Polynomial::coefficients_wrt`].
    pub fn from_coefficients(coeffs: &[Polynomial], v: Var) -> Polynomial {
        let mut map = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            for t in &c.terms {
                let e = t.monomial.exponent(v) + i as u32;
                *map.entry(t.monomial.with_exponent(v, e))
                    .or_insert_with(BigInt::zero) += &t.coeff;
            }
        }
        Self::from_map(map)
    }

    /// Leading coefficient with respect to `v`.
    pub fn leading_coeff_wrt(&self, v: Var) -> Polynomial {
        self.coefficients_wrt(v).pop().unwrap_or_default()
    }

    pub fn derivative_wrt(&self, v: Var) -> Polynomial {
        Self::from_terms(self.terms.iter().filter_map(|t| {
            let e = t.monomial.exponent(v);
            (e > 0).then(|| (t.monomial.with_exponent(v, e - 1), &t.coeff * e))
        }))
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    monomial: t.monomial.clone(),
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigInt) -> Polynomial {
        // multiplying by a monomial preserves the term order
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    monomial: t.monomial.mul(m),
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let lead = d.leading_term()?;
        if d.is_constant() {
            let c = &lead.coeff;
            let mut terms = Vec::with_capacity(self.terms.len());
            for t in &self.terms {
                let (q, r) = t.coeff.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.push(Term {
                    monomial: t.monomial.clone(),
                    coeff: q,
                });
            }
            return Some(Polynomial { terms });
        }
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some(lt) = rem.terms.first() {
            if !lead.monomial.divides(&lt.monomial) {
                return None;
            }
            let (qc, r) = lt.coeff.div_rem(&lead.coeff);
            if !r.is_zero() {
                return None;
            }
            let qm = lead.monomial.quotient_of(&lt.monomial);
            rem = &rem - &d.mul_term(&qm, &qc);
            quotient.push((qm, qc));
        }
        Some(Self::from_terms(quotient))
    }

    /// Positive gcd of the integer coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for t in &self.terms {
            g = g.gcd(&t.coeff);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with a positive leading coefficient.
    pub fn normalized(&self) -> Polynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        if c.is_one() {
            self.clone()
        } else {
            self.div_exact(&Polynomial::constant(c))
                .expect("content divides")
        }
    }

    /// Renames variable `i` to `perm[i]`.
    pub fn permute_vars(&self, perm: &[Var]) -> Polynomial {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (t.monomial.permuted(perm), t.coeff.clone())),
        )
    }

    /// Evaluates at integer points, one value per variable index.
    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|t| {
                t.monomial
                    .exponents()
                    .iter()
                    .enumerate()
                    .fold(t.coeff.clone(), |acc, (i, &e)| acc * point[i].pow(e))
            })
            .sum()
    }

    /// Canonical text using the given display names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named { poly: self, names }
    }

    fn write_text(
        &self,
        f: &mut fmt::Formatter<'_>,
        name: &dyn Fn(usize) -> String,
    ) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = t.coeff.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || t.monomial.is_one() {
                factors.push(abs.to_string());
            }
            for v in t.monomial.vars() {
                let e = t.monomial.exponent(v);
                if e == 1 {
                    factors.push(name(v.0));
                } else {
                    factors.push(format!("{}^{}", name(v.0), e));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

struct Named<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.write_text(f, &|i| {
            self.names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{i}"))
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_text(f, &|i| format!("x{i}"))
    }
}

impl From<Var> for Polynomial {
    fn from(v: Var) -> Self {
        Polynomial::var(v)
    }
}

impl From<i64> for Polynomial {
    fn from(c: i64) -> Self {
        Polynomial::constant(c)
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    let sign = |c: &BigInt| if negate_b { -c } else { c.clone() };
    while i < a.terms.len() && j < b.terms.len() {
        let (ta, tb) = (&a.terms[i], &b.terms[j]);
        match ta.monomial.cmp(&tb.monomial) {
            Ordering::Greater => {
                out.push(ta.clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(Term {
                    monomial: tb.monomial.clone(),
                    coeff: sign(&tb.coeff),
                });
                j += 1;
            }
            Ordering::Equal => {
                let c = &ta.coeff + sign(&tb.coeff);
                if !c.is_zero() {
                    out.push(Term {
                        monomial: ta.monomial.clone(),
                        coeff: c,
                    });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a.terms[i..].iter().cloned());
    out.extend(b.terms[j..].iter().map(|t| Term {
        monomial: t.monomial.clone(),
        coeff: sign(&t.coeff),
    }));
    Polynomial { terms: out }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, true)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        if rhs.terms.len() == 1 {
            return self.mul_term(&rhs.terms[0].monomial, &rhs.terms[0].coeff);
        }
        if self.terms.len() == 1 {
            return rhs.mul_term(&self.terms[0].monomial, &self.terms[0].coeff);
        }
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                *map.entry(a.monomial.mul(&b.monomial)).or_default() += &a.coeff * &b.coeff;
            }
        }
        Polynomial::from_map(map)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigInt::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_text() {
        assert_eq!(p("9*x1 + x0^4*x2").to_string(), "x0^4*x2 + 9*x1");
        assert_eq!(p("-6*x0^2 - x2^3 - 1").to_string(), "-x2^3 - 6*x0^2 - 1");
        assert_eq!(
            p("x2^2 + x1^2 + x0^2 - 1").to_string(),
            "x0^2 + x1^2 + x2^2 - 1"
        );
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(p("3 - 3").to_string(), "0");
    }

    #[test]
    fn degrees() {
        let f = p("x0^4*x2 + 9*x1");
        assert_eq!(f.total_degree(), 5);
        assert_eq!(f.degree_in(Var(0)), 4);
        assert_eq!(f.degree_in(Var(1)), 1);
        assert_eq!(p("7").total_degree(), 0);
        assert_eq!(Polynomial::zero().total_degree(), 0);
        assert_eq!(p("x0*x1 + x1^3").total_degree(), 3);
        assert_eq!(p("5").degree_in(Var(0)), 0);
    }

    #[test]
    fn coefficient_extraction() {
        // y^2 + x^2 - 1 with x = x0, y = x1
        let c = p("x1^2 + x0^2 - 1").coefficients_wrt(Var(1));
        assert_eq!(c, vec![p("x0^2 - 1"), p("0"), p("1")]);
        assert_eq!(p("x0 + 1").coefficients_wrt(Var(1)), vec![p("x0 + 1")]);
        let c = p("x0^4*x2 + 9*x1").coefficients_wrt(Var(2));
        assert_eq!(c, vec![p("9*x1"), p("x0^4")]);
        let f = p("x0^4*x2 + 9*x1 - x2^3*x1");
        assert_eq!(
            Polynomial::from_coefficients(&f.coefficients_wrt(Var(2)), Var(2)),
            f
        );
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x0^3 - x0").derivative_wrt(Var(0)), p("3*x0^2 - 1"));
        assert_eq!(p("x1^2").derivative_wrt(Var(0)), Polynomial::zero());
        assert_eq!(p("x0^2*x1").derivative_wrt(Var(0)), p("2*x0*x1"));
    }

    #[test]
    fn arithmetic_and_exact_division() {
        let a = p("x0 + x1 - 3");
        let b = p("2*x0^2 - x1*x2 + 1");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(p("x0^2 + 1").div_exact(&p("x0 + 1")), None);
        assert_eq!(p("2*x0 + 3").div_exact(&p("2")), None);
        assert_eq!(&(&a - &a), &Polynomial::zero());
        assert_eq!(a.pow(3), &(&a * &a) * &a);
    }

    #[test]
    fn normalization() {
        assert_eq!(p("-4*x0^2 + 4*x1").normalized(), p("x0^2 - x1"));
        assert_eq!(p("-3").normalized(), p("1"));
        assert_eq!(p("6*x0 + 4").content(), BigInt::from(2));
    }

    #[test]
    fn permutation_relabels() {
        let f = p("x0^2*x1 + x2");
        let g = f.permute_vars(&[Var(2), Var(0), Var(1)]);
        assert_eq!(g, p("x2^2*x0 + x1"));
    }
}

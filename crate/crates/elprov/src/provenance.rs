//! Provenance annotations: variables, canonical monomials and polynomials.
//!
//! All products are ×-idempotent, so a monomial is simply the set of its
//! variables. Sums keep multiplicity: a polynomial is a multiset of
//! monomials, stored as a map from monomial to a positive coefficient.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Returns true if `s` is a valid identifier: `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A provenance variable. Equality and ordering are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    /// Creates a variable, checking that the name is an identifier.
    pub fn new(name: &str) -> Result<Self, ProvenanceError> {
        if is_identifier(name) {
            Ok(Variable(Arc::from(name)))
        } else {
            Err(ProvenanceError::InvalidVariable(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProvenanceError {
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("invalid monomial `{0}`: expected `1` or variables joined by `*`")]
    InvalidMonomial(String),
    #[error("invalid polynomial `{input}`: {reason}")]
    InvalidPolynomial { input: String, reason: String },
    #[error("no value assigned to variable `{0}`")]
    Unassigned(Variable),
}

/// A canonical monomial: a duplicate-free, lexicographically sorted product
/// of variables. The empty product is the unit `1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    vars: Vec<Variable>,
}

impl Monomial {
    /// The unit monomial `1`.
    pub fn one() -> Self {
        Monomial { vars: Vec::new() }
    }

    /// The canonical representative of the product of `vars`.
    pub fn representative<I: IntoIterator<Item = Variable>>(vars: I) -> Self {
        let mut vars: Vec<Variable> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        Monomial { vars }
    }

    /// The monomial consisting of a single variable.
    pub fn var(v: Variable) -> Self {
        Monomial { vars: vec![v] }
    }

    /// ×-idempotent product: the representative of the union of both
    /// variable sets.
    pub fn product(&self, other: &Monomial) -> Monomial {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() && j < other.vars.len() {
            match self.vars[i].cmp(&other.vars[j]) {
                std::cmp::Ordering::Less => {
                    vars.push(self.vars[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    vars.push(other.vars[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    vars.push(self.vars[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        vars.extend_from_slice(&self.vars[i..]);
        vars.extend_from_slice(&other.vars[j..]);
        Monomial { vars }
    }

    /// Variables in canonical order.
    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.vars.binary_search(v).is_ok()
    }

    /// True if every variable of `self` occurs in `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.vars.iter().all(|v| other.contains(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return f.write_str("1");
        }
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            f.write_str(v.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Monomial {
    type Err = ProvenanceError;

    /// Parses `1` or `v1*v2*...`; unit factors `1` inside a product are
    /// allowed and ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProvenanceError::InvalidMonomial(s.to_string());
        let mut vars = Vec::new();
        for factor in s.split('*') {
            let factor = factor.trim();
            if factor == "1" {
                continue;
            }
            vars.push(Variable::new(factor).map_err(|_| bad())?);
        }
        Ok(Monomial::representative(vars))
    }
}

/// A Trio polynomial: a finite multiset of canonical monomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, u64>,
}

fn checked_coefficient(value: Option<u64>) -> u64 {
    value.expect("polynomial coefficient overflowed u64")
}

impl Polynomial {
    /// The zero polynomial (no monomial occurrences).
    pub fn zero() -> Self {
        Polynomial::default()
    }

    /// The polynomial `1`.
    pub fn one() -> Self {
        Polynomial::from(Monomial::one())
    }

    /// `coefficient` occurrences of `m`.
    pub fn term(m: Monomial, coefficient: u64) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, coefficient);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coefficient` occurrences of `m` in place.
    ///
    /// Panics if the coefficient overflows `u64`.
    pub fn add_term(&mut self, m: Monomial, coefficient: u64) {
        if coefficient == 0 {
            return;
        }
        let c = self.terms.entry(m).or_insert(0);
        *c = checked_coefficient(c.checked_add(coefficient));
    }

    /// Coefficient of the monomial `m` (0 if absent).
    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Terms in canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    /// Total number of monomial occurrences.
    pub fn occurrences(&self) -> u64 {
        self.terms.values().fold(0u64, |acc, c| checked_coefficient(acc.checked_add(*c)))
    }

    /// Variables occurring in any term.
    pub fn vars(&self) -> BTreeSet<Variable> {
        self.terms.keys().flat_map(|m| m.vars().iter().cloned()).collect()
    }

    /// Pointwise coefficient addition. Panics on coefficient overflow; see
    /// [`Polynomial::checked_add`].
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.checked_add(other).expect("polynomial coefficient overflowed u64")
    }

    pub fn checked_add(&self, other: &Polynomial) -> Option<Polynomial> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert(0);
            *e = e.checked_add(*c)?;
        }
        Some(out)
    }

    /// Distributive product with ×-idempotent monomial products. Panics on
    /// coefficient overflow; see [`Polynomial::checked_mul`].
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.checked_mul(other).expect("polynomial coefficient overflowed u64")
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Option<Polynomial> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                let k = c.checked_mul(*d)?;
                let e = out.terms.entry(m.product(n)).or_insert(0);
                *e = e.checked_add(k)?;
            }
        }
        Some(out)
    }

    /// Multiset inclusion: every monomial occurs in `big` at least as often
    /// as in `self`.
    pub fn contained_in(&self, big: &Polynomial) -> bool {
        self.terms.iter().all(|(m, c)| big.coefficient(m) >= *c)
    }

    /// Evaluates the polynomial in a semiring, mapping each variable through
    /// `assignment`. Terms are folded in canonical order; a coefficient `k`
    /// contributes `k` copies of its monomial's value.
    pub fn evaluate<S, F>(&self, assignment: F, semiring: &S) -> Result<S::Value, ProvenanceError>
    where
        S: Semiring,
        F: Fn(&Variable) -> Option<S::Value>,
    {
        let mut total = semiring.zero();
        for (m, c) in &self.terms {
            let mut value = semiring.one();
            for v in m.vars() {
                let x = assignment(v).ok_or_else(|| ProvenanceError::Unassigned(v.clone()))?;
                value = semiring.mul(&value, &x);
            }
            let copies = repeated_sum(semiring, &value, *c);
            total = semiring.add(&total, &copies);
        }
        Ok(total)
    }
}

/// `k` copies of `x` summed, by doubling (valid in any commutative monoid).
fn repeated_sum<S: Semiring>(s: &S, x: &S::Value, mut k: u64) -> S::Value {
    let mut acc = s.zero();
    let mut base = x.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = s.add(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = s.add(&base, &base);
        }
    }
    acc
}

/// Multiset inclusion `p ⊆ big`.
pub fn poly_contains(p: &Polynomial, big: &Polynomial) -> bool {
    p.contained_in(big)
}

impl From<Monomial> for Polynomial {
    fn from(m: Monomial) -> Self {
        Polynomial::term(m, 1)
    }
}

impl FromIterator<Monomial> for Polynomial {
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for m in iter {
            p.add_term(m, 1);
        }
        p
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *c != 1 {
                write!(f, "{c} ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Polynomial {
    type Err = ProvenanceError;

    /// Parses summands separated by `+`. Each summand is an optional
    /// natural coefficient (separated by whitespace or `*`) followed by
    /// factors joined by `*`; integer factors multiply the coefficient.
    /// The whole input `0` is the zero polynomial.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad =
            |reason: &str| ProvenanceError::InvalidPolynomial { input: s.to_string(), reason: reason.to_string() };
        if s.trim() == "0" {
            return Ok(Polynomial::zero());
        }
        let mut p = Polynomial::zero();
        for summand in s.split('+') {
            let summand = summand.trim();
            if summand.is_empty() {
                return Err(bad("empty summand"));
            }
            let mut coefficient: u64 = 1;
            let mut vars = Vec::new();
            for factor in summand.split(|c: char| c == '*' || c.is_whitespace()) {
                if factor.is_empty() {
                    continue;
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let k: u64 = factor.parse().map_err(|_| bad("coefficient out of range"))?;
                    if k == 0 {
                        return Err(bad("zero coefficient"));
                    }
                    coefficient = coefficient.checked_mul(k).ok_or_else(|| bad("coefficient out of range"))?;
                } else {
                    vars.push(Variable::new(factor).map_err(|_| bad("invalid variable name"))?);
                }
            }
            p.add_term(Monomial::representative(vars), coefficient);
        }
        Ok(p)
    }
}

/// A commutative semiring with idempotent multiplication.
///
/// The laws are asserted by the implementor, not checked.
pub trait Semiring {
    type Value: Clone;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

/// A semiring given by its constants and operations.
#[derive(Clone)]
pub struct SemiringSpec<T, A, M> {
    pub zero: T,
    pub one: T,
    pub add: A,
    pub mul: M,
}

impl<T, A, M> Semiring for SemiringSpec<T, A, M>
where
    T: Clone,
    A: Fn(&T, &T) -> T,
    M: Fn(&T, &T) -> T,
{
    type Value = T;

    fn zero(&self) -> T {
        self.zero.clone()
    }
    fn one(&self) -> T {
        self.one.clone()
    }
    fn add(&self, a: &T, b: &T) -> T {
        (self.add)(a, b)
    }
    fn mul(&self, a: &T, b: &T) -> T {
        (self.mul)(a, b)
    }
}

/// The Boolean semiring (∨, ∧, false, true).
#[derive(Debug, Clone, Copy, Default)]
pub struct BooleanSemiring;

impl Semiring for BooleanSemiring {
    type Value = bool;
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
}

/// The fuzzy semiring (`[0, 1]`, max, min, 0, 1).
#[derive(Debug, Clone, Copy, Default)]
pub struct FuzzySemiring;

impl Semiring for FuzzySemiring {
    type Value = f64;
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a.min(*b)
    }
}

/// The Trio semiring itself; evaluating with the identity assignment
/// returns the polynomial unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrioSemiring;

impl Semiring for TrioSemiring {
    type Value = Polynomial;
    fn zero(&self) -> Polynomial {
        Polynomial::zero()
    }
    fn one(&self) -> Polynomial {
        Polynomial::one()
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.add(b)
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.mul(b)
    }
}

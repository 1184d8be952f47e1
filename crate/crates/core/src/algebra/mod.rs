//! The free graded-commutative algebra ΛV = Sym(V^even) ⊗ Ext(V^odd) over ℚ.
//!
//! Monomials are sign-free exponent vectors indexed by generator declaration
//! order; every sign lives in a coefficient and is produced by counting odd
//! transpositions when two monomials are multiplied.

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use parse::parse_element;

/// Exact rationals, the ground field of every computation.
pub type Q = BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub index: usize,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    pub fn is_even(&self) -> bool {
        !self.is_odd()
    }
}

/// An exponent vector. Odd generators only ever carry exponent 0 or 1.
///
/// The ordering is lexicographic on exponent vectors with larger exponents
/// first, so `x2^2 < x2*x6` and iteration over an element visits its leading
/// term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(generators: usize) -> Self {
        Monomial(vec![0; generators])
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn wordlength(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub(crate) fn with_exponent(&self, index: usize, exponent: u32) -> Self {
        let mut m = self.clone();
        m.0[index] = exponent;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.0)
    }
}

/// Word-length restriction used when enumerating a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordLength {
    Any,
    Exactly(usize),
    AtLeast(usize),
    Below(usize),
    /// Inclusive range `lo..=hi`.
    Between(usize, usize),
}

impl WordLength {
    pub fn admits(self, wl: usize) -> bool {
        match self {
            WordLength::Any => true,
            WordLength::Exactly(s) => wl == s,
            WordLength::AtLeast(s) => wl >= s,
            WordLength::Below(s) => wl < s,
            WordLength::Between(lo, hi) => lo <= wl && wl <= hi,
        }
    }
}

/// Complete monomial basis of one degree, with a reverse index.
#[derive(Debug)]
pub struct DegreeBasis {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeBasis {
    fn new(degree: u32, monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        DegreeBasis { degree, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn wordlengths(&self) -> Vec<usize> {
        self.monomials.iter().map(Monomial::wordlength).collect()
    }

    /// Coordinates of a homogeneous element of this degree.
    pub fn coordinates(&self, e: &Element) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.len()];
        for (m, c) in e.terms() {
            let i = self.position(m).unwrap_or_else(|| panic!("monomial {m:?} not in degree {} basis", self.degree));
            v[i] = c.clone();
        }
        v
    }

    pub fn element(&self, coords: &[Q]) -> Element {
        let mut e = Element::zero();
        for (m, c) in self.monomials.iter().zip(coords) {
            e.add_term(m.clone(), c.clone());
        }
        e
    }
}

/// The free graded-commutative algebra on a finite list of generators.
pub struct Algebra {
    generators: Vec<Generator>,
    by_name: HashMap<String, usize>,
    bases: RwLock<HashMap<u32, Arc<DegreeBasis>>>,
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        Algebra {
            generators: self.generators.clone(),
            by_name: self.by_name.clone(),
            bases: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for Algebra {}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra").field("generators", &self.generators).finish()
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Algebra {
    /// Builds ΛV from `(name, degree)` pairs. Declaration order is the
    /// canonical variable order.
    pub fn new<S: AsRef<str>>(specs: &[(S, u32)]) -> Result<Self> {
        let mut generators = Vec::with_capacity(specs.len());
        let mut by_name = HashMap::new();
        for (index, (name, degree)) in specs.iter().enumerate() {
            let name = name.as_ref();
            if !valid_name(name) {
                return Err(Error::InvalidName(name.to_string()));
            }
            if *degree < 2 {
                return Err(Error::NotSimplyConnected { name: name.to_string(), degree: *degree });
            }
            if by_name.insert(name.to_string(), index).is_some() {
                return Err(Error::DuplicateGenerator(name.to_string()));
            }
            generators.push(Generator { name: name.to_string(), degree: *degree, index });
        }
        Ok(Algebra { generators, by_name, bases: RwLock::new(HashMap::new()) })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, index: usize) -> &Generator {
        &self.generators[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn even_indices(&self) -> Vec<usize> {
        self.generators.iter().filter(|g| g.is_even()).map(|g| g.index).collect()
    }

    pub fn odd_indices(&self) -> Vec<usize> {
        self.generators.iter().filter(|g| g.is_odd()).map(|g| g.index).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    pub fn max_even_degree(&self) -> u32 {
        self.generators.iter().filter(|g| g.is_even()).map(|g| g.degree).max().unwrap_or(0)
    }

    pub fn one(&self) -> Element {
        self.scalar(Q::one())
    }

    pub fn scalar(&self, c: Q) -> Element {
        let mut e = Element::zero();
        e.add_term(Monomial::one(self.len()), c);
        e
    }

    /// The generator with the given index as an element.
    pub fn var(&self, index: usize) -> Element {
        let mut exps = vec![0; self.len()];
        exps[index] = 1;
        Element::monomial(Monomial(exps), Q::one())
    }

    pub fn var_named(&self, name: &str) -> Option<Element> {
        self.index_of(name).map(|i| self.var(i))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.generators).map(|(&e, g)| e * g.degree).sum()
    }

    /// Whether every monomial of `e` is an exponent vector for this algebra.
    pub fn contains(&self, e: &Element) -> bool {
        e.terms
            .keys()
            .all(|m| m.len() == self.len() && m.0.iter().zip(&self.generators).all(|(&x, g)| g.is_even() || x <= 1))
    }

    /// The common degree of all monomials; `None` for zero or inhomogeneous
    /// elements.
    pub fn degree_of(&self, e: &Element) -> Option<u32> {
        let mut degrees = e.terms.keys().map(|m| self.monomial_degree(m));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self, e: &Element) -> bool {
        e.is_zero() || self.degree_of(e).is_some()
    }

    /// Product of two monomials with its Koszul sign, or `None` when an odd
    /// generator would appear twice.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut exps = Vec::with_capacity(a.len());
        let mut negative = false;
        // odd generators of `a` seen so far with index > current, counted from the right
        let mut odd_in_a_after = 0usize;
        for i in (0..a.len()).rev() {
            let g = &self.generators[i];
            if g.is_odd() {
                if a.0[i] == 1 && b.0[i] == 1 {
                    return None;
                }
                if b.0[i] == 1 && odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
                if a.0[i] == 1 {
                    odd_in_a_after += 1;
                }
            }
        }
        for i in 0..a.len() {
            exps.push(a.0[i] + b.0[i]);
        }
        Some((Monomial(exps), negative))
    }

    pub(crate) fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, negative)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    /// Graded-commutative product, checking that both factors belong here.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.mul(a, b))
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Element>>(&self, factors: I) -> Element {
        factors.into_iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    /// All monomials of degree `n`, leading (lexicographically largest) first.
    pub fn degree_basis(&self, n: u32) -> Arc<DegreeBasis> {
        if let Some(b) = self.bases.read().expect("basis cache poisoned").get(&n) {
            return Arc::clone(b);
        }
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.len()];
        self.enumerate(0, n, &mut exps, &mut out);
        let basis = Arc::new(DegreeBasis::new(n, out));
        let mut cache = self.bases.write().expect("basis cache poisoned");
        Arc::clone(cache.entry(n).or_insert(basis))
    }

    fn enumerate(&self, i: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.len() {
            if remaining == 0 {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let g = &self.generators[i];
        let max = if g.is_odd() { (remaining / g.degree).min(1) } else { remaining / g.degree };
        for e in (0..=max).rev() {
            exps[i] = e;
            self.enumerate(i + 1, remaining - e * g.degree, exps, out);
        }
        exps[i] = 0;
    }

    /// Monomial basis of (ΛV)^n restricted by word-length.
    pub fn basis(&self, n: u32, filter: WordLength) -> Vec<Monomial> {
        self.degree_basis(n).monomials.iter().filter(|m| filter.admits(m.wordlength())).cloned().collect()
    }

    /// Canonical text form, parseable by [`parse_element`].
    pub fn format(&self, e: &Element) -> String {
        parse::format_element(self, e)
    }

    pub fn parse(&self, text: &str) -> Result<Element> {
        parse_element(text, self)
    }
}

/// A finite ℚ-linear combination of monomials. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Monomial, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut e = Element::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// The first term in monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn min_wordlength(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::wordlength).min()
    }

    pub fn max_wordlength(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::wordlength).max()
    }

    /// The terms whose word-length passes `filter`.
    pub fn restrict(&self, filter: WordLength) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| filter.admits(m.wordlength()))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Decomposes into word-length homogeneous components.
    pub fn wordlength_split(&self) -> BTreeMap<usize, Element> {
        let mut out: BTreeMap<usize, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.wordlength()).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Multiplies by ±1 so that the leading coefficient is positive.
    pub fn normalize_sign(&self) -> Element {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Whether `self = λ·other` for some nonzero λ; returns λ.
    pub fn proportionality(&self, other: &Element) -> Option<Q> {
        if self.len() != other.len() || self.is_zero() {
            return None;
        }
        let (m, c) = self.leading_term()?;
        let lambda = c / other.terms.get(m)?;
        (&other.scale(&lambda) == self).then_some(lambda)
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Element> for Element {
    fn sub_assign(&mut self, rhs: &Element) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(mut self, rhs: Element) -> Element {
        self += &rhs;
        self
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(mut self, rhs: Element) -> Element {
        self -= &rhs;
        self
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

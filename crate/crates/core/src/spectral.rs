//! The word-length spectral sequence `F^p = Λ^{≥(k−1)p}V`.
//!
//! For `k = 3`, `E₁^{p,q} = (Λ^{2p}V ⊕ Λ^{2p+1}V)^{p+q}` with differential
//! `δ(u, v) = (d₃u, d₃v + d₄u)`. A top-degree δ-class is lifted to a
//! `d`-cocycle by repeatedly killing the lowest filtration part of `d(ω)`
//! with a δ-preimage; the filtration of a class that lifts to a nontrivial
//! cocycle determines the Toomer invariant.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{Algebra, Element, Monomial, WordLength, Q};
use crate::cohomology::{
    cohomology_basis, d_matrix, formal_dimension, is_boundary, is_elliptic, Method, ToomerResult, Witness,
};
use crate::differential::{Derivation, SullivanModel};
use crate::error::{Error, Result};
use crate::linalg::{homology, max_weight_shift, RationalMatrix};
use crate::par;

/// Monomial basis of `E₀^{p,·} = F^p/F^{p+1}` in total degree `n`, for the
/// model's own `k`.
pub fn filtration_basis(model: &SullivanModel, p: usize, n: u32) -> Result<Vec<Monomial>> {
    let k = model.k().ok_or(Error::ZeroDifferential)?;
    let lo = p * (k - 1);
    Ok(model.algebra().basis(n, WordLength::Between(lo, lo + k - 2)))
}

/// An element `(u, v)` of `E₁^{p,·}` in total degree `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredPair {
    pub p: usize,
    pub n: u32,
    pub u: Element,
    pub v: Element,
}

impl FilteredPair {
    pub fn new(alg: &Algebra, p: usize, n: u32, u: Element, v: Element) -> Result<Self> {
        for (name, part, wl) in [("u", &u, 2 * p), ("v", &v, 2 * p + 1)] {
            if !alg.contains(part) {
                return Err(Error::AlgebraMismatch);
            }
            if part.terms().any(|(m, _)| m.wordlength() != wl) {
                return Err(Error::InvalidPair(format!("{name} = {} is not in Λ^{wl}V", alg.format(part))));
            }
            if part.terms().any(|(m, _)| alg.monomial_degree(m) != n) {
                return Err(Error::InvalidPair(format!("{name} = {} is not of degree {n}", alg.format(part))));
            }
        }
        Ok(FilteredPair { p, n, u, v })
    }

    pub fn zero(p: usize, n: u32) -> Self {
        FilteredPair { p, n, u: Element::zero(), v: Element::zero() }
    }

    /// Reads an element of `(Λ^{2p}V ⊕ Λ^{2p+1}V)^n` as a pair.
    pub fn from_element(alg: &Algebra, p: usize, n: u32, e: &Element) -> Result<Self> {
        Self::new(alg, p, n, e.restrict(WordLength::Exactly(2 * p)), e.restrict(WordLength::Exactly(2 * p + 1)))
            .and_then(|pair| {
                if pair.element() == *e {
                    Ok(pair)
                } else {
                    Err(Error::InvalidPair(format!("{} has components outside filtration {p}", alg.format(e))))
                }
            })
    }

    /// `u + v` as an element of ΛV.
    pub fn element(&self) -> Element {
        &self.u + &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Word-length depth of this particular representative.
    pub fn depth(&self) -> usize {
        if self.u.is_zero() {
            2 * self.p + 1
        } else {
            2 * self.p
        }
    }

    pub fn display<'a>(&'a self, alg: &'a Algebra) -> PairDisplay<'a> {
        PairDisplay { pair: self, alg }
    }
}

pub struct PairDisplay<'a> {
    pair: &'a FilteredPair,
    alg: &'a Algebra,
}

impl fmt::Display for PairDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alg.format(&self.pair.u), self.alg.format(&self.pair.v))
    }
}

/// `(u, v) ⊗ (u', v') = (uu', uv' + vu')`.
pub fn pair_product(alg: &Algebra, a: &FilteredPair, b: &FilteredPair) -> Result<FilteredPair> {
    for part in [&a.u, &a.v, &b.u, &b.v] {
        if !alg.contains(part) {
            return Err(Error::AlgebraMismatch);
        }
    }
    Ok(FilteredPair {
        p: a.p + b.p,
        n: a.n + b.n,
        u: alg.mul(&a.u, &b.u),
        v: alg.mul(&a.u, &b.v) + alg.mul(&a.v, &b.u),
    })
}

/// `δ` for a model with `k ≥ 3`, holding the components `d₃` and `d₄`.
#[derive(Debug, Clone)]
pub struct Delta<'m> {
    model: &'m SullivanModel,
    d3: Derivation,
    d4: Derivation,
}

impl<'m> Delta<'m> {
    /// Fails for `k = 2`. For `k > 3` the formula still applies with `d₃ = 0`.
    pub fn new(model: &'m SullivanModel) -> Result<Self> {
        if model.k() == Some(2) {
            return Err(Error::WrongK("k = 2; δ is only defined when d₂ = 0".into()));
        }
        Ok(Delta { model, d3: model.differential().component(3), d4: model.differential().component(4) })
    }

    pub fn model(&self) -> &'m SullivanModel {
        self.model
    }

    pub fn apply(&self, pair: &FilteredPair) -> FilteredPair {
        let alg = self.model.algebra();
        FilteredPair {
            p: pair.p + 1,
            n: pair.n + 1,
            u: self.d3.apply(alg, &pair.u),
            v: self.d3.apply(alg, &pair.v) + self.d4.apply(alg, &pair.u),
        }
    }

    /// δ on a monomial, which is a `u`-part when its word-length is even and
    /// a `v`-part otherwise.
    pub fn apply_monomial(&self, m: &Monomial) -> Element {
        let alg = self.model.algebra();
        let mut out = self.d3.apply_monomial(alg, m);
        if m.wordlength().is_multiple_of(2) {
            out += &self.d4.apply_monomial(alg, m);
        }
        out
    }

    /// δ summed over all filtrations.
    pub fn apply_total(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out += &self.apply_monomial(m).scale(c);
        }
        out
    }

    /// Matrix of δ from `E₁^{p}` in degree `n` to `E₁^{p+1}` in degree
    /// `n + 1`, with the source and target monomials.
    pub fn block(&self, p: usize, n: u32) -> (RationalMatrix, Vec<Monomial>, Vec<Monomial>) {
        let alg = self.model.algebra();
        let source = alg.basis(n, WordLength::Between(2 * p, 2 * p + 1));
        let target = alg.basis(n + 1, WordLength::Between(2 * p + 2, 2 * p + 3));
        (self.matrix(&source, &target), source, target)
    }

    /// Matrix of total δ from degree `n` to degree `n + 1`.
    pub fn total(&self, n: u32) -> RationalMatrix {
        let alg = self.model.algebra();
        let source = alg.degree_basis(n).monomials.clone();
        let target = alg.degree_basis(n + 1).monomials.clone();
        self.matrix(&source, &target)
    }

    fn matrix(&self, source: &[Monomial], target: &[Monomial]) -> RationalMatrix {
        let index: HashMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let columns = par::map(source, |m| {
            let mut col = vec![Q::zero(); target.len()];
            for (t, c) in self.apply_monomial(m).terms() {
                col[index[t]] = c.clone();
            }
            col
        });
        RationalMatrix::from_columns(target.len(), &columns)
    }
}

/// `δ(u, v) = (d₃u, d₃v + d₄u)`.
pub fn delta_apply(model: &SullivanModel, pair: &FilteredPair) -> Result<FilteredPair> {
    Ok(Delta::new(model)?.apply(pair))
}

fn coords(basis: &[Monomial], e: &Element) -> Vec<Q> {
    let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut v = vec![Q::zero(); basis.len()];
    for (m, c) in e.terms() {
        v[index[m]] = c.clone();
    }
    v
}

fn element_of(basis: &[Monomial], v: &[Q]) -> Element {
    let mut e = Element::zero();
    for (m, c) in basis.iter().zip(v) {
        e.add_term(m.clone(), c.clone());
    }
    e
}

/// A basis element of `H^{p,·}(ΛV, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaClass {
    pub p: usize,
    pub n: u32,
    pub index: usize,
    pub representative: FilteredPair,
}

/// `H^{p,·}(ΛV, δ)` in one total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationCohomology {
    pub p: usize,
    pub classes: Vec<DeltaClass>,
    pub cocycle_dim: usize,
    pub boundary_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCohomology {
    pub degree: u32,
    pub by_filtration: Vec<FiltrationCohomology>,
}

impl DeltaCohomology {
    pub fn dimension(&self) -> usize {
        self.by_filtration.iter().map(|f| f.classes.len()).sum()
    }

    pub fn classes(&self) -> impl Iterator<Item = &DeltaClass> {
        self.by_filtration.iter().flat_map(|f| f.classes.iter())
    }
}

/// Kernel of δ at `(p, n)` modulo the image from `(p − 1, n − 1)`, for every
/// filtration `p` that is nonempty in degree `n`.
pub fn delta_cohomology(model: &SullivanModel, n: u32) -> Result<DeltaCohomology> {
    let delta = Delta::new(model)?;
    let alg = model.algebra();
    let max_wl = alg.degree_basis(n).wordlengths().into_iter().max().unwrap_or(0);
    let filtrations: Vec<usize> = (0..=max_wl / 2).collect();
    let by_filtration = par::map(&filtrations, |&p| {
        let (outgoing, source, _) = delta.block(p, n);
        let incoming = if p == 0 || n == 0 {
            RationalMatrix::zeros(source.len(), 0)
        } else {
            let (m, _, target) = delta.block(p - 1, n - 1);
            debug_assert_eq!(target, source);
            m
        };
        let h = homology(source.len(), &outgoing, &incoming);
        let classes = h
            .representatives
            .iter()
            .enumerate()
            .map(|(index, v)| {
                let e = element_of(&source, v);
                let representative =
                    FilteredPair::from_element(alg, p, n, &e).expect("block basis lies in filtration p");
                DeltaClass { p, n, index, representative }
            })
            .collect();
        FiltrationCohomology { p, classes, cocycle_dim: h.cocycle_dim, boundary_dim: h.boundaries.len() }
    });
    Ok(DeltaCohomology { degree: n, by_filtration })
}

/// Largest `r` such that the δ-class of `class` has a representative in
/// Λ^{≥r}V, with such a representative.
pub fn representative_depth(model: &SullivanModel, class: &FilteredPair) -> Result<(usize, FilteredPair)> {
    let delta = Delta::new(model)?;
    let alg = model.algebra();
    let n = class.n;
    let basis = alg.degree_basis(n);
    let boundary = if n == 0 { RationalMatrix::zeros(basis.len(), 0) } else { delta.total(n - 1) };
    let weights = basis.wordlengths();
    let (r, adjusted) = max_weight_shift(&basis.coordinates(&class.element()), &weights, &boundary);
    if r > weights.iter().copied().max().unwrap_or(0) {
        return Err(Error::ZeroClass);
    }
    let adjusted = basis.element(&adjusted).restrict(WordLength::Between(2 * class.p, 2 * class.p + 1));
    let rep = FilteredPair::from_element(alg, class.p, n, &adjusted)?;
    Ok((r, rep))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftStep {
    /// The lowest filtration part `a` of `d(ωⱼ)`.
    pub obstruction: FilteredPair,
    /// The element subtracted from `ωⱼ`.
    pub corrector: Element,
    /// `false` when `corrector` solves `δ(b) = a` in the filtration just below
    /// `a`; `true` when earlier corrections had to be revised, so `corrector`
    /// spans filtrations `p + 1 ..` up to that one.
    pub revised: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftOutcome {
    /// A `d`-cocycle that is not a `d`-boundary.
    Success(Element),
    /// The obstruction at this step has no preimage, even after revising the
    /// earlier corrections: the class does not survive.
    Died { step: usize, obstruction: FilteredPair },
    /// The lift is a `d`-cocycle but zero or a `d`-boundary.
    Collapsed(Element),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftTrace {
    pub start: Element,
    pub degree: u32,
    pub filtration: usize,
    /// Number of pair components of the start minus one.
    pub l: usize,
    /// Largest `t` with `t ≤ (N − 4p − 4l − 1)/4`.
    pub t_bound: i64,
    /// `ω₀, ω₁, …`.
    pub iterates: Vec<Element>,
    pub steps: Vec<LiftStep>,
    pub outcome: LiftOutcome,
}

impl LiftTrace {
    pub fn succeeded(&self) -> bool {
        matches!(self.outcome, LiftOutcome::Success(_))
    }

    pub fn cocycle(&self) -> Option<&Element> {
        match &self.outcome {
            LiftOutcome::Success(e) => Some(e),
            _ => None,
        }
    }
}

fn filtration_of(wl: usize) -> usize {
    wl / 2
}

/// Lifts a δ-cocycle `ω₀ ∈ Λ^{≥2p}V` to a `d`-cocycle by killing the lowest
/// filtration part of `d(ωⱼ)` at each step.
pub fn lift_to_d_cocycle(model: &SullivanModel, start: &Element) -> Result<LiftTrace> {
    let delta = Delta::new(model)?;
    let alg = model.algebra();
    if start.is_zero() {
        return Ok(LiftTrace {
            start: Element::zero(),
            degree: 0,
            filtration: 0,
            l: 0,
            t_bound: 0,
            iterates: vec![Element::zero()],
            steps: vec![],
            outcome: LiftOutcome::Collapsed(Element::zero()),
        });
    }
    let n = alg.degree_of(start).ok_or_else(|| Error::InvalidPair("start element is not homogeneous".into()))?;
    let dstart = delta.apply_total(start);
    if !dstart.is_zero() {
        return Err(Error::NotDeltaCocycle(alg.format(&dstart)));
    }
    let p = filtration_of(start.min_wordlength().expect("nonzero"));
    let l = filtration_of(start.max_wordlength().expect("nonzero")) - p;
    let t_bound = (n as i64 - 4 * p as i64 - 4 * l as i64 - 1).div_euclid(4);
    let max_steps = (n as usize).div_ceil(2).saturating_sub(p) + 1;

    let mut omega = start.clone();
    let mut iterates = vec![omega.clone()];
    let mut steps = Vec::new();
    loop {
        let d_omega = model.d(&omega);
        if d_omega.is_zero() {
            break;
        }
        if steps.len() >= max_steps {
            return Err(Error::Internal("lift exceeded the word-length iteration bound".into()));
        }
        let q = filtration_of(d_omega.min_wordlength().expect("nonzero"));
        if q < p + 2 {
            return Err(Error::Internal(format!("obstruction in filtration {q} below p + 2 = {}", p + 2)));
        }
        let a_elem = d_omega.restrict(WordLength::Between(2 * q, 2 * q + 1));
        let obstruction = FilteredPair::from_element(alg, q, n + 1, &a_elem)?;
        if !delta.apply(&obstruction).is_zero() {
            return Err(Error::Internal("obstruction is not a δ-cocycle".into()));
        }

        let (block, source, target) = delta.block(q - 1, n);
        let (corrector, revised) = match block.solve(&coords(&target, &a_elem)) {
            Some(x) => (element_of(&source, &x), false),
            None => match revise(model, &d_omega, p, q, n) {
                Some(c) => (c, true),
                None => {
                    return Ok(LiftTrace {
                        start: start.clone(),
                        degree: n,
                        filtration: p,
                        l,
                        t_bound,
                        iterates,
                        outcome: LiftOutcome::Died { step: steps.len(), obstruction },
                        steps,
                    })
                }
            },
        };
        omega = &omega - &corrector;
        iterates.push(omega.clone());
        steps.push(LiftStep { obstruction, corrector, revised });
    }
    let outcome =
        if is_boundary(model, &omega, n) { LiftOutcome::Collapsed(omega) } else { LiftOutcome::Success(omega) };
    Ok(LiftTrace { start: start.clone(), degree: n, filtration: p, l, t_bound, iterates, steps, outcome })
}

/// A correction `c` supported in filtrations `p + 1 ..= q − 1` with
/// `d(ω − c) ∈ F^{q+1}`, if one exists.
fn revise(model: &SullivanModel, d_omega: &Element, p: usize, q: usize, n: u32) -> Option<Element> {
    let alg = model.algebra();
    let source_basis = alg.degree_basis(n);
    let target_basis = alg.degree_basis(n + 1);
    let cols: Vec<usize> = (0..source_basis.len())
        .filter(|&i| {
            let f = filtration_of(source_basis.monomials[i].wordlength());
            p < f && f < q
        })
        .collect();
    let rows: Vec<usize> =
        (0..target_basis.len()).filter(|&i| filtration_of(target_basis.monomials[i].wordlength()) <= q).collect();
    let m = d_matrix(model, n).select_rows(&rows).select_columns(&cols);
    let full = target_basis.coordinates(d_omega);
    let rhs: Vec<Q> = rows.iter().map(|&r| full[r].clone()).collect();
    let x = m.solve(&rhs)?;
    let mut c = Element::zero();
    for (j, &col) in cols.iter().enumerate() {
        c.add_term(source_basis.monomials[col].clone(), x[j].clone());
    }
    Some(c)
}

/// One δ-class of the top degree together with its lift.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Depth-maximal representative.
    pub class: FilteredPair,
    pub depth: usize,
    pub trace: LiftTrace,
    /// Whether the class is a combination found by solving for survivors
    /// jointly rather than a single basis class.
    pub combined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralToomer {
    pub result: ToomerResult,
    pub delta: DeltaCohomology,
    pub candidates: Vec<Candidate>,
}

fn candidate(model: &SullivanModel, class: &FilteredPair, combined: bool) -> Result<Candidate> {
    let (depth, rep) = representative_depth(model, class)?;
    let trace = lift_to_d_cocycle(model, &rep.element())?;
    Ok(Candidate { class: rep, depth, trace, combined })
}

/// Survivors in filtration `p` found jointly: `λ` and `c ∈ F^{p+1}` with
/// `d(Σ λᵢ hᵢ − c) = 0`.
fn combined_survivors(model: &SullivanModel, fc: &FiltrationCohomology, n: u32) -> Result<Vec<Candidate>> {
    let alg = model.algebra();
    let source = alg.degree_basis(n);
    let target = alg.degree_basis(n + 1);
    let d = d_matrix(model, n);
    let higher: Vec<usize> = (0..source.len()).filter(|&i| source.monomials[i].wordlength() >= 2 * fc.p + 2).collect();
    let mut columns: Vec<Vec<Q>> =
        fc.classes.iter().map(|h| target.coordinates(&model.d(&h.representative.element()))).collect();
    columns.extend(higher.iter().map(|&c| d.column(c).into_iter().map(|x| -x).collect()));
    let system = RationalMatrix::from_columns(target.len(), &columns);
    let mut out = Vec::new();
    for v in system.kernel_basis() {
        let lambda = &v[..fc.classes.len()];
        if lambda.iter().all(Zero::is_zero) {
            continue;
        }
        let mut e = Element::zero();
        for (h, l) in fc.classes.iter().zip(lambda) {
            e += &h.representative.element().scale(l);
        }
        let class = FilteredPair::from_element(alg, fc.p, n, &e)?;
        let c = candidate(model, &class, true)?;
        let done = c.trace.succeeded();
        out.push(c);
        if done {
            break;
        }
    }
    Ok(out)
}

/// `e₀` through the spectral sequence: lift every top-degree δ-class and take
/// the deepest class whose lift is a nontrivial `d`-cocycle.
pub fn toomer_spectral(model: &SullivanModel) -> Result<ToomerResult> {
    toomer_spectral_detailed(model, None).map(|s| s.result)
}

pub fn toomer_spectral_detailed(model: &SullivanModel, bound: Option<u32>) -> Result<SpectralToomer> {
    match model.k() {
        Some(3) => {}
        Some(k) => return Err(Error::WrongK(format!("k = {k}"))),
        None => return Err(Error::WrongK("d = 0".into())),
    }
    is_elliptic(model, bound).require()?;
    let n = u32::try_from(formal_dimension(model))
        .map_err(|_| Error::Internal("elliptic model with negative formal dimension".into()))?;
    let top_dim = cohomology_basis(model, n).dimension();
    if top_dim != 1 {
        return Err(Error::TopClassDimension { degree: n, dimension: top_dim });
    }
    let delta = delta_cohomology(model, n)?;
    let classes: Vec<&DeltaClass> = delta.classes().collect();
    let mut candidates: Vec<Candidate> =
        par::map(&classes, |c| candidate(model, &c.representative, false)).into_iter().collect::<Result<_>>()?;
    for fc in &delta.by_filtration {
        let found = candidates.iter().any(|c| c.class.p == fc.p && c.trace.succeeded());
        if !found && fc.classes.len() >= 2 {
            candidates.extend(combined_survivors(model, fc, n)?);
        }
    }
    let best = candidates
        .iter()
        .filter(|c| c.trace.succeeded())
        .max_by_key(|c| c.depth)
        .ok_or_else(|| Error::Internal("no top-degree δ-class survives".into()))?;
    let result = ToomerResult {
        e0: best.depth,
        method: Method::Spectral,
        degree: n,
        representative: best.trace.cocycle().expect("succeeded").normalize_sign(),
        witness: Some(Witness { filtration: best.class.p, odd: best.depth % 2 == 1 }),
    };
    Ok(SpectralToomer { result, delta, candidates })
}

#[cfg(test)]
mod tests;

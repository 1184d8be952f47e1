//! Degreewise cohomology of `(ΛV, d)`, formal dimension, ellipticity and the
//! Toomer invariant computed directly from `d`-boundaries.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::algebra::{Element, WordLength, Q};
use crate::differential::{is_even_monomial, pure_projection, SullivanModel};
use crate::error::{Error, Result};
use crate::linalg::{homology, max_weight_shift, RationalMatrix};
use crate::par;

/// Per-model cache of differential matrices, keyed by source degree.
#[derive(Default)]
pub struct Memo {
    d_maps: RwLock<HashMap<u32, Arc<RationalMatrix>>>,
}

/// Matrix of `d: (ΛV)^n → (ΛV)^{n+1}` in the canonical monomial bases.
pub fn d_matrix(model: &SullivanModel, n: u32) -> Arc<RationalMatrix> {
    if let Some(m) = model.memo.d_maps.read().expect("memo poisoned").get(&n) {
        return Arc::clone(m);
    }
    let alg = model.algebra();
    let source = alg.degree_basis(n);
    let target = alg.degree_basis(n + 1);
    let columns =
        par::map(&source.monomials, |m| target.coordinates(&model.differential().derivation().apply_monomial(alg, m)));
    let matrix = Arc::new(RationalMatrix::from_columns(target.len(), &columns));
    let mut memo = model.memo.d_maps.write().expect("memo poisoned");
    Arc::clone(memo.entry(n).or_insert(matrix))
}

/// `(outgoing, incoming)` maps at degree `n`: `d` out of `(ΛV)^n` and `d`
/// into it from `(ΛV)^{n−1}`.
pub fn cochain_maps(model: &SullivanModel, n: u32) -> (Arc<RationalMatrix>, Arc<RationalMatrix>) {
    let outgoing = d_matrix(model, n);
    let incoming = if n == 0 {
        Arc::new(RationalMatrix::zeros(model.algebra().degree_basis(0).len(), 0))
    } else {
        d_matrix(model, n - 1)
    };
    (outgoing, incoming)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohomologySpace {
    pub degree: u32,
    pub representatives: Vec<Element>,
    pub boundary_basis: Vec<Element>,
}

impl CohomologySpace {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }
}

pub fn cohomology_basis(model: &SullivanModel, n: u32) -> CohomologySpace {
    let basis = model.algebra().degree_basis(n);
    let (outgoing, incoming) = cochain_maps(model, n);
    let h = homology(basis.len(), &outgoing, &incoming);
    CohomologySpace {
        degree: n,
        representatives: h.representatives.iter().map(|v| basis.element(v).normalize_sign()).collect(),
        boundary_basis: h.boundaries.iter().map(|v| basis.element(v)).collect(),
    }
}

pub fn cohomology_dimension(model: &SullivanModel, n: u32) -> usize {
    let basis = model.algebra().degree_basis(n);
    let (outgoing, incoming) = cochain_maps(model, n);
    basis.len() - outgoing.rank() - incoming.rank()
}

/// `dim H^n` for every `n` in `degrees`, computed concurrently.
pub fn cohomology_table(model: &SullivanModel, degrees: std::ops::RangeInclusive<u32>) -> Vec<(u32, usize)> {
    let degrees: Vec<u32> = degrees.collect();
    par::map(&degrees, |&n| (n, cohomology_dimension(model, n)))
}

/// Whether a homogeneous element of degree `n` is `d` of something.
pub fn is_boundary(model: &SullivanModel, e: &Element, n: u32) -> bool {
    if e.is_zero() {
        return true;
    }
    if n == 0 {
        return false;
    }
    let basis = model.algebra().degree_basis(n);
    d_matrix(model, n - 1).solve(&basis.coordinates(e)).is_some()
}

/// Whether `a − λ·b` is a boundary for some nonzero λ (both nonzero classes
/// of degree `n`, with `b` not a boundary).
pub fn same_class_up_to_scalar(model: &SullivanModel, a: &Element, b: &Element, n: u32) -> bool {
    let basis = model.algebra().degree_basis(n);
    let mut gens = vec![basis.coordinates(b)];
    if n > 0 {
        let incoming = d_matrix(model, n - 1);
        gens.extend((0..incoming.cols()).map(|c| incoming.column(c)));
    }
    let m = RationalMatrix::from_columns(basis.len(), &gens);
    match m.solve(&basis.coordinates(a)) {
        Some(x) => !num_traits::Zero::is_zero(&x[0]),
        None => false,
    }
}

/// `N = dim V^even − Σ (−1)^{|x|}|x|`, the formal dimension of an elliptic
/// model. Meaningful as "expected formal dimension" for any model.
pub fn formal_dimension(model: &SullivanModel) -> i64 {
    let alg = model.algebra();
    let even = alg.even_indices().len() as i64;
    let alternating: i64 =
        alg.generators().iter().map(|g| if g.is_odd() { -(g.degree as i64) } else { g.degree as i64 }).sum();
    even - alternating
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllipticStatus {
    /// Λ(V^even)/(d_σ V^odd) vanishes on `[window_start, window_start + w)`,
    /// `w` the largest even generator degree, hence in every degree above.
    Elliptic { window_start: u32 },
    /// The quotient is nonzero in these degrees above the formal dimension,
    /// which is impossible for an elliptic model.
    NotElliptic { degrees_above_n: Vec<u32> },
    /// Neither certificate was found below the scan bound.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ellipticity {
    pub status: EllipticStatus,
    pub formal_dimension: i64,
    pub bound: u32,
    /// `(degree, dim)` for every scanned degree with a nonzero quotient.
    pub nonzero_quotient: Vec<(u32, usize)>,
}

impl Ellipticity {
    pub fn is_elliptic(&self) -> bool {
        matches!(self.status, EllipticStatus::Elliptic { .. })
    }

    pub fn require(&self) -> Result<()> {
        match &self.status {
            EllipticStatus::Elliptic { .. } => Ok(()),
            EllipticStatus::NotElliptic { .. } => Err(Error::NotElliptic(self.to_string())),
            EllipticStatus::Inconclusive => Err(Error::EllipticityInconclusive(self.bound)),
        }
    }
}

impl fmt::Display for Ellipticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            EllipticStatus::Elliptic { window_start } => {
                write!(f, "elliptic: Λ(V^even)/(d_σ V^odd) vanishes in all degrees >= {window_start}")
            }
            EllipticStatus::NotElliptic { degrees_above_n } => write!(
                f,
                "Λ(V^even)/(d_σ V^odd) is nonzero in degrees {:?} above N = {}",
                degrees_above_n, self.formal_dimension
            ),
            EllipticStatus::Inconclusive => write!(f, "inconclusive up to degree {}", self.bound),
        }
    }
}

/// Default scan bound: `2N + max generator degree`, never below the degree
/// at which the test is guaranteed to decide.
pub fn default_scan_bound(model: &SullivanModel) -> u32 {
    let n = formal_dimension(model);
    let alg = model.algebra();
    let decisive = n + alg.max_even_degree().max(1) as i64 + 1;
    (2 * n + alg.max_degree() as i64).max(decisive).max(0) as u32
}

/// Ellipticity through the pure model: `dim H(ΛV,d) < ∞` iff
/// `Λ(V^even)/(d_σ V^odd)` is finite dimensional.
pub fn is_elliptic(model: &SullivanModel, bound: Option<u32>) -> Ellipticity {
    let bound = bound.unwrap_or_else(|| default_scan_bound(model));
    let n_formal = formal_dimension(model);
    let pure = pure_projection(model);
    let alg = pure.model().algebra();
    let relations: Vec<(u32, Element)> = alg
        .odd_indices()
        .into_iter()
        .map(|i| pure.model().differential().image(i).clone())
        .filter(|f| !f.is_zero())
        .map(|f| (alg.degree_of(&f).expect("homogeneous image"), f))
        .collect();
    let window = alg.max_even_degree().max(1);
    let even_basis = |n: u32| -> Vec<_> {
        alg.degree_basis(n).monomials.iter().filter(|m| is_even_monomial(alg, m)).cloned().collect()
    };

    let mut nonzero = Vec::new();
    let mut above = Vec::new();
    let mut zero_run_start: Option<u32> = None;
    let mut status = EllipticStatus::Inconclusive;
    for n in 0..=bound {
        let ambient = even_basis(n);
        let dim = if ambient.is_empty() {
            0
        } else {
            let index: HashMap<_, usize> = ambient.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let products: Vec<Vec<Q>> = relations
                .iter()
                .filter(|(deg, _)| *deg <= n)
                .flat_map(|(deg, f)| {
                    let multipliers = even_basis(n - deg);
                    par::map(&multipliers, |m| {
                        let p = alg.mul(&Element::monomial(m.clone(), crate::algebra::q(1)), f);
                        let mut v = vec![<Q as num_traits::Zero>::zero(); ambient.len()];
                        for (mono, c) in p.terms() {
                            v[index[mono]] = c.clone();
                        }
                        v
                    })
                })
                .collect();
            ambient.len() - RationalMatrix::from_columns(ambient.len(), &products).rank()
        };
        if dim > 0 {
            nonzero.push((n, dim));
            zero_run_start = None;
            if n as i64 > n_formal {
                above.push(n);
            }
        } else {
            let start = *zero_run_start.get_or_insert(n);
            if n + 1 - start >= window && above.is_empty() {
                status = EllipticStatus::Elliptic { window_start: start };
                break;
            }
        }
    }
    if !above.is_empty() {
        status = EllipticStatus::NotElliptic { degrees_above_n: above };
    }
    Ellipticity { status, formal_dimension: n_formal, bound, nonzero_quotient: nonzero }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopClass {
    pub degree: u32,
    pub space: CohomologySpace,
}

impl TopClass {
    pub fn representative(&self) -> &Element {
        &self.space.representatives[0]
    }
}

/// `H^N` of an elliptic model, which must be one-dimensional.
pub fn top_class(model: &SullivanModel) -> Result<TopClass> {
    top_class_with_bound(model, None)
}

pub fn top_class_with_bound(model: &SullivanModel, bound: Option<u32>) -> Result<TopClass> {
    is_elliptic(model, bound).require()?;
    let n = u32::try_from(formal_dimension(model))
        .map_err(|_| Error::Internal("elliptic model with negative formal dimension".into()))?;
    let space = cohomology_basis(model, n);
    if space.dimension() != 1 {
        return Err(Error::TopClassDimension { degree: n, dimension: space.dimension() });
    }
    Ok(TopClass { degree: n, space })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Spectral,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Spectral => "spectral",
        })
    }
}

/// Where in the word-length spectral sequence the surviving class sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub filtration: usize,
    /// `true` when the class has no component in Λ^{2p}V, so `e₀ = 2p + 1`.
    pub odd: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToomerResult {
    pub e0: usize,
    pub method: Method,
    pub degree: u32,
    /// A cocycle of degree `N` in Λ^{≥e₀}V that is not a boundary.
    pub representative: Element,
    pub witness: Option<Witness>,
}

/// Largest `s` with `[ω] ∈ image(Λ^{≥s}V ∩ ker d)`, tested on
/// `ω ∈ Λ^{≥s}V + B^n` for one representative `ω`.
pub fn boundary_depth(model: &SullivanModel, omega: &Element, n: u32) -> (usize, Element) {
    let basis = model.algebra().degree_basis(n);
    let incoming = if n == 0 { RationalMatrix::zeros(basis.len(), 0) } else { (*d_matrix(model, n - 1)).clone() };
    let (s, adjusted) = max_weight_shift(&basis.coordinates(omega), &basis.wordlengths(), &incoming);
    (s, basis.element(&adjusted))
}

/// `e₀` straight from the definition: the deepest word-length at which the
/// top class has a cocycle representative.
pub fn toomer_oracle(model: &SullivanModel) -> Result<ToomerResult> {
    toomer_oracle_with_bound(model, None)
}

pub fn toomer_oracle_with_bound(model: &SullivanModel, bound: Option<u32>) -> Result<ToomerResult> {
    let top = top_class_with_bound(model, bound)?;
    let (e0, representative) = boundary_depth(model, top.representative(), top.degree);
    let max_wl = model.algebra().degree_basis(top.degree).wordlengths().into_iter().max().unwrap_or(0);
    if e0 > max_wl {
        return Err(Error::Internal("top class representative is a boundary".into()));
    }
    debug_assert!(model.d(&representative).is_zero());
    Ok(ToomerResult {
        e0,
        method: Method::Oracle,
        degree: top.degree,
        representative: representative.normalize_sign(),
        witness: None,
    })
}

/// Whether the top class has a representative in Λ^{≥s}V.
pub fn top_class_reaches(model: &SullivanModel, top: &TopClass, s: usize) -> bool {
    let basis = model.algebra().degree_basis(top.degree);
    let low: Vec<usize> = (0..basis.len()).filter(|&i| basis.monomials[i].wordlength() < s).collect();
    let coords = basis.coordinates(top.representative());
    let rhs: Vec<Q> = low.iter().map(|&i| coords[i].clone()).collect();
    if top.degree == 0 {
        return rhs.iter().all(num_traits::Zero::is_zero);
    }
    d_matrix(model, top.degree - 1).select_rows(&low).solve(&rhs).is_some()
}

/// Wordlength filter used by reporting code.
pub fn representative_in(e: &Element, s: usize) -> bool {
    e.restrict(WordLength::Below(s)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> SullivanModel {
        SullivanModel::build(&[("x2", 2), ("y3", 3)], &[("y3", "x2^2")]).unwrap()
    }

    fn example1() -> SullivanModel {
        SullivanModel::build(
            &[("x2", 2), ("x6", 6), ("y5", 5), ("y15", 15), ("y23", 23)],
            &[("y5", "x2^3"), ("y15", "x2^2*x6^2"), ("y23", "x6^4")],
        )
        .unwrap()
    }

    fn example2() -> SullivanModel {
        SullivanModel::build(
            &[("x2", 2), ("x6", 6), ("y5", 5), ("y13", 13), ("y23", 23)],
            &[("y5", "x2^3"), ("y13", "x2*x6^2"), ("y23", "x6^4")],
        )
        .unwrap()
    }

    #[test]
    fn cochain_maps_of_s2() {
        let m = s2();
        let (out, _) = cochain_maps(&m, 3);
        assert_eq!(out.rows(), 1);
        assert_eq!(out.cols(), 1);
        assert_eq!(out[(0, 0)], crate::algebra::q(1));
        // degree 1 has no monomials
        let (out, inc) = cochain_maps(&m, 1);
        assert_eq!((out.rows(), out.cols(), inc.rows(), inc.cols()), (1, 0, 0, 1));
        let zero = SullivanModel::build(&[("y3", 3), ("y5", 5)], &[]).unwrap();
        assert!(cochain_maps(&zero, 3).0.is_zero());
    }

    #[test]
    fn cohomology_of_s2() {
        let m = s2();
        let h2 = cohomology_basis(&m, 2);
        assert_eq!(h2.dimension(), 1);
        assert_eq!(m.algebra().format(&h2.representatives[0]), "x2");
        assert_eq!(cohomology_basis(&m, 4).dimension(), 0);
        assert_eq!(cohomology_basis(&m, 0).dimension(), 1);
        assert_eq!(formal_dimension(&m), 2);
        for n in 3..8 {
            assert_eq!(cohomology_dimension(&m, n), 0);
        }
    }

    #[test]
    fn formal_dimensions() {
        assert_eq!(formal_dimension(&example1()), 37);
        assert_eq!(formal_dimension(&example2()), 35);
    }

    #[test]
    fn ellipticity_examples() {
        let e = is_elliptic(&example1(), None);
        assert!(e.is_elliptic(), "{e}");
        let truncated = example1().truncate_to_component(3).unwrap();
        let e = is_elliptic(&truncated, None);
        match &e.status {
            EllipticStatus::NotElliptic { degrees_above_n } => assert!(!degrees_above_n.is_empty()),
            other => panic!("{other:?}"),
        }
        let odd = SullivanModel::build(&[("y3", 3), ("y5", 5)], &[]).unwrap();
        assert_eq!(is_elliptic(&odd, None).status, EllipticStatus::Elliptic { window_start: 1 });
        // a bound below the decisive window leaves the question open
        let e = is_elliptic(&example1(), Some(10));
        assert_eq!(e.status, EllipticStatus::Inconclusive);
        assert_eq!(e.require(), Err(Error::EllipticityInconclusive(10)));
    }

    #[test]
    fn top_classes() {
        let t = top_class(&example1()).unwrap();
        assert_eq!(t.degree, 37);
        let t = top_class(&example2()).unwrap();
        assert_eq!(t.degree, 35);
        let t = top_class(&s2()).unwrap();
        assert_eq!(t.degree, 2);
        assert_eq!(s2().algebra().format(t.representative()), "x2");
        let truncated = example1().truncate_to_component(3).unwrap();
        assert!(matches!(top_class(&truncated), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn oracle_examples() {
        let r = toomer_oracle(&example1()).unwrap();
        assert_eq!(r.e0, 6);
        assert!(representative_in(&r.representative, 6));
        assert!(example1().d(&r.representative).is_zero());
        assert_eq!(toomer_oracle(&example2()).unwrap().e0, 6);
        assert_eq!(toomer_oracle(&s2()).unwrap().e0, 1);
        let top = top_class(&example1()).unwrap();
        assert!(top_class_reaches(&example1(), &top, 6));
        assert!(!top_class_reaches(&example1(), &top, 7));
    }

    #[test]
    fn poincare_duality_of_examples() {
        for m in [example1(), example2(), s2()] {
            let n = formal_dimension(&m) as u32;
            let table = cohomology_table(&m, 0..=n + m.algebra().max_degree());
            for k in 0..=n {
                assert_eq!(table[k as usize].1, table[(n - k) as usize].1, "degree {k}");
            }
            assert!(table[(n + 1) as usize..].iter().all(|&(_, d)| d == 0));
        }
    }
}

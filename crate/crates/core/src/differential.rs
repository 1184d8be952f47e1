//! Differentials on ΛV: derivations of degree +1 given by generator images,
//! their word-length components `d = Σ dᵢ`, and the associated pure model.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{q, Algebra, Element, Monomial, WordLength};
use crate::cohomology::Memo;
use crate::error::{Error, Result};

/// A degree +1 derivation determined by its values on generators. No
/// `D² = 0` guarantee; the word-length pieces `dᵢ` are of this type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    images: Vec<Element>,
}

impl Derivation {
    pub fn zero(generators: usize) -> Self {
        Derivation { images: vec![Element::zero(); generators] }
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, index: usize) -> &Element {
        &self.images[index]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Element::is_zero)
    }

    /// Value on a single monomial, by the graded Leibniz rule.
    pub fn apply_monomial(&self, alg: &Algebra, m: &Monomial) -> Element {
        let mut out = Element::zero();
        let mut left = Monomial::one(m.len());
        let mut left_degree = 0u32;
        for i in 0..m.len() {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let image = &self.images[i];
            if !image.is_zero() {
                let mut right = m.clone();
                for j in 0..=i {
                    right = right.with_exponent(j, 0);
                }
                let g = alg.generator(i);
                let mut middle = if g.is_odd() {
                    image.clone()
                } else {
                    let power = Monomial::one(m.len()).with_exponent(i, e - 1);
                    alg.mul(&Element::monomial(power, q(e as i64)), image)
                };
                if left_degree % 2 == 1 {
                    middle = -middle;
                }
                let l = Element::monomial(left.clone(), q(1));
                let r = Element::monomial(right, q(1));
                out += &alg.mul(&alg.mul(&l, &middle), &r);
            }
            left = left.with_exponent(i, e);
            left_degree += e * alg.generator(i).degree;
        }
        out
    }

    pub fn apply(&self, alg: &Algebra, e: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out += &self.apply_monomial(alg, m).scale(c);
        }
        out
    }
}

/// A validated differential: minimal, of degree +1, with `d² = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential(Derivation);

impl Differential {
    /// Validates generator images (indexed like the generators).
    pub fn new(alg: &Algebra, images: Vec<Element>) -> Result<Self> {
        assert_eq!(images.len(), alg.len(), "one image per generator");
        for (g, img) in alg.generators().iter().zip(&images) {
            if !alg.contains(img) {
                return Err(Error::AlgebraMismatch);
            }
            if img.is_zero() {
                continue;
            }
            if img.min_wordlength().is_some_and(|w| w < 2) {
                return Err(Error::NotMinimal { generator: g.name.clone(), image: alg.format(img) });
            }
            match alg.degree_of(img) {
                Some(d) if d == g.degree + 1 => {}
                Some(d) => {
                    return Err(Error::DegreeMismatch {
                        generator: g.name.clone(),
                        expected: g.degree + 1,
                        found: d.to_string(),
                    })
                }
                None => {
                    return Err(Error::DegreeMismatch {
                        generator: g.name.clone(),
                        expected: g.degree + 1,
                        found: "an inhomogeneous element".into(),
                    })
                }
            }
        }
        let d = Derivation { images };
        for g in alg.generators() {
            let dd = d.apply(alg, d.image(g.index));
            if !dd.is_zero() {
                return Err(Error::DSquareNonzero { generator: g.name.clone(), value: alg.format(&dd) });
            }
        }
        #[cfg(debug_assertions)]
        for a in 0..alg.len() {
            for b in a..alg.len() {
                let ab = alg.mul(&alg.var(a), &alg.var(b));
                debug_assert!(d.apply(alg, &d.apply(alg, &ab)).is_zero(), "d² ≠ 0 on a product");
            }
        }
        Ok(Differential(d))
    }

    /// Images given by generator name; omitted generators map to zero.
    pub fn from_named(alg: &Algebra, images: &[(&str, &str)]) -> Result<Self> {
        let mut v = vec![Element::zero(); alg.len()];
        for (name, text) in images {
            let i = alg.index_of(name).ok_or_else(|| Error::UnknownGenerator { name: name.to_string(), pos: 0 })?;
            v[i] = alg.parse(text)?;
        }
        Self::new(alg, v)
    }

    pub fn derivation(&self) -> &Derivation {
        &self.0
    }

    pub fn image(&self, index: usize) -> &Element {
        self.0.image(index)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn apply(&self, alg: &Algebra, e: &Element) -> Element {
        self.0.apply(alg, e)
    }

    /// `dᵢ`: the derivation whose generator images are the word-length `i`
    /// parts of `d`'s images. It raises word-length by `i − 1`.
    pub fn component(&self, i: usize) -> Derivation {
        Derivation { images: self.0.images.iter().map(|e| e.restrict(WordLength::Exactly(i))).collect() }
    }

    /// The largest `k` with `d(V) ⊆ Λ^{≥k}V`, or `None` when `d = 0`.
    pub fn detect_k(&self) -> Option<usize> {
        self.0.images.iter().filter_map(Element::min_wordlength).min()
    }
}

/// `(ΛV, d)` together with its order `k` and a per-degree memo of cochain
/// data.
#[derive(Clone)]
pub struct SullivanModel {
    algebra: Algebra,
    differential: Differential,
    k: Option<usize>,
    pub(crate) memo: Arc<Memo>,
}

impl fmt::Debug for SullivanModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self
            .algebra
            .generators()
            .iter()
            .map(|g| format!("d{} = {}", g.name, self.algebra.format(self.differential.image(g.index))))
            .collect();
        f.debug_struct("SullivanModel")
            .field("generators", &self.algebra.generators())
            .field("d", &images)
            .field("k", &self.k)
            .finish()
    }
}

impl PartialEq for SullivanModel {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.differential == other.differential
    }
}

impl SullivanModel {
    pub fn new(algebra: Algebra, differential: Differential) -> Self {
        let k = differential.detect_k();
        SullivanModel { algebra, differential, k, memo: Arc::new(Memo::default()) }
    }

    /// Convenience constructor from `(name, degree)` pairs and textual images.
    pub fn build(generators: &[(&str, u32)], images: &[(&str, &str)]) -> Result<Self> {
        let alg = Algebra::new(generators)?;
        let d = Differential::from_named(&alg, images)?;
        Ok(Self::new(alg, d))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn differential(&self) -> &Differential {
        &self.differential
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn d(&self, e: &Element) -> Element {
        self.differential.apply(&self.algebra, e)
    }

    /// Applies `d` to an element, checking it belongs to this model's algebra.
    pub fn apply_d(&self, e: &Element) -> Result<Element> {
        if !self.algebra.contains(e) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.d(e))
    }

    pub fn dim_even(&self) -> usize {
        self.algebra.even_indices().len()
    }

    pub fn dim_odd(&self) -> usize {
        self.algebra.odd_indices().len()
    }

    pub fn is_pure(&self) -> bool {
        self.algebra.generators().iter().all(|g| {
            let img = self.differential.image(g.index);
            if g.is_even() {
                img.is_zero()
            } else {
                img.terms().all(|(m, _)| is_even_monomial(&self.algebra, m))
            }
        })
    }

    /// The model with `d` replaced by its word-length `i` component on every
    /// generator, if that is again a differential.
    pub fn truncate_to_component(&self, i: usize) -> Result<SullivanModel> {
        let comp = self.differential.component(i);
        let d = Differential::new(&self.algebra, comp.images().to_vec())?;
        Ok(SullivanModel::new(self.algebra.clone(), d))
    }
}

pub(crate) fn is_even_monomial(alg: &Algebra, m: &Monomial) -> bool {
    m.exponents().iter().enumerate().all(|(i, &e)| e == 0 || alg.generator(i).is_even())
}

/// A model with `d(V^even) = 0` and `d(V^odd) ⊆ Λ(V^even)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureModel(SullivanModel);

impl PureModel {
    pub fn new(model: SullivanModel) -> Result<Self> {
        if model.is_pure() {
            Ok(PureModel(model))
        } else {
            Err(Error::NotPure("some differential leaves Λ(V^even) or is nonzero on V^even".into()))
        }
    }

    pub fn model(&self) -> &SullivanModel {
        &self.0
    }

    pub fn into_model(self) -> SullivanModel {
        self.0
    }
}

/// The associated pure model `d_σ`: zero on even generators, and on odd
/// generators the part of `d` lying in Λ(V^even).
pub fn pure_projection(model: &SullivanModel) -> PureModel {
    let alg = model.algebra();
    let images = alg
        .generators()
        .iter()
        .map(|g| {
            if g.is_even() {
                return Element::zero();
            }
            let mut out = Element::zero();
            for (m, c) in model.differential().image(g.index).terms() {
                if is_even_monomial(alg, m) {
                    out.add_term(m.clone(), c.clone());
                }
            }
            out
        })
        .collect();
    let d = Differential::new(alg, images).expect("d_σ of a valid model is a differential");
    PureModel::new(SullivanModel::new(alg.clone(), d)).expect("d_σ is pure")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn example1() -> SullivanModel {
        SullivanModel::build(
            &[("x2", 2), ("x6", 6), ("y5", 5), ("y15", 15), ("y23", 23)],
            &[("y5", "x2^3"), ("y15", "x2^2*x6^2"), ("y23", "x6^4")],
        )
        .unwrap()
    }

    /// An independent Leibniz expansion: write the monomial as an ordered
    /// word of generators and differentiate letter by letter.
    fn leibniz_oracle(model: &SullivanModel, m: &Monomial) -> Element {
        let alg = model.algebra();
        let mut word = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                word.push(i);
            }
        }
        let mut out = Element::zero();
        let mut sign_degree = 0u32;
        for pos in 0..word.len() {
            let mut factors: Vec<Element> = word.iter().map(|&g| alg.var(g)).collect();
            factors[pos] = model.differential().image(word[pos]).clone();
            let mut term = alg.product(factors.iter());
            if sign_degree % 2 == 1 {
                term = -term;
            }
            out += &term;
            sign_degree += alg.generator(word[pos]).degree;
        }
        out
    }

    #[test]
    fn example1_validates() {
        let m = example1();
        assert_eq!(m.k(), Some(3));
        assert!(m.is_pure());
    }

    #[test]
    fn rejects_invalid_differentials() {
        let alg = Algebra::new(&[("x2", 2), ("y3", 3)]).unwrap();
        let e = Differential::from_named(&alg, &[("y3", "x2^2 + x2^3")]).unwrap_err();
        assert!(matches!(e, Error::DegreeMismatch { .. }), "{e:?}");
        let alg = Algebra::new(&[("x2", 2), ("x3", 3), ("y3", 3)]).unwrap();
        let e = Differential::from_named(&alg, &[("y3", "x2^2 + x2*x3")]).unwrap_err();
        assert!(matches!(e, Error::DegreeMismatch { .. }), "{e:?}");
        let alg = Algebra::new(&[("x2", 2), ("a4", 4), ("y3", 3)]).unwrap();
        let e = Differential::from_named(&alg, &[("y3", "a4")]).unwrap_err();
        assert!(matches!(e, Error::NotMinimal { .. }), "{e:?}");
        let alg = Algebra::new(&[("x2", 2), ("y3", 3), ("z4", 4)]).unwrap();
        let e = Differential::from_named(&alg, &[("y3", "x2^2"), ("z4", "x2*y3")]).unwrap_err();
        assert!(matches!(e, Error::DSquareNonzero { .. }), "{e:?}");
        let zero = Differential::new(&alg, vec![Element::zero(); 3]).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.detect_k(), None);
    }

    #[test]
    fn apply_d_examples() {
        let m = example1();
        let alg = m.algebra();
        let e = alg.parse("y5*y15").unwrap();
        let expected = alg.parse("x2^3*y15 - x2^2*x6^2*y5").unwrap();
        assert_eq!(m.d(&e), expected);
        let oracle = leibniz_oracle(&m, e.terms().next().unwrap().0);
        assert_eq!(oracle, expected);
        assert!(m.d(&alg.var(0)).is_zero());
        assert!(m.d(&alg.one()).is_zero());
        assert_eq!(m.apply_d(&Algebra::new(&[("a", 2)]).unwrap().var(0)), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn components_of_example1() {
        let m = example1();
        let alg = m.algebra();
        let d3 = m.differential().component(3);
        let d4 = m.differential().component(4);
        assert_eq!(alg.format(d3.image(2)), "x2^3");
        assert!(d3.image(3).is_zero() && d3.image(4).is_zero());
        assert_eq!(alg.format(d4.image(3)), "x2^2*x6^2");
        assert_eq!(alg.format(d4.image(4)), "x6^4");
        assert!(m.differential().component(5).is_zero());
    }

    #[test]
    fn detect_k_examples() {
        assert_eq!(example1().differential().detect_k(), Some(3));
        let s2 = SullivanModel::build(&[("x2", 2), ("y3", 3)], &[("y3", "x2^2")]).unwrap();
        assert_eq!(s2.k(), Some(2));
        let zero = SullivanModel::build(&[("y3", 3), ("y5", 5)], &[]).unwrap();
        assert_eq!(zero.k(), None);
    }

    #[test]
    fn pure_projection_examples() {
        let m = example1();
        assert_eq!(pure_projection(&m).model(), &m);
        let mixed = SullivanModel::build(
            &[("x2", 2), ("y3", 3), ("y3b", 3), ("y5", 5), ("y7", 7)],
            &[("y5", "x2^3"), ("y7", "x2*y3*y3b + x2^4")],
        )
        .unwrap();
        assert!(!mixed.is_pure());
        let p = pure_projection(&mixed);
        assert_eq!(p.model().algebra().format(p.model().differential().image(4)), "x2^4");
        assert_eq!(pure_projection(p.model()), p);
        let zero = SullivanModel::build(&[("y3", 3)], &[]).unwrap();
        assert_eq!(pure_projection(&zero).model(), &zero);
        assert!(matches!(PureModel::new(mixed), Err(Error::NotPure(_))));
    }

    fn fixtures() -> Vec<SullivanModel> {
        vec![
            example1(),
            SullivanModel::build(
                &[("x2", 2), ("y3", 3), ("y3b", 3), ("y5", 5), ("y7", 7)],
                &[("y5", "x2^3"), ("y7", "x2*y3*y3b + x2^4")],
            )
            .unwrap(),
            SullivanModel::build(
                &[("x2", 2), ("x6", 6), ("y3", 3), ("y3b", 3), ("y5", 5), ("y17", 17)],
                &[("y5", "x2^3"), ("y17", "x6^3 + 3*x6^2*y3*y3b")],
            )
            .unwrap(),
        ]
    }

    type Picks = Vec<(usize, i64)>;

    fn arb_case() -> impl Strategy<Value = (usize, u32, Picks, u32, Picks)> {
        (
            0usize..3,
            0u32..30,
            prop::collection::vec((0usize..64, -3i64..=3), 0..4),
            0u32..20,
            prop::collection::vec((0usize..64, -3i64..=3), 0..4),
        )
    }

    fn pick(alg: &Algebra, n: u32, picks: &[(usize, i64)]) -> Element {
        let basis = alg.degree_basis(n);
        let mut e = Element::zero();
        for &(i, c) in picks {
            if !basis.is_empty() {
                e.add_term(basis.monomials[i % basis.len()].clone(), q(c));
            }
        }
        e
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn leibniz_rule((f, na, pa, nb, pb) in arb_case()) {
            let m = &fixtures()[f];
            let alg = m.algebra();
            let a = pick(alg, na, &pa);
            let b = pick(alg, nb, &pb);
            let lhs = m.d(&alg.mul(&a, &b));
            let mut rhs = alg.mul(&m.d(&a), &b);
            let second = alg.mul(&a, &m.d(&b));
            if na % 2 == 1 { rhs -= &second } else { rhs += &second }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn d_squared_vanishes((f, na, pa, _, _) in arb_case()) {
            let m = &fixtures()[f];
            let a = pick(m.algebra(), na, &pa);
            prop_assert!(m.d(&m.d(&a)).is_zero());
        }

        #[test]
        fn components_sum_to_d((f, na, pa, _, _) in arb_case()) {
            let m = &fixtures()[f];
            let alg = m.algebra();
            let a = pick(alg, na, &pa);
            let mut sum = Element::zero();
            for i in 2..=8 {
                let part = m.differential().component(i).apply(alg, &a);
                for (s, comp) in a.wordlength_split() {
                    let image = m.differential().component(i).apply(alg, &comp);
                    prop_assert!(image.terms().all(|(mm, _)| mm.wordlength() == s + i - 1));
                }
                sum += &part;
            }
            prop_assert_eq!(sum, m.d(&a));
        }

        #[test]
        fn leibniz_matches_word_oracle((f, na, pa, _, _) in arb_case()) {
            let m = &fixtures()[f];
            let a = pick(m.algebra(), na, &pa);
            let mut oracle = Element::zero();
            for (mono, c) in a.terms() {
                oracle += &leibniz_oracle(m, mono).scale(c);
            }
            prop_assert_eq!(m.d(&a), oracle);
        }
    }
}

//! Murillo's closed formula for the fundamental class of a pure elliptic
//! model.
//!
//! With even generators `x₁…xₙ` and odd generators `y₁…y_m` in declaration
//! order, write `dy_j = Σᵢ a_j^i xᵢ` where `a_j^i` only involves
//! `xᵢ, …, xₙ`. Then
//!
//! ```text
//! ω = Σ_{j₁<…<jₙ} (−1)^{j₁+…+jₙ} P_{j₁…jₙ} · y₁⋯ŷ_{j₁}⋯ŷ_{jₙ}⋯y_m
//! ```
//!
//! with `P_{j₁…jₙ}` the determinant of rows `j₁…jₙ` of `A = (a_j^i)`.

use itertools::Itertools;

use crate::algebra::{q, Algebra, Element, Monomial};
use crate::cohomology::{formal_dimension, is_boundary, is_elliptic};
use crate::differential::PureModel;
use crate::error::{Error, Result};
use crate::par;

/// `A = (a_j^i)`: one row per odd generator, one column per even generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
    pub entries: Vec<Vec<Element>>,
}

impl CoefficientMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.even.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Element {
        &self.entries[row][col]
    }

    /// `Σᵢ a_j^i xᵢ` for row `j`.
    pub fn row_sum(&self, alg: &Algebra, row: usize) -> Element {
        let mut out = Element::zero();
        for (col, &x) in self.even.iter().enumerate() {
            out += &alg.mul(&self.entries[row][col], &alg.var(x));
        }
        out
    }

    /// Whether `a_j^i` only involves `xᵢ, …, xₙ`.
    pub fn is_triangular(&self) -> bool {
        self.entries.iter().all(|row| {
            row.iter()
                .enumerate()
                .all(|(col, a)| a.terms().all(|(m, _)| self.even[..col].iter().all(|&x| m.exponent(x) == 0)))
        })
    }
}

/// Greedy extraction: `a_j^1` collects the terms of `dy_j` divisible by
/// `x₁` (divided by `x₁`), `a_j^2` the remaining terms divisible by `x₂`,
/// and so on.
pub fn coefficient_matrix(pure: &PureModel) -> CoefficientMatrix {
    let model = pure.model();
    let alg = model.algebra();
    let even = alg.even_indices();
    let odd = alg.odd_indices();
    let entries = odd
        .iter()
        .map(|&y| {
            let mut rest = model.differential().image(y).clone();
            let row: Vec<Element> = even
                .iter()
                .map(|&x| {
                    let mut a = Element::zero();
                    let mut kept = Element::zero();
                    for (m, c) in rest.terms() {
                        let e = m.exponent(x);
                        if e > 0 {
                            a.add_term(m.with_exponent(x, e - 1), c.clone());
                        } else {
                            kept.add_term(m.clone(), c.clone());
                        }
                    }
                    rest = kept;
                    a
                })
                .collect();
            assert!(rest.is_zero(), "d(y) of a pure minimal model has no constant part");
            row
        })
        .collect();
    CoefficientMatrix { even, odd, entries }
}

/// Determinant over the commutative algebra Λ(V^even): cofactor expansion
/// up to 4×4, fraction-free elimination above.
pub fn determinant(alg: &Algebra, m: &[Vec<Element>]) -> Element {
    let n = m.len();
    if n <= 4 {
        cofactor(alg, m)
    } else {
        bareiss(alg, m.to_vec())
    }
}

fn cofactor(alg: &Algebra, m: &[Vec<Element>]) -> Element {
    match m.len() {
        0 => alg.one(),
        1 => m[0][0].clone(),
        n => {
            let mut out = Element::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Element>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = alg.mul(&m[0][col], &cofactor(alg, &minor));
                if col % 2 == 0 {
                    out += &term;
                } else {
                    out -= &term;
                }
            }
            out
        }
    }
}

/// Bareiss elimination; every division is exact.
fn bareiss(alg: &Algebra, mut m: Vec<Vec<Element>>) -> Element {
    let n = m.len();
    let mut sign = false;
    let mut prev = alg.one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return Element::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = alg.mul(&m[i][j], &m[k][k]) - alg.mul(&m[i][k], &m[k][j]);
                m[i][j] = exact_divide(alg, &num, &prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// `num / den` in the polynomial ring Λ(V^even), assuming `den` divides
/// `num`. Multivariate division by leading terms.
pub fn exact_divide(alg: &Algebra, num: &Element, den: &Element) -> Element {
    let (lead_m, lead_c) = den.leading_term().expect("division by zero");
    let mut rest = num.clone();
    let mut quotient = Element::zero();
    while let Some((m, c)) = rest.leading_term() {
        let exps: Option<Vec<u32>> =
            m.exponents().iter().zip(lead_m.exponents()).map(|(a, b)| a.checked_sub(*b)).collect();
        let exps = exps.expect("inexact polynomial division");
        let t = Element::monomial(Monomial::from_exponents(exps), c / lead_c);
        rest -= &alg.mul(&t, den);
        quotient += &t;
    }
    quotient
}

/// The minor `P_{j₁…jₙ}` on the given (0-based) rows.
pub fn minor(alg: &Algebra, a: &CoefficientMatrix, rows: &[usize]) -> Element {
    let sub: Vec<Vec<Element>> = rows.iter().map(|&r| a.entries[r].clone()).collect();
    determinant(alg, &sub)
}

/// Murillo's cycle ω, sign-normalized so its leading term is positive and
/// checked to be a nontrivial cocycle of degree `N`.
pub fn murillo_fundamental_class(pure: &PureModel) -> Result<Element> {
    let model = pure.model();
    let alg = model.algebra();
    let a = coefficient_matrix(pure);
    let (n, m) = (a.cols(), a.rows());
    if m < n {
        return Err(Error::TooFewOdd { odd: m, even: n });
    }
    is_elliptic(model, None).require()?;
    let subsets: Vec<Vec<usize>> = (0..m).combinations(n).collect();
    let terms = par::map(&subsets, |rows| {
        let p = minor(alg, &a, rows);
        if p.is_zero() {
            return p;
        }
        let sign_exp: usize = rows.iter().map(|r| r + 1).sum();
        let complement: Vec<Element> = (0..m).filter(|j| !rows.contains(j)).map(|j| alg.var(a.odd[j])).collect();
        let term = alg.mul(&p, &alg.product(complement.iter()));
        if sign_exp % 2 == 1 {
            term.scale(&q(-1))
        } else {
            term
        }
    });
    let omega = terms.iter().fold(Element::zero(), |acc, t| &acc + t).normalize_sign();

    let n_formal = formal_dimension(model);
    if omega.is_zero() {
        return Err(Error::Internal("Murillo's formula produced zero".into()));
    }
    if alg.degree_of(&omega).map(i64::from) != Some(n_formal) {
        return Err(Error::Internal(format!(
            "Murillo class has degree {:?}, expected {n_formal}",
            alg.degree_of(&omega)
        )));
    }
    if !model.d(&omega).is_zero() {
        return Err(Error::Internal("Murillo class is not a cocycle".into()));
    }
    if is_boundary(model, &omega, n_formal as u32) {
        return Err(Error::Internal("Murillo class is a boundary".into()));
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{same_class_up_to_scalar, top_class};
    use crate::differential::SullivanModel;

    fn pure(gens: &[(&str, u32)], images: &[(&str, &str)]) -> PureModel {
        PureModel::new(SullivanModel::build(gens, images).unwrap()).unwrap()
    }

    fn example1() -> PureModel {
        pure(
            &[("x2", 2), ("x6", 6), ("y5", 5), ("y15", 15), ("y23", 23)],
            &[("y5", "x2^3"), ("y15", "x2^2*x6^2"), ("y23", "x6^4")],
        )
    }

    fn example2() -> PureModel {
        pure(
            &[("x2", 2), ("x6", 6), ("y5", 5), ("y13", 13), ("y23", 23)],
            &[("y5", "x2^3"), ("y13", "x2*x6^2"), ("y23", "x6^4")],
        )
    }

    fn formatted(p: &PureModel, a: &CoefficientMatrix) -> Vec<Vec<String>> {
        let alg = p.model().algebra();
        a.entries.iter().map(|r| r.iter().map(|e| alg.format(e)).collect()).collect()
    }

    #[test]
    fn coefficient_matrices_match_displayed_ones() {
        let p = example1();
        let a = coefficient_matrix(&p);
        assert_eq!(formatted(&p, &a), vec![vec!["x2^2", "0"], vec!["x2*x6^2", "0"], vec!["0", "x6^3"]]);
        let p = example2();
        let a = coefficient_matrix(&p);
        assert_eq!(formatted(&p, &a), vec![vec!["x2^2", "0"], vec!["x6^2", "0"], vec!["0", "x6^3"]]);
        let p = pure(&[("x2", 2), ("y5", 5)], &[("y5", "x2^3")]);
        assert_eq!(formatted(&p, &coefficient_matrix(&p)), vec![vec!["x2^2"]]);
    }

    #[test]
    fn rows_reassemble_and_are_triangular() {
        for p in [
            example1(),
            example2(),
            pure(&[("a", 2), ("b", 4), ("u", 7), ("v", 11)], &[("u", "a^4 + a^2*b"), ("v", "b^3 + a^2*b^2")]),
        ] {
            let a = coefficient_matrix(&p);
            assert!(a.is_triangular());
            for j in 0..a.rows() {
                assert_eq!(&a.row_sum(p.model().algebra(), j), p.model().differential().image(a.odd[j]));
            }
        }
    }

    #[test]
    fn minors_of_example1() {
        let p = example1();
        let alg = p.model().algebra();
        let a = coefficient_matrix(&p);
        assert_eq!(alg.format(&minor(alg, &a, &[0, 2])), "x2^2*x6^3");
        assert_eq!(alg.format(&minor(alg, &a, &[1, 2])), "x2*x6^5");
        assert!(minor(alg, &a, &[0, 1]).is_zero());
    }

    #[test]
    fn fundamental_classes() {
        let p = example1();
        let alg = p.model().algebra();
        let w = murillo_fundamental_class(&p).unwrap();
        assert_eq!(w, alg.parse("x2^2*x6^3*y15 - x2*x6^5*y5").unwrap());
        let top = top_class(p.model()).unwrap();
        assert!(same_class_up_to_scalar(p.model(), &w, top.representative(), 37));

        let p = example2();
        let alg = p.model().algebra();
        let w = murillo_fundamental_class(&p).unwrap();
        assert_eq!(w, alg.parse("x2^2*x6^3*y13 - x6^5*y5").unwrap());

        let p = pure(&[("x2", 2), ("y5", 5)], &[("y5", "x2^3")]);
        let w = murillo_fundamental_class(&p).unwrap();
        assert_eq!(p.model().algebra().format(&w), "x2^2");
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = pure(&[("x2", 2), ("x4", 4), ("y5", 5)], &[("y5", "x2^3")]);
        assert!(matches!(murillo_fundamental_class(&p), Err(Error::TooFewOdd { odd: 1, even: 2 })));
        let p = pure(&[("x2", 2), ("x6", 6), ("y5", 5), ("y15", 15)], &[("y5", "x2^3"), ("y15", "x2^2*x6^2")]);
        assert!(matches!(murillo_fundamental_class(&p), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn bareiss_agrees_with_cofactor() {
        let alg = Algebra::new(&[("a", 2), ("b", 4), ("c", 6)]).unwrap();
        let e = |s: &str| alg.parse(s).unwrap();
        let rows = [
            ["a", "b", "0", "c", "1"],
            ["a^2", "0", "b", "a", "2"],
            ["c", "a*b", "1", "0", "a"],
            ["b", "1", "a^3", "b", "0"],
            ["1", "c", "a", "a*c", "b"],
        ];
        let m: Vec<Vec<Element>> = rows.iter().map(|r| r.iter().map(|s| e(s)).collect()).collect();
        assert_eq!(bareiss(&alg, m.clone()), cofactor(&alg, &m));
        let m4: Vec<Vec<Element>> = m[..4].iter().map(|r| r[..4].to_vec()).collect();
        assert_eq!(bareiss(&alg, m4.clone()), cofactor(&alg, &m4));
    }
}

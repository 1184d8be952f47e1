use proptest::prelude::*;

use super::*;
use crate::algebra::q;
use crate::cohomology::toomer_oracle;

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

fn cp2() -> SullivanModel {
    SullivanModel::build(&[("x2", 2), ("y5", 5)], &[("y5", "x2^3")]).unwrap()
}

fn non_pure() -> SullivanModel {
    SullivanModel::build(
        &[("x2", 2), ("y3", 3), ("y3b", 3), ("y5", 5), ("y7", 7)],
        &[("y5", "x2^3"), ("y7", "x2*y3*y3b + x2^4")],
    )
    .unwrap()
}

fn pair(m: &SullivanModel, p: usize, n: u32, u: &str, v: &str) -> FilteredPair {
    let alg = m.algebra();
    FilteredPair::new(alg, p, n, alg.parse(u).unwrap(), alg.parse(v).unwrap()).unwrap()
}

#[test]
fn filtration_bases() {
    let m = example1();
    let alg = m.algebra();
    for n in 0..30 {
        let expected = alg.basis(n, WordLength::Between(2, 3));
        assert_eq!(filtration_basis(&m, 1, n).unwrap(), expected);
    }
    let k2 = SullivanModel::build(&[("x2", 2), ("y3", 3)], &[("y3", "x2^2")]).unwrap();
    assert_eq!(filtration_basis(&k2, 2, 4).unwrap(), k2.algebra().basis(4, WordLength::Exactly(2)));
    let k4 = SullivanModel::build(&[("x2", 2), ("y7", 7)], &[("y7", "x2^4")]).unwrap();
    assert_eq!(k4.k(), Some(4));
    assert_eq!(filtration_basis(&k4, 1, 13).unwrap(), k4.algebra().basis(13, WordLength::Between(3, 5)));
    let zero = SullivanModel::build(&[("y3", 3)], &[]).unwrap();
    assert_eq!(filtration_basis(&zero, 0, 3), Err(Error::ZeroDifferential));
}

#[test]
fn pairs_are_validated() {
    let m = example1();
    let alg = m.algebra();
    let x2 = alg.parse("x2").unwrap();
    assert!(matches!(FilteredPair::new(alg, 0, 2, x2.clone(), Element::zero()), Err(Error::InvalidPair(_))));
    assert!(matches!(FilteredPair::new(alg, 1, 4, x2, Element::zero()), Err(Error::InvalidPair(_))));
    let e = alg.parse("x2^2*y5 + x2*y5").unwrap();
    assert!(FilteredPair::from_element(alg, 1, 9, &e).is_err());
}

#[test]
fn pair_products() {
    let m = example1();
    let alg = m.algebra();
    let one = pair(&m, 0, 0, "1", "0");
    let a = pair(&m, 1, 8, "x2*x6", "0");
    let b = pair(&m, 1, 9, "0", "x2^2*y5");
    assert_eq!(pair_product(alg, &one, &a).unwrap(), a);
    assert_eq!(pair_product(alg, &a, &one).unwrap(), a);
    let ab = pair_product(alg, &a, &b).unwrap();
    assert_eq!((ab.p, ab.n), (2, 17));
    assert_eq!(ab.u, Element::zero());
    assert_eq!(alg.format(&ab.v), "x2^3*x6*y5");
    let other = cp2();
    assert_eq!(pair_product(other.algebra(), &a, &b), Err(Error::AlgebraMismatch));
}

#[test]
fn delta_examples() {
    let m = example1();
    let alg = m.algebra();
    let w = pair(&m, 3, 37, "-x2^2*x6^3*y15", "x2*x6^5*y5");
    assert!(delta_apply(&m, &w).unwrap().is_zero());
    let y5 = pair(&m, 0, 5, "0", "y5");
    let dy5 = delta_apply(&m, &y5).unwrap();
    assert_eq!((dy5.p, dy5.n), (1, 6));
    assert_eq!(alg.format(&dy5.u), "0");
    assert_eq!(alg.format(&dy5.v), "x2^3");
    assert!(delta_apply(&m, &pair(&m, 0, 0, "1", "0")).unwrap().is_zero());
    // (x2*x6^2*y23, 0) is not a δ-cocycle in this model
    let claimed = pair(&m, 2, 37, "x2*x6^2*y23", "0");
    let image = delta_apply(&m, &claimed).unwrap();
    assert_eq!(alg.format(&image.v), "x2*x6^6");

    let k2 = SullivanModel::build(&[("x2", 2), ("y3", 3)], &[("y3", "x2^2")]).unwrap();
    assert!(matches!(delta_apply(&k2, &FilteredPair::zero(0, 0)), Err(Error::WrongK(_))));
}

#[test]
fn delta_cohomology_examples() {
    let m = example2();
    let alg = m.algebra();
    let omega = pair(&m, 3, 35, "-x2^2*x6^3*y13 + x6^5*y5", "0");
    assert!(delta_apply(&m, &omega).unwrap().is_zero());
    let h = delta_cohomology(&m, 35).unwrap();
    let (depth, _) = representative_depth(&m, &omega).unwrap();
    assert_eq!(depth, 6);
    let other = pair(&m, 1, 35, "0", "x6^2*y23");
    assert!(delta_apply(&m, &other).unwrap().is_zero());
    assert!(h.dimension() >= 1);
    assert!(h.by_filtration.iter().any(|f| f.p == 3 && !f.classes.is_empty()));

    let h0 = delta_cohomology(&m, 0).unwrap();
    assert_eq!(h0.dimension(), 1);
    let c = h0.classes().next().unwrap();
    assert_eq!(c.p, 0);
    assert!(c.representative.v.is_zero());
    assert!(c.representative.u.proportionality(&alg.one()).is_some());
    assert_eq!(representative_depth(&m, &c.representative).unwrap().0, 0);
    assert_eq!(representative_depth(&m, &FilteredPair::zero(0, 0)), Err(Error::ZeroClass));
}

#[test]
fn representative_depth_of_examples() {
    let m = example1();
    let w = pair(&m, 3, 37, "-x2^2*x6^3*y15", "x2*x6^5*y5");
    let (r, rep) = representative_depth(&m, &w).unwrap();
    assert_eq!(r, 6);
    assert_eq!(rep.depth(), 6);
}

#[test]
fn lifts_of_examples() {
    for (m, text) in [(example1(), "-x2^2*x6^3*y15 + x2*x6^5*y5"), (example2(), "-x2^2*x6^3*y13 + x6^5*y5")] {
        let start = m.algebra().parse(text).unwrap();
        let trace = lift_to_d_cocycle(&m, &start).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.outcome, LiftOutcome::Success(start));
        assert_eq!(trace.filtration, 3);
    }
    let trace = lift_to_d_cocycle(&example1(), &Element::zero()).unwrap();
    assert_eq!(trace.outcome, LiftOutcome::Collapsed(Element::zero()));

    let m = example1();
    let bad = m.algebra().parse("x2*x6^2*y23").unwrap();
    assert!(matches!(lift_to_d_cocycle(&m, &bad), Err(Error::NotDeltaCocycle(_))));
}

#[test]
fn lift_with_correctors() {
    // y7 needs a correction: d₃(y3*y7) has a d₄ tail
    let m = non_pure();
    let result = toomer_spectral_detailed(&m, None).unwrap();
    for c in result.candidates.iter().filter(|c| c.trace.succeeded()) {
        let cocycle = c.trace.cocycle().unwrap();
        assert!(m.d(cocycle).is_zero());
        assert!(cocycle.min_wordlength().unwrap() >= 2 * c.trace.filtration);
        for (j, step) in c.trace.steps.iter().enumerate() {
            let d = m.d(&c.trace.iterates[j]);
            assert!(d.min_wordlength().unwrap() >= 2 * step.obstruction.p);
        }
    }
}

#[test]
fn spectral_toomer_examples() {
    let r = toomer_spectral(&example1()).unwrap();
    assert_eq!(r.e0, 6);
    assert_eq!(r.witness, Some(Witness { filtration: 3, odd: false }));
    assert_eq!(r.degree, 37);
    let r = toomer_spectral(&example2()).unwrap();
    assert_eq!(r.e0, 6);
    assert_eq!(r.witness.unwrap().filtration, 3);
    let r = toomer_spectral(&cp2()).unwrap();
    assert_eq!(r.e0, 2);
    assert_eq!(cp2().algebra().format(&r.representative), "x2^2");
}

#[test]
fn spectral_refuses_other_k() {
    let k2 = SullivanModel::build(&[("x2", 2), ("y3", 3)], &[("y3", "x2^2")]).unwrap();
    assert!(matches!(toomer_spectral(&k2), Err(Error::WrongK(_))));
    let k4 = SullivanModel::build(&[("x2", 2), ("y7", 7)], &[("y7", "x2^4")]).unwrap();
    assert!(matches!(toomer_spectral(&k4), Err(Error::WrongK(_))));
    let not_elliptic = example1().truncate_to_component(3).unwrap();
    assert!(matches!(toomer_spectral(&not_elliptic), Err(Error::NotElliptic(_))));
}

#[test]
fn example1_delta_cohomology_is_computed() {
    let h = delta_cohomology(&example1(), 37).unwrap();
    assert!(h.dimension() >= 1);
    let p3 = h.by_filtration.iter().find(|f| f.p == 3).unwrap();
    assert!(!p3.classes.is_empty());
}

#[test]
fn spectral_agrees_with_oracle_on_small_models() {
    for m in [example1(), example2(), cp2(), non_pure()] {
        assert_eq!(toomer_spectral(&m).unwrap().e0, toomer_oracle(&m).unwrap().e0);
    }
}

fn fixtures() -> Vec<SullivanModel> {
    vec![example1(), cp2(), non_pure()]
}

fn random_pair(m: &SullivanModel, seed: (usize, u32, Vec<i64>)) -> Option<FilteredPair> {
    let (p, n, coeffs) = seed;
    let alg = m.algebra();
    let basis = alg.basis(n, WordLength::Between(2 * p, 2 * p + 1));
    if basis.is_empty() {
        return None;
    }
    let mut e = Element::zero();
    for (mono, c) in basis.iter().zip(coeffs.iter().cycle()) {
        e.add_term(mono.clone(), q(*c));
    }
    Some(FilteredPair::from_element(alg, p, n, &e).unwrap())
}

fn seed() -> impl Strategy<Value = (usize, u32, Vec<i64>)> {
    (0usize..4, 0u32..24, prop::collection::vec(-3i64..=3, 1..6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_squares_to_zero(which in 0usize..3, s in seed()) {
        let m = &fixtures()[which];
        if let Some(a) = random_pair(m, s) {
            let d = Delta::new(m).unwrap();
            prop_assert!(d.apply(&d.apply(&a)).is_zero());
        }
    }

    #[test]
    fn delta_is_a_derivation(which in 0usize..3, s in seed(), t in seed()) {
        let m = &fixtures()[which];
        let alg = m.algebra();
        if let (Some(a), Some(b)) = (random_pair(m, s), random_pair(m, t)) {
            let d = Delta::new(m).unwrap();
            let lhs = d.apply(&pair_product(alg, &a, &b).unwrap());
            let left = pair_product(alg, &d.apply(&a), &b).unwrap();
            let right = pair_product(alg, &a, &d.apply(&b)).unwrap();
            let sign = if a.n % 2 == 0 { q(1) } else { q(-1) };
            prop_assert_eq!(lhs.u, &left.u + &right.u.scale(&sign));
            prop_assert_eq!(lhs.v, &left.v + &right.v.scale(&sign));
        }
    }

    #[test]
    fn d_minus_delta_lies_two_filtrations_up(which in 0usize..3, s in seed()) {
        let m = &fixtures()[which];
        if let Some(a) = random_pair(m, s) {
            let d = Delta::new(m).unwrap();
            if d.apply(&a).is_zero() {
                let rest = m.d(&a.element());
                prop_assert!(rest.min_wordlength().is_none_or(|w| w >= 2 * (a.p + 2)));
            }
        }
    }
}

fn ex1_perturbed() -> SullivanModel {
    SullivanModel::build(
        &[("x2", 2), ("x6", 6), ("y5", 5), ("y15", 15), ("y23", 23)],
        &[("y5", "x2^3"), ("y15", "x2^2*x6^2 + x2^8"), ("y23", "x6^4")],
    )
    .unwrap()
}

#[test]
fn revision_kills_the_obstruction() {
    let m = ex1_perturbed();
    let s = toomer_spectral_detailed(&m, None).unwrap();
    let trace = &s.candidates.iter().find(|c| c.trace.succeeded()).unwrap().trace;
    assert_eq!(trace.steps.len(), 2);
    for (j, step) in trace.steps.iter().enumerate() {
        let omega = &trace.iterates[j];
        let d = m.d(omega);
        let q = step.obstruction.p;
        let c = revise(&m, &d, trace.filtration, q, trace.degree).expect("a plain corrector exists");
        assert!(c.min_wordlength().is_none_or(|w| w >= 2 * trace.filtration + 2));
        let rest = m.d(&(omega - &c));
        assert!(rest.min_wordlength().is_none_or(|w| w >= 2 * q + 2));
    }
}

#[test]
fn joint_survivors() {
    let m = example1();
    let h = delta_cohomology(&m, 37).unwrap();
    let p3 = h.by_filtration.iter().find(|f| f.p == 3).unwrap();
    let found = combined_survivors(&m, p3, 37).unwrap();
    assert!(found.iter().any(|c| c.combined && c.trace.succeeded() && c.depth == 6));

    let m = example2();
    let h = delta_cohomology(&m, 35).unwrap();
    let p1 = h.by_filtration.iter().find(|f| f.p == 1).unwrap();
    assert!(combined_survivors(&m, p1, 35).unwrap().is_empty());
}

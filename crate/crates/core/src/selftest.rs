//! Seeded randomized checks of the algebraic identities the engine relies on.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::algebra::{q, Algebra, Element, WordLength};
use crate::catalog::{k3_pool, FIXTURES};
use crate::cohomology::{cohomology_dimension, formal_dimension, is_elliptic};
use crate::differential::SullivanModel;
use crate::par;
use crate::spectral::{pair_product, Delta, FilteredPair};

pub const DEFAULT_CASES: usize = 200;
const MAX_DEGREE: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn run(seed: u64, cases: usize) -> SelftestReport {
    let models: Vec<SullivanModel> = FIXTURES.iter().map(|f| f.model()).collect();
    let k3: Vec<SullivanModel> = k3_pool().map(|f| f.model()).collect();

    let checks = vec![
        randomized("graded commutativity", seed, cases, &models, |m, rng| {
            let alg = m.algebra();
            let (a, b) = (random_element(alg, rng)?, random_element(alg, rng)?);
            let (da, db) = (alg.degree_of(&a)?, alg.degree_of(&b)?);
            let sign = if da * db % 2 == 0 { q(1) } else { q(-1) };
            check(alg.mul(&a, &b) == alg.mul(&b, &a).scale(&sign), || {
                format!("{} · {}", alg.format(&a), alg.format(&b))
            })
        }),
        randomized("Leibniz rule", seed, cases, &models, |m, rng| {
            let alg = m.algebra();
            let (a, b) = (random_element(alg, rng)?, random_element(alg, rng)?);
            let sign = if alg.degree_of(&a)? % 2 == 0 { q(1) } else { q(-1) };
            let rhs = alg.mul(&m.d(&a), &b) + alg.mul(&a, &m.d(&b)).scale(&sign);
            check(m.d(&alg.mul(&a, &b)) == rhs, || format!("d({} · {})", alg.format(&a), alg.format(&b)))
        }),
        randomized("d² = 0", seed, cases, &models, |m, rng| {
            let alg = m.algebra();
            let a = random_element(alg, rng)?;
            check(m.d(&m.d(&a)).is_zero(), || format!("d²({})", alg.format(&a)))
        }),
        randomized("δ² = 0", seed, cases, &k3, |m, rng| {
            let delta = Delta::new(m).ok()?;
            let a = random_pair(m.algebra(), rng)?;
            check(delta.apply(&delta.apply(&a)).is_zero(), || format!("δ²{}", a.display(m.algebra())))
        }),
        randomized("δ is a derivation", seed, cases, &k3, |m, rng| {
            let alg = m.algebra();
            let delta = Delta::new(m).ok()?;
            let (a, b) = (random_pair(alg, rng)?, random_pair(alg, rng)?);
            let lhs = delta.apply(&pair_product(alg, &a, &b).ok()?);
            let left = pair_product(alg, &delta.apply(&a), &b).ok()?;
            let right = pair_product(alg, &a, &delta.apply(&b)).ok()?;
            let sign = if a.n % 2 == 0 { q(1) } else { q(-1) };
            let ok = lhs.u == &left.u + &right.u.scale(&sign) && lhs.v == &left.v + &right.v.scale(&sign);
            check(ok, || format!("δ({} ⊗ {})", a.display(alg), b.display(alg)))
        }),
        poincare_duality(&models),
        basis_counts(&models),
    ];
    SelftestReport { seed, checks }
}

fn check(ok: bool, describe: impl FnOnce() -> String) -> Option<Option<String>> {
    Some(if ok { None } else { Some(describe()) })
}

/// Runs `cases` independent cases; case `i` uses its own RNG seeded from
/// `seed` and `i`, so results do not depend on scheduling. A case returning
/// `None` could not draw its inputs and is redrawn.
fn randomized<F>(name: &'static str, seed: u64, cases: usize, models: &[SullivanModel], case: F) -> Check
where
    F: Fn(&SullivanModel, &mut StdRng) -> Option<Option<String>> + Sync + Send,
{
    let salt = name.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    let outcomes = par::map_range(0..cases, |i| {
        let mut rng = StdRng::seed_from_u64(seed ^ salt ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        loop {
            let m = models.choose(&mut rng).expect("nonempty fixture list");
            if let Some(result) = case(m, &mut rng) {
                return result;
            }
        }
    });
    Check { name, cases, failures: outcomes.into_iter().flatten().collect() }
}

fn random_element(alg: &Algebra, rng: &mut StdRng) -> Option<Element> {
    let n = rng.gen_range(0..=MAX_DEGREE);
    random_combination(&alg.basis(n, WordLength::Any), rng)
}

fn random_combination(basis: &[crate::algebra::Monomial], rng: &mut StdRng) -> Option<Element> {
    if basis.is_empty() {
        return None;
    }
    let mut e = Element::zero();
    let terms = rng.gen_range(1..=4);
    for m in basis.choose_multiple(rng, terms) {
        e.add_term(m.clone(), q(rng.gen_range(-5..=5)));
    }
    Some(e)
}

fn random_pair(alg: &Algebra, rng: &mut StdRng) -> Option<FilteredPair> {
    let p = rng.gen_range(0..4);
    let n = rng.gen_range(0..=MAX_DEGREE);
    let u = random_combination(&alg.basis(n, WordLength::Exactly(2 * p)), rng).unwrap_or_default();
    let v = random_combination(&alg.basis(n, WordLength::Exactly(2 * p + 1)), rng).unwrap_or_default();
    let pair = FilteredPair::new(alg, p, n, u, v).ok()?;
    (!pair.is_zero()).then_some(pair)
}

fn poincare_duality(models: &[SullivanModel]) -> Check {
    let elliptic: Vec<&SullivanModel> = models.iter().filter(|m| is_elliptic(m, None).is_elliptic()).collect();
    let results = par::map(&elliptic, |m| {
        let n = formal_dimension(m) as u32;
        let dims: Vec<usize> = (0..=n).map(|i| cohomology_dimension(m, i)).collect();
        let failures: Vec<String> = (0..=n as usize)
            .filter(|&i| dims[i] != dims[n as usize - i])
            .map(|i| format!("dim H^{i} = {} but dim H^{} = {}", dims[i], n as usize - i, dims[n as usize - i]))
            .collect();
        (dims.len(), failures)
    });
    let cases = results.iter().map(|r| r.0).sum();
    Check { name: "Poincaré duality", cases, failures: results.into_iter().flat_map(|r| r.1).collect() }
}

/// Coefficients of `Π_even 1/(1 − t^d) · Π_odd (1 + t^d)` up to `t^max`.
pub fn hilbert_series(alg: &Algebra, max: usize) -> Vec<u64> {
    let mut series = vec![0u64; max + 1];
    series[0] = 1;
    for g in alg.generators() {
        let d = g.degree as usize;
        if g.is_even() {
            for n in d..=max {
                series[n] += series[n - d];
            }
        } else {
            for n in (d..=max).rev() {
                series[n] += series[n - d];
            }
        }
    }
    series
}

fn basis_counts(models: &[SullivanModel]) -> Check {
    const TOP: usize = 40;
    let results = par::map(models, |m| {
        let alg = m.algebra();
        let series = hilbert_series(alg, TOP);
        (0..=TOP)
            .filter(|&n| alg.degree_basis(n as u32).len() as u64 != series[n])
            .map(|n| {
                format!(
                    "degree {n}: basis has {} monomials, series gives {}",
                    alg.degree_basis(n as u32).len(),
                    series[n]
                )
            })
            .collect::<Vec<_>>()
    });
    Check { name: "basis counts", cases: models.len() * (TOP + 1), failures: results.into_iter().flatten().collect() }
}

//! Dense exact linear algebra over ℚ.
//!
//! Pivoting is deterministic (first nonzero entry in the first usable
//! column) and free variables are set to zero, or to one for kernel vectors,
//! so every representative computed higher up is reproducible.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::Q;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}

/// Output of [`RationalMatrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RationalMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a `rows × columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {c} has wrong length");
            for (r, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    m[(r, c)] = x.clone();
                }
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The submatrix on the given rows (all columns).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        RationalMatrix {
            rows: rows.len(),
            cols: self.cols,
            data: rows.iter().flat_map(|&r| self.row(r).iter().cloned()).collect(),
        }
    }

    /// The submatrix on the given columns (all rows).
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m[(r, j)] = self[(r, c)].clone();
            }
        }
        m
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &RationalMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                m[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Q::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        m[(r, c)] += a * b;
                    }
                }
            }
        }
        m
    }

    /// Reduced row echelon form by Gauss-Jordan elimination.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m[(row, col)].recip();
            if !inv.is_one() {
                for c in col..m.cols {
                    if !m[(row, c)].is_zero() {
                        m[(row, c)] *= &inv;
                    }
                }
            }
            let pivot_row: Vec<Q> = m.row(row).to_vec();
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    if !pivot_row[c].is_zero() {
                        let delta = &factor * &pivot_row[c];
                        m[(r, c)] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of the null space; one vector per free column, with that free
    /// variable set to one and the others to zero.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let Rref { matrix, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Q::zero(); self.cols];
                v[free] = Q::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -matrix[(r, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self · x = b`, free variables zero; `None` when `b` is
    /// outside the column space.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let aug = self.hconcat(&RationalMatrix::from_columns(self.rows, &[b.to_vec()]));
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = matrix[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Indices of a maximal set of linearly independent columns (the pivot
    /// columns of the RREF).
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().pivots
    }
}

/// `b ∈ image(m)`: returns a preimage with free variables zero.
pub fn solve_membership(m: &RationalMatrix, b: &[Q]) -> Option<Vec<Q>> {
    m.solve(b)
}

/// Dimension of `ℚ^ambient / span(columns of gens)`.
pub fn quotient_dim(gens: &RationalMatrix, ambient: usize) -> usize {
    assert_eq!(gens.rows(), ambient);
    ambient - gens.rank()
}

/// Cohomology of `… → C_prev --incoming--> C --outgoing--> …` at `C`.
#[derive(Debug, Clone)]
pub struct Homology {
    /// Cocycle representatives, independent modulo boundaries.
    pub representatives: Vec<Vec<Q>>,
    /// A basis of the boundary space.
    pub boundaries: Vec<Vec<Q>>,
    pub cocycle_dim: usize,
}

impl Homology {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }
}

/// `ker(outgoing) / im(incoming)`. `outgoing` has `dim` columns and
/// `incoming` has `dim` rows. Representatives are the kernel basis vectors
/// that extend a boundary basis, taken in kernel order.
pub fn homology(dim: usize, outgoing: &RationalMatrix, incoming: &RationalMatrix) -> Homology {
    assert_eq!(outgoing.cols(), dim);
    assert_eq!(incoming.rows(), dim);
    let kernel = outgoing.kernel_basis();
    let boundary_cols = incoming.independent_columns();
    let boundaries: Vec<Vec<Q>> = boundary_cols.iter().map(|&c| incoming.column(c)).collect();
    let combined: Vec<Vec<Q>> = boundaries.iter().chain(kernel.iter()).cloned().collect();
    let pivots = RationalMatrix::from_columns(dim, &combined).independent_columns();
    let representatives =
        pivots.into_iter().filter(|&c| c >= boundaries.len()).map(|c| kernel[c - boundaries.len()].clone()).collect();
    Homology { representatives, boundaries, cocycle_dim: kernel.len() }
}

/// Largest `s` such that `v ∈ W_{≥s} + image(boundary)`, where `W_{≥s}` is
/// spanned by the coordinates whose weight is at least `s`. Returns `s` and
/// the adjusted vector `v − boundary·x` lying in `W_{≥s}`.
pub fn max_weight_shift(v: &[Q], weights: &[usize], boundary: &RationalMatrix) -> (usize, Vec<Q>) {
    assert_eq!(v.len(), weights.len());
    let top = weights.iter().copied().max().unwrap_or(0);
    for s in (0..=top + 1).rev() {
        let low: Vec<usize> = (0..v.len()).filter(|&i| weights[i] < s).collect();
        let rhs: Vec<Q> = low.iter().map(|&i| v[i].clone()).collect();
        let sub = boundary.select_rows(&low);
        if let Some(x) = sub.solve(&rhs) {
            let bx = boundary.mul_vec(&x);
            let adjusted = v.iter().zip(&bx).map(|(a, b)| a - b).collect();
            return (s, adjusted);
        }
    }
    unreachable!("s = 0 is always solvable")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::algebra::q;

    fn qv(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let r = RationalMatrix::from_i64(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r.matrix, RationalMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank(), 1);
        let id = RationalMatrix::identity(4);
        assert_eq!(id.rref().matrix, id);
        assert_eq!(id.rank(), 4);
        let z = RationalMatrix::zeros(3, 2);
        assert_eq!(z.rref().matrix, z);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(RationalMatrix::from_i64(&[&[1, 1]]).kernel_basis(), vec![qv(&[-1, 1])]);
        assert!(RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]).kernel_basis().is_empty());
        let empty = RationalMatrix::zeros(0, 3);
        assert_eq!(empty.kernel_basis(), vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])]);
    }

    #[test]
    fn solve_examples() {
        let m = RationalMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(solve_membership(&m, &qv(&[3, 0])), Some(qv(&[3, 0])));
        assert_eq!(solve_membership(&m, &qv(&[0, 1])), None);
        let id = RationalMatrix::identity(3);
        assert_eq!(solve_membership(&id, &qv(&[5, -2, 7])), Some(qv(&[5, -2, 7])));
        // no unknowns: only the zero vector is reachable
        let none = RationalMatrix::zeros(2, 0);
        assert_eq!(none.solve(&qv(&[0, 0])), Some(vec![]));
        assert_eq!(none.solve(&qv(&[0, 1])), None);
    }

    #[test]
    fn quotient_dim_examples() {
        let g = RationalMatrix::from_i64(&[&[1, 2], &[1, 2], &[0, 0]]);
        assert_eq!(quotient_dim(&g, 3), 2);
        assert_eq!(quotient_dim(&RationalMatrix::identity(4), 4), 0);
        assert_eq!(quotient_dim(&RationalMatrix::zeros(5, 0), 5), 5);
    }

    #[test]
    fn homology_of_small_complex() {
        // C0 = ℚ → C1 = ℚ² → C2 = ℚ, incoming (1,1)^T, outgoing (1,-1)
        let incoming = RationalMatrix::from_i64(&[&[1], &[1]]);
        let outgoing = RationalMatrix::from_i64(&[&[1, -1]]);
        let h = homology(2, &outgoing, &incoming);
        assert_eq!(h.dimension(), 0);
        let h = homology(2, &RationalMatrix::zeros(0, 2), &incoming);
        assert_eq!(h.dimension(), 1);
        assert_eq!(h.representatives, vec![qv(&[1, 0])]);
    }

    #[test]
    fn weight_shift() {
        // v = e0 + e1 with weights (1, 2); boundary spans e0 - e2 (weight of e2 is 3)
        let b = RationalMatrix::from_i64(&[&[1], &[0], &[-1]]);
        let (s, adj) = max_weight_shift(&qv(&[1, 1, 0]), &[1, 2, 3], &b);
        assert_eq!(s, 2);
        assert_eq!(adj, qv(&[0, 1, 1]));
        let (s, _) = max_weight_shift(&qv(&[0, 0, 0]), &[1, 2, 3], &b);
        assert_eq!(s, 4);
    }

    fn arb_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(-3i64..=3, r * c)
                .prop_map(move |xs| RationalMatrix::from_rows(xs.chunks(c).map(qv).collect()))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(m in arb_matrix()) {
            let k = m.kernel_basis();
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
            prop_assert_eq!(k.len() + m.rank(), m.cols());
        }

        #[test]
        fn rref_is_idempotent(m in arb_matrix()) {
            let once = m.rref().matrix;
            prop_assert_eq!(once.rref().matrix, once);
        }

        #[test]
        fn solve_is_exact(m in arb_matrix(), seed in prop::collection::vec(-3i64..=3, 6)) {
            let b: Vec<Q> = (0..m.rows()).map(|i| q(seed[i])).collect();
            match m.solve(&b) {
                Some(x) => prop_assert_eq!(m.mul_vec(&x), b),
                None => {
                    let aug = m.hconcat(&RationalMatrix::from_columns(m.rows(), &[b]));
                    prop_assert!(aug.rank() > m.rank());
                }
            }
        }
    }
}

//! Exact linear algebra over the rationals.
//!
//! Everything here is deterministic: the same input always produces the same
//! echelon form, kernel basis, and solution, independent of how the rows were
//! produced.

mod echelon;
mod rational;

pub use echelon::Echelon;
pub use rational::{ParseRationalError, Rational};

use std::fmt;

/// A sparse vector: `(index, value)` pairs sorted by index, no stored zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: Vec<(usize, Rational)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut entries: Vec<(usize, Rational)> = pairs.into_iter().collect();
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVector { entries: out }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn unit(index: usize) -> Self {
        SparseVector { entries: vec![(index, Rational::one())] }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn first_index(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SparseVector { entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &SparseVector) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let v = x + &(y * c);
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVector { entries: out }
    }

    pub fn dot(&self, other: &SparseVector) -> Rational {
        let mut acc = Rational::zero();
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                acc += x * y;
                a.next();
                b.next();
            }
        }
        acc
    }

    /// Relabels indices through `map`; the map must be injective on the support.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.entries.iter().map(|(i, v)| (map(*i), v.clone())))
    }
}

impl fmt::Debug for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(i, v)| (i, v))).finish()
    }
}

/// A sparse matrix stored by rows with a fixed column count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: Vec<SparseVector>,
    ncols: usize,
}

impl RationalMatrix {
    /// Panics if a row has an index outside `0..ncols`.
    pub fn new(rows: Vec<SparseVector>, ncols: usize) -> Self {
        for r in &rows {
            if let Some(m) = r.max_index() {
                assert!(m < ncols, "row index {m} outside {ncols} columns");
            }
        }
        RationalMatrix { rows, ncols }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::new(rows.iter().map(|r| SparseVector::from_dense(r)).collect(), ncols)
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(SparseVector::unit).collect(), n)
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row.iter() {
                cols[c].push((r, v.clone()));
            }
        }
        Self::new(cols.into_iter().map(SparseVector::from_pairs).collect(), self.rows.len())
    }

    /// `self * v` where `v` is indexed by column.
    pub fn mul_vector(&self, v: &SparseVector) -> SparseVector {
        SparseVector::from_pairs(self.rows.iter().enumerate().map(|(i, r)| (i, r.dot(v))))
    }

    /// `y^T * self` where `y` is indexed by row.
    pub fn left_mul(&self, y: &SparseVector) -> SparseVector {
        let mut acc = SparseVector::new();
        for (i, c) in y.iter() {
            acc = acc.add_scaled(c, &self.rows[i]);
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.to_dense(self.ncols)).collect()
    }
}

/// Result of a reduced row echelon computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows of the reduced echelon form, ordered by pivot column.
    pub echelon: RationalMatrix,
    /// Pivot column of each echelon row.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan elimination.
///
/// Pivoting takes the earliest column that still has a nonzero entry among the
/// unused rows, and within that column the entry of smallest magnitude (earliest
/// row on ties). The reduced form itself is unique, so the pivot rule only
/// affects intermediate coefficient sizes.
pub fn rref(m: &RationalMatrix) -> Rref {
    let mut rows: Vec<SparseVector> = m.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
    let mut done: Vec<SparseVector> = Vec::new();
    let mut pivots = Vec::new();
    while !rows.is_empty() {
        // rows still pending have zeros in every pivot column found so far
        let col = rows.iter().filter_map(|r| r.first_index()).min().unwrap();
        let (best, _) = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.first_index() == Some(col))
            .min_by(|(ia, a), (ib, b)| a.get(col).abs().cmp(&b.get(col).abs()).then(ia.cmp(ib)))
            .unwrap();
        let pivot_row = rows.remove(best);
        let pivot_row = pivot_row.scale(&pivot_row.get(col).recip());
        for r in rows.iter_mut().chain(done.iter_mut()) {
            let c = r.get(col);
            if !c.is_zero() {
                *r = r.add_scaled(&-c, &pivot_row);
            }
        }
        rows.retain(|r| !r.is_zero());
        done.push(pivot_row);
        pivots.push(col);
    }
    let rank = done.len();
    Rref { echelon: RationalMatrix::new(done, m.ncols), pivots, rank }
}

pub fn rank(m: &RationalMatrix) -> usize {
    let mut e = Echelon::new(m.ncols);
    for r in &m.rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `{v : m v = 0}`, one vector per free column, in column order.
/// Each vector has a 1 at its free column and zeros at the other free columns.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<SparseVector> {
    let r = rref(m);
    kernel_from_rref(&r, m.ncols)
}

pub(crate) fn kernel_from_rref(r: &Rref, ncols: usize) -> Vec<SparseVector> {
    let mut is_pivot = vec![false; ncols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    // column -> list of (echelon row, value) for non-pivot entries
    let mut by_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ncols];
    for (ri, row) in r.echelon.rows.iter().enumerate() {
        for (c, v) in row.iter() {
            if !is_pivot[c] {
                by_col[c].push((ri, v.clone()));
            }
        }
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|f| {
            let mut pairs = vec![(f, Rational::one())];
            pairs.extend(by_col[f].iter().map(|(ri, v)| (r.pivots[*ri], -v)));
            SparseVector::from_pairs(pairs)
        })
        .collect()
}

/// Outcome of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// One exact solution (free variables set to zero).
    Consistent(SparseVector),
    /// No solution. `certificate` is a row combination `y` with `y^T m = 0`
    /// and `y . rhs = 1`.
    Inconsistent { certificate: SparseVector },
}

impl Solution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Solution::Consistent(_))
    }
}

/// Solves `m x = rhs` exactly. `rhs` is indexed by row.
pub fn solve(m: &RationalMatrix, rhs: &SparseVector) -> Solution {
    assert!(
        rhs.max_index().map_or(true, |i| i < m.nrows()),
        "right-hand side longer than the system"
    );
    let n = m.ncols;
    let rhs_col = n;
    // augmented row i: [m_i | rhs_i | e_i] tracks the row combination
    let aug_rows: Vec<SparseVector> = m
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut pairs: Vec<(usize, Rational)> = row.iter().map(|(c, v)| (c, v.clone())).collect();
            pairs.push((rhs_col, rhs.get(i)));
            pairs.push((n + 1 + i, Rational::one()));
            SparseVector::from_pairs(pairs)
        })
        .collect();
    let aug = RationalMatrix::new(aug_rows, n + 1 + m.nrows());
    let r = rref(&aug);
    if let Some(pos) = r.pivots.iter().position(|&p| p == rhs_col) {
        let row = &r.echelon.rows[pos];
        let certificate = SparseVector::from_pairs(
            row.iter().filter(|(c, _)| *c > rhs_col).map(|(c, v)| (c - n - 1, v.clone())),
        );
        return Solution::Inconsistent { certificate };
    }
    let x = SparseVector::from_pairs(
        r.pivots
            .iter()
            .zip(&r.echelon.rows)
            .filter(|(p, _)| **p < n)
            .map(|(p, row)| (*p, row.get(rhs_col))),
    );
    Solution::Consistent(x)
}

/// Whether `v` is a combination of `rows`; on success returns coefficients
/// `c` with `sum c_i rows_i = v`.
pub fn in_span(rows: &[SparseVector], v: &SparseVector) -> Option<SparseVector> {
    let ncols = rows
        .iter()
        .chain(std::iter::once(v))
        .filter_map(|r| r.max_index())
        .max()
        .map_or(0, |m| m + 1);
    // columns of the system are the given rows
    let sys = RationalMatrix::new(rows.to_vec(), ncols).transpose();
    match solve(&sys, v) {
        Solution::Consistent(c) => Some(c),
        Solution::Inconsistent { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn sparse_vector_normalizes() {
        let v = SparseVector::from_pairs(vec![(3, q(1)), (1, q(2)), (3, q(-1)), (0, q(0))]);
        assert_eq!(v.entries(), &[(1, q(2))]);
        let w = v.add_scaled(&q(-1), &v);
        assert!(w.is_zero());
    }

    #[test]
    fn rref_identity_has_full_rank() {
        for n in 0..6 {
            let r = rref(&RationalMatrix::identity(n));
            assert_eq!(r.rank, n);
            assert_eq!(r.echelon, RationalMatrix::identity(n));
        }
    }

    #[test]
    fn empty_matrix() {
        let m = RationalMatrix::new(vec![], 3);
        assert_eq!(rref(&m).rank, 0);
        assert_eq!(kernel_basis(&m).len(), 3);
    }

    #[test]
    fn kernel_of_single_row() {
        let m = RationalMatrix::from_integers(&[vec![1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![SparseVector::from_pairs(vec![(0, q(-1)), (1, q(1))])]);
        assert!(kernel_basis(&RationalMatrix::identity(4)).is_empty());
    }

    #[test]
    fn solve_identity() {
        let m = RationalMatrix::identity(3);
        assert_eq!(solve(&m, &SparseVector::unit(0)), Solution::Consistent(SparseVector::unit(0)));
    }

    #[test]
    fn inconsistent_certificate() {
        let m = RationalMatrix::from_integers(&[vec![1, 1], vec![2, 2]]);
        let rhs = SparseVector::from_pairs(vec![(0, q(1)), (1, q(3))]);
        match solve(&m, &rhs) {
            Solution::Inconsistent { certificate } => {
                assert!(m.left_mul(&certificate).is_zero());
                assert_eq!(certificate.dot(&rhs), q(1));
            }
            other => panic!("expected inconsistent, got {other:?}"),
        }
    }

    #[test]
    fn span_membership() {
        let rows = vec![SparseVector::unit(0)];
        let three = SparseVector::from_pairs(vec![(0, q(3))]);
        assert_eq!(in_span(&rows, &three), Some(three.clone()));
        assert_eq!(in_span(&rows, &SparseVector::unit(1)), None);
        assert_eq!(in_span(&[], &SparseVector::new()), Some(SparseVector::new()));
    }

    #[test]
    fn smallest_magnitude_pivot_gives_same_rref() {
        let m = RationalMatrix::from_integers(&[vec![4, 2, 1], vec![2, 1, 3], vec![6, 3, 4]]);
        let r = rref(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 2]);
        assert_eq!(r.echelon.rows()[0], SparseVector::from_pairs(vec![(0, q(1)), (1, Rational::new(1, 2))]));
    }
}

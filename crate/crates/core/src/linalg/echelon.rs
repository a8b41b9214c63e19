use super::{RationalMatrix, Rational, Rref, SparseVector};

const NO_ROW: usize = usize::MAX;

/// An incrementally maintained reduced row echelon basis of a subspace.
///
/// Every stored row has coefficient 1 at its pivot (which is also its first
/// entry) and zeros at all other pivot columns, so reducing a vector against
/// the basis is a single pass over its entries. Once all vectors are inserted
/// the sorted rows are exactly the reduced row echelon form of the span.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVector>,
    pivot_row: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: vec![NO_ROW; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col] != NO_ROW
    }

    /// Residual of `v` modulo the span; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        let mut terms: Vec<(usize, Rational)> = Vec::with_capacity(v.nnz());
        for (c, val) in v.iter() {
            debug_assert!(c < self.ncols);
            let r = self.pivot_row[c];
            if r == NO_ROW {
                terms.push((c, val.clone()));
            } else {
                for (c2, a) in self.rows[r].iter().skip(1) {
                    terms.push((c2, -(val * a)));
                }
            }
        }
        SparseVector::from_pairs(terms)
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVector) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.first_index() else {
            return false;
        };
        let r = r.scale(&r.get(p).recip());
        for row in self.rows.iter_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                *row = row.add_scaled(&-c, &r);
            }
        }
        self.pivot_row[p] = self.rows.len();
        self.rows.push(r);
        true
    }

    /// Rows ordered by pivot column.
    pub fn sorted_rows(&self) -> Vec<SparseVector> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| r.first_index());
        rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.is_pivot(c)).collect()
    }

    pub fn to_rref(&self) -> Rref {
        let rows = self.sorted_rows();
        let pivots = rows.iter().map(|r| r.first_index().unwrap()).collect();
        Rref { rank: rows.len(), echelon: RationalMatrix::new(rows, self.ncols), pivots }
    }
}

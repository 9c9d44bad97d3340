use crate::error::{Error, Result};
use crate::field::Field;

use super::sparse::{axpy, canonicalize, dense_to_sparse, rref_rows, SparseRow};

/// A linear subspace of `F^n` held as its reduced row-echelon basis.
///
/// Every basis row starts with a 1 at its pivot column and is zero at all other
/// pivot columns, so reducing a vector needs one pass over its pivot entries.
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<SparseRow<F::Elem>>,
    /// `pivot_row[c]` is the basis row with pivot `c`, or `u32::MAX`.
    pivot_row: Vec<u32>,
}

impl<F: Field> Subspace<F> {
    pub fn span(field: F, ambient: usize, rows: Vec<SparseRow<F::Elem>>) -> Self {
        let rows = rref_rows(&field, rows, ambient);
        Self::from_rref(field, ambient, rows)
    }

    /// Wraps rows already in reduced row-echelon form.
    pub(crate) fn from_rref(field: F, ambient: usize, rows: Vec<SparseRow<F::Elem>>) -> Self {
        let mut pivot_row = vec![u32::MAX; ambient];
        for (i, r) in rows.iter().enumerate() {
            pivot_row[r[0].0] = i as u32;
        }
        Self { field, ambient, rows, pivot_row }
    }

    pub fn span_dense(field: F, ambient: usize, rows: &[Vec<F::Elem>]) -> Self {
        let sparse = rows.iter().map(|r| dense_to_sparse(&field, r)).collect();
        Self::span(field, ambient, sparse)
    }

    pub fn zero(field: F, ambient: usize) -> Self {
        Self::from_rref(field, ambient, Vec::new())
    }

    pub fn full(field: F, ambient: usize) -> Self {
        let one = field.one();
        let rows = (0..ambient).map(|i| vec![(i, one.clone())]).collect();
        Self::from_rref(field, ambient, rows)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn codim(&self) -> usize {
        self.ambient - self.rows.len()
    }
    pub fn basis(&self) -> &[SparseRow<F::Elem>] {
        &self.rows
    }
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }
    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row[c] != u32::MAX
    }
    /// The basis row whose pivot is column `c`.
    pub fn pivot_row_of(&self, c: usize) -> Option<&SparseRow<F::Elem>> {
        let t = self.pivot_row[c];
        (t != u32::MAX).then(|| &self.rows[t as usize])
    }
    /// Columns without a pivot, increasing. Their unit vectors span a complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.is_pivot(*c)).collect()
    }

    /// Remainder of `v` modulo the subspace, supported on non-pivot columns.
    pub fn reduce(&self, v: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
        let f = &self.field;
        let mut out: SparseRow<F::Elem> = Vec::new();
        let mut hits: Vec<(usize, F::Elem)> = Vec::new();
        for (c, x) in v {
            let t = self.pivot_row[*c];
            if t == u32::MAX {
                out.push((*c, x.clone()));
            } else {
                hits.push((t as usize, f.neg(x)));
            }
        }
        if hits.is_empty() {
            return out;
        }
        if hits.len() > 8 {
            let mut acc: std::collections::BTreeMap<usize, F::Elem> = out.into_iter().collect();
            for (t, m) in &hits {
                for (c, w) in &self.rows[*t][1..] {
                    let slot = acc.entry(*c).or_insert_with(|| f.zero());
                    f.add_mul_assign(slot, m, w);
                }
            }
            return acc.into_iter().filter(|(_, x)| !f.is_zero(x)).collect();
        }
        for (t, m) in &hits {
            out = axpy(f, &out, m, &self.rows[*t][1..]);
        }
        out
    }

    pub fn contains(&self, v: &[(usize, F::Elem)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Membership of a dense vector; the length must equal the ambient dimension.
    pub fn membership(&self, v: &[F::Elem]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: v.len() });
        }
        Ok(self.contains(&dense_to_sparse(&self.field, v)))
    }

    /// Coordinates of the class of `v` in the quotient, indexed by position in `non_pivots()`.
    pub fn quotient_coords(&self, v: &[(usize, F::Elem)]) -> Vec<F::Elem> {
        let np = self.non_pivots();
        let mut out = vec![self.field.zero(); np.len()];
        let rem = self.reduce(v);
        let mut k = 0;
        for (c, x) in rem {
            while np[k] < c {
                k += 1;
            }
            out[k] = x;
        }
        out
    }

    /// Index of the first basis vector of `other` lying outside `self`.
    pub fn first_outside(&self, other: &Subspace<F>) -> Option<usize> {
        assert_eq!(self.ambient, other.ambient);
        other.rows.iter().position(|r| !self.contains(r))
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        self.first_outside(other).is_none()
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self::span(self.field.clone(), self.ambient, rows)
    }

    /// Adds vectors to the span.
    pub fn extend(&self, extra: Vec<SparseRow<F::Elem>>) -> Subspace<F> {
        let mut rows = self.rows.clone();
        rows.extend(extra.into_iter().map(|r| canonicalize(&self.field, r)));
        Self::span(self.field.clone(), self.ambient, rows)
    }

    /// The image of the subspace under the projection forgetting the first `k`
    /// coordinates, restricted to vectors that vanish on those coordinates:
    /// `{ w : (0, w) in self }`.
    pub fn vanishing_head(&self, k: usize) -> Subspace<F> {
        assert!(k <= self.ambient);
        let rows = self
            .rows
            .iter()
            .filter(|r| r[0].0 >= k)
            .map(|r| r.iter().map(|(c, x)| (c - k, x.clone())).collect())
            .collect();
        Self::from_rref(self.field.clone(), self.ambient - k, rows)
    }

    pub fn same_as(&self, other: &Subspace<F>) -> bool {
        self.ambient == other.ambient && self.rows == other.rows
    }
}

/// `dim big - dim small`, after checking `small ⊆ big`.
pub fn quotient_dim<F: Field>(big: &Subspace<F>, small: &Subspace<F>) -> Result<usize> {
    if big.ambient() != small.ambient() {
        return Err(Error::DimensionMismatch { expected: big.ambient(), got: small.ambient() });
    }
    if let Some(i) = big.first_outside(small) {
        let f = big.field();
        return Err(Error::NotContained {
            index: i,
            vector: small.basis()[i]
                .iter()
                .map(|(c, x)| format!("{c}:{}", f.encode(x)))
                .collect(),
        });
    }
    Ok(big.dim() - small.dim())
}

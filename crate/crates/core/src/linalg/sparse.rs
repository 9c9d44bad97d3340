//! Sparse rows and matrices with field-generic reduced row-echelon form.

use std::collections::BTreeMap;

use crate::field::Field;

use super::Subspace;

/// Sparse vector: `(column, value)` pairs with strictly increasing columns and no zeros.
pub type SparseRow<E> = Vec<(usize, E)>;

/// `a + m * b` for sparse rows.
pub fn axpy<F: Field>(f: &F, a: &[(usize, F::Elem)], m: &F::Elem, b: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = f.mul(m, &b[j].1);
            if !f.is_zero(&v) {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            f.add_mul_assign(&mut v, m, &b[j].1);
            if !f.is_zero(&v) {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_row<F: Field>(f: &F, row: &mut SparseRow<F::Elem>, s: &F::Elem) {
    for e in row.iter_mut() {
        e.1 = f.mul(&e.1, s);
    }
}

/// Sorts by column, merges duplicates and drops zeros.
pub fn canonicalize<F: Field>(f: &F, mut row: Vec<(usize, F::Elem)>) -> SparseRow<F::Elem> {
    row.sort_by_key(|e| e.0);
    let mut out: SparseRow<F::Elem> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = f.add(&last.1, &v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !f.is_zero(&e.1));
    out
}

pub fn dense_to_sparse<F: Field>(f: &F, v: &[F::Elem]) -> SparseRow<F::Elem> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !f.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense<F: Field>(f: &F, v: &[(usize, F::Elem)], len: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); len];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

/// Reduced row-echelon basis of the span of `rows`.
///
/// Pivot search goes column by column from the left; among the rows leading in
/// that column the sparsest is taken as pivot. The result is the canonical RREF,
/// so pivot choice only affects speed.
pub fn rref_rows<F: Field>(f: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> Vec<SparseRow<F::Elem>> {
    if let Some(r) = f.fast_rref(&rows, ncols) {
        return r;
    }
    sparse_rref(f, rows, ncols)
}

fn normalize_lead<F: Field>(f: &F, row: &mut SparseRow<F::Elem>) {
    let lead = &row[0].1;
    if !f.is_one(lead) {
        let s = f.inv(lead).expect("leading entry is nonzero");
        scale_row(f, row, &s);
    }
}

pub(crate) fn sparse_rref<F: Field>(f: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> Vec<SparseRow<F::Elem>> {
    let mut buckets: BTreeMap<usize, Vec<SparseRow<F::Elem>>> = BTreeMap::new();
    for mut r in rows {
        r.retain(|e| !f.is_zero(&e.1));
        if r.is_empty() {
            continue;
        }
        debug_assert!(r.last().unwrap().0 < ncols);
        normalize_lead(f, &mut r);
        buckets.entry(r[0].0).or_default().push(r);
    }

    let mut echelon: Vec<SparseRow<F::Elem>> = Vec::new();
    let minus_one = f.neg(&f.one());
    while let Some((_, mut group)) = buckets.pop_first() {
        let k = group
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| r.len())
            .map(|(i, _)| i)
            .expect("bucket is nonempty");
        let pivot = group.swap_remove(k);
        for r in group {
            let mut d = axpy(f, &r, &minus_one, &pivot);
            if d.is_empty() {
                continue;
            }
            normalize_lead(f, &mut d);
            buckets.entry(d[0].0).or_default().push(d);
        }
        echelon.push(pivot);
    }

    // Back substitution, last pivot first: each reduced row only has entries at
    // its own pivot and at non-pivot columns, so one pass per row suffices.
    let mut pivot_of = vec![usize::MAX; ncols];
    for (i, r) in echelon.iter().enumerate() {
        pivot_of[r[0].0] = i;
    }
    let mut reduced: Vec<SparseRow<F::Elem>> = vec![Vec::new(); echelon.len()];
    for i in (0..echelon.len()).rev() {
        let row = &echelon[i];
        let needs = row[1..].iter().any(|(c, _)| pivot_of[*c] != usize::MAX);
        if !needs {
            reduced[i] = row.clone();
            continue;
        }
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        acc.insert(row[0].0, row[0].1.clone());
        for (c, v) in &row[1..] {
            let t = pivot_of[*c];
            if t == usize::MAX {
                let slot = acc.entry(*c).or_insert_with(|| f.zero());
                *slot = f.add(slot, v);
                continue;
            }
            let m = f.neg(v);
            for (c2, w) in &reduced[t][1..] {
                let slot = acc.entry(*c2).or_insert_with(|| f.zero());
                f.add_mul_assign(slot, &m, w);
            }
        }
        reduced[i] = acc.into_iter().filter(|(_, v)| !f.is_zero(v)).collect();
    }
    reduced
}

/// Row-major sparse matrix over a field.
#[derive(Clone, Debug)]
pub struct SparseMatrix<F: Field> {
    field: F,
    ncols: usize,
    rows: Vec<SparseRow<F::Elem>>,
}

impl<F: Field> SparseMatrix<F> {
    pub fn new(field: F, ncols: usize) -> Self {
        Self { field, ncols, rows: Vec::new() }
    }

    /// Builds from arbitrary `(column, value)` lists; entries are sorted, merged and zero-stripped.
    pub fn from_rows(field: F, ncols: usize, rows: Vec<Vec<(usize, F::Elem)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| {
                assert!(r.iter().all(|e| e.0 < ncols), "column index out of range");
                canonicalize(&field, r)
            })
            .collect();
        Self { field, ncols, rows }
    }

    pub fn from_dense(field: F, rows: &[Vec<F::Elem>]) -> Self {
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        let rows = rows.iter().map(|r| dense_to_sparse(&field, r)).collect();
        Self { field, ncols, rows }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let one = field.one();
        let rows = (0..n).map(|i| vec![(i, one.clone())]).collect();
        Self { field, ncols: n, rows }
    }

    pub fn push_row(&mut self, row: Vec<(usize, F::Elem)>) {
        let r = canonicalize(&self.field, row);
        assert!(r.last().map(|e| e.0 < self.ncols).unwrap_or(true));
        self.rows.push(r);
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rows(&self) -> &[SparseRow<F::Elem>] {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        self.rows
            .iter()
            .map(|r| sparse_to_dense(&self.field, r, self.ncols))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseRow<F::Elem>> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                cols[*c].push((i, v.clone()));
            }
        }
        Self { field: self.field.clone(), ncols: self.rows.len(), rows: cols }
    }

    /// `M v` for a dense vector of length `ncols`.
    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        self.rows
            .iter()
            .map(|r| {
                let mut acc = f.zero();
                for (c, x) in r {
                    f.add_mul_assign(&mut acc, x, &v[*c]);
                }
                acc
            })
            .collect()
    }

    /// Reduced row-echelon form (zero rows dropped) and rank.
    pub fn rref(&self) -> (Self, usize) {
        let rows = rref_rows(&self.field, self.rows.clone(), self.ncols);
        let rank = rows.len();
        (Self { field: self.field.clone(), ncols: self.ncols, rows }, rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Row space.
    pub fn image(&self) -> Subspace<F> {
        Subspace::span(self.field.clone(), self.ncols, self.rows.clone())
    }

    /// Right null space `{v : M v = 0}` inside the column-index ambient.
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let (r, _) = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for row in &r.rows {
            is_pivot[row[0].0] = true;
        }
        let mut vecs: BTreeMap<usize, SparseRow<F::Elem>> = (0..self.ncols)
            .filter(|c| !is_pivot[*c])
            .map(|c| (c, Vec::new()))
            .collect();
        for row in &r.rows {
            let pc = row[0].0;
            for (c, v) in &row[1..] {
                if let Some(kv) = vecs.get_mut(c) {
                    kv.push((pc, f.neg(v)));
                }
            }
        }
        let rows = vecs
            .into_iter()
            .map(|(free, mut v)| {
                v.push((free, f.one()));
                canonicalize(f, v)
            })
            .collect();
        Subspace::span(f.clone(), self.ncols, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_prime, rational_from_i64, PrimeField, Rational, Rationals};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        rational_from_i64(n)
    }

    /// Independent dense Gaussian elimination, used as the rank oracle.
    fn dense_rank_mod(p: u64, mut m: Vec<Vec<u64>>) -> usize {
        let f = PrimeField::new(p).unwrap();
        let ncols = m.first().map(Vec::len).unwrap_or(0);
        let mut rank = 0;
        for c in 0..ncols {
            let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, r);
            let inv = f.inv(&m[rank][c]).unwrap();
            for r2 in 0..m.len() {
                if r2 != rank && m[r2][c] != 0 {
                    let t = f.mul(&m[r2][c], &inv);
                    for k in 0..ncols {
                        let d = f.mul(&t, &m[rank][k]);
                        m[r2][k] = f.sub(&m[r2][k], &d);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_and_proportional() {
        let id = SparseMatrix::identity(Rationals, 3);
        let (r, rank) = id.rref();
        assert_eq!(rank, 3);
        assert_eq!(r.to_dense(), id.to_dense());
        let m = SparseMatrix::from_dense(Rationals, &[vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn image_and_kernel_edge_cases() {
        let z = SparseMatrix::from_dense(Rationals, &vec![vec![q(0); 3]; 2]);
        assert_eq!(z.image().dim(), 0);
        assert_eq!(SparseMatrix::identity(Rationals, 4).image().dim(), 4);
        assert_eq!(SparseMatrix::identity(Rationals, 4).kernel().dim(), 0);
        let k = SparseMatrix::from_dense(Rationals, &[vec![q(1), q(1)]]).kernel();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis()[0], vec![(0, q(1)), (1, q(-1))]);
    }

    /// A seeded 50x50 rational matrix of rank 37 built as a product of random factors.
    fn rank_deficient(seed: u64) -> Vec<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rnd = |n: usize, m: usize| -> Vec<Vec<Rational>> {
            (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
                        .collect()
                })
                .collect()
        };
        let a = rnd(50, 37);
        let b = rnd(37, 50);
        (0..50)
            .map(|i| {
                (0..50)
                    .map(|j| (0..37).fold(q(0), |acc, k| acc + &a[i][k] * &b[k][j]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rational_rank_matches_two_random_large_primes() {
        let m = rank_deficient(7);
        let rq = SparseMatrix::from_dense(Rationals, &m).rank();
        assert_eq!(rq, 37);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2 {
            let p = random_prime(&mut rng, 62);
            let f = PrimeField::new(p).unwrap();
            let mp: Vec<Vec<u64>> = m
                .iter()
                .map(|r| r.iter().map(|x| f.from_rational(x).unwrap()).collect())
                .collect();
            assert_eq!(SparseMatrix::from_dense(f, &mp).rank(), rq);
            assert_eq!(dense_rank_mod(p, mp), rq);
        }
    }

    #[test]
    fn unlucky_denominator_is_reported() {
        let f = PrimeField::new(7).unwrap();
        let x = Rational::new(1.into(), 14.into());
        assert!(matches!(f.from_rational(&x), Err(crate::Error::UnluckyPrime { prime: 7, .. })));
    }

    fn random_mod_rows(rng: &mut ChaCha8Rng, p: u64, n: usize, m: usize, density: f64) -> Vec<SparseRow<u64>> {
        (0..n)
            .map(|_| {
                (0..m)
                    .filter_map(|c| rng.gen_bool(density).then(|| (c, rng.gen_range(1..p))))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn dense_kernel_agrees_with_sparse_path() {
        let p = 268_435_399; // prime below 2^28
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, m, dens) in &[(120, 80, 0.3), (80, 150, 0.5), (300, 100, 0.05)] {
            let mut rows = random_mod_rows(&mut rng, p, n, m, dens);
            // force dependencies
            let extra: Vec<_> = (0..20).map(|i| axpy(&f, &rows[i], &5, &rows[i + 1])).collect();
            rows.extend(extra);
            let dense = crate::linalg::dense_mod::rref_mod(p, &rows, m);
            let sparse = sparse_rref(&f, rows, m);
            assert_eq!(dense, sparse);
        }
    }

    #[test]
    fn dense_kernel_survives_many_updates_near_the_prime_limit() {
        let p = 2_147_483_645u64;
        let p = (0..).map(|k| p - 2 * k).find(|&x| x < crate::field::DENSE_KERNEL_MAX_PRIME && crate::field::is_prime(x)).unwrap();
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<SparseRow<u64>> = (0..90)
            .map(|_| (0..90).map(|c| (c, rng.gen_range(p - 50..p))).collect())
            .collect();
        let dense = crate::linalg::dense_mod::rref_mod(p, &rows, 90);
        let sparse = sparse_rref(&f, rows, 90);
        assert_eq!(dense, sparse);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_nullity(seed in any::<u64>(), n in 1usize..12, m in 1usize..12) {
            let f = PrimeField::new(101).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = random_mod_rows(&mut rng, 101, n, m, 0.4);
            let a = SparseMatrix::from_rows(f, m, rows);
            prop_assert_eq!(a.image().dim() + a.kernel().dim(), m);
            for v in a.kernel().basis() {
                let d = sparse_to_dense(&f, v, m);
                prop_assert!(a.mul_vec(&d).iter().all(|x| *x == 0));
            }
        }

        #[test]
        fn membership_is_linear(seed in any::<u64>(), al in 0u64..101, be in 0u64..101) {
            let f = PrimeField::new(101).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = random_mod_rows(&mut rng, 101, 4, 9, 0.5);
            let s = SparseMatrix::from_rows(f, 9, rows.clone()).image();
            let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let w: Vec<SparseRow<u64>> = (0..2)
                .map(|_| {
                    let c: Vec<u64> = (0..4).map(|_| rng2.gen_range(0..101)).collect();
                    let mut acc = Vec::new();
                    for (r, x) in rows.iter().zip(&c) {
                        acc = axpy(&f, &acc, x, r);
                    }
                    acc
                })
                .collect();
            prop_assert!(s.contains(&w[0]) && s.contains(&w[1]));
            let comb = axpy(&f, &axpy(&f, &[], &al, &w[0]), &be, &w[1]);
            prop_assert!(s.contains(&comb));
        }

        #[test]
        fn rref_is_canonical(seed in any::<u64>()) {
            let f = PrimeField::new(10007).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = random_mod_rows(&mut rng, 10007, 8, 10, 0.5);
            let mut shuffled = rows.clone();
            shuffled.reverse();
            prop_assert_eq!(sparse_rref(&f, rows, 10), sparse_rref(&f, shuffled, 10));
        }
    }
}

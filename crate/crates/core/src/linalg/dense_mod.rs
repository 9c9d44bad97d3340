//! Dense Gaussian elimination modulo a prime below 2^31.
//!
//! Working vectors are `u64` accumulators holding unreduced sums of products of
//! residues. A vector is only brought back to `[0, p)` when its accumulated
//! update count would overflow, so the inner loop is a plain multiply-add over
//! 32-bit inputs. Incoming rows are processed in batches against the current
//! pivot rows, which keeps each pivot row hot in cache for the whole batch.

const BATCH: usize = 48;

struct Pivots {
    /// (pivot column, row normalized so the pivot entry is 1)
    rows: Vec<(usize, Vec<u32>)>,
}

struct Acc {
    v: Vec<u64>,
    pending: u32,
}

struct Kernel {
    p: u64,
    ncols: usize,
    budget: u32,
}

impl Kernel {
    fn new(p: u64, ncols: usize) -> Self {
        assert!(p < super::super::field::DENSE_KERNEL_MAX_PRIME);
        let pm1 = p - 1;
        let budget = ((u64::MAX - p) / (pm1 * pm1).max(1)).min(u32::MAX as u64) as u32;
        assert!(budget >= 2, "prime too large for lazy accumulation");
        Self { p, ncols, budget: budget - 1 }
    }

    fn normalize(&self, acc: &mut Acc) {
        let p = self.p;
        for x in &mut acc.v {
            *x %= p;
        }
        acc.pending = 0;
    }

    /// `acc -= acc[col] * row`, where `row[col] == 1` and `row` vanishes before `col`.
    #[inline]
    fn eliminate(&self, acc: &mut Acc, col: usize, row: &[u32]) {
        let c = acc.v[col] % self.p;
        if c == 0 {
            acc.v[col] = 0;
            return;
        }
        if acc.pending >= self.budget {
            self.normalize(acc);
        }
        let m = (self.p - c) as u32;
        axpy(&mut acc.v[col..], m, &row[col..]);
        acc.pending += 1;
        acc.v[col] = 0;
    }

    fn inv(&self, a: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        acc
    }

    /// Normalizes a fully reduced accumulator into a pivot row, or `None` if it vanished.
    fn to_pivot(&self, acc: &mut Acc) -> Option<(usize, Vec<u32>)> {
        self.normalize(acc);
        let lead = acc.v.iter().position(|&x| x != 0)?;
        let s = self.inv(acc.v[lead]);
        let mut row = vec![0u32; self.ncols];
        for k in lead..self.ncols {
            row[k] = (acc.v[k] * s % self.p) as u32;
        }
        Some((lead, row))
    }
}

#[inline]
fn axpy(acc: &mut [u64], m: u32, row: &[u32]) {
    let m = m as u64;
    for (a, &r) in acc.iter_mut().zip(row) {
        *a += m * (r as u64);
    }
}

/// Reduced row-echelon basis of the span of `rows` (sparse, entries in `[0, p)`).
pub fn rref_mod(p: u64, rows: &[Vec<(usize, u64)>], ncols: usize) -> Vec<Vec<(usize, u64)>> {
    let k = Kernel::new(p, ncols);
    let mut piv = Pivots { rows: Vec::new() };

    for chunk in rows.chunks(BATCH) {
        let mut batch: Vec<Acc> = chunk
            .iter()
            .map(|r| {
                let mut v = vec![0u64; ncols];
                for &(c, x) in r {
                    v[c] = x % p;
                }
                Acc { v, pending: 0 }
            })
            .collect();

        for (col, row) in &piv.rows {
            for acc in batch.iter_mut() {
                if acc.v[*col] != 0 {
                    k.eliminate(acc, *col, row);
                }
            }
        }

        let mut fresh: Vec<(usize, Vec<u32>)> = Vec::new();
        for acc in batch.iter_mut() {
            for (col, row) in &fresh {
                if acc.v[*col] != 0 {
                    k.eliminate(acc, *col, row);
                }
            }
            if let Some((col, row)) = k.to_pivot(acc) {
                let at = fresh.partition_point(|(c, _)| *c < col);
                fresh.insert(at, (col, row));
            }
        }
        if !fresh.is_empty() {
            piv.rows.extend(fresh);
            piv.rows.sort_by_key(|(c, _)| *c);
        }
        if piv.rows.len() == ncols {
            break;
        }
    }

    back_substitute(&k, piv)
}

/// Turns an echelon basis into the reduced one. Reduced rows are stored sparsely
/// since they only carry entries at non-pivot columns besides their pivot.
fn back_substitute(k: &Kernel, piv: Pivots) -> Vec<Vec<(usize, u64)>> {
    let p = k.p;
    let n = piv.rows.len();
    let mut is_pivot = vec![usize::MAX; k.ncols];
    for (i, (c, _)) in piv.rows.iter().enumerate() {
        is_pivot[*c] = i;
    }
    let mut reduced: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut scratch = vec![0u64; k.ncols];
    for i in (0..n).rev() {
        let (col, row) = &piv.rows[i];
        let mut touched: Vec<usize> = Vec::new();
        for j in (col + 1)..k.ncols {
            let x = row[j] as u64;
            if x == 0 {
                continue;
            }
            let t = is_pivot[j];
            if t == usize::MAX {
                if scratch[j] == 0 {
                    touched.push(j);
                }
                scratch[j] = (scratch[j] + x) % p;
                continue;
            }
            let m = p - x;
            for &(c2, y) in &reduced[t] {
                if c2 == j {
                    continue;
                }
                if scratch[c2] == 0 {
                    touched.push(c2);
                }
                scratch[c2] = (scratch[c2] + m * y) % p;
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut out = Vec::with_capacity(touched.len() + 1);
        out.push((*col, 1u64));
        for j in touched {
            if scratch[j] != 0 {
                out.push((j, scratch[j]));
            }
            scratch[j] = 0;
        }
        reduced[i] = out;
    }
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rank_and_shape() {
        let p = 1_000_003;
        let rows = vec![
            vec![(0, 1), (1, 2)],
            vec![(0, 2), (1, 4)],
            vec![(1, 1), (2, 5)],
        ];
        let r = rref_mod(p, &rows, 3);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], vec![(0, 1), (2, p - 10)]);
        assert_eq!(r[1], vec![(1, 1), (2, 5)]);
    }
}

//! The Grassmannian `G(s, l+1)` in its Plücker embedding: quadratic relations,
//! graded pieces `S_d` of the coordinate ring with normal forms, and affine charts.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{random_prime, rational_reconstruct, Field, PrimeField, Rational, Rationals};
use crate::linalg::{SparseMatrix, SparseRow, Subspace};
use crate::poly::{binomial, Monomial, MonomialIndex, Poly, VarNames};

/// Seed of the evaluation points used to find the Plücker relations.
const RELATION_SEED: u64 = 0x5eed_0f_91_a55;

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant of a square matrix with entries in a commutative ring, by
/// dynamic programming over column subsets (`n 2^n` products).
pub fn det_by_subsets<T: Clone>(
    m: &[Vec<T>],
    zero: &T,
    one: &T,
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    neg: impl Fn(&T) -> T,
    is_zero: impl Fn(&T) -> bool,
) -> T {
    let n = m.len();
    if n == 0 {
        return one.clone();
    }
    assert!(n < 24, "matrix too large for subset expansion");
    // dp[mask]: signed sum over assignments of rows 0..|mask| to the columns in mask
    let mut dp: Vec<Option<T>> = vec![None; 1 << n];
    dp[0] = Some(one.clone());
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(cur);
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || is_zero(&m[row][j]) {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let mut t = mul(&cur, &m[row][j]);
            if above % 2 == 1 {
                t = neg(&t);
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => add(&s, &t),
                None => t,
            });
        }
    }
    dp[(1 << n) - 1].take().unwrap_or_else(|| zero.clone())
}

/// `prod_{1<=i<=s, 1<=j<=n-s} (d+i+j-1)/(i+j-1)`: the dimension of `S_d` for `G(s, n)`.
/// After each row of the `s x (n-s)` rectangle the partial product is itself such a
/// dimension, so integrality is asserted row by row.
pub fn weyl_dim(s: usize, n: usize, d: u32) -> u128 {
    assert!(s <= n);
    let mut acc = BigUint::from(1u32);
    for i in 1..=s {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for j in 1..=(n - s) {
            num *= BigUint::from(d as usize + i + j - 1);
            den *= BigUint::from(i + j - 1);
        }
        let prod = acc * num;
        assert!((&prod % &den).is_zero(), "row product not integral");
        acc = prod / den;
    }
    acc.to_u128().expect("dimension fits in u128")
}

/// The Grassmannian of `s`-planes in an `(l+1)`-dimensional space.
#[derive(Debug)]
pub struct GrassCtx {
    s: usize,
    l: usize,
    vars: Vec<Vec<usize>>,
    names: VarNames,
    /// Reduced echelon basis of the quadratic relations, over the rationals.
    relations: Vec<Poly<Rationals>>,
}

impl GrassCtx {
    /// Fails unless `1 <= s <= l`; an oracle mismatch signals a wrong relation space.
    pub fn new(s: usize, l: usize) -> Result<Arc<Self>> {
        if s == 0 || s > l {
            return Err(Error::InvalidArgument(format!("need 1 <= s <= l, got s={s}, l={l}")));
        }
        if s > 8 || l > 12 {
            return Err(Error::InvalidArgument(format!("G({s},{}) is beyond desk scale", l + 1)));
        }
        let vars = subsets(l + 1, s);
        let names = VarNames::new(vars.clone());
        let mut ctx = Self { s, l, vars, names, relations: Vec::new() };
        ctx.relations = ctx.compute_relations()?;
        Ok(Arc::new(ctx))
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn l(&self) -> usize {
        self.l
    }
    /// Dimension `s (l+1-s)`.
    pub fn dim(&self) -> usize {
        self.s * (self.l + 1 - self.s)
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    /// Index sets of the Plücker variables, lexicographically ordered.
    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }
    pub fn names(&self) -> &VarNames {
        &self.names
    }
    pub fn canonical_twist(&self) -> i64 {
        -(self.l as i64 + 1)
    }
    pub fn is_projective_space(&self) -> bool {
        self.s == 1 || self.s == self.l
    }
    pub fn relations(&self) -> &[Poly<Rationals>] {
        &self.relations
    }
    pub fn weyl_dim(&self, d: u32) -> u128 {
        weyl_dim(self.s, self.l + 1, d)
    }
    pub fn num_monomials(&self, d: u32) -> u128 {
        binomial((self.nvars() as u32 + d).saturating_sub(1) as u64, d as u64)
    }

    /// Plücker coordinates (maximal minors) of an `s x (l+1)` matrix.
    pub fn plucker_point<F: Field>(&self, f: &F, m: &[Vec<F::Elem>]) -> Vec<F::Elem> {
        self.vars
            .iter()
            .map(|cols| {
                let sub: Vec<Vec<F::Elem>> = m.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
                det_by_subsets(
                    &sub,
                    &f.zero(),
                    &f.one(),
                    |a, b| f.mul(a, b),
                    |a, b| f.add(a, b),
                    |a| f.neg(a),
                    |a| f.is_zero(a),
                )
            })
            .collect()
    }

    fn random_points(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Rational>> {
        (0..count)
            .map(|_| {
                let m: Vec<Vec<Rational>> = (0..self.s)
                    .map(|_| {
                        (0..=self.l)
                            .map(|_| Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=7).into()))
                            .collect()
                    })
                    .collect();
                self.plucker_point(&Rationals, &m)
            })
            .collect()
    }

    /// Kernel of evaluation at the Plücker images of random matrices.
    ///
    /// The kernel is found modulo a large prime and lifted by rational
    /// reconstruction, then certified over the rationals: every lifted relation
    /// must vanish exactly on both batches of points, and the modular rank of the
    /// evaluation matrix bounds its rational rank from below, so the lifted
    /// relations span the whole rational kernel.
    fn compute_relations(&self) -> Result<Vec<Poly<Rationals>>> {
        let n = self.nvars();
        let idx = MonomialIndex::new(n, 2);
        if self.is_projective_space() {
            return Ok(Vec::new());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RELATION_SEED);
        let count = 2 * idx.len();
        let pairs: Vec<(usize, usize)> = idx.basis().iter().map(two_vars).collect();
        let first = self.random_points(&mut rng, count);
        let second = self.random_points(&mut rng, count);
        let expected = (idx.len() as u128 - self.weyl_dim(2)) as usize;

        let fp = PrimeField::new(random_prime(&mut rng, 62))?;
        let rows: Vec<Vec<u64>> = first
            .iter()
            .map(|pt| {
                let pt: Vec<u64> = pt.iter().map(|x| fp.from_rational(x)).collect::<Result<_>>()?;
                Ok(pairs.iter().map(|&(i, j)| fp.mul(&pt[i], &pt[j])).collect())
            })
            .collect::<Result<_>>()?;
        let kernel = SparseMatrix::from_dense(fp, &rows).kernel();
        if kernel.dim() != expected {
            return Err(Error::OracleMismatch {
                what: format!("dim I_2 of G({},{})", self.s, self.l + 1),
                computed: kernel.dim(),
                oracle: expected,
            });
        }
        let mut relations = Vec::with_capacity(kernel.dim());
        for row in kernel.basis() {
            let terms = row
                .iter()
                .map(|(c, x)| {
                    let q = rational_reconstruct(*x, fp.modulus()).ok_or_else(|| {
                        Error::Inconsistent("Plücker relation coefficient has no small rational lift".into())
                    })?;
                    Ok((idx.monomial(*c).clone(), q))
                })
                .collect::<Result<Vec<_>>>()?;
            relations.push(Poly::from_terms(Rationals, n, terms));
        }
        for pt in first.iter().chain(&second) {
            for r in &relations {
                if !r.evaluate(pt)?.is_zero() {
                    return Err(Error::Inconsistent("Plücker relation fails on an evaluation point".into()));
                }
            }
        }
        Ok(relations)
    }

    /// Affine chart where the Plücker coordinate `pivot` is 1.
    pub fn chart<F: Field>(&self, field: &F, pivot: &[usize]) -> Result<Chart<F>> {
        Chart::new(self, field, pivot)
    }

    /// The chart `{0..s-1}`.
    pub fn default_chart_pivot(&self) -> Vec<usize> {
        (0..self.s).collect()
    }
    /// The chart `{l+1-s..l}`.
    pub fn last_chart_pivot(&self) -> Vec<usize> {
        (self.l + 1 - self.s..=self.l).collect()
    }
}

fn two_vars(m: &Monomial) -> (usize, usize) {
    let mut it = m.exps().iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize));
    (it.next().unwrap(), it.next().unwrap())
}

/// Degree-`d` slice of the coordinate ring: `S_d = (polynomials of degree d) / I_d`.
///
/// Coordinates on `S_d` are taken against the standard monomials, the non-pivot
/// columns of the echelon basis of `I_d`. The normal form of a pivot monomial is
/// minus the rest of its echelon row.
#[derive(Debug)]
pub struct GradedPiece<F: Field> {
    degree: u32,
    monomials: MonomialIndex,
    ideal: Subspace<F>,
    standard: Vec<usize>,
    /// Position of each monomial among the standard ones, or `u32::MAX`.
    std_pos: Vec<u32>,
}

impl<F: Field> GradedPiece<F> {
    fn build(ctx: &GrassCtx, field: &F, rels: &[Poly<F>], d: u32) -> Result<Self> {
        let n = ctx.nvars();
        let monomials = MonomialIndex::new(n, d);
        let ideal = if d < 2 || rels.is_empty() {
            Subspace::zero(field.clone(), monomials.len())
        } else {
            let mut rows = Vec::new();
            for m in crate::poly::graded_basis(n, d - 2) {
                for r in rels {
                    rows.push(r.mul_monomial(&m, &field.one()).coords(&monomials)?);
                }
            }
            Subspace::span(field.clone(), monomials.len(), rows)
        };
        Self::from_ideal(ctx, d, monomials, ideal)
    }

    pub(crate) fn from_ideal(ctx: &GrassCtx, d: u32, monomials: MonomialIndex, ideal: Subspace<F>) -> Result<Self> {
        let standard = ideal.non_pivots();
        let oracle = ctx.weyl_dim(d);
        if standard.len() as u128 != oracle {
            return Err(Error::OracleMismatch {
                what: format!("dim S_{d} of G({},{})", ctx.s(), ctx.l() + 1),
                computed: standard.len(),
                oracle: oracle as usize,
            });
        }
        let mut std_pos = vec![u32::MAX; monomials.len()];
        for (k, &c) in standard.iter().enumerate() {
            std_pos[c] = k as u32;
        }
        Ok(Self { degree: d, monomials, ideal, standard, std_pos })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
    /// `dim S_d`
    pub fn dim(&self) -> usize {
        self.standard.len()
    }
    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }
    pub fn ideal_dim(&self) -> usize {
        self.ideal.dim()
    }
    pub fn ideal(&self) -> &Subspace<F> {
        &self.ideal
    }
    pub fn monomials(&self) -> &MonomialIndex {
        &self.monomials
    }
    pub fn field(&self) -> &F {
        self.ideal.field()
    }
    /// The `k`-th standard monomial.
    pub fn standard_monomial(&self, k: usize) -> &Monomial {
        self.monomials.monomial(self.standard[k])
    }
    pub fn standard_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.standard.iter().map(|&c| self.monomials.monomial(c))
    }

    /// `acc += c * nf(m)` for a degree-`d` monomial, into a dense vector of length `dim`.
    pub fn accumulate_monomial(&self, acc: &mut [F::Elem], m: &Monomial, c: &F::Elem) -> Result<()> {
        let f = self.field();
        let i = self
            .monomials
            .position(m)
            .ok_or_else(|| Error::InvalidArgument(format!("monomial of degree {} in S_{}", m.degree(), self.degree)))?;
        let k = self.std_pos[i];
        if k != u32::MAX {
            let slot = &mut acc[k as usize];
            *slot = f.add(slot, c);
            return Ok(());
        }
        let row = self.ideal.pivot_row_of(i).expect("non-standard monomial is a pivot");
        let mc = f.neg(c);
        for (col, v) in &row[1..] {
            let slot = &mut acc[self.std_pos[*col] as usize];
            f.add_mul_assign(slot, &mc, v);
        }
        Ok(())
    }

    /// Normal form of a degree-`d` polynomial as a dense coordinate vector.
    pub fn nf_dense(&self, p: &Poly<F>) -> Result<Vec<F::Elem>> {
        let mut acc = vec![self.field().zero(); self.dim()];
        for (m, c) in p.terms() {
            self.accumulate_monomial(&mut acc, m, c)?;
        }
        Ok(acc)
    }

    /// Normal form as a sparse coordinate vector.
    pub fn nf(&self, p: &Poly<F>) -> Result<SparseRow<F::Elem>> {
        if !p.is_homogeneous_of(self.degree) {
            return Err(Error::InvalidArgument(format!("polynomial is not homogeneous of degree {}", self.degree)));
        }
        if p.len() < 4 {
            let mut out = Vec::new();
            for (m, c) in p.terms() {
                let mut one = vec![];
                self.sparse_nf_monomial(m, c, &mut one)?;
                out = crate::linalg::sparse::axpy(self.field(), &out, &self.field().one(), &one);
            }
            return Ok(out);
        }
        Ok(crate::linalg::sparse::dense_to_sparse(self.field(), &self.nf_dense(p)?))
    }

    fn sparse_nf_monomial(&self, m: &Monomial, c: &F::Elem, out: &mut SparseRow<F::Elem>) -> Result<()> {
        let f = self.field();
        let i = self
            .monomials
            .position(m)
            .ok_or_else(|| Error::InvalidArgument("monomial outside the degree".into()))?;
        let k = self.std_pos[i];
        if k != u32::MAX {
            out.push((k as usize, c.clone()));
            return Ok(());
        }
        let row = self.ideal.pivot_row_of(i).expect("non-standard monomial is a pivot");
        let mc = f.neg(c);
        for (col, v) in &row[1..] {
            out.push((self.std_pos[*col] as usize, f.mul(&mc, v)));
        }
        out.sort_by_key(|e| e.0);
        Ok(())
    }

    /// The polynomial `sum_k v_k b_k` over standard monomials `b_k`.
    pub fn lift(&self, v: &[(usize, F::Elem)]) -> Poly<F> {
        let n = self.monomials.monomial(0).nvars();
        Poly::from_terms(
            self.field().clone(),
            n,
            v.iter().map(|(k, c)| (self.standard_monomial(*k).clone(), c.clone())),
        )
    }

    pub fn lift_dense(&self, v: &[F::Elem]) -> Poly<F> {
        self.lift(&crate::linalg::sparse::dense_to_sparse(self.field(), v))
    }

    /// Whether a degree-`d` polynomial lies in `I_d`.
    pub fn in_ideal(&self, p: &Poly<F>) -> Result<bool> {
        Ok(self.nf(p)?.is_empty())
    }
}

/// The coordinate ring of a Grassmannian over a fixed field, with a shared cache of graded pieces.
#[derive(Debug)]
pub struct CoordRing<F: Field> {
    ctx: Arc<GrassCtx>,
    field: F,
    relations: Vec<Poly<F>>,
    pieces: RwLock<BTreeMap<u32, Arc<GradedPiece<F>>>>,
    charts: RwLock<HashMap<(Vec<usize>, u32), Arc<ChartSystem<F>>>>,
}

impl<F: Field> CoordRing<F> {
    /// Fails with an unlucky-prime error when a relation coefficient has a vanishing denominator.
    pub fn new(ctx: Arc<GrassCtx>, field: F) -> Result<Self> {
        let relations = ctx
            .relations()
            .iter()
            .map(|r| r.map_field(&field, |q| field.from_rational(q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ctx,
            field,
            relations,
            pieces: RwLock::new(BTreeMap::new()),
            charts: RwLock::new(HashMap::new()),
        })
    }

    pub fn ctx(&self) -> &Arc<GrassCtx> {
        &self.ctx
    }
    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.ctx.nvars()
    }
    /// Quadratic relations over this field.
    pub fn relations(&self) -> &[Poly<F>] {
        &self.relations
    }

    /// `S_d`, built on first use; the construction asserts `dim S_d = weyl_dim(d)`.
    pub fn piece(&self, d: u32) -> Result<Arc<GradedPiece<F>>> {
        if let Some(p) = self.pieces.read().expect("cache lock").get(&d) {
            return Ok(p.clone());
        }
        let p = Arc::new(GradedPiece::build(&self.ctx, &self.field, &self.relations, d)?);
        self.pieces.write().expect("cache lock").entry(d).or_insert(p.clone());
        Ok(p)
    }

    /// Installs a piece obtained elsewhere (e.g. from a cache file) after validation.
    pub fn insert_piece(&self, ideal: Subspace<F>, d: u32) -> Result<Arc<GradedPiece<F>>> {
        let monomials = MonomialIndex::new(self.nvars(), d);
        if ideal.ambient() != monomials.len() {
            return Err(Error::DimensionMismatch { expected: monomials.len(), got: ideal.ambient() });
        }
        let p = Arc::new(GradedPiece::from_ideal(&self.ctx, d, monomials, ideal)?);
        self.pieces.write().expect("cache lock").insert(d, p.clone());
        Ok(p)
    }

    pub fn cached_degrees(&self) -> Vec<u32> {
        self.pieces.read().expect("cache lock").keys().copied().collect()
    }

    /// Normal form of a homogeneous polynomial in `S_d`.
    pub fn normal_form(&self, p: &Poly<F>, d: u32) -> Result<SparseRow<F::Elem>> {
        self.piece(d)?.nf(p)
    }

    pub fn chart(&self, pivot: &[usize]) -> Result<Chart<F>> {
        Chart::new(&self.ctx, &self.field, pivot)
    }

    fn chart_system(&self, chart: &Chart<F>, d: u32) -> Result<Arc<ChartSystem<F>>> {
        let key = (chart.pivot.clone(), d);
        if let Some(s) = self.charts.read().expect("cache lock").get(&key) {
            return Ok(s.clone());
        }
        let sys = Arc::new(ChartSystem::build(chart, &*self.piece(d)?)?);
        self.charts.write().expect("cache lock").insert(key, sys.clone());
        Ok(sys)
    }

    /// The unique `F` in `S_d` (as standard coordinates) whose chart restriction is `g`.
    pub fn chart_solve(&self, chart: &Chart<F>, g: &Poly<F>, d: u32) -> Result<SparseRow<F::Elem>> {
        self.chart_system(chart, d)?.solve(g)
    }
}

/// Affine chart `p_pivot = 1`. Local coordinates `x_{r,k}`, `r < s`, `k < l+1-s`, are
/// numbered row-major; the chart matrix has identity columns at `pivot` and the
/// column `(x_{0,k}, ..., x_{s-1,k})` at the `k`-th remaining index.
#[derive(Clone, Debug)]
pub struct Chart<F: Field> {
    pivot: Vec<usize>,
    free_cols: Vec<usize>,
    /// `p_I(x)` for every Plücker variable `I`.
    images: Vec<Poly<F>>,
}

impl<F: Field> Chart<F> {
    fn new(ctx: &GrassCtx, field: &F, pivot: &[usize]) -> Result<Self> {
        let (s, l) = (ctx.s(), ctx.l());
        let mut sorted = pivot.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != s || sorted.iter().any(|&c| c > l) {
            return Err(Error::InvalidArgument(format!("{pivot:?} is not an {s}-subset of 0..={l}")));
        }
        let free_cols: Vec<usize> = (0..=l).filter(|c| !sorted.contains(c)).collect();
        let nloc = ctx.dim();
        let w = free_cols.len();
        let zero = Poly::zero(field.clone(), nloc);
        let one = Poly::one(field.clone(), nloc);
        let matrix: Vec<Vec<Poly<F>>> = (0..s)
            .map(|r| {
                (0..=l)
                    .map(|c| {
                        if let Some(pos) = sorted.iter().position(|&x| x == c) {
                            if pos == r {
                                one.clone()
                            } else {
                                zero.clone()
                            }
                        } else {
                            let k = free_cols.iter().position(|&x| x == c).unwrap();
                            Poly::var(field.clone(), nloc, r * w + k)
                        }
                    })
                    .collect()
            })
            .collect();
        let images = ctx
            .vars()
            .iter()
            .map(|cols| {
                let sub: Vec<Vec<Poly<F>>> = matrix.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
                det_by_subsets(&sub, &zero, &one, |a, b| a.mul(b), |a, b| a.add(b), |a| a.neg(), |a| a.is_zero())
            })
            .collect();
        Ok(Self { pivot: sorted, free_cols, images })
    }

    pub fn pivot(&self) -> &[usize] {
        &self.pivot
    }
    /// Number of local coordinates.
    pub fn nlocal(&self) -> usize {
        self.pivot.len() * self.free_cols.len()
    }
    /// Local coordinate index of `x_{r,k}`.
    pub fn coord(&self, r: usize, k: usize) -> usize {
        r * self.free_cols.len() + k
    }
    /// `p_I(x)` for each Plücker variable.
    pub fn images(&self) -> &[Poly<F>] {
        &self.images
    }

    /// Substitutes `p_I -> p_I(x)`.
    pub fn restrict(&self, f: &Poly<F>) -> Result<Poly<F>> {
        f.substitute(&self.images)
    }
}

/// Linear system `[restrict(b_j) | e_j]` over the standard monomials of one degree.
#[derive(Debug)]
struct ChartSystem<F: Field> {
    columns: HashMap<Monomial, usize>,
    nleft: usize,
    space: Subspace<F>,
}

impl<F: Field> ChartSystem<F> {
    fn build(chart: &Chart<F>, piece: &GradedPiece<F>) -> Result<Self> {
        let f = piece.field();
        let mut columns: HashMap<Monomial, usize> = HashMap::new();
        let restricted: Vec<Poly<F>> = piece
            .standard_monomials()
            .map(|m| chart.restrict(&Poly::monomial(f.clone(), m.clone(), f.one())))
            .collect::<Result<_>>()?;
        for g in &restricted {
            for (m, _) in g.terms() {
                let next = columns.len();
                columns.entry(m.clone()).or_insert(next);
            }
        }
        let nleft = columns.len();
        let rows = restricted
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let mut r: Vec<(usize, F::Elem)> = g.terms().map(|(m, c)| (columns[m], c.clone())).collect();
                r.push((nleft + j, f.one()));
                crate::linalg::sparse::canonicalize(f, r)
            })
            .collect();
        let space = Subspace::span(f.clone(), nleft + piece.dim(), rows);
        if space.basis().iter().any(|r| r[0].0 >= nleft) {
            return Err(Error::Inconsistent(format!(
                "chart restriction is not injective on S_{}",
                piece.degree()
            )));
        }
        Ok(Self { columns, nleft, space })
    }

    fn solve(&self, g: &Poly<F>) -> Result<SparseRow<F::Elem>> {
        let f = self.space.field();
        let mut v = Vec::with_capacity(g.len());
        for (m, c) in g.terms() {
            match self.columns.get(m) {
                Some(&i) => v.push((i, c.clone())),
                None => return Err(Error::NoSolution(format!("chart monomial {m:?} is not attained"))),
            }
        }
        v.sort_by_key(|e| e.0);
        let r = self.space.reduce(&v);
        if r.first().is_some_and(|e| e.0 < self.nleft) {
            return Err(Error::NoSolution("function is not the restriction of a section of this degree".into()));
        }
        Ok(r.into_iter().map(|(c, x)| (c - self.nleft, f.neg(&x))).collect())
    }
}

//! Twisted one-forms `H^0(Ω^1(2))`, twisted vector fields `H^0(Θ(e))` as
//! derivations of the coordinate ring, and the wedge map to `S_{2N-l-1}`.

use std::sync::Arc;

use rand::Rng;

use crate::cohomology::oneform_count;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grassmannian::{det_by_subsets, Chart, CoordRing, GradedPiece};
use crate::linalg::sparse::{axpy, canonicalize};
use crate::linalg::{SparseMatrix, SparseRow, Subspace};
use crate::poly::{binomial, Derivation, Monomial, Poly};

/// `sum_I L_I dp_I` with every `L_I` linear. Coordinates are `c[I*n + J]`, the
/// coefficient of `p_J` in `L_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm<F: Field> {
    n: usize,
    coords: SparseRow<F::Elem>,
}

impl<F: Field> OneForm<F> {
    pub fn from_coords(n: usize, coords: SparseRow<F::Elem>) -> Self {
        Self { n, coords }
    }

    /// From one linear polynomial per Plücker variable.
    pub fn from_polys(field: &F, coeffs: &[Poly<F>]) -> Result<Self> {
        let n = coeffs.len();
        let mut coords = Vec::new();
        for (i, p) in coeffs.iter().enumerate() {
            if !p.is_homogeneous_of(1) {
                return Err(Error::InvalidArgument("one-form coefficients must be linear".into()));
            }
            for (m, c) in p.terms() {
                let j = m.exps().iter().position(|&e| e == 1).expect("linear monomial");
                coords.push((i * n + j, c.clone()));
            }
        }
        Ok(Self { n, coords: canonicalize(field, coords) })
    }

    pub fn coords(&self) -> &[(usize, F::Elem)] {
        &self.coords
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// `L_I` for each Plücker variable `I`.
    pub fn coefficients(&self, field: &F) -> Vec<Poly<F>> {
        let n = self.n;
        let mut out = vec![Poly::zero(field.clone(), n); n];
        for (c, x) in &self.coords {
            out[c / n].add_term(Monomial::var(n, c % n), x.clone());
        }
        out
    }

    /// `sum_I L_I p_I`, which lies in `I_2` for forms on the Grassmannian.
    pub fn euler_contraction(&self, field: &F) -> Poly<F> {
        let mut out = Poly::zero(field.clone(), self.n);
        for (c, x) in &self.coords {
            let m = Monomial::var(self.n, c / self.n).mul(&Monomial::var(self.n, c % self.n));
            out.add_term(m, x.clone());
        }
        out
    }

    /// `a self + b other`
    pub fn combine(&self, field: &F, a: &F::Elem, other: &Self, b: &F::Elem) -> Self {
        let lhs = axpy(field, &[], a, &self.coords);
        Self { n: self.n, coords: axpy(field, &lhs, b, &other.coords) }
    }
}

/// A basis of twisted one-forms modulo differentials of the relations.
#[derive(Debug)]
pub struct OneFormBasis<F: Field> {
    forms: Vec<OneForm<F>>,
    /// Dimension of `{(L_I) : sum L_I p_I in I_2}` before the quotient.
    contraction_kernel_dim: usize,
    relation_differentials: usize,
}

impl<F: Field> OneFormBasis<F> {
    pub fn forms(&self) -> &[OneForm<F>] {
        &self.forms
    }
    pub fn len(&self) -> usize {
        self.forms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
    pub fn contraction_kernel_dim(&self) -> usize {
        self.contraction_kernel_dim
    }
    pub fn relation_differentials(&self) -> usize {
        self.relation_differentials
    }
}

/// Basis of `{(L_I) : sum L_I p_I in I_2}` modulo the span of `(dq/dp_I)_I`.
///
/// The count is checked against the closed form when `1 < s < l`, and against
/// `C(n, 2)` for projective space with `n` coordinates.
pub fn oneforms_basis<F: Field>(ring: &CoordRing<F>) -> Result<OneFormBasis<F>> {
    let f = ring.field();
    let n = ring.nvars();
    let s2 = ring.piece(2)?;
    let contraction = SparseMatrix::from_rows(
        f.clone(),
        s2.dim(),
        (0..n * n)
            .map(|c| {
                let m = Monomial::var(n, c / n).mul(&Monomial::var(n, c % n));
                s2.nf(&Poly::monomial(f.clone(), m, f.one()))
            })
            .collect::<Result<_>>()?,
    );
    let kernel = contraction.transpose().kernel();
    let differentials: Vec<SparseRow<F::Elem>> = ring
        .relations()
        .iter()
        .map(|q| {
            let parts: Vec<Poly<F>> = (0..n).map(|i| q.partial(i)).collect();
            OneForm::from_polys(f, &parts).map(|w| w.coords)
        })
        .collect::<Result<_>>()?;
    let dq = Subspace::span(f.clone(), n * n, differentials);
    if !kernel.contains_subspace(&dq) {
        return Err(Error::Inconsistent("relation differentials fail the contraction condition".into()));
    }
    let reps: Vec<SparseRow<F::Elem>> = kernel.basis().iter().map(|r| dq.reduce(r)).collect();
    let quotient = Subspace::span(f.clone(), n * n, reps);

    let ctx = ring.ctx();
    let oracle = if ctx.is_projective_space() {
        Some(binomial(n as u64, 2))
    } else if 1 < ctx.s() && ctx.s() < ctx.l() {
        Some(oneform_count(ctx.s(), ctx.l())?)
    } else {
        None
    };
    if let Some(o) = oracle {
        if quotient.dim() as u128 != o {
            return Err(Error::OracleMismatch {
                what: "twisted one-form count".into(),
                computed: quotient.dim(),
                oracle: o as usize,
            });
        }
    }
    let forms = quotient.basis().iter().map(|r| OneForm::from_coords(n, r.clone())).collect();
    Ok(OneFormBasis { forms, contraction_kernel_dim: kernel.dim(), relation_differentials: dq.dim() })
}

/// Ideal-preserving derivations of twist `e` modulo those with all images in the ideal.
///
/// A derivation is stored through its images in `S_{e+1}`: coordinate
/// `I * dim S_{e+1} + k` is the coefficient of the `k`-th standard monomial in `D(p_I)`.
#[derive(Debug)]
pub struct TwistedFields<F: Field> {
    twist: i32,
    source: Option<Arc<GradedPiece<F>>>,
    space: Subspace<F>,
}

impl<F: Field> TwistedFields<F> {
    pub fn twist(&self) -> i32 {
        self.twist
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    /// The `k`-th basis field as a derivation, images lifted to standard monomials.
    pub fn derivation(&self, ring: &CoordRing<F>, k: usize) -> Derivation<F> {
        self.derivation_from_coords(ring, &self.space.basis()[k])
    }

    pub fn derivation_from_coords(&self, ring: &CoordRing<F>, v: &[(usize, F::Elem)]) -> Derivation<F> {
        let n = ring.nvars();
        let f = ring.field();
        let mut images = vec![Poly::zero(f.clone(), n); n];
        if let Some(src) = &self.source {
            let w = src.dim();
            for (c, x) in v {
                images[c / w].add_term(src.standard_monomial(c % w).clone(), x.clone());
            }
        }
        Derivation::new(images).expect("images share one degree")
    }

    /// Coordinates of a derivation of this twist; fails on images of another degree.
    pub fn coords_of(&self, ring: &CoordRing<F>, d: &Derivation<F>) -> Result<SparseRow<F::Elem>> {
        let Some(src) = &self.source else {
            return Ok(Vec::new());
        };
        let w = src.dim();
        let mut out = Vec::new();
        for (i, img) in d.images().iter().enumerate() {
            for (k, x) in src.nf(img)? {
                out.push((i * w + k, x));
            }
        }
        Ok(canonicalize(ring.field(), out))
    }

    pub fn contains(&self, ring: &CoordRing<F>, d: &Derivation<F>) -> Result<bool> {
        Ok(self.space.contains(&self.coords_of(ring, d)?))
    }
}

/// The linear map `(I, b) -> nf(b * dq/dp_I)` for every relation `q`, from
/// `S_{e+1}^n` to `S_{e+2}^r`; its kernel is the space of twisted fields.
pub(crate) fn field_constraint_rows<F: Field>(ring: &CoordRing<F>, e: i32) -> Result<Vec<SparseRow<F::Elem>>> {
    let f = ring.field();
    let n = ring.nvars();
    let src = ring.piece((e + 1) as u32)?;
    let dst = ring.piece((e + 2) as u32)?;
    let partials: Vec<Vec<Poly<F>>> = ring
        .relations()
        .iter()
        .map(|q| (0..n).map(|i| q.partial(i)).collect())
        .collect();
    let w = dst.dim();
    let mut rows = Vec::with_capacity(n * src.dim());
    for i in 0..n {
        for b in src.standard_monomials() {
            let mut row = Vec::new();
            for (j, parts) in partials.iter().enumerate() {
                if parts[i].is_zero() {
                    continue;
                }
                for (k, x) in dst.nf(&parts[i].mul_monomial(b, &f.one()))? {
                    row.push((j * w + k, x));
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `H^0(Θ(e))` for `e >= -1`, realized as derivations. At `e = 0` the dimension
/// must be `(l+1)^2`, the Euler field plus `sl(l+1)`.
pub fn theta_sections<F: Field>(ring: &CoordRing<F>, e: i32) -> Result<TwistedFields<F>> {
    if e < -1 {
        return Ok(TwistedFields { twist: e, source: None, space: Subspace::zero(ring.field().clone(), 0) });
    }
    let n = ring.nvars();
    let src = ring.piece((e + 1) as u32)?;
    let ambient = n * src.dim();
    let space = if ring.relations().is_empty() {
        Subspace::full(ring.field().clone(), ambient)
    } else {
        let w = ring.piece((e + 2) as u32)?.dim() * ring.relations().len();
        SparseMatrix::from_rows(ring.field().clone(), w, field_constraint_rows(ring, e)?)
            .transpose()
            .kernel()
    };
    TwistedFields::from_space(ring, e, space)
}

impl<F: Field> TwistedFields<F> {
    /// Wraps a precomputed space of fields, re-checking its ambient dimension and
    /// the twist-0 count.
    pub fn from_space(ring: &CoordRing<F>, e: i32, space: Subspace<F>) -> Result<Self> {
        if e < -1 {
            return Ok(TwistedFields { twist: e, source: None, space: Subspace::zero(ring.field().clone(), 0) });
        }
        let src = ring.piece((e + 1) as u32)?;
        let ambient = ring.nvars() * src.dim();
        if space.ambient() != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: space.ambient() });
        }
        if e == 0 {
            let l1 = ring.ctx().l() + 1;
            if space.dim() != l1 * l1 {
                return Err(Error::OracleMismatch {
                    what: "dim of twist-0 vector fields".into(),
                    computed: space.dim(),
                    oracle: l1 * l1,
                });
            }
        }
        Ok(TwistedFields { twist: e, source: Some(src), space })
    }
}

/// The derivation induced by the matrix unit `E_{ab}` acting on the column space:
/// `p_I -> ± p_{I - b + a}` when `b in I`, `a not in I`, and `p_I -> p_I` when `a = b in I`.
pub fn matrix_unit_field<F: Field>(ring: &CoordRing<F>, a: usize, b: usize) -> Derivation<F> {
    let ctx = ring.ctx();
    let f = ring.field();
    let n = ctx.nvars();
    let images = ctx
        .vars()
        .iter()
        .map(|set| {
            if !set.contains(&b) {
                return Poly::zero(f.clone(), n);
            }
            if a == b {
                return Poly::var(f.clone(), n, ctx.names().index_of(set).unwrap());
            }
            if set.contains(&a) {
                return Poly::zero(f.clone(), n);
            }
            // replace b by a in position, then sort: sign = (-1)^{#elements strictly between}
            let mut new: Vec<usize> = set.iter().map(|&x| if x == b { a } else { x }).collect();
            new.sort_unstable();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let between = set.iter().filter(|&&x| lo < x && x < hi).count();
            let sign = if between % 2 == 0 { f.one() } else { f.neg(&f.one()) };
            Poly::monomial(f.clone(), Monomial::var(n, ctx.names().index_of(&new).unwrap()), sign)
        })
        .collect();
    Derivation::new(images).expect("linear images")
}

/// An element of `S_{2N-l-1}`, the wedge of `N` twisted one-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeSection<F: Field> {
    pub degree: u32,
    pub coords: SparseRow<F::Elem>,
    pub chart: Vec<usize>,
}

impl<F: Field> VolumeSection<F> {
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Degree `2N - l - 1` of the wedge of `N` twisted one-forms.
pub fn volume_degree(ring_n: usize, l: usize) -> Result<u32> {
    let d = 2 * ring_n as i64 - l as i64 - 1;
    u32::try_from(d).map_err(|_| Error::InvalidArgument(format!("wedge degree {d} is negative")))
}

/// Pulls `N` forms back to `chart`, takes the determinant of their coefficient
/// matrix and solves for the section of `O(2N-l-1)` restricting to it.
pub fn wedge_volume<F: Field>(ring: &CoordRing<F>, forms: &[OneForm<F>], chart: &Chart<F>) -> Result<VolumeSection<F>> {
    let ctx = ring.ctx();
    let big_n = ctx.dim();
    if forms.len() != big_n {
        return Err(Error::InvalidArgument(format!("wedge needs {big_n} forms, got {}", forms.len())));
    }
    let f = ring.field();
    let nloc = chart.nlocal();
    let zero = Poly::zero(f.clone(), nloc);
    let one = Poly::one(f.clone(), nloc);
    let dp: Vec<Vec<Poly<F>>> = chart.images().iter().map(|p| (0..nloc).map(|k| p.partial(k)).collect()).collect();
    let matrix: Vec<Vec<Poly<F>>> = forms
        .iter()
        .map(|w| {
            let coeffs = w.coefficients(f);
            let mut row = vec![zero.clone(); nloc];
            for (i, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let rc = chart.restrict(c)?;
                for k in 0..nloc {
                    if !dp[i][k].is_zero() {
                        row[k] = row[k].add(&rc.mul(&dp[i][k]));
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let g = det_by_subsets(&matrix, &zero, &one, |a, b| a.mul(b), |a, b| a.add(b), |a| a.neg(), |a| a.is_zero());
    let degree = volume_degree(big_n, ctx.l())?;
    let coords = ring.chart_solve(chart, &g, degree).map_err(|e| match e {
        Error::NoSolution(msg) => Error::Inconsistent(format!("wedge is not a global section: {msg}")),
        other => other,
    })?;
    Ok(VolumeSection { degree, coords, chart: chart.pivot().to_vec() })
}

/// Outcome of sampling decomposable wedges.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WedgeSpan {
    pub samples: usize,
    pub span_dim: usize,
    pub target_dim: usize,
    /// Span dimension after each sample.
    pub history: Vec<usize>,
}

impl WedgeSpan {
    pub fn surjective(&self) -> bool {
        self.span_dim == self.target_dim
    }
}

/// Span of `samples` decomposable wedges `w_1 ^ ... ^ w_N`, each `w_i` a
/// random integer combination of `pool` with coefficients in `[-COEFF, COEFF]`.
/// A pool smaller than `N` spans nothing.
pub fn wedge_span<F: Field, R: Rng + ?Sized>(
    ring: &CoordRing<F>,
    pool: &[OneForm<F>],
    chart: &Chart<F>,
    samples: usize,
    rng: &mut R,
) -> Result<WedgeSpan> {
    const COEFF: i64 = 1000;
    let f = ring.field();
    let big_n = ring.ctx().dim();
    let degree = volume_degree(big_n, ring.ctx().l())?;
    let target_dim = ring.piece(degree)?.dim();
    let mut span = Subspace::zero(f.clone(), target_dim);
    let mut history = Vec::with_capacity(samples);
    for _ in 0..samples {
        if pool.len() >= big_n && span.dim() < target_dim {
            let forms: Vec<OneForm<F>> = (0..big_n)
                .map(|_| {
                    let mut acc = OneForm::from_coords(ring.nvars(), Vec::new());
                    for w in pool {
                        acc = acc.combine(f, &f.one(), w, &f.from_i64(rng.gen_range(-COEFF..=COEFF)));
                    }
                    acc
                })
                .collect();
            let w = wedge_volume(ring, &forms, chart)?;
            if !span.contains(&w.coords) {
                span = span.extend(vec![w.coords]);
            }
        }
        history.push(span.dim());
    }
    Ok(WedgeSpan { samples, span_dim: span.dim(), target_dim, history })
}

/// Whether sampled wedges of basis one-forms span all of `S_{2N-l-1}`.
pub fn wedge_surjectivity_check<F: Field, R: Rng + ?Sized>(ring: &CoordRing<F>, samples: usize, rng: &mut R) -> Result<WedgeSpan> {
    let basis = oneforms_basis(ring)?;
    let chart = ring.chart(&ring.ctx().default_chart_pivot())?;
    wedge_span(ring, basis.forms(), &chart, samples, rng)
}

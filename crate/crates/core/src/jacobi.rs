//! Pseudo-Jacobi ideals of a hypersurface section, their quotient rings, the
//! multiplication pairing into the socle, and the two triviality tests for a
//! first-order deformation.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rational, Rationals};
use crate::forms::{field_constraint_rows, wedge_volume, OneForm};
use crate::grassmannian::{Chart, CoordRing, GradedPiece};
use crate::linalg::sparse::{canonicalize, dense_to_sparse};
use crate::linalg::{SparseMatrix, SparseRow, Subspace};
use crate::poly::{Monomial, Poly};

/// `X = (σ = 0)` with `σ` a section of `O(a)`.
#[derive(Debug)]
pub struct Hypersurface<F: Field> {
    ring: Arc<CoordRing<F>>,
    a: u32,
    sigma: Poly<F>,
    partials: Vec<Poly<F>>,
    pieces: RwLock<BTreeMap<u32, Arc<JacobiPiece<F>>>>,
}

/// `J_m` inside `S_m`, with a record of how it was generated.
#[derive(Debug)]
pub struct JacobiPiece<F: Field> {
    pub degree: u32,
    /// Subspace of `S_m` in standard-monomial coordinates.
    pub space: Subspace<F>,
    /// Twist `m - a` of the vector fields used.
    pub field_twist: i32,
    /// Dimension of the twisted fields of that twist.
    pub field_dim: usize,
    /// Number of `σ`-multiples `g σ`, `g` a standard monomial of `S_{m-a}`.
    pub sigma_multiples: usize,
}

impl<F: Field> JacobiPiece<F> {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    /// `dim S_m - dim J_m`
    pub fn quotient_dim(&self) -> usize {
        self.space.codim()
    }
}

/// Coset representatives of `R_m = S_m / J_m`.
#[derive(Debug)]
pub struct QuotientPiece {
    pub degree: u32,
    pub dim: usize,
    /// Standard-monomial positions in `S_m` whose classes form a basis of `R_m`.
    pub basis: Vec<usize>,
}

impl<F: Field> Hypersurface<F> {
    /// Fails unless `σ` is homogeneous of degree `a` and nonzero in `S_a`.
    pub fn new(ring: Arc<CoordRing<F>>, a: u32, sigma: Poly<F>) -> Result<Self> {
        if !sigma.is_homogeneous_of(a) {
            return Err(Error::InvalidArgument(format!("section is not homogeneous of degree {a}")));
        }
        let piece = ring.piece(a)?;
        let nf = piece.nf(&sigma)?;
        if nf.is_empty() {
            return Err(Error::Degenerate("section vanishes in S_a".into()));
        }
        let sigma = piece.lift(&nf);
        let partials = (0..ring.nvars()).map(|i| sigma.partial(i)).collect();
        Ok(Self { ring, a, sigma, partials, pieces: RwLock::new(BTreeMap::new()) })
    }

    pub fn ring(&self) -> &Arc<CoordRing<F>> {
        &self.ring
    }
    pub fn degree(&self) -> u32 {
        self.a
    }
    /// `σ` written over standard monomials.
    pub fn sigma(&self) -> &Poly<F> {
        &self.sigma
    }
    fn field(&self) -> &F {
        self.ring.field()
    }

    /// `J_m = { nf(D σ) : D a twisted field of twist m-a } + σ S_{m-a}`.
    ///
    /// Twist `-1` fields are the constant derivations, so `J_{a-1}` is spanned by
    /// the partial derivatives of `σ` that are sections; `J_m = 0` below that.
    pub fn jacobi_piece(&self, m: u32) -> Result<Arc<JacobiPiece<F>>> {
        if let Some(p) = self.pieces.read().expect("cache lock").get(&m) {
            return Ok(p.clone());
        }
        let p = Arc::new(self.build_piece(m)?);
        self.pieces.write().expect("cache lock").insert(m, p.clone());
        Ok(p)
    }

    fn build_piece(&self, m: u32) -> Result<JacobiPiece<F>> {
        let f = self.field();
        let target = self.ring.piece(m)?;
        let e = m as i32 - self.a as i32;
        if e < -1 {
            return Ok(JacobiPiece {
                degree: m,
                space: Subspace::zero(f.clone(), target.dim()),
                field_twist: e,
                field_dim: 0,
                sigma_multiples: 0,
            });
        }
        // Rows (constraint(u) | nf(D_u σ)) for every candidate field u = (I, b),
        // then (0 | nf(g σ)). Rows of the echelon form with zero constraint part
        // span exactly the images of genuine fields plus the σ-multiples.
        let src = self.ring.piece((e + 1) as u32)?;
        let n = self.ring.nvars();
        let head = if self.ring.relations().is_empty() {
            Vec::new()
        } else {
            field_constraint_rows(&self.ring, e)?
        };
        let head_width = if head.is_empty() {
            0
        } else {
            self.ring.piece((e + 2) as u32)?.dim() * self.ring.relations().len()
        };
        let mut rows: Vec<SparseRow<F::Elem>> = Vec::with_capacity(n * src.dim());
        let mut acc = vec![f.zero(); target.dim()];
        let mut unknown = 0;
        for i in 0..n {
            for b in src.standard_monomials() {
                let mut row: SparseRow<F::Elem> = head.get(unknown).cloned().unwrap_or_default();
                unknown += 1;
                self.image_into(&target, &self.partials[i], b, &mut acc)?;
                row.extend(drain_sparse(f, &mut acc).into_iter().map(|(c, x)| (c + head_width, x)));
                rows.push(row);
            }
        }
        let mut sigma_multiples = 0;
        if e >= 0 {
            let mult = self.ring.piece(e as u32)?;
            for g in mult.standard_monomials() {
                self.image_into(&target, &self.sigma, g, &mut acc)?;
                rows.push(drain_sparse(f, &mut acc).into_iter().map(|(c, x)| (c + head_width, x)).collect());
                sigma_multiples += 1;
            }
        }
        let stacked = Subspace::span(f.clone(), head_width + target.dim(), rows);
        let head_rank = stacked.basis().iter().take_while(|r| r[0].0 < head_width).count();
        let field_dim = n * src.dim() - head_rank;
        if e == 0 {
            let l1 = self.ring.ctx().l() + 1;
            if field_dim != l1 * l1 {
                return Err(Error::OracleMismatch {
                    what: "dim of twist-0 vector fields".into(),
                    computed: field_dim,
                    oracle: l1 * l1,
                });
            }
        }
        Ok(JacobiPiece {
            degree: m,
            space: stacked.vanishing_head(head_width),
            field_twist: e,
            field_dim,
            sigma_multiples,
        })
    }

    /// `acc += nf(b * p)` for a monomial `b`.
    fn image_into(&self, target: &GradedPiece<F>, p: &Poly<F>, b: &Monomial, acc: &mut [F::Elem]) -> Result<()> {
        for (m, c) in p.terms() {
            target.accumulate_monomial(acc, &m.mul(b), c)?;
        }
        Ok(())
    }

    pub fn quotient_piece(&self, m: u32) -> Result<QuotientPiece> {
        let j = self.jacobi_piece(m)?;
        let basis = j.space.non_pivots();
        Ok(QuotientPiece { degree: m, dim: basis.len(), basis })
    }

    /// Whether `nf(R)` lies in `J_a`.
    pub fn deformation_trivial(&self, r: &Poly<F>) -> Result<bool> {
        let nf = self.ring.piece(self.a)?.nf(r)?;
        Ok(self.jacobi_piece(self.a)?.space.contains(&nf))
    }

    /// `J_{2N+a-l-1}` membership of `R Ω̃`, where `Ω̃` is the wedge of `forms`.
    pub fn adjoint_membership(&self, r: &Poly<F>, forms: &[OneForm<F>], chart: &Chart<F>) -> Result<bool> {
        let vol = wedge_volume(&self.ring, forms, chart)?;
        if vol.is_zero() {
            return Err(Error::Degenerate("degenerate W: the wedge of the forms vanishes".into()));
        }
        let omega = self.ring.piece(vol.degree)?.lift(&vol.coords);
        let d = vol.degree + self.a;
        let prod = self.ring.piece(d)?.nf(&r.mul(&omega))?;
        Ok(self.jacobi_piece(d)?.space.contains(&prod))
    }

    /// Degrees `(c a, (N+1-c) a - 2(l+1), (N+1) a - 2(l+1))`.
    pub fn pairing_degrees(&self, c: u32) -> Result<(u32, u32, u32)> {
        let ctx = self.ring.ctx();
        let (n, l, a) = (ctx.dim() as i64, ctx.l() as i64, self.a as i64);
        let top = (n + 1) * a - 2 * (l + 1);
        let d1 = c as i64 * a;
        let d2 = top - d1;
        if d2 < 0 || top < 0 {
            return Err(Error::Hypothesis(format!("pairing degree {d2} is negative for c={c}")));
        }
        Ok((d1 as u32, d2 as u32, top as u32))
    }

    /// Multiplication pairing `R_{d1} x R_{d2} -> R_top` in coset bases.
    /// Refused unless [`pairing_gate`] passes.
    pub fn macaulay_pairing(&self, c: u32) -> Result<PairingData> {
        let ctx = self.ring.ctx();
        let gate = pairing_gate(ctx.s(), ctx.l(), self.a, c);
        if !gate.passed {
            return Err(Error::Hypothesis(gate.reason));
        }
        let (d1, d2, top) = self.pairing_degrees(c)?;
        let r1 = self.quotient_piece(d1)?;
        let r2 = self.quotient_piece(d2)?;
        let rt = self.quotient_piece(top)?;
        let mut data = PairingData {
            c,
            degrees: (d1, d2, top),
            dim_r1: r1.dim,
            dim_r2: r2.dim,
            socle_dim: rt.dim,
            rank: 0,
        };
        if rt.dim != 1 {
            return Ok(data);
        }
        let phi = self.socle_functional(top)?;
        let s1 = self.ring.piece(d1)?;
        let s2 = self.ring.piece(d2)?;
        let st = self.ring.piece(top)?;
        let f = self.field();
        let rows: Vec<SparseRow<F::Elem>> = r1
            .basis
            .iter()
            .map(|&i| {
                let b = s1.standard_monomial(i);
                let row: Vec<F::Elem> = r2
                    .basis
                    .iter()
                    .map(|&j| {
                        let m = b.mul(s2.standard_monomial(j));
                        let nf = st.nf(&Poly::monomial(f.clone(), m, f.one()))?;
                        let mut acc = f.zero();
                        for (k, x) in &nf {
                            f.add_mul_assign(&mut acc, x, &phi[*k]);
                        }
                        Ok(acc)
                    })
                    .collect::<Result<_>>()?;
                Ok(dense_to_sparse(f, &row))
            })
            .collect::<Result<_>>()?;
        data.rank = SparseMatrix::from_rows(f.clone(), r2.dim, rows).rank();
        Ok(data)
    }

    /// Linear functional on `S_top` with kernel `J_top`, normalized to 1 on the
    /// standard monomial spanning `R_top`. Requires `dim R_top = 1`.
    pub fn socle_functional(&self, top: u32) -> Result<Vec<F::Elem>> {
        let j = self.jacobi_piece(top)?;
        let np = j.space.non_pivots();
        if np.len() != 1 {
            return Err(Error::Hypothesis(format!("socle has dimension {}, not 1", np.len())));
        }
        let f = self.field();
        let mut w = vec![f.zero(); j.space.ambient()];
        w[np[0]] = f.one();
        for row in j.space.basis() {
            let x = row.iter().find(|(c, _)| *c == np[0]).map(|(_, x)| f.neg(x)).unwrap_or_else(|| f.zero());
            w[row[0].0] = x;
        }
        Ok(w)
    }
}

fn drain_sparse<F: Field>(f: &F, acc: &mut [F::Elem]) -> SparseRow<F::Elem> {
    let mut out = Vec::new();
    for (i, x) in acc.iter_mut().enumerate() {
        if !f.is_zero(x) {
            out.push((i, std::mem::replace(x, f.zero())));
        }
    }
    out
}

/// Dimensions and rank of one pairing computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingData {
    pub c: u32,
    pub degrees: (u32, u32, u32),
    pub dim_r1: usize,
    pub dim_r2: usize,
    pub socle_dim: usize,
    pub rank: usize,
}

impl PairingData {
    pub fn perfect(&self) -> bool {
        self.socle_dim == 1 && self.dim_r1 == self.dim_r2 && self.rank == self.dim_r1
    }
}

/// Outcome of the hypothesis gate for the pairing theorem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateOutcome {
    pub passed: bool,
    pub reason: String,
}

/// Pairing hypotheses: `a > l`, and one of `c = 0`; `c = 1`; `a >= l + c + 2`;
/// projective space (classical duality holds in every degree). The pairing
/// degree `(N+1-c) a - 2(l+1)` must be nonnegative.
pub fn pairing_gate(s: usize, l: usize, a: u32, c: u32) -> GateOutcome {
    let fail = |reason: String| GateOutcome { passed: false, reason };
    if a as usize <= l {
        return fail(format!("a > l fails: a={a}, l={l}"));
    }
    let n = (s * (l + 1 - s)) as i64;
    let d2 = (n + 1 - c as i64) * a as i64 - 2 * (l as i64 + 1);
    if d2 < 0 {
        return fail(format!("complementary degree {d2} is negative"));
    }
    let projective = s == 1 || s == l;
    let reason = if c == 0 {
        "c = 0: pairing with the socle".to_string()
    } else if c == 1 {
        "c = 1 and a > l".to_string()
    } else if a as usize >= l + c as usize + 2 {
        format!("a >= l + c + 2 ({a} >= {})", l + c as usize + 2)
    } else if projective {
        "projective space: classical duality".to_string()
    } else {
        return fail(format!("a >= l + c + 2 fails: a={a}, l={l}, c={c}"));
    };
    GateOutcome { passed: true, reason }
}

/// `a > l`, required by every theorem-grade operation.
pub fn check_degree(l: usize, a: u32) -> Result<()> {
    if a as usize <= l {
        return Err(Error::Hypothesis(format!("a > l fails: a={a}, l={l}")));
    }
    Ok(())
}

/// Rank of the multiplication `S_{(N-1)a-l-1} x S_{a-l-1} -> S_{Na-2l-2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityData {
    pub degrees: (u32, u32, u32),
    pub rank: usize,
    pub target_dim: usize,
}

impl SurjectivityData {
    pub fn surjective(&self) -> bool {
        self.rank == self.target_dim
    }
}

pub fn multiplication_surjectivity<F: Field>(ring: &CoordRing<F>, a: u32) -> Result<SurjectivityData> {
    let ctx = ring.ctx();
    check_degree(ctx.l(), a)?;
    let (n, l, a) = (ctx.dim() as u32, ctx.l() as u32, a);
    let d1 = (n - 1) * a - l - 1;
    let d2 = a - l - 1;
    let top = n * a - 2 * l - 2;
    let (p1, p2, pt) = (ring.piece(d1)?, ring.piece(d2)?, ring.piece(top)?);
    let f = ring.field();
    let mut span = Subspace::zero(f.clone(), pt.dim());
    let mut batch = Vec::new();
    'outer: for b in p1.standard_monomials() {
        for c in p2.standard_monomials() {
            batch.push(pt.nf(&Poly::monomial(f.clone(), b.mul(c), f.one()))?);
            if batch.len() >= 256 {
                span = span.extend(std::mem::take(&mut batch));
                if span.dim() == pt.dim() {
                    break 'outer;
                }
            }
        }
    }
    if !batch.is_empty() {
        span = span.extend(batch);
    }
    Ok(SurjectivityData { degrees: (d1, d2, top), rank: span.dim(), target_dim: pt.dim() })
}

/// A seeded random element of `S_d` over the rationals, written over standard
/// monomials. Each standard monomial is kept with probability `sparsity`, with
/// a coefficient `n/k`, `0 < |n| <= 9`, `1 <= k <= 3`. A zero draw is retried
/// with the next nonce.
pub fn random_section(ring: &CoordRing<Rationals>, d: u32, seed: u64, sparsity: f64) -> Result<Poly<Rationals>> {
    if !(0.0..=1.0).contains(&sparsity) || sparsity == 0.0 {
        return Err(Error::InvalidArgument(format!("sparsity {sparsity} outside (0, 1]")));
    }
    let piece = ring.piece(d)?;
    for nonce in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ nonce.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut p = Poly::zero(Rationals, ring.nvars());
        for m in piece.standard_monomials() {
            if rng.gen_bool(sparsity) {
                let num = rng.gen_range(1i64..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
                p.add_term(m.clone(), Rational::new(num.into(), rng.gen_range(1i64..=3).into()));
            }
        }
        if !p.is_zero() || piece.dim() == 0 {
            return Ok(p);
        }
    }
    unreachable!()
}

/// The Fermat hypersurface `sum x_i^a` of projective space.
pub fn fermat(ring: &CoordRing<Rationals>, a: u32) -> Poly<Rationals> {
    let n = ring.nvars();
    let mut p = Poly::zero(Rationals, n);
    for i in 0..n {
        let mut e = vec![0u8; n];
        e[i] = a as u8;
        p.add_term(Monomial::from_exps(&e), Rational::from_integer(1.into()));
    }
    p
}

/// One hypersurface reduced modulo several primes. Boolean verdicts and
/// dimensions are accepted only when every prime agrees.
#[derive(Debug)]
pub struct Certified {
    pub sigma: Poly<Rationals>,
    pub a: u32,
    pub members: Vec<Hypersurface<PrimeField>>,
}

impl Certified {
    pub fn new(rings: &[Arc<CoordRing<PrimeField>>], a: u32, sigma: Poly<Rationals>) -> Result<Self> {
        let members = rings
            .iter()
            .map(|r| Hypersurface::new(r.clone(), a, sigma.reduce_to(r.field())?))
            .collect::<Result<_>>()?;
        Ok(Self { sigma, a, members })
    }

    pub fn primes(&self) -> Vec<u64> {
        self.members.iter().map(|h| h.ring().field().modulus()).collect()
    }

    /// Runs `f` in every prime and returns the common value.
    pub fn agree<T: PartialEq + std::fmt::Debug>(
        &self,
        what: &str,
        f: impl Fn(&Hypersurface<PrimeField>) -> Result<T>,
    ) -> Result<T> {
        let mut values = Vec::with_capacity(self.members.len());
        for h in &self.members {
            values.push(f(h)?);
        }
        let first = values.remove(0);
        for (k, v) in values.iter().enumerate() {
            if *v != first {
                return Err(Error::UnluckyPrime {
                    prime: self.members[k + 1].ring().field().modulus(),
                    detail: format!("{what}: {v:?} disagrees with {first:?}"),
                });
            }
        }
        Ok(first)
    }

    pub fn quotient_dim(&self, m: u32) -> Result<usize> {
        self.agree(&format!("dim R_{m}"), |h| Ok(h.jacobi_piece(m)?.quotient_dim()))
    }

    pub fn deformation_trivial(&self, r: &Poly<Rationals>) -> Result<bool> {
        check_degree(self.members[0].ring().ctx().l(), self.a)?;
        self.agree("deformation triviality", |h| h.deformation_trivial(&r.reduce_to(h.ring().field())?))
    }

    pub fn adjoint_membership(&self, r: &Poly<Rationals>, forms: &[OneForm<Rationals>], chart: &[usize]) -> Result<bool> {
        check_degree(self.members[0].ring().ctx().l(), self.a)?;
        self.agree("adjoint membership", |h| {
            let f = h.ring().field();
            let forms = reduce_forms(f, forms)?;
            let chart = h.ring().chart(chart)?;
            h.adjoint_membership(&r.reduce_to(f)?, &forms, &chart)
        })
    }

    pub fn pairing(&self, c: u32) -> Result<PairingData> {
        self.agree(&format!("pairing c={c}"), |h| h.macaulay_pairing(c))
    }
}

pub fn reduce_forms(f: &PrimeField, forms: &[OneForm<Rationals>]) -> Result<Vec<OneForm<PrimeField>>> {
    forms
        .iter()
        .map(|w| {
            let coords = w
                .coords()
                .iter()
                .map(|(c, x)| Ok((*c, f.from_rational(x)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(OneForm::from_coords(w.nvars(), canonicalize(f, coords)))
        })
        .collect()
}

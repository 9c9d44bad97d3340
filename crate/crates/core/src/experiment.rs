//! Trials comparing the two triviality tests for a first-order deformation:
//! `R ∈ J_a` against `R Ω̃ ∈ J_{2N+a-l-1}` for the wedge `Ω̃` of `N` twisted
//! one-forms.
//!
//! Everything random is drawn over the rationals, so a trial is the same
//! mathematical object in every prime; verdicts come from [`Certified`].

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Rational, Rationals};
use crate::forms::{oneforms_basis, theta_sections, OneForm};
use crate::grassmannian::CoordRing;
use crate::jacobi::{check_degree, random_section, Certified};
use crate::poly::Poly;

/// Fresh one-form subsets tried before a trial is declared degenerate.
pub const MAX_WEDGE_RESAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawKind {
    /// `c0 σ + c1 D1(σ) + c2 D2(σ)` with `D1, D2` random twist-0 fields.
    Jacobi,
    /// Uniform over the standard monomials of `S_a`.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub index: usize,
    pub kind: DrawKind,
    pub seed: u64,
    /// `R` in the text format.
    pub r: String,
    /// Indices into the one-form basis.
    pub forms: Vec<usize>,
    /// Subsets rejected because their wedge vanished.
    pub wedge_resamples: usize,
    /// `R ∈ J_a`.
    pub trivial: bool,
    /// `R Ω̃ ∈ J`, in the first chart.
    pub adjoint_member: bool,
    /// The same membership computed in the second chart.
    pub adjoint_member_other_chart: bool,
    pub agree: bool,
    /// Period differential vanishes; implied by `trivial`, not computed.
    pub implied_period_zero: bool,
    /// Adjoint lies in the restricted image; implied by `adjoint_member`, not computed.
    pub implied_adjoint_image: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub s: usize,
    pub l: usize,
    pub a: u32,
    pub seed: u64,
    pub trials: usize,
    pub primes: Vec<u64>,
    pub sigma: String,
    pub oneform_basis_size: usize,
    pub charts: [Vec<usize>; 2],
    pub records: Vec<Trial>,
    /// `[[both true, trivial only], [adjoint only, both false]]`
    pub agreement: [[usize; 2]; 2],
    pub all_agree: bool,
    pub jacobi_draws_trivial: bool,
}

/// Seed for trial `t`; distinct trials get unrelated streams.
fn trial_seed(seed: u64, t: usize) -> u64 {
    let mut z = seed ^ (t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn small_nonzero(rng: &mut ChaCha8Rng) -> Rational {
    let n = rng.gen_range(1i64..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Rational::from_integer(n.into())
}

/// An element of `J_a`: one σ-multiple and two derivation images.
pub fn jacobi_draw(q: &CoordRing<Rationals>, sigma: &Poly<Rationals>, a: u32, seed: u64) -> Result<Poly<Rationals>> {
    let fields = theta_sections(q, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = sigma.scale(&small_nonzero(&mut rng));
    for _ in 0..2 {
        let coords: Vec<_> = (0..fields.dim()).map(|k| (k, small_nonzero(&mut rng))).collect();
        let mut v = Vec::new();
        for (k, c) in &coords {
            v = crate::linalg::sparse::axpy(&Rationals, &v, c, &fields.space().basis()[*k]);
        }
        let d = fields.derivation_from_coords(q, &v);
        r = r.add(&d.apply(sigma)?.scale(&small_nonzero(&mut rng)));
    }
    let piece = q.piece(a)?;
    Ok(piece.lift(&piece.nf(&r)?))
}

/// Runs `trials` trials: the first `ceil(trials/2)` draw `R` from `J_a`, the
/// rest uniformly. Each trial pairs `R` with a fresh random `N`-subset of the
/// one-form basis whose wedge is nonzero.
pub fn main_theorem_experiment(q: &CoordRing<Rationals>, cert: &Certified, trials: usize, seed: u64) -> Result<ExperimentReport> {
    let ctx = q.ctx().clone();
    let (s, l, a) = (ctx.s(), ctx.l(), cert.a);
    check_degree(l, a)?;
    if !(1 < s && s < l) {
        return Err(Error::Hypothesis(format!("needs 1 < s < l, got s={s}, l={l}")));
    }
    let charts = [ctx.default_chart_pivot(), ctx.last_chart_pivot()];
    let names = ctx.names();
    let mut report = ExperimentReport {
        s,
        l,
        a,
        seed,
        trials,
        primes: cert.primes(),
        sigma: names.format(&cert.sigma),
        oneform_basis_size: 0,
        charts: charts.clone(),
        records: Vec::with_capacity(trials),
        agreement: [[0; 2]; 2],
        all_agree: true,
        jacobi_draws_trivial: true,
    };
    if trials == 0 {
        return Ok(report);
    }
    let basis = oneforms_basis(q)?;
    report.oneform_basis_size = basis.len();
    let n = ctx.dim();
    if basis.len() < n {
        return Err(Error::Inconsistent(format!("only {} one-forms for dimension {n}", basis.len())));
    }
    let jacobi_count = trials.div_ceil(2);
    for t in 0..trials {
        let tseed = trial_seed(seed, t);
        let kind = if t < jacobi_count { DrawKind::Jacobi } else { DrawKind::Generic };
        let r = match kind {
            DrawKind::Jacobi => jacobi_draw(q, &cert.sigma, a, tseed)?,
            DrawKind::Generic => random_section(q, a, tseed, 1.0)?,
        };
        let trivial = cert.deformation_trivial(&r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(tseed ^ 0x5eed);
        let mut resamples = 0;
        let (indices, member, other) = loop {
            let mut idx = sample(&mut rng, basis.len(), n).into_vec();
            idx.sort_unstable();
            let forms: Vec<OneForm<Rationals>> = idx.iter().map(|&i| basis.forms()[i].clone()).collect();
            match cert.adjoint_membership(&r, &forms, &charts[0]) {
                Ok(member) => {
                    let other = cert.adjoint_membership(&r, &forms, &charts[1])?;
                    break (idx, member, other);
                }
                Err(Error::Degenerate(_)) if resamples < MAX_WEDGE_RESAMPLES => resamples += 1,
                Err(e) => return Err(e),
            }
        };
        if member != other {
            return Err(Error::Inconsistent(format!("trial {t}: adjoint membership differs between charts")));
        }
        let agree = trivial == member;
        report.agreement[usize::from(!trivial)][usize::from(!member)] += 1;
        report.all_agree &= agree;
        if kind == DrawKind::Jacobi {
            report.jacobi_draws_trivial &= trivial && member;
        }
        report.records.push(Trial {
            index: t,
            kind,
            seed: tseed,
            r: names.format(&r),
            forms: indices,
            wedge_resamples: resamples,
            trivial,
            adjoint_member: member,
            adjoint_member_other_chart: other,
            agree,
            implied_period_zero: trivial,
            implied_adjoint_image: member,
        });
    }
    Ok(report)
}

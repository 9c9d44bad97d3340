use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::ValueEnum;
use pjring::cache::Cache;
use pjring::cohomology::{self, Verdict};
use pjring::experiment::{main_theorem_experiment, MAX_WEDGE_RESAMPLES};
use pjring::field::{is_prime, seeded_primes, DEFAULT_PRIME_BITS};
use pjring::forms::{oneforms_basis, volume_degree, wedge_surjectivity_check, OneForm};
use pjring::grassmannian::{CoordRing, GrassCtx};
use pjring::jacobi::{check_degree, multiplication_surjectivity, pairing_gate, random_section, Certified, GateOutcome};
use pjring::poly::Poly;
use pjring::{PrimeField, Rationals};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{Report, Table};

pub const EXIT_ORACLE: u8 = 2;
pub const EXIT_GATE: u8 = 3;
pub const EXIT_VIOLATION: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrimePolicy {
    /// One prime drawn from the seed.
    Random,
    /// The prime given by `--prime`.
    Fixed,
    /// Two primes drawn from the seed; every verdict must agree in both.
    Certify,
}

impl PrimePolicy {
    fn name(self) -> &'static str {
        match self {
            PrimePolicy::Random => "random",
            PrimePolicy::Fixed => "fixed",
            PrimePolicy::Certify => "certify",
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub exit: u8,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, exit: 0 }
    }
}

/// Settings shared by every subcommand.
pub struct Env {
    pub seed: u64,
    pub policy: PrimePolicy,
    pub fixed_prime: Option<u64>,
    pub cache: Option<Cache>,
}

impl Env {
    pub fn primes(&self) -> anyhow::Result<Vec<u64>> {
        Ok(match self.policy {
            PrimePolicy::Random => seeded_primes(self.seed, 1, DEFAULT_PRIME_BITS),
            PrimePolicy::Certify => seeded_primes(self.seed, 2, DEFAULT_PRIME_BITS),
            PrimePolicy::Fixed => {
                let p = self.fixed_prime.context("--prime-policy fixed needs --prime")?;
                if !is_prime(p) || p >= 1 << 62 {
                    bail!("--prime {p} is not a prime below 2^62");
                }
                vec![p]
            }
        })
    }

    fn stamp(&self, report: &mut Report) -> anyhow::Result<()> {
        report.seed = Some(self.seed);
        report.prime_policy = self.policy.name();
        report.primes = self.primes()?;
        Ok(())
    }

    /// One ring per prime, with `S_0..=S_warm` loaded through the cache when there is one.
    fn rings(&self, ctx: &Arc<GrassCtx>, warm: u32) -> anyhow::Result<Vec<Arc<CoordRing<PrimeField>>>> {
        self.primes()?
            .into_iter()
            .map(|p| {
                let ring = CoordRing::new(ctx.clone(), PrimeField::new(p)?)?;
                if let Some(cache) = &self.cache {
                    for d in 0..=warm {
                        cache.graded_piece(&ring, d)?;
                    }
                }
                Ok(Arc::new(ring))
            })
            .collect()
    }
}

/// The common value of `f` over all rings, or an unlucky-prime error.
fn agree<T: PartialEq + std::fmt::Debug>(
    rings: &[Arc<CoordRing<PrimeField>>],
    what: &str,
    f: impl Fn(&CoordRing<PrimeField>) -> pjring::Result<T>,
) -> anyhow::Result<T> {
    let mut first = None;
    for ring in rings {
        let v = f(ring)?;
        match &first {
            None => first = Some(v),
            Some(u) if *u != v => {
                return Err(pjring::Error::UnluckyPrime {
                    prime: ring.field().modulus(),
                    detail: format!("{what}: {v:?} disagrees with {u:?}"),
                }
                .into())
            }
            Some(_) => {}
        }
    }
    first.context("no primes")
}

fn refused(mut report: Report, gate: GateOutcome) -> Outcome {
    report.result = json!({ "refused": gate.reason });
    report.gate = Some(gate);
    Outcome { report, exit: EXIT_GATE }
}

fn degree_gate(l: usize, a: u32) -> GateOutcome {
    match check_degree(l, a) {
        Ok(()) => GateOutcome { passed: true, reason: format!("a > l ({a} > {l})") },
        Err(e) => GateOutcome { passed: false, reason: e.to_string() },
    }
}

pub fn ring_dims(env: &Env, s: usize, l: usize, dmax: u32) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("ring-dims", s, l);
    env.stamp(&mut report)?;
    let rings = env.rings(&ctx, 0)?;
    let mut rows = Vec::new();
    let mut table = Table { header: vec!["d", "monomials", "dim_I", "dim_S", "weyl_dim"], rows: Vec::new() };
    for d in 0..=dmax {
        let (mono, ideal, dim) = agree(&rings, &format!("dim S_{d}"), |ring| {
            let piece = match &env.cache {
                Some(c) => c.graded_piece(ring, d)?,
                None => ring.piece(d)?,
            };
            Ok((piece.num_monomials(), piece.ideal_dim(), piece.dim()))
        })?;
        let weyl = ctx.weyl_dim(d);
        if dim as u128 != weyl {
            return Err(pjring::Error::OracleMismatch { what: format!("dim S_{d}"), computed: dim, oracle: weyl as usize }.into());
        }
        rows.push(json!({ "d": d, "monomials": mono, "dim_I": ideal, "dim_S": dim, "weyl_dim": weyl as u64 }));
        table.rows.push(vec![d.to_string(), mono.to_string(), ideal.to_string(), dim.to_string(), weyl.to_string()]);
    }
    report.result = json!({ "rows": rows, "all_match": true });
    report.table = Some(table);
    Ok(Outcome::ok(report))
}

fn hypersurface(env: &Env, ctx: &Arc<GrassCtx>, a: u32, sparsity: f64, warm: u32) -> anyhow::Result<(CoordRing<Rationals>, Certified)> {
    let q = CoordRing::new(ctx.clone(), Rationals)?;
    let sigma = random_section(&q, a, env.seed, sparsity)?;
    let rings = env.rings(ctx, warm)?;
    let cert = Certified::new(&rings, a, sigma)?;
    Ok((q, cert))
}

pub fn macaulay_check(env: &Env, s: usize, l: usize, a: u32, c: u32, sparsity: f64) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("macaulay-check", s, l);
    report.a = Some(a);
    env.stamp(&mut report)?;
    let gate = pairing_gate(s, l, a, c);
    if !gate.passed {
        return Ok(refused(report, gate));
    }
    report.gate = Some(gate);
    let top = ((ctx.dim() + 1) as u32 * a).saturating_sub(2 * (l as u32 + 1));
    let (_, cert) = hypersurface(env, &ctx, a, sparsity, top)?;
    let p = cert.pairing(c)?;
    let perfect = p.perfect();
    report.result = json!({
        "c": p.c,
        "degrees": { "d1": p.degrees.0, "d2": p.degrees.1, "top": p.degrees.2 },
        "dim_r1": p.dim_r1,
        "dim_r2": p.dim_r2,
        "socle_dim": p.socle_dim,
        "rank": p.rank,
        "dims_equal": p.dim_r1 == p.dim_r2,
        "verdict": if perfect { "perfect" } else { "defective" },
        "sigma": ctx.names().format(&cert.sigma),
    });
    Ok(Outcome { report, exit: if perfect { 0 } else { EXIT_VIOLATION } })
}

fn experiment_gate(s: usize, l: usize, a: u32) -> GateOutcome {
    let g = degree_gate(l, a);
    if !g.passed {
        return g;
    }
    if !(1 < s && s < l) {
        return GateOutcome { passed: false, reason: format!("needs 1 < s < l, got s={s}, l={l}") };
    }
    GateOutcome { passed: true, reason: format!("{} and 1 < s < l", g.reason) }
}

/// Degree of the pseudo-Jacobi piece that adjoint membership is tested in.
fn adjoint_degree(ctx: &GrassCtx, a: u32) -> anyhow::Result<u32> {
    Ok(volume_degree(ctx.dim(), ctx.l())? + a)
}

fn form_text(ctx: &GrassCtx, w: &OneForm<Rationals>) -> Vec<String> {
    w.coefficients(&Rationals).iter().map(|p| ctx.names().format(p)).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn torelli_test(env: &Env, s: usize, l: usize, a: u32, trials: usize, sparsity: f64, bundle_dir: &Path) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("torelli-test", s, l);
    report.a = Some(a);
    env.stamp(&mut report)?;
    let gate = experiment_gate(s, l, a);
    if !gate.passed {
        return Ok(refused(report, gate));
    }
    report.gate = Some(gate);
    let (q, cert) = hypersurface(env, &ctx, a, sparsity, adjoint_degree(&ctx, a)?)?;
    let exp = main_theorem_experiment(&q, &cert, trials, env.seed)?;
    let mut table = Table {
        header: vec!["trial", "kind", "trivial", "adjoint_member", "agree", "wedge_resamples"],
        rows: Vec::new(),
    };
    for t in &exp.records {
        table.rows.push(vec![
            t.index.to_string(),
            serde_json::to_value(t.kind)?.as_str().unwrap_or_default().to_string(),
            t.trivial.to_string(),
            t.adjoint_member.to_string(),
            t.agree.to_string(),
            t.wedge_resamples.to_string(),
        ]);
    }
    let ok = exp.all_agree && exp.jacobi_draws_trivial;
    let mut bundle = None;
    if !ok {
        let basis = oneforms_basis(&q)?;
        let failing: Vec<_> = exp
            .records
            .iter()
            .filter(|t| !t.agree || (t.kind == pjring::experiment::DrawKind::Jacobi && !t.trivial))
            .map(|t| {
                let forms: Vec<Vec<String>> = t.forms.iter().map(|&i| form_text(&ctx, &basis.forms()[i])).collect();
                json!({ "trial": t, "form_coefficients": forms })
            })
            .collect();
        let path = bundle_dir.join(format!("torelli-repro-s{s}-l{l}-a{a}-seed{}.json", env.seed));
        let body = json!({
            "tool": report.tool,
            "version": report.version,
            "s": s, "l": l, "a": a,
            "seed": env.seed,
            "sparsity": sparsity,
            "primes": cert.primes(),
            "sigma": exp.sigma,
            "failing": failing,
        });
        std::fs::create_dir_all(bundle_dir)?;
        std::fs::write(&path, serde_json::to_string_pretty(&body)?)?;
        eprintln!("reproducer written to {}", path.display());
        bundle = Some(path.display().to_string());
    }
    let mut result = serde_json::to_value(&exp)?;
    result["reproducer"] = json!(bundle);
    report.result = result;
    report.table = Some(table);
    Ok(Outcome { report, exit: if ok { 0 } else { EXIT_VIOLATION } })
}

pub fn adjoint_test(
    env: &Env,
    s: usize,
    l: usize,
    a: u32,
    sparsity: f64,
    r: &str,
    forms: Option<Vec<usize>>,
) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("adjoint-test", s, l);
    report.a = Some(a);
    env.stamp(&mut report)?;
    let gate = degree_gate(l, a);
    if !gate.passed {
        return Ok(refused(report, gate));
    }
    report.gate = Some(gate);
    let (q, cert) = hypersurface(env, &ctx, a, sparsity, adjoint_degree(&ctx, a)?)?;
    let rpoly: Poly<Rationals> = match r {
        "sigma" => cert.sigma.clone(),
        "random" => random_section(&q, a, env.seed.wrapping_add(1), 1.0)?,
        text => ctx.names().parse(&Rationals, text)?,
    };
    if !rpoly.is_zero() && !rpoly.is_homogeneous_of(a) {
        bail!("R must be homogeneous of degree {a}");
    }
    let basis = oneforms_basis(&q)?;
    let n = ctx.dim();
    if basis.len() < n {
        bail!("only {} one-forms for dimension {n}", basis.len());
    }
    let trivial = cert.deformation_trivial(&rpoly)?;
    let chart = ctx.default_chart_pivot();
    let membership = |idx: &[usize]| {
        let chosen: Vec<OneForm<Rationals>> = idx.iter().map(|&i| basis.forms()[i].clone()).collect();
        cert.adjoint_membership(&rpoly, &chosen, &chart)
    };
    let (idx, member, resamples) = match forms {
        Some(idx) => {
            if idx.len() != n || idx.iter().any(|&i| i >= basis.len()) {
                bail!("--forms needs {n} indices below {}", basis.len());
            }
            let member = membership(&idx)?;
            (idx, member, 0)
        }
        // A vanishing wedge is resampled, as in torelli-test.
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
            let mut resamples = 0;
            loop {
                let mut idx = sample(&mut rng, basis.len(), n).into_vec();
                idx.sort_unstable();
                match membership(&idx) {
                    Ok(member) => break (idx, member, resamples),
                    Err(pjring::Error::Degenerate(_)) if resamples < MAX_WEDGE_RESAMPLES => resamples += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    };
    report.result = json!({
        "r": ctx.names().format(&rpoly),
        "forms": idx,
        "wedge_resamples": resamples,
        "wedge_degree": volume_degree(n, l)?,
        "membership_degree": adjoint_degree(&ctx, a)?,
        "trivial": trivial,
        "adjoint_member": member,
        "agree": trivial == member,
    });
    Ok(Outcome { report, exit: if trivial == member { 0 } else { EXIT_VIOLATION } })
}

pub fn wedge_check(env: &Env, s: usize, l: usize, samples: usize) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("wedge-check", s, l);
    env.stamp(&mut report)?;
    let rings = env.rings(&ctx, volume_degree(ctx.dim(), l)?)?;
    let span = agree(&rings, "wedge span", |ring| {
        let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
        let w = wedge_surjectivity_check(ring, samples, &mut rng)?;
        Ok((w.span_dim, w.target_dim))
    })?;
    let surjective = span.0 == span.1;
    report.result = json!({
        "samples": samples,
        "span_dim": span.0,
        "target_dim": span.1,
        "degree": volume_degree(ctx.dim(), l)?,
        "surjective": surjective,
    });
    Ok(Outcome { report, exit: if surjective { 0 } else { EXIT_ORACLE } })
}

pub fn cohomology_table(s: usize, l: usize, mmin: i64, mmax: i64) -> anyhow::Result<Outcome> {
    if mmin > mmax {
        bail!("--mmin {mmin} exceeds --mmax {mmax}");
    }
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("cohomology-table", s, l);
    let mut table = Table { header: vec!["p", "i", "m", "verdict", "dimension", "rule"], rows: Vec::new() };
    let mut rows = Vec::new();
    for (q, v, rule) in cohomology::table(&ctx, mmin..=mmax)? {
        let (verdict, dim) = match v {
            Verdict::Zero => ("zero", Some(0)),
            Verdict::Dimension(d) => ("dimension", Some(d)),
            Verdict::Unknown => ("unknown", None),
        };
        let rule = serde_json::to_value(rule)?.as_str().unwrap_or_default().to_string();
        table.rows.push(vec![
            q.p.to_string(),
            q.i.to_string(),
            q.m.to_string(),
            verdict.into(),
            dim.map(|d| d.to_string()).unwrap_or_default(),
            rule.clone(),
        ]);
        rows.push(json!({ "p": q.p, "i": q.i, "m": q.m, "verdict": verdict, "dimension": dim.map(|d| d as u64), "rule": rule }));
    }
    report.result = json!({ "dim": ctx.dim(), "rows": rows });
    report.table = Some(table);
    Ok(Outcome::ok(report))
}

pub fn surjectivity_check(env: &Env, s: usize, l: usize, a: u32) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("surjectivity-check", s, l);
    report.a = Some(a);
    env.stamp(&mut report)?;
    let gate = degree_gate(l, a);
    if !gate.passed {
        return Ok(refused(report, gate));
    }
    report.gate = Some(gate);
    let rings = env.rings(&ctx, 0)?;
    let data = agree(&rings, "multiplication rank", |ring| multiplication_surjectivity(ring, a))?;
    let surjective = data.surjective();
    report.result = json!({
        "degrees": { "d1": data.degrees.0, "d2": data.degrees.1, "target": data.degrees.2 },
        "rank": data.rank,
        "target_dim": data.target_dim,
        "surjective": surjective,
    });
    Ok(Outcome { report, exit: if surjective { 0 } else { EXIT_ORACLE } })
}

pub fn jacobi_dims(env: &Env, s: usize, l: usize, a: u32, mmax: u32, sparsity: f64) -> anyhow::Result<Outcome> {
    let ctx = GrassCtx::new(s, l)?;
    let mut report = Report::new("jacobi-dims", s, l);
    report.a = Some(a);
    env.stamp(&mut report)?;
    let (_, cert) = hypersurface(env, &ctx, a, sparsity, mmax)?;
    let mut table = Table { header: vec!["m", "dim_S", "dim_J", "dim_R"], rows: Vec::new() };
    let mut rows = Vec::new();
    for m in 0..=mmax {
        let (ds, dj) = cert.agree(&format!("dim J_{m}"), |h| {
            let j = h.jacobi_piece(m)?;
            Ok((j.space.ambient(), j.dim()))
        })?;
        table.rows.push(vec![m.to_string(), ds.to_string(), dj.to_string(), (ds - dj).to_string()]);
        rows.push(json!({ "m": m, "dim_S": ds, "dim_J": dj, "dim_R": ds - dj }));
    }
    report.result = json!({ "sigma": ctx.names().format(&cert.sigma), "rows": rows });
    report.table = Some(table);
    Ok(Outcome::ok(report))
}

pub fn default_bundle_dir() -> PathBuf {
    PathBuf::from(".")
}

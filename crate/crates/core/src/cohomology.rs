//! A conservative oracle for `h^i(G, Ω^p(m))` on a Grassmannian.
//!
//! Only a handful of rules are encoded: vanishing above degree `l`, Serre
//! duality, Kodaira vanishing for the two line bundles among the `Ω^p`, and the
//! closed forms for `h^0(O(d))` and `h^0(Ω^1(2))`. Everything else is `Unknown`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmannian::GrassCtx;
use crate::poly::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyQuery {
    /// Form degree.
    pub p: usize,
    /// Cohomological degree.
    pub i: usize,
    /// Twist.
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Zero,
    Dimension(u128),
    Unknown,
}

/// Which rule produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    HighTwist,
    Kodaira,
    DualHighTwist,
    DualKodaira,
    LineBundleSections,
    TwistedOneForms,
    NoRule,
}

/// `h^i(G, Ω^p(m))` as far as the encoded rules decide it.
pub fn vanishing(ctx: &GrassCtx, q: CohomologyQuery) -> Result<Verdict> {
    Ok(explain(ctx, q)?.0)
}

/// Verdict together with the rule that produced it.
pub fn explain(ctx: &GrassCtx, q: CohomologyQuery) -> Result<(Verdict, Rule)> {
    let n = ctx.dim();
    if q.p > n || q.i > n {
        return Err(Error::InvalidArgument(format!(
            "query (p={}, i={}) outside 0..={n}",
            q.p, q.i
        )));
    }
    if let Some(rule) = direct_zero(ctx, q) {
        return Ok((Verdict::Zero, rule));
    }
    // Serre duality h^i(Ω^p(m)) = h^{N-i}(Ω^{N-p}(-m)). Used only for i >= 1, so a
    // query for global sections of a positive twist is never declared zero.
    if q.i >= 1 {
        let dual = CohomologyQuery { p: n - q.p, i: n - q.i, m: -q.m };
        match direct_zero(ctx, dual) {
            Some(Rule::HighTwist) => return Ok((Verdict::Zero, Rule::DualHighTwist)),
            Some(_) => return Ok((Verdict::Zero, Rule::DualKodaira)),
            None => {}
        }
    }
    if q.i == 0 && q.p == 0 && q.m >= 0 {
        return Ok((Verdict::Dimension(h0_line(ctx, q.m as u32)), Rule::LineBundleSections));
    }
    if q.i == 0 && q.p == 1 && q.m == 2 && 1 < ctx.s() && ctx.s() < ctx.l() {
        return Ok((Verdict::Dimension(h0_oneforms_twist2(ctx)?), Rule::TwistedOneForms));
    }
    Ok((Verdict::Unknown, Rule::NoRule))
}

fn direct_zero(ctx: &GrassCtx, q: CohomologyQuery) -> Option<Rule> {
    let (n, l) = (ctx.dim(), ctx.l() as i64);
    if q.i > 0 && q.m > l {
        return Some(Rule::HighTwist);
    }
    // Ω^N = K and O = K(l+1): Kodaira vanishing for K twisted by an ample bundle.
    if q.i >= 1 && q.p == n && q.m > 0 {
        return Some(Rule::Kodaira);
    }
    if q.i >= 1 && q.p == 0 && q.m > -(l + 1) {
        return Some(Rule::Kodaira);
    }
    None
}

/// `h^0(O(d))`, the dimension of `S_d`.
pub fn h0_line(ctx: &GrassCtx, d: u32) -> u128 {
    ctx.weyl_dim(d)
}

/// `h^0(Ω^1(2)) = 3/(l+2) C(l+2, s+2) C(l+2, s-1)` for `1 < s < l`.
pub fn h0_oneforms_twist2(ctx: &GrassCtx) -> Result<u128> {
    oneform_count(ctx.s(), ctx.l())
}

/// [`h0_oneforms_twist2`] from `(s, l)` alone.
pub fn oneform_count(s: usize, l: usize) -> Result<u128> {
    let (s, l) = (s as u64, l as u64);
    if !(1 < s && s < l) {
        return Err(Error::InvalidArgument(format!("twisted one-form count needs 1 < s < l, got s={s}, l={l}")));
    }
    let num = 3 * binomial(l + 2, s + 2) * binomial(l + 2, s - 1);
    let den = (l + 2) as u128;
    if num % den != 0 {
        return Err(Error::Inconsistent(format!("one-form count {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

/// Verdicts over a `(p, i, m)` grid, `p` and `i` over `0..=N`.
pub fn table(ctx: &GrassCtx, m_range: std::ops::RangeInclusive<i64>) -> Result<Vec<(CohomologyQuery, Verdict, Rule)>> {
    let n = ctx.dim();
    let mut out = Vec::new();
    for m in m_range {
        for p in 0..=n {
            for i in 0..=n {
                let q = CohomologyQuery { p, i, m };
                let (v, r) = explain(ctx, q)?;
                out.push((q, v, r));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_vanishings() {
        for (s, l, a) in [(2, 3, 4), (2, 3, 5), (2, 3, 9), (2, 4, 5), (1, 4, 5), (3, 4, 12)] {
            let g = GrassCtx::new(s, l).unwrap();
            let n = g.dim();
            let q = CohomologyQuery { p: n, i: 1, m: 2 * n as i64 - a };
            assert_eq!(vanishing(&g, q).unwrap(), Verdict::Zero, "G({s},{}) a={a}", l + 1);
        }
        let g = GrassCtx::new(2, 3).unwrap();
        let q = CohomologyQuery { p: 3, i: 2, m: 5 };
        assert_eq!(explain(&g, q).unwrap(), (Verdict::Zero, Rule::HighTwist));
        assert_eq!(vanishing(&g, CohomologyQuery { p: 1, i: 0, m: 1 }).unwrap(), Verdict::Unknown);
        assert_eq!(vanishing(&g, CohomologyQuery { p: 0, i: 2, m: 2 }).unwrap(), Verdict::Zero);
        assert!(vanishing(&g, CohomologyQuery { p: 5, i: 0, m: 0 }).is_err());
    }

    #[test]
    fn closed_forms() {
        let vals: Vec<u128> = [(2, 3), (2, 4), (3, 4)]
            .iter()
            .map(|&(s, l)| h0_oneforms_twist2(&GrassCtx::new(s, l).unwrap()).unwrap())
            .collect();
        assert_eq!(vals, vec![15, 45, 45]);
        let g = GrassCtx::new(2, 3).unwrap();
        assert_eq!(h0_line(&g, 0), 1);
        assert_eq!(h0_line(&g, 4), 105);
        assert_eq!(h0_line(&g, 2 * 4 - 3 - 1), 105);
        assert!(h0_oneforms_twist2(&GrassCtx::new(1, 4).unwrap()).is_err());
        assert_eq!(
            vanishing(&g, CohomologyQuery { p: 1, i: 0, m: 2 }).unwrap(),
            Verdict::Dimension(15)
        );
    }

    #[test]
    fn oneform_count_is_at_least_dimension_and_symmetric() {
        for l in 3..=8 {
            for s in 2..l {
                let h = oneform_count(s, l).unwrap();
                assert!(h >= (s * (l + 1 - s)) as u128);
                assert_eq!(h, oneform_count(l + 1 - s, l).unwrap());
            }
        }
    }

    #[test]
    fn global_sections_of_positive_twists_are_never_zero() {
        for (s, l) in [(2, 3), (1, 4), (2, 4)] {
            let g = GrassCtx::new(s, l).unwrap();
            for (q, v, _) in table(&g, -8..=8).unwrap() {
                if q.i == 0 && q.m > 0 {
                    assert_ne!(v, Verdict::Zero, "{q:?}");
                }
            }
        }
    }
}

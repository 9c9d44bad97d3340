//! Sparse multivariate polynomials, graded monomial bases and derivations.
//!
//! Monomials are ordered graded-lexicographically: first by total degree, then
//! by exponent vector compared lexicographically, so that `x0 > x1 > ... `.
//! [`graded_basis`] lists a degree in *descending* order, which puts the
//! lex-leading monomial in column 0 of every coefficient vector.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Field, Rational, Rationals};
use crate::linalg::SparseRow;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u8; 16]>,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self { exps: SmallVec::from_elem(0, nvars), degree: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exps(exps: &[u8]) -> Self {
        Self { exps: SmallVec::from_slice(exps), degree: exps.iter().map(|&e| e as u32).sum() }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn exps(&self) -> &[u8] {
        &self.exps
    }
    pub fn exp(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    /// `self / x_i`, or `None` if `x_i` does not divide.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.degree -= 1;
        Some(m)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}
impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{:?}", self.exps.as_slice())
    }
}

/// All monomials of degree `d` in `nvars` variables, graded-lex descending.
pub fn graded_basis(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u8>, left: u32, nvars: usize, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left as u8);
            out.push(Monomial::from_exps(prefix));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            rec(prefix, left - e, nvars, out);
            prefix.pop();
        }
    }
    assert!(d <= u8::MAX as u32, "degree too large");
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(&mut Vec::with_capacity(nvars), d, nvars, &mut out);
    out
}

/// Binomial coefficient as `u128`; exact.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Position lookup for one degree's monomial basis.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    basis: Vec<Monomial>,
    pos: HashMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(nvars: usize, d: u32) -> Self {
        let basis = graded_basis(nvars, d);
        let pos = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Self { basis, pos }
    }
    pub fn len(&self) -> usize {
        self.basis.len()
    }
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }
    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.basis[i]
    }
    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.pos.get(m).copied()
    }
}

/// A polynomial with coefficients in `F`; zero coefficients are never stored.
#[derive(Clone)]
pub struct Poly<F: Field> {
    field: F,
    nvars: usize,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(field: F, nvars: usize) -> Self {
        Self { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: F, nvars: usize, c: F::Elem) -> Self {
        Self::monomial(field, Monomial::one(nvars), c)
    }

    pub fn one(field: F, nvars: usize) -> Self {
        let one = field.one();
        Self::constant(field, nvars, one)
    }

    pub fn var(field: F, nvars: usize, i: usize) -> Self {
        let one = field.one();
        Self::monomial(field, Monomial::var(nvars, i), one)
    }

    pub fn monomial(field: F, m: Monomial, c: F::Elem) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(field, nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(field: F, nvars: usize, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Polynomial with coefficient vector `row` relative to a monomial basis.
    pub fn from_coords(field: F, nvars: usize, basis: &[Monomial], row: &[(usize, F::Elem)]) -> Self {
        Self::from_terms(field, nvars, row.iter().map(|(i, c)| (basis[*i].clone(), c.clone())))
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }
    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// `self += c * m`
    pub fn add_term(&mut self, m: Monomial, c: F::Elem) {
        assert_eq!(m.nvars(), self.nvars, "variable count mismatch");
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Common degree of all terms; `None` for zero or inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = it.next()?.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        if self.field.is_zero(s) {
            return Self::zero(self.field.clone(), self.nvars);
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), self.field.mul(c, s))).collect();
        Self { field: self.field.clone(), nvars: self.nvars, terms }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect();
        Self { field: self.field.clone(), nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.field.clone(), self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), self.field.mul(c1, c2));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = &self.field;
        let terms = self
            .terms
            .iter()
            .map(|(m1, c1)| (m1.mul(m), f.mul(c1, c)))
            .filter(|(_, c)| !f.is_zero(c))
            .collect();
        Self { field: f.clone(), nvars: self.nvars, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.field.clone(), self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Self {
        let f = &self.field;
        let mut out = Self::zero(f.clone(), self.nvars);
        for (m, c) in &self.terms {
            if let Some(q) = m.div_var(i) {
                out.add_term(q, f.mul(c, &f.from_i64(m.exp(i) as i64)));
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exps()) {
                for _ in 0..e {
                    t = f.mul(&t, x);
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Replaces variable `i` by `images[i]`; all images must share a variable count.
    pub fn substitute(&self, images: &[Poly<F>]) -> Result<Poly<F>> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: images.len() });
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly<F>>> = images
            .iter()
            .map(|p| vec![Poly::one(self.field.clone(), target), p.clone()])
            .collect();
        let mut out = Poly::zero(self.field.clone(), target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(self.field.clone(), target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Sparse coefficient vector relative to `index`; fails if a term has another degree.
    pub fn coords(&self, index: &MonomialIndex) -> Result<SparseRow<F::Elem>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let i = index.position(m).ok_or_else(|| {
                Error::InvalidArgument(format!("monomial of degree {} outside the basis", m.degree()))
            })?;
            out.push((i, c.clone()));
        }
        out.sort_by_key(|e| e.0);
        Ok(out)
    }

    /// Coefficientwise image in another field.
    pub fn map_field<G: Field>(&self, target: &G, conv: impl Fn(&F::Elem) -> Result<G::Elem>) -> Result<Poly<G>> {
        let mut out = Poly::zero(target.clone(), self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), conv(c)?);
        }
        Ok(out)
    }
}

impl Poly<Rationals> {
    /// Reduction of a rational polynomial into `target`.
    pub fn reduce_to<G: Field>(&self, target: &G) -> Result<Poly<G>> {
        self.map_field(target, |q: &Rational| target.from_rational(q))
    }
}

/// A derivation of the polynomial ring, given by the images of the variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<F: Field> {
    images: Vec<Poly<F>>,
}

impl<F: Field> Derivation<F> {
    /// Fails unless all nonzero images are homogeneous of one common degree.
    pub fn new(images: Vec<Poly<F>>) -> Result<Self> {
        let mut deg = None;
        for p in images.iter().filter(|p| !p.is_zero()) {
            let d = p
                .homogeneous_degree()
                .ok_or_else(|| Error::InvalidArgument("derivation image is not homogeneous".into()))?;
            if *deg.get_or_insert(d) != d {
                return Err(Error::InvalidArgument("derivation images differ in degree".into()));
            }
        }
        Ok(Self { images })
    }

    /// `x_i -> x_i` for every variable.
    pub fn euler(field: F, nvars: usize) -> Self {
        Self { images: (0..nvars).map(|i| Poly::var(field.clone(), nvars, i)).collect() }
    }

    pub fn images(&self) -> &[Poly<F>] {
        &self.images
    }

    /// Image degree minus one; `None` for the zero derivation.
    pub fn twist(&self) -> Option<i32> {
        self.images
            .iter()
            .find(|p| !p.is_zero())
            .and_then(|p| p.homogeneous_degree())
            .map(|d| d as i32 - 1)
    }

    /// `sum_i D(x_i) * df/dx_i`
    pub fn apply(&self, f: &Poly<F>) -> Result<Poly<F>> {
        if self.images.len() != f.nvars() {
            return Err(Error::DimensionMismatch { expected: f.nvars(), got: self.images.len() });
        }
        let mut out = Poly::zero(f.field().clone(), f.nvars());
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let d = f.partial(i);
            if !d.is_zero() {
                out = out.add(&img.mul(&d));
            }
        }
        Ok(out)
    }
}

/// Names variables by index sets, as `p_{i1 i2 ...}`.
#[derive(Clone, Debug)]
pub struct VarNames {
    labels: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl VarNames {
    pub fn new(labels: Vec<Vec<usize>>) -> Self {
        let lookup = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Self { labels, lookup }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn name(&self, i: usize) -> String {
        let inner: Vec<String> = self.labels[i].iter().map(|x| x.to_string()).collect();
        format!("p_{{{}}}", inner.join(" "))
    }

    pub fn index_of(&self, label: &[usize]) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    /// Text form: `c*p_{0 1}^2*p_{2 3} + -c2*p_{0 2}`, terms in descending monomial order; `0` for zero.
    pub fn format<F: Field>(&self, p: &Poly<F>) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let f = p.field();
        let terms: Vec<String> = p
            .terms()
            .rev()
            .map(|(m, c)| {
                let mut s = f.encode(c);
                for (i, &e) in m.exps().iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s += &format!("*{}", self.name(i)),
                        _ => s += &format!("*{}^{e}", self.name(i)),
                    }
                }
                s
            })
            .collect();
        terms.join(" + ")
    }

    /// Inverse of [`format`](Self::format). Index lists may be separated by spaces or commas;
    /// a term without a leading coefficient has coefficient 1.
    pub fn parse<F: Field>(&self, field: &F, text: &str) -> Result<Poly<F>> {
        let n = self.len();
        let mut out = Poly::zero(field.clone(), n);
        let text = text.trim();
        if text == "0" {
            return Ok(out);
        }
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{text}`")));
            }
            let mut coeff = field.one();
            let mut exps = vec![0u8; n];
            for (k, factor) in term.split('*').enumerate() {
                let factor = factor.trim();
                if factor.starts_with("p_{") {
                    let (i, e) = self.parse_power(factor)?;
                    exps[i] = exps[i]
                        .checked_add(e)
                        .ok_or_else(|| Error::Parse(format!("exponent overflow in `{term}`")))?;
                } else if k == 0 {
                    coeff = field.decode(factor)?;
                } else {
                    return Err(Error::Parse(format!("unexpected factor `{factor}`")));
                }
            }
            out.add_term(Monomial::from_exps(&exps), coeff);
        }
        Ok(out)
    }

    fn parse_power(&self, factor: &str) -> Result<(usize, u8)> {
        let bad = || Error::Parse(format!("invalid variable `{factor}`"));
        let close = factor.find('}').ok_or_else(bad)?;
        let label: Vec<usize> = factor[3..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let i = self.index_of(&label).ok_or_else(bad)?;
        let rest = &factor[close + 1..];
        let e = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
        };
        Ok((i, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rational_from_i64, PrimeField};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        rational_from_i64(n)
    }

    fn random_hom(rng: &mut ChaCha8Rng, f: &PrimeField, n: usize, d: u32, terms: usize) -> Poly<PrimeField> {
        let basis = graded_basis(n, d);
        let mut p = Poly::zero(*f, n);
        for _ in 0..terms {
            let m = basis[rng.gen_range(0..basis.len())].clone();
            p.add_term(m, rng.gen_range(0..f.modulus()));
        }
        p
    }

    #[test]
    fn basis_counts_and_order() {
        assert_eq!(graded_basis(6, 0).len(), 1);
        assert_eq!(graded_basis(6, 1).len(), 6);
        assert_eq!(graded_basis(6, 2).len(), 21);
        for n in 1..6 {
            for d in 0..7 {
                let b = graded_basis(n, d);
                assert_eq!(b.len() as u128, binomial((n as u32 + d - 1) as u64, d as u64));
                assert!(b.windows(2).all(|w| w[0] > w[1]));
            }
        }
        let b = graded_basis(3, 2);
        assert_eq!(b[0].exps(), &[2, 0, 0]);
        assert_eq!(b[5].exps(), &[0, 0, 2]);
    }

    #[test]
    fn small_identities() {
        let f = Rationals;
        let x = Poly::var(f, 2, 0);
        let y = Poly::var(f, 2, 1);
        let one = Poly::one(f, 2);
        assert_eq!(x.mul(&one), x);
        let s = x.add(&y);
        let expected = x.mul(&x).add(&x.mul(&y).scale(&q(2))).add(&y.mul(&y));
        assert_eq!(s.pow(2), expected);
        let x2y = x.mul(&x).mul(&y);
        assert_eq!(x2y.evaluate(&[q(2), q(3)]).unwrap(), q(12));
        assert_eq!(one.evaluate(&[q(5), q(-1)]).unwrap(), q(1));
        assert!(x.evaluate(&[q(1)]).is_err());
    }

    #[test]
    fn euler_identity() {
        let f = PrimeField::new(1_000_003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 0..6 {
            let p = random_hom(&mut rng, &f, 5, d, 12);
            let e = Derivation::euler(f, 5);
            assert_eq!(e.apply(&p).unwrap(), p.scale(&(d as u64)));
        }
    }

    #[test]
    fn text_round_trip() {
        let names = VarNames::new(vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let f = Rationals;
        let p = names.parse(&f, "3/2*p_{0 1}^2*p_{1 2} + -1*p_{0,2} + 7").unwrap();
        assert_eq!(p.len(), 3);
        let text = names.format(&p);
        assert_eq!(text, "3/2*p_{0 1}^2*p_{1 2} + -1*p_{0 2} + 7");
        assert_eq!(names.parse(&f, &text).unwrap(), p);
        assert_eq!(names.parse(&f, "p_{1 2}").unwrap(), Poly::var(f, 3, 2));
        assert!(names.parse(&f, "p_{3 4}").is_err());
        assert!(names.parse(&f, "2*q").is_err());
        assert_eq!(names.format(&Poly::zero(f, 3)), "0");
    }

    #[test]
    fn substitution_composes_with_evaluation() {
        let f = Rationals;
        let x = Poly::var(f, 2, 0);
        let y = Poly::var(f, 2, 1);
        let p = x.mul(&x).sub(&y.scale(&q(3)));
        let images = vec![x.add(&y), x.mul(&y)];
        let sub = p.substitute(&images).unwrap();
        let pt = [q(2), q(-5)];
        let inner: Vec<Rational> = images.iter().map(|g| g.evaluate(&pt).unwrap()).collect();
        assert_eq!(sub.evaluate(&pt).unwrap(), p.evaluate(&inner).unwrap());
    }

    #[test]
    fn leibniz_on_seeded_triples() {
        let f = PrimeField::new(1_000_003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 6;
        for _ in 0..100 {
            let e = rng.gen_range(0..3);
            let images = (0..n).map(|_| random_hom(&mut rng, &f, n, e + 1, 3)).collect();
            let d = Derivation::new(images).unwrap();
            let (da, db) = (rng.gen_range(0..4), rng.gen_range(0..4));
            let a = random_hom(&mut rng, &f, n, da, 4);
            let b = random_hom(&mut rng, &f, n, db, 4);
            let lhs = d.apply(&a.mul(&b)).unwrap();
            let rhs = d.apply(&a).unwrap().mul(&b).add(&a.mul(&d.apply(&b).unwrap()));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn derivation_rejects_mixed_degrees() {
        let f = Rationals;
        let x = Poly::var(f, 2, 0);
        assert!(Derivation::new(vec![x.clone(), x.mul(&x)]).is_err());
        let d = Derivation::new(vec![x.mul(&x), Poly::zero(f, 2)]).unwrap();
        assert_eq!(d.twist(), Some(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn evaluation_is_multiplicative(seed in any::<u64>()) {
            let f = PrimeField::new(10007).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hom(&mut rng, &f, 4, 2, 5);
            let b = random_hom(&mut rng, &f, 4, 3, 5);
            let pt: Vec<u64> = (0..4).map(|_| rng.gen_range(0..10007)).collect();
            let lhs = a.mul(&b).evaluate(&pt).unwrap();
            let rhs = f.mul(&a.evaluate(&pt).unwrap(), &b.evaluate(&pt).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn coordinates_round_trip(seed in any::<u64>()) {
            let f = PrimeField::new(10007).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_hom(&mut rng, &f, 4, 3, 6);
            let idx = MonomialIndex::new(4, 3);
            let row = p.coords(&idx).unwrap();
            prop_assert_eq!(Poly::from_coords(f, 4, idx.basis(), &row), p);
        }
    }
}

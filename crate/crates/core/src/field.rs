//! Coefficient fields.
//!
//! Every algorithm in the crate is generic over a [`Field`] value that owns the
//! arithmetic. Elements are plain data (`BigRational` for [`Rationals`], `u64`
//! residues for [`PrimeField`]), which keeps modular vectors compact and lets a
//! runtime-chosen prime flow through the same code paths as exact rationals.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Image of a rational number. Fails when a denominator vanishes in the field.
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    /// 0 for the rationals, p for `F_p`.
    fn characteristic(&self) -> u64;
    fn encode(&self, a: &Self::Elem) -> String;
    fn decode(&self, s: &str) -> Result<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `acc += a * b`
    fn add_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let t = self.mul(a, b);
        *acc = self.add(acc, &t);
    }

    /// Hook for a faster elimination kernel. Receives sparse rows over `ncols`
    /// columns and may return the reduced row-echelon basis of their span.
    fn fast_rref(
        &self,
        _rows: &[Vec<(usize, Self::Elem)>],
        _ncols: usize,
    ) -> Option<Vec<Vec<(usize, Self::Elem)>>> {
        None
    }
}

/// The field of rational numbers with arbitrary-precision numerator and denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn encode(&self, a: &Rational) -> String {
        a.to_string()
    }
    fn decode(&self, s: &str) -> Result<Rational> {
        parse_rational(s)
    }
    fn add_mul_assign(&self, acc: &mut Rational, a: &Rational, b: &Rational) {
        *acc += a * b;
    }
}

/// Parses `n` or `n/d` with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// `Z/pZ` for a prime `p < 2^63`, elements stored as canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

/// Largest modulus accepted by the lazy-reduction dense kernel.
pub const DENSE_KERNEL_MAX_PRIME: u64 = 1 << 31;

impl PrimeField {
    /// Fails unless `p` is a prime below `2^63`.
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1u64 << 63) || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime below 2^63")));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        if self.p < (1 << 32) {
            (a * b) % self.p
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = n.mod_floor(&p);
        r.to_u64().expect("residue fits in u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mul_raw(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }
    fn from_i64(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_rational(&self, q: &Rational) -> Result<u64> {
        let den = self.reduce_bigint(q.denom());
        if den == 0 {
            return Err(Error::UnluckyPrime {
                prime: self.p,
                detail: format!("denominator of {q} vanishes"),
            });
        }
        let num = self.reduce_bigint(q.numer());
        Ok(self.mul_raw(num, self.inv(&den).expect("nonzero")))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn encode(&self, a: &u64) -> String {
        a.to_string()
    }
    fn decode(&self, s: &str) -> Result<u64> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid residue `{s}`")))?;
        if v >= self.p {
            return Err(Error::Parse(format!("residue {v} not reduced mod {}", self.p)));
        }
        Ok(v)
    }
    fn add_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        let t = self.mul_raw(*a, *b);
        *acc = self.add(acc, &t);
    }

    fn fast_rref(&self, rows: &[Vec<(usize, u64)>], ncols: usize) -> Option<Vec<Vec<(usize, u64)>>> {
        if self.p >= DENSE_KERNEL_MAX_PRIME || rows.is_empty() || ncols < 64 {
            return None;
        }
        let nnz: usize = rows.iter().map(Vec::len).sum();
        // Fill-in makes the sparse path lose once rows are a few percent dense.
        if nnz * 24 < rows.len() * ncols {
            return None;
        }
        Some(crate::linalg::dense_mod::rref_mod(self.p, rows, ncols))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> u64 {
    assert!((3..=63).contains(&bits), "prime size out of range");
    let lo = 1u64 << (bits - 1);
    loop {
        let c = rng.gen_range(lo..(lo << 1).wrapping_sub(1).max(lo + 1)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Default size of the primes used for modular rank and membership computations.
/// Products of two residues stay below 2^56, leaving 8 bits of headroom for lazy
/// accumulation in the dense kernel.
pub const DEFAULT_PRIME_BITS: u32 = 28;

/// `count` distinct primes of `bits` bits, determined by `seed`.
pub fn seeded_primes(seed: u64, count: usize, bits: u32) -> Vec<u64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7072_696d_6573);
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let p = random_prime(&mut rng, bits);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Least common multiple of denominators, used to clear fractions.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn rational_from_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The fraction `n/d` with `|n|, d <= sqrt(p/2)` congruent to `a` mod `p`, if one exists.
pub fn rational_reconstruct(a: u64, p: u64) -> Option<Rational> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let q = Rational::new(BigInt::from(r1), BigInt::from(t1));
    (PrimeField { p }.from_rational(&q).ok() == Some(a % p)).then_some(q)
}

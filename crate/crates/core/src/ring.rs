//! Coefficient rings for the generic polynomial and matrix machinery.
//!
//! Everything downstream (polynomial arithmetic, subresultants, binary
//! splitting, fraction-free elimination) is written once over [`Ring`] and
//! instantiated at three rings:
//!
//! - [`ZRing`]: arbitrary-precision integers,
//! - [`FpRing`]: residues mod a prime below 2^62,
//! - [`PolyRing<R>`]: dense polynomials over another ring, used for
//!   baby-step/giant-step products over F_p[x] and for the symbolic-`m`
//!   passes over Z[m].
//!
//! Rings are passed by reference as context objects so that `FpRing` can
//! carry its modulus. `ZRing` and `PolyRing<ZRing>` are zero-sized.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;

pub type BigRat = num_rational::BigRational;

/// A commutative ring with exact division, enough for subresultant
/// remainder sequences and fraction-free elimination.
pub trait Ring: Clone + Send + Sync + Debug {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    /// Quotient `a / b` when the division is exact. Panics otherwise; the
    /// subresultant and Bareiss algorithms only ever divide exactly.
    fn exact_div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    /// a + b*c, the inner-loop primitive of polynomial and matrix products.
    fn mul_add(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem {
        self.add(a, &self.mul(b, c))
    }
}

/// The ring of integers, backed by `num_bigint::BigInt`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZRing;

impl Ring for ZRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn exact_div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let (q, r) = a.div_rem(b);
        debug_assert!(r.is_zero(), "inexact integer division {a} / {b}");
        q
    }
}

/// Residues mod an odd prime `p < 2^62`, stored as `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpRing {
    pub p: u64,
}

impl FpRing {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 62), "modulus must be an odd prime < 2^62");
        FpRing { p }
    }

    #[inline]
    pub fn mul_u64(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_u64(acc, base);
            }
            base = self.mul_u64(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `a` must be nonzero mod p.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero mod {}", self.p);
        self.pow(a, self.p - 2)
    }
}

impl Ring for FpRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
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
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mul_u64(*a, *b)
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let (_, digits) = r.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }
    fn exact_div(&self, a: &u64, b: &u64) -> u64 {
        self.mul_u64(*a, self.inv(*b))
    }
}

/// Polynomials over `R` as a coefficient ring (elements of `R[t]`).
#[derive(Clone, Copy, Debug, Default)]
pub struct PolyRing<R: Ring>(pub R);

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Poly<R>;

    fn zero(&self) -> Poly<R> {
        Poly::zero()
    }
    fn one(&self) -> Poly<R> {
        Poly::constant(&self.0, self.0.one())
    }
    fn is_zero(&self, a: &Poly<R>) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
        a.add(&self.0, b)
    }
    fn sub(&self, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
        a.sub(&self.0, b)
    }
    fn neg(&self, a: &Poly<R>) -> Poly<R> {
        a.neg(&self.0)
    }
    fn mul(&self, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
        a.mul(&self.0, b)
    }
    fn from_bigint(&self, n: &BigInt) -> Poly<R> {
        Poly::constant(&self.0, self.0.from_bigint(n))
    }
    fn exact_div(&self, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
        a.exact_div(&self.0, b)
            .expect("inexact polynomial division in PolyRing::exact_div")
    }
}

/// Euclidean structure where available (fields); lets the generic gcd and
/// division helpers specialize.
pub trait FieldRing: Ring {
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

impl FieldRing for FpRing {
    fn inv(&self, a: &u64) -> u64 {
        FpRing::inv(self, *a)
    }
}

/// Bit size of an integer per the usual convention: floor(log2 |a|) + 1,
/// and 1 for zero.
pub fn bit_size(a: &BigInt) -> u64 {
    if a.is_zero() {
        1
    } else {
        a.abs().bits()
    }
}

/// Parse "p/q" or "p" into a reduced rational.
pub fn bigrat_from_str(s: &str) -> Option<BigRat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRat::from_integer(n))
    }
}

/// Render a rational as "p" or "p/q" with positive denominator.
pub fn bigrat_to_string(r: &BigRat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

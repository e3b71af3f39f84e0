//! Dense univariate polynomials over a generic coefficient ring.
//!
//! Coefficients are stored lowest degree first with no trailing zeros; the
//! zero polynomial is the empty list. Products switch from schoolbook to
//! Karatsuba above [`KARATSUBA_THRESHOLD`] coefficients, and Taylor shifts
//! switch to divide-and-conquer above [`SHIFT_DC_THRESHOLD`]. Gcds use a
//! primitive polynomial remainder sequence, resultants the subresultant one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::ring::{BigRat, FieldRing, PolyRing, Ring, ZRing};
use crate::Result;

/// Products below this many coefficients stay schoolbook.
pub const KARATSUBA_THRESHOLD: usize = 32;
/// Taylor shifts below this many coefficients use the Horner scheme.
pub const SHIFT_DC_THRESHOLD: usize = 64;

/// Dense polynomial over the ring `R`, lowest degree first.
#[derive(Clone, Debug)]
pub struct Poly<R: Ring> {
    pub coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

/// Integer polynomials, the workhorse instantiation.
pub type ZPoly = Poly<ZRing>;
/// Integer polynomials in a second variable, used as coefficients.
pub type ZZPoly = Poly<PolyRing<ZRing>>;

impl<R: Ring> Poly<R> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.normalize(ring);
        p
    }

    pub fn from_coeffs(ring: &R, coeffs: Vec<R::Elem>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize(ring);
        p
    }

    /// The monomial c * x^k.
    pub fn monomial(ring: &R, c: R::Elem, k: usize) -> Self {
        if ring.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![ring.zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn normalize(&mut self, ring: &R) {
        while matches!(self.coeffs.last(), Some(c) if ring.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = 0, for size arithmetic.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc<'a>(&'a self, ring: &R) -> R::Elem {
        self.coeffs.last().cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn coeff(&self, ring: &R, k: usize) -> R::Elem {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => ring.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(ring, coeffs)
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &R) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| ring.neg(c)).collect(),
        }
    }

    pub fn scale(&self, ring: &R, c: &R::Elem) -> Self {
        if ring.is_zero(c) {
            return Poly::zero();
        }
        Poly::from_coeffs(ring, self.coeffs.iter().map(|a| ring.mul(a, c)).collect())
    }

    /// Multiply by x^k.
    pub fn shift_up(&self, ring: &R, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![ring.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn mul(&self, ring: &R, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let coeffs = mul_slices(ring, &self.coeffs, &other.coeffs);
        Poly::from_coeffs(ring, coeffs)
    }

    pub fn horner(&self, ring: &R, x: &R::Elem) -> R::Elem {
        let mut acc = ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = ring.mul_add(c, &acc, x);
        }
        acc
    }

    pub fn eval_bigint(&self, ring: &R, x: &BigInt) -> R::Elem {
        self.horner(ring, &ring.from_bigint(x))
    }

    /// Taylor shift: the polynomial `p(x + h)`.
    pub fn shift_var(&self, ring: &R, h: &R::Elem) -> Self {
        if self.is_zero() || ring.is_zero(h) {
            return self.clone();
        }
        if self.coeffs.len() < SHIFT_DC_THRESHOLD {
            return self.shift_horner(ring, h);
        }
        let m = self.coeffs.len() / 2;
        let lo = Poly::from_coeffs(ring, self.coeffs[..m].to_vec());
        let hi = Poly::from_coeffs(ring, self.coeffs[m..].to_vec());
        let (lo_s, hi_s) = (lo.shift_var(ring, h), hi.shift_var(ring, h));
        let pow = binomial_power(ring, h, m);
        lo_s.add(ring, &hi_s.mul(ring, &pow))
    }

    fn shift_horner(&self, ring: &R, h: &R::Elem) -> Self {
        // acc := acc * (x + h) + c_j, from the top coefficient down
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            let mut next = acc.shift_up(ring, 1);
            next = next.add(ring, &acc.scale(ring, h));
            next = next.add(ring, &Poly::constant(ring, c.clone()));
            acc = next;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self, ring: &R) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| ring.mul(c, &ring.from_i64(i as i64)))
            .collect();
        Poly::from_coeffs(ring, coeffs)
    }

    /// Pseudo-division: returns (q, r, e) with lc(d)^e * self = q*d + r and
    /// deg r < deg d. Requires d nonzero.
    pub fn pseudo_div_rem(&self, ring: &R, d: &Self) -> (Self, Self, usize) {
        let dd = d.degree().expect("pseudo-division by zero");
        let lc_d = d.lc(ring);
        let mut r = self.clone();
        let mut q = Poly::zero();
        let mut e = 0usize;
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lead = r.lc(ring).clone();
            // scale everything by lc(d), then cancel the top term
            q = q.scale(ring, &lc_d);
            r = r.scale(ring, &lc_d);
            let t = Poly::monomial(ring, lead, dr - dd);
            q = q.add(ring, &t);
            r = r.sub(ring, &t.mul(ring, d));
            e += 1;
            debug_assert!(r.degree().map_or(true, |x| x < dr));
        }
        (q, r, e)
    }

    /// Exact division: `self / d` when d divides self. Errors when it does not.
    pub fn exact_div(&self, ring: &R, d: &Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroInput {
                context: "exact polynomial division by zero",
            });
        }
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let dd = d.degree().unwrap();
        let dn = self
            .degree()
            .filter(|&n| n >= dd)
            .ok_or_else(|| Error::invalid("inexact polynomial division: degree too small"))?;
        let lc_d = d.lc(ring);
        let mut r = self.clone();
        let mut q = vec![ring.zero(); dn - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return Err(Error::invalid("inexact polynomial division: nonzero remainder"));
            }
            let c = ring.exact_div(&r.lc(ring), &lc_d);
            let t = Poly::monomial(ring, c.clone(), dr - dd);
            r = r.sub(ring, &t.mul(ring, d));
            q[dr - dd] = c;
            if r.degree() == Some(dr) {
                return Err(Error::invalid("inexact polynomial division: no cancellation"));
            }
        }
        Ok(Poly::from_coeffs(ring, q))
    }
}

fn mul_slices<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return mul_schoolbook(ring, a, b);
    }
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(a.len().min(m));
    let (b0, b1) = b.split_at(b.len().min(m));
    let z0 = mul_slices(ring, a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        mul_slices(ring, a1, b1)
    };
    let asum = add_slices(ring, a0, a1);
    let bsum = add_slices(ring, b0, b1);
    let mut z1 = mul_slices(ring, &asum, &bsum);
    sub_assign_slices(ring, &mut z1, &z0);
    sub_assign_slices(ring, &mut z1, &z2);

    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] = ring.add(&out[i], &c);
    }
    for (i, c) in z1.into_iter().enumerate() {
        if !ring.is_zero(&c) {
            out[i + m] = ring.add(&out[i + m], &c);
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * m] = ring.add(&out[i + 2 * m], &c);
    }
    out
}

fn mul_schoolbook<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ring.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = ring.mul_add(&out[i + j], ai, bj);
        }
    }
    out
}

fn add_slices<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => ring.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn sub_assign_slices<R: Ring>(ring: &R, a: &mut Vec<R::Elem>, b: &[R::Elem]) {
    if a.len() < b.len() {
        a.resize(b.len(), ring.zero());
    }
    for (i, c) in b.iter().enumerate() {
        a[i] = ring.sub(&a[i], c);
    }
}

/// (x + h)^m via the binomial theorem.
fn binomial_power<R: Ring>(ring: &R, h: &R::Elem, m: usize) -> Poly<R> {
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut binom = BigInt::one();
    let mut hpow = ring.one(); // h^(m-k) built from the top down, so collect reversed
    let mut tail = Vec::with_capacity(m + 1);
    for k in (0..=m).rev() {
        // coefficient of x^k is C(m,k) h^(m-k); iterate k = m..0 so hpow grows
        tail.push(ring.mul(&ring.from_bigint(&binom), &hpow));
        if k > 0 {
            binom = &binom * BigInt::from(k) / BigInt::from(m - k + 1);
            hpow = ring.mul(&hpow, h);
        }
    }
    tail.reverse();
    coeffs.extend(tail);
    Poly::from_coeffs(ring, coeffs)
}

// ---- Gcd layer -------------------------------------------------------------

/// Rings with a gcd, enough for contents and primitive remainder sequences.
pub trait GcdRing: Ring {
    fn gcd(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Sign test used to normalize leading coefficients; "negative" means
    /// the canonical representative should be negated.
    fn is_negative(&self, a: &Self::Elem) -> bool;
}

impl GcdRing for ZRing {
    fn gcd(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a.gcd(b)
    }
    fn is_negative(&self, a: &BigInt) -> bool {
        a.is_negative()
    }
}

impl<R: GcdRing> GcdRing for PolyRing<R> {
    fn gcd(&self, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
        gcd_primitive(&self.0, a, b)
    }
    fn is_negative(&self, a: &Poly<R>) -> bool {
        match a.coeffs.last() {
            Some(c) => self.0.is_negative(c),
            None => false,
        }
    }
}

impl<R: GcdRing> Poly<R> {
    /// Gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self, ring: &R) -> R::Elem {
        let mut acc = ring.zero();
        for c in &self.coeffs {
            acc = ring.gcd(&acc, c);
        }
        acc
    }

    /// Primitive part with sign-normalized (positive) leading coefficient.
    pub fn primitive_part(&self, ring: &R) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content(ring);
        if ring.is_negative(&self.lc(ring)) {
            c = ring.neg(&c);
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| ring.exact_div(a, &c)).collect(),
        }
    }
}

/// Primitive gcd with positive leading coefficient via a primitive
/// polynomial remainder sequence. Rejects the both-zero input.
pub fn gcd_primitive<R: GcdRing>(ring: &R, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
    if a.is_zero() {
        return b.primitive_part(ring);
    }
    if b.is_zero() {
        return a.primitive_part(ring);
    }
    let cont = ring.gcd(&a.content(ring), &b.content(ring));
    let mut f = a.primitive_part(ring);
    let mut g = b.primitive_part(ring);
    if f.deg0() < g.deg0() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let (_, r, _) = f.pseudo_div_rem(ring, &g);
        if r.is_zero() {
            break;
        }
        f = g;
        g = r.primitive_part(ring);
    }
    let mut out = g.scale(ring, &cont);
    if ring.is_negative(&out.lc(ring)) {
        out = out.neg(ring);
    }
    out
}

/// Resultant via the subresultant polynomial remainder sequence.
///
/// Both inputs must be nonzero; the resultant of two constants is 1.
pub fn resultant<R: GcdRing>(ring: &R, a: &Poly<R>, b: &Poly<R>) -> Result<R::Elem> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput {
            context: "resultant of a zero polynomial",
        });
    }
    let (mut f, mut g) = (a.clone(), b.clone());
    let mut sign_flip = false;
    if f.deg0() < g.deg0() {
        sign_flip = f.deg0() % 2 == 1 && g.deg0() % 2 == 1;
        std::mem::swap(&mut f, &mut g);
    }
    if g.deg0() == 0 {
        // Res(f, c) = c^{deg f}; covers the two-constants case (exponent 0).
        let mut acc = ring.one();
        let c = g.lc(ring);
        for _ in 0..f.deg0() {
            acc = ring.mul(&acc, &c);
        }
        return Ok(if sign_flip { ring.neg(&acc) } else { acc });
    }

    // Subresultant PRS bookkeeping (g, h) following the classical algorithm.
    let mut s = if sign_flip { ring.neg(&ring.one()) } else { ring.one() };
    let mut gg = ring.one();
    let mut hh = ring.one();
    loop {
        let (df, dg) = (f.deg0(), g.deg0());
        let delta = df - dg;
        if df % 2 == 1 && dg % 2 == 1 {
            s = ring.neg(&s);
        }
        let (_, mut r, e) = f.pseudo_div_rem(ring, &g);
        // pseudo_div_rem multiplies by lc(g)^e with e <= delta + 1; pad to the
        // canonical lc(g)^(delta+1) so the subresultant divisions stay exact.
        let lcg = g.lc(ring);
        for _ in e..delta + 1 {
            r = r.scale(ring, &lcg);
        }
        f = g;
        // divide by gg * hh^delta
        let mut div = gg.clone();
        for _ in 0..delta {
            div = ring.mul(&div, &hh);
        }
        g = Poly {
            coeffs: r.coeffs.iter().map(|c| ring.exact_div(c, &div)).collect(),
        };
        gg = f.lc(ring);
        // hh := hh^(1-delta) * gg^delta
        hh = if delta == 0 {
            hh
        } else {
            let mut num = ring.one();
            for _ in 0..delta {
                num = ring.mul(&num, &gg);
            }
            let mut den = ring.one();
            for _ in 0..delta - 1 {
                den = ring.mul(&den, &hh);
            }
            ring.exact_div(&num, &den)
        };
        if g.is_zero() {
            // a nonconstant common factor survives
            return Ok(ring.zero());
        }
        if g.deg0() == 0 {
            let d = f.deg0();
            if d % 2 == 1 && g.deg0() % 2 == 1 {
                // unreachable: deg g = 0 is even
            }
            let c = g.lc(ring);
            let mut num = ring.one();
            for _ in 0..d {
                num = ring.mul(&num, &c);
            }
            let mut den = ring.one();
            for _ in 0..d.saturating_sub(1) {
                den = ring.mul(&den, &hh);
            }
            let res = ring.exact_div(&num, &den);
            return Ok(ring.mul(&s, &res));
        }
    }
}

// ---- ZPoly conveniences ----------------------------------------------------

impl ZPoly {
    pub fn from_i64s(cs: &[i64]) -> ZPoly {
        Poly::from_coeffs(&ZRing, cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_bigints(cs: Vec<BigInt>) -> ZPoly {
        Poly::from_coeffs(&ZRing, cs)
    }

    /// x + c as a convenience.
    pub fn linear(c: i64) -> ZPoly {
        ZPoly::from_i64s(&[c, 1])
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.horner(&ZRing, x)
    }

    pub fn eval_rat(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRat::from_integer(c.clone());
        }
        acc
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().cloned().map(BigRat::from_integer).collect())
    }

    /// Shift by an integer: p(x + h).
    pub fn shift_int(&self, h: &BigInt) -> ZPoly {
        self.shift_var(&ZRing, h)
    }

    /// Largest absolute coefficient; used by root bounds.
    pub fn max_coeff_abs(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Convenience: gcd of two integer polynomials (primitive, positive lc).
pub fn zpoly_gcd(a: &ZPoly, b: &ZPoly) -> Result<ZPoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroInput {
            context: "gcd of two zero polynomials",
        });
    }
    Ok(gcd_primitive(&ZRing, a, b))
}

/// Resultant of integer polynomials.
pub fn zpoly_resultant(a: &ZPoly, b: &ZPoly) -> Result<BigInt> {
    resultant(&ZRing, a, b)
}

/// The resultant `Res_n(P(n), Q(n+h))` as a polynomial in `h`, computed by
/// evaluation at deg P * deg Q + 1 integer points and exact interpolation.
pub fn resultant_in_h(p: &ZPoly, q: &ZPoly) -> Result<ZPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroInput {
            context: "resultant of a zero polynomial",
        });
    }
    let dp = p.deg0();
    let dq = q.deg0();
    if dp == 0 {
        // constant P: resultant = P^{deg Q}, independent of h
        return Ok(ZPoly::from_bigints(vec![num_traits::pow::pow(
            p.lc(&ZRing),
            dq,
        )]));
    }
    if dq == 0 {
        return Ok(ZPoly::from_bigints(vec![num_traits::pow::pow(
            q.lc(&ZRing),
            dp,
        )]));
    }
    let npoints = dp * dq + 1;
    let mut values = Vec::with_capacity(npoints);
    for h in 0..npoints {
        let qh = q.shift_int(&BigInt::from(h));
        values.push(BigRat::from_integer(zpoly_resultant(p, &qh)?));
    }
    let interp = interpolate_at_integers(&values);
    interp
        .to_zpoly()
        .ok_or_else(|| Error::invalid("resultant interpolation produced non-integer coefficients"))
}

// ---- Rational-coefficient polynomials ---------------------------------------

/// Dense polynomial with rational coefficients; used for expansions, basis
/// conversions and the brute-force oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly {
    pub coeffs: Vec<BigRat>,
}

impl QPoly {
    pub fn zero() -> QPoly {
        QPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> QPoly {
        while matches!(coeffs.last(), Some(c) if c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn constant(c: BigRat) -> QPoly {
        QPoly::from_coeffs(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRat {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::from_coeffs((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::from_coeffs((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &BigRat) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// p(x + h) for rational h.
    pub fn shift(&self, h: &BigRat) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            let mut next: Vec<BigRat> = vec![BigRat::zero()];
            next.extend(acc.coeffs.iter().cloned());
            let mut next = QPoly::from_coeffs(next);
            next = next.add(&acc.scale(h));
            next = next.add(&QPoly::constant(c.clone()));
            acc = next;
        }
        acc
    }

    /// Content/primitive decomposition: self = content * primitive with an
    /// integer primitive part of positive leading coefficient.
    pub fn to_zpoly_scaled(&self) -> (BigRat, ZPoly) {
        if self.is_zero() {
            return (BigRat::zero(), ZPoly::zero());
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let z = ZPoly::from_bigints(ints);
        let prim = z.primitive_part(&ZRing);
        let mut content = z.content(&ZRing);
        if z.lc(&ZRing).is_negative() {
            content = -content;
        }
        (BigRat::new(content, den), prim)
    }

    /// Exact conversion when all coefficients are integers.
    pub fn to_zpoly(&self) -> Option<ZPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.denom().is_one() {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(ZPoly::from_bigints(out))
    }
}

/// Interpolate the unique polynomial of degree < n through the points
/// (0, ys[0]), (1, ys[1]), ..., by Newton divided differences.
pub fn interpolate_at_integers(ys: &[BigRat]) -> QPoly {
    let n = ys.len();
    if n == 0 {
        return QPoly::zero();
    }
    // divided-difference table, in place
    let mut dd: Vec<BigRat> = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / BigRat::from_integer(BigInt::from(level));
        }
    }
    // Newton form: sum dd[k] * x(x-1)...(x-k+1)
    let mut acc = QPoly::zero();
    let mut basis = QPoly::constant(BigRat::one());
    for (k, c) in dd.iter().enumerate() {
        acc = acc.add(&basis.scale(c));
        if k + 1 < n {
            let factor = QPoly::from_coeffs(vec![
                BigRat::from_integer(BigInt::from(-(k as i64))),
                BigRat::one(),
            ]);
            basis = basis.mul(&factor);
        }
    }
    acc
}

// ---- Fp polynomial helpers (field operations) --------------------------------

/// Remainder of `a` by `b` over a field ring.
pub fn field_rem<R: FieldRing>(ring: &R, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
    let db = b.degree().expect("division by zero polynomial");
    let lb_inv = ring.inv(&b.lc(ring));
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let c = ring.mul(&r.lc(ring), &lb_inv);
        let t = Poly::monomial(ring, c, dr - db);
        r = r.sub(ring, &t.mul(ring, b));
    }
    r
}

/// Monic gcd over a field ring.
pub fn field_gcd<R: FieldRing>(ring: &R, a: &Poly<R>, b: &Poly<R>) -> Poly<R> {
    let (mut f, mut g) = (a.clone(), b.clone());
    while !g.is_zero() {
        let r = field_rem(ring, &f, &g);
        f = g;
        g = r;
    }
    if f.is_zero() {
        return f;
    }
    let inv = ring.inv(&f.lc(ring));
    f.scale(ring, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    fn random_zpoly(rng: &mut StdRng, deg: usize, coeff_bound: i64) -> ZPoly {
        let coeffs: Vec<BigInt> = (0..=deg)
            .map(|_| BigInt::from(rng.gen_range(-coeff_bound..=coeff_bound)))
            .collect();
        ZPoly::from_bigints(coeffs)
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = zp(&[1, 1]); // 1 + n
        let b = zp(&[1, -1]); // 1 - n
        assert_eq!(a.mul(&ZRing, &b), zp(&[1, 0, -1]));
    }

    #[test]
    fn mul_absorbing_zero() {
        let p = zp(&[3, 0, 7, -2]);
        assert_eq!(ZPoly::zero().mul(&ZRing, &p), ZPoly::zero());
    }

    #[test]
    fn mul_matches_schoolbook_on_large_random() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..4 {
            let a = random_zpoly(&mut rng, 50, 1000);
            let b = random_zpoly(&mut rng, 50, 1000);
            let fast = a.mul(&ZRing, &b);
            let slow = ZPoly::from_bigints(mul_schoolbook(&ZRing, &a.coeffs, &b.coeffs));
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn gcd_examples() {
        // gcd(n^2 - 1, n - 1) = n - 1
        let g = zpoly_gcd(&zp(&[-1, 0, 1]), &zp(&[-1, 1])).unwrap();
        assert_eq!(g, zp(&[-1, 1]));
        // coprime shifts
        let g = zpoly_gcd(&zp(&[0, 1]), &zp(&[1, 1])).unwrap();
        assert_eq!(g, zp(&[1]));
        assert!(zpoly_gcd(&ZPoly::zero(), &ZPoly::zero()).is_err());
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_zpoly(&mut rng, 3, 10);
            if f.is_zero() {
                continue;
            }
            let g = zp(&[1, 2, 1]); // (n+1)^2
            let h = zp(&[3, 1]); // n+3, coprime to g
            let a = f.mul(&ZRing, &g);
            let b = f.mul(&ZRing, &h);
            let d = zpoly_gcd(&a, &b).unwrap();
            // d equals primitive(f) up to the gcd of the cofactors
            let fp = f.primitive_part(&ZRing);
            assert!(d.exact_div(&ZRing, &fp).is_ok(), "f does not divide gcd");
            let (_, r, _) = a.pseudo_div_rem(&ZRing, &d);
            assert!(r.is_zero());
        }
    }

    /// Sylvester-matrix determinant over rationals, the independent oracle.
    fn sylvester_resultant(a: &ZPoly, b: &ZPoly) -> BigInt {
        let m = a.deg0();
        let n = b.deg0();
        if m == 0 && n == 0 {
            return BigInt::one();
        }
        let size = m + n;
        let mut mat = vec![vec![BigRat::zero(); size]; size];
        for row in 0..n {
            for (j, c) in a.coeffs.iter().enumerate() {
                mat[row][row + (m - j)] = BigRat::from_integer(c.clone());
            }
        }
        for row in 0..m {
            for (j, c) in b.coeffs.iter().enumerate() {
                mat[n + row][row + (n - j)] = BigRat::from_integer(c.clone());
            }
        }
        // Gaussian elimination determinant
        let mut det = BigRat::one();
        for col in 0..size {
            let pivot = (col..size).find(|&r| !mat[r][col].is_zero());
            let Some(p) = pivot else {
                return BigInt::zero();
            };
            if p != col {
                mat.swap(p, col);
                det = -det;
            }
            let pv = mat[col][col].clone();
            det *= &pv;
            for r in col + 1..size {
                let factor = &mat[r][col] / &pv;
                for c in col..size {
                    let sub = &factor * &mat[col][c];
                    mat[r][c] -= sub;
                }
            }
        }
        assert!(det.denom().is_one());
        det.numer().clone()
    }

    #[test]
    fn resultant_constant_cases() {
        // Res(a, b) with deg a = 0 -> a^(deg b)
        let a = zp(&[5]);
        let b = zp(&[1, 2, 3]);
        assert_eq!(zpoly_resultant(&a, &b).unwrap(), BigInt::from(25));
        assert_eq!(zpoly_resultant(&b, &a).unwrap(), BigInt::from(25));
        assert_eq!(zpoly_resultant(&a, &a).unwrap(), BigInt::one());
    }

    #[test]
    fn resultant_matches_sylvester_on_random() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let da = rng.gen_range(1..=3);
            let db = rng.gen_range(1..=3);
            let a = random_zpoly(&mut rng, da, 8);
            let b = random_zpoly(&mut rng, db, 8);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let fast = zpoly_resultant(&a, &b).unwrap();
            let slow = sylvester_resultant(&a, &b);
            assert_eq!(fast, slow, "a={:?} b={:?}", a.coeffs, b.coeffs);
        }
    }

    #[test]
    fn resultant_zero_iff_common_factor() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let f = random_zpoly(&mut rng, 2, 5);
            let a = random_zpoly(&mut rng, 2, 5);
            let b = random_zpoly(&mut rng, 2, 5);
            if f.degree().is_none() || f.deg0() == 0 || a.is_zero() || b.is_zero() {
                continue;
            }
            let res = zpoly_resultant(&a.mul(&ZRing, &f), &b.mul(&ZRing, &f)).unwrap();
            assert!(res.is_zero());
        }
    }

    #[test]
    fn resultant_in_h_linear_case() {
        // Res_n(n, n + h - N) = +-(h - N) with N = 2^100
        let big_n = BigInt::from(2u32).pow(100);
        let p = zp(&[0, 1]);
        let q = ZPoly::from_bigints(vec![-&big_n, BigInt::one()]); // n - N
        let r = resultant_in_h(&p, &q).unwrap();
        assert_eq!(r.deg0(), 1);
        let root = -r.coeff(&ZRing, 0) / r.coeff(&ZRing, 1);
        assert_eq!(root, big_n);
    }

    #[test]
    fn resultant_in_h_matches_pointwise() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let p = random_zpoly(&mut rng, 2, 6);
            let q = random_zpoly(&mut rng, 2, 6);
            if p.is_zero() || q.is_zero() {
                continue;
            }
            let r = resultant_in_h(&p, &q).unwrap();
            for h in -3i64..=3 {
                let qh = q.shift_int(&BigInt::from(h));
                let direct = zpoly_resultant(&p, &qh).unwrap();
                assert_eq!(r.eval(&BigInt::from(h)), direct);
            }
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(zp(&[0, 1]).shift_int(&BigInt::one()), zp(&[1, 1]));
        assert_eq!(zp(&[0, 0, 1]).shift_int(&BigInt::from(-1)), zp(&[1, -2, 1]));
    }

    #[test]
    fn shift_matches_binomial_expansion() {
        // coefficient-wise binomial oracle for (n+7)^k expansions
        let mut rng = StdRng::seed_from_u64(23);
        let a = random_zpoly(&mut rng, 20, 50);
        let h = BigInt::from(7);
        let shifted = a.shift_int(&h);
        // oracle: sum_j a_j * C(j, i) * 7^(j-i) for coefficient i
        let deg = a.deg0();
        for i in 0..=deg {
            let mut expect = BigInt::zero();
            for j in i..=deg {
                let mut binom = BigInt::one();
                for t in 0..(j - i) {
                    binom = binom * BigInt::from(j - t) / BigInt::from(t + 1);
                }
                // C(j, j-i) = C(j, i); recompute cleanly
                let mut c = BigInt::one();
                for t in 0..i {
                    c = c * BigInt::from(j - t) / BigInt::from(t + 1);
                }
                let _ = binom;
                expect += a.coeff(&ZRing, j) * c * h.pow((j - i) as u32);
            }
            assert_eq!(shifted.coeff(&ZRing, i), expect, "coeff {i}");
        }
    }

    #[test]
    fn shift_large_degree_uses_dc_and_round_trips() {
        let mut rng = StdRng::seed_from_u64(29);
        let a = random_zpoly(&mut rng, 150, 1000);
        let h = BigInt::from(13);
        let back = a.shift_int(&h).shift_int(&(-&h));
        assert_eq!(a, back);
    }

    #[test]
    fn exact_div_detects_inexact() {
        let a = zp(&[1, 2, 1]);
        let b = zp(&[1, 1]);
        assert_eq!(a.exact_div(&ZRing, &b).unwrap(), zp(&[1, 1]));
        assert!(zp(&[1, 0, 1]).exact_div(&ZRing, &b).is_err());
    }

    #[test]
    fn interpolation_round_trip() {
        let p = QPoly::from_coeffs(vec![
            BigRat::new(BigInt::from(1), BigInt::from(2)),
            BigRat::from_integer(BigInt::from(-3)),
            BigRat::from_integer(BigInt::from(5)),
        ]);
        let ys: Vec<BigRat> = (0..5)
            .map(|i| p.eval(&BigRat::from_integer(BigInt::from(i))))
            .collect();
        let q = interpolate_at_integers(&ys);
        assert_eq!(p, q);
    }

    #[test]
    fn bivariate_gcd_via_polyring() {
        // gcd over Z[m][n] of (n - m)(n + 1) and (n - m)(n + 2)
        let zz = PolyRing(ZRing);
        let m = ZPoly::from_i64s(&[0, 1]);
        let nm = Poly::<PolyRing<ZRing>>::from_coeffs(
            &zz,
            vec![m.neg(&ZRing), ZPoly::from_i64s(&[1])],
        ); // n - m
        let n1 = Poly::<PolyRing<ZRing>>::from_coeffs(
            &zz,
            vec![ZPoly::from_i64s(&[1]), ZPoly::from_i64s(&[1])],
        );
        let n2 = Poly::<PolyRing<ZRing>>::from_coeffs(
            &zz,
            vec![ZPoly::from_i64s(&[2]), ZPoly::from_i64s(&[1])],
        );
        let a = nm.mul(&zz, &n1);
        let b = nm.mul(&zz, &n2);
        let g = gcd_primitive(&zz, &a, &b);
        assert_eq!(g, nm);
    }

    #[test]
    fn field_gcd_over_fp() {
        use crate::ring::FpRing;
        let f = FpRing::new(101);
        // (x^2 - 1) and (x - 1) over F_101
        let a = Poly::<FpRing>::from_coeffs(&f, vec![100, 0, 1]);
        let b = Poly::<FpRing>::from_coeffs(&f, vec![100, 1]);
        let g = field_gcd(&f, &a, &b);
        assert_eq!(g.coeffs, vec![100, 1]);
    }

    proptest::proptest! {
        #[test]
        fn prop_mul_commutes(a in proptest::collection::vec(-50i64..50, 0..12),
                             b in proptest::collection::vec(-50i64..50, 0..12)) {
            let pa = ZPoly::from_i64s(&a);
            let pb = ZPoly::from_i64s(&b);
            proptest::prop_assert_eq!(pa.mul(&ZRing, &pb), pb.mul(&ZRing, &pa));
        }

        #[test]
        fn prop_mul_associates(a in proptest::collection::vec(-9i64..9, 0..8),
                               b in proptest::collection::vec(-9i64..9, 0..8),
                               c in proptest::collection::vec(-9i64..9, 0..8)) {
            let pa = ZPoly::from_i64s(&a);
            let pb = ZPoly::from_i64s(&b);
            let pc = ZPoly::from_i64s(&c);
            proptest::prop_assert_eq!(
                pa.mul(&ZRing, &pb).mul(&ZRing, &pc),
                pa.mul(&ZRing, &pb.mul(&ZRing, &pc))
            );
        }

        #[test]
        fn prop_shift_round_trip(a in proptest::collection::vec(-50i64..50, 0..10),
                                 h in -20i64..20) {
            let pa = ZPoly::from_i64s(&a);
            let hh = BigInt::from(h);
            proptest::prop_assert_eq!(pa.shift_int(&hh).shift_int(&(-hh.clone())), pa);
        }

        #[test]
        fn prop_gcd_divides(a in proptest::collection::vec(-9i64..9, 1..7),
                            b in proptest::collection::vec(-9i64..9, 1..7)) {
            let pa = ZPoly::from_i64s(&a);
            let pb = ZPoly::from_i64s(&b);
            proptest::prop_assume!(!pa.is_zero() || !pb.is_zero());
            let g = zpoly_gcd(&pa, &pb).unwrap();
            if !pa.is_zero() {
                let (_, r, _) = pa.pseudo_div_rem(&ZRing, &g);
                proptest::prop_assert!(r.is_zero());
            }
            if !pb.is_zero() {
                let (_, r, _) = pb.pseudo_div_rem(&ZRing, &g);
                proptest::prop_assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn karatsuba_threshold_is_tunable_constant() {
        // documented default
        assert_eq!(KARATSUBA_THRESHOLD, 32);
        assert!(KARATSUBA_THRESHOLD.to_i64().is_some());
    }
}

//! Linear difference operators and the binomial-basis conversion.
//!
//! An operator `a_r(n) S^r + ... + a_0(n)` acts on sequences by
//! `(Op u)(n) = sum_i a_i(n) u(n+i)`. The module provides the noncommutative
//! operator algebra (with `S q(n) = q(n+1) S`), translations, companion
//! matrices, and the conversion to the recurrence satisfied by a solution's
//! coefficients in the binomial basis `{binom(n,k)}`: the ring morphism
//! `phi(S_n) = 1 + S_k`, `phi(n) = k (1 + S_k^{-1})` applied coefficient by
//! coefficient, followed by a valuation normalization that may emit boundary
//! constraints on the first coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::factorial::RatMat;
use crate::introots::{integer_roots_in_range, largest_root_at_least};
use crate::poly::{Poly, QPoly, ZPoly};
use crate::ring::{BigRat, Ring, ZRing};
use crate::Result;

/// A linear difference operator with polynomial coefficients over `R`,
/// plus an optional polynomial right-hand side.
///
/// `coeffs[i]` multiplies `u(n+i)`; the leading and trailing coefficients
/// are nonzero (a zero trailing block is normalized away by shifting the
/// whole operator, which renames `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct RecOp<R: Ring> {
    pub coeffs: Vec<Poly<R>>,
    pub rhs: Option<Poly<R>>,
}

/// The user-facing instantiation over integer polynomials.
pub type RecOperator = RecOp<ZRing>;

impl<R: Ring> RecOp<R> {
    /// Normalizing constructor. Strips zero leading coefficients; if the
    /// trailing coefficient block is zero, divides by the corresponding
    /// power of the shift (substituting `n -> n - v` throughout).
    pub fn new(ring: &R, mut coeffs: Vec<Poly<R>>, rhs: Option<Poly<R>>) -> Result<Self> {
        while matches!(coeffs.last(), Some(c) if c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroInput {
                context: "all operator coefficients are zero",
            });
        }
        let val = coeffs.iter().take_while(|c| c.is_zero()).count();
        let mut rhs = rhs.filter(|f| !f.is_zero());
        if val > 0 {
            let shift = ring.from_i64(-(val as i64));
            coeffs = coeffs[val..]
                .iter()
                .map(|c| c.shift_var(ring, &shift))
                .collect();
            rhs = rhs.map(|f| f.shift_var(ring, &shift));
        }
        Ok(RecOp { coeffs, rhs })
    }

    pub fn homogeneous(ring: &R, coeffs: Vec<Poly<R>>) -> Result<Self> {
        RecOp::new(ring, coeffs, None)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Poly<R> {
        self.coeffs.last().unwrap()
    }

    pub fn trailing(&self) -> &Poly<R> {
        &self.coeffs[0]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_none()
    }

    /// Apply to a polynomial: `sum_i a_i(n) p(n+i)`.
    pub fn apply_poly(&self, ring: &R, p: &Poly<R>) -> Poly<R> {
        let mut acc = Poly::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            let shifted = p.shift_var(ring, &ring.from_i64(i as i64));
            acc = acc.add(ring, &a.mul(ring, &shifted));
        }
        acc
    }

    /// Noncommutative product: `(self * other) u = self (other u)`.
    /// Right-hand sides are not composed; the result is homogeneous.
    pub fn mul_op(&self, ring: &R, other: &RecOp<R>) -> RecOp<R> {
        let n = self.order() + other.order() + 1;
        let mut coeffs = vec![Poly::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let shifted = b.shift_var(ring, &ring.from_i64(i as i64));
                coeffs[i + j] = coeffs[i + j].add(ring, &a.mul(ring, &shifted));
            }
        }
        RecOp::new(ring, coeffs, None).expect("product of nonzero operators is nonzero")
    }

    /// Translation `n -> n + alpha` applied to all coefficients and the rhs.
    pub fn translate(&self, ring: &R, alpha: &R::Elem) -> RecOp<R> {
        RecOp {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.shift_var(ring, alpha))
                .collect(),
            rhs: self.rhs.as_ref().map(|f| f.shift_var(ring, alpha)),
        }
    }

    pub fn without_rhs(&self) -> RecOp<R> {
        RecOp {
            coeffs: self.coeffs.clone(),
            rhs: None,
        }
    }

    pub fn with_rhs(&self, rhs: Poly<R>) -> RecOp<R> {
        RecOp {
            coeffs: self.coeffs.clone(),
            rhs: Some(rhs).filter(|f| !f.is_zero()),
        }
    }
}

impl RecOperator {
    /// True iff the leading coefficient has no integer root in `[0, horizon]`.
    pub fn is_ordinary(&self, horizon: &BigInt) -> bool {
        integer_roots_in_range(self.leading(), &BigInt::zero(), horizon).is_empty()
    }

    /// Smallest translation making both the leading and trailing
    /// coefficients root-free on the nonnegative integers: one past the
    /// largest nonnegative integer root of `a_r * a_0`, or zero if there is
    /// none.
    pub fn find_ordinary_shift(&self) -> BigInt {
        let prod = self.leading().mul(&ZRing, self.trailing());
        match largest_root_at_least(&prod, &BigInt::zero()) {
            Some(r) => r + 1,
            None => BigInt::zero(),
        }
    }

    /// Apply to a rational-coefficient polynomial.
    pub fn apply_qpoly(&self, p: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            let shifted = p.shift(&BigRat::from_integer(BigInt::from(i)));
            acc = acc.add(&shifted.mul(&a.to_qpoly()));
        }
        acc
    }

    /// Unroll the recurrence from initial values `u_0..u_{r-1}`, producing
    /// `len` terms. Fails where the leading coefficient vanishes.
    pub fn unroll(&self, init: &[BigRat], len: usize) -> Result<Vec<BigRat>> {
        let r = self.order();
        assert!(r >= 1, "unroll needs order >= 1");
        assert_eq!(init.len(), r);
        let mut u: Vec<BigRat> = init.to_vec();
        if len <= u.len() {
            u.truncate(len);
            return Ok(u);
        }
        while u.len() < len {
            let n = BigInt::from(u.len() - r);
            let lead = self.leading().eval(&n);
            if lead.is_zero() {
                return Err(Error::NonOrdinary { index: n });
            }
            let mut s = match &self.rhs {
                Some(f) => BigRat::from_integer(f.eval(&n)),
                None => BigRat::zero(),
            };
            for (i, a) in self.coeffs.iter().enumerate().take(r) {
                s -= BigRat::from_integer(a.eval(&n)) * &u[u.len() - r + i];
            }
            u.push(s / BigRat::from_integer(lead));
        }
        Ok(u)
    }

    /// Companion matrix `C(x)`: with the state `U_n = (u_n, ..., u_{n-r+1})^t`,
    /// `U_{n+1} = C(n+1) U_n` reproduces the recurrence. Stored as polynomial
    /// numerators over the scalar denominator `a_r(x - r)`.
    pub fn companion_matrix(&self) -> Result<RatMat<ZRing>> {
        companion_matrix(&ZRing, self)
    }
}

/// Generic companion matrix construction; rejects nonhomogeneous input.
pub fn companion_matrix<R: Ring>(ring: &R, op: &RecOp<R>) -> Result<RatMat<R>> {
    if !op.is_homogeneous() {
        return Err(Error::invalid(
            "companion matrix of a nonhomogeneous operator (use the affine path)",
        ));
    }
    let r = op.order();
    if r == 0 {
        return Err(Error::invalid("companion matrix needs order >= 1"));
    }
    let back = ring.from_i64(-(r as i64));
    let den = op.leading().shift_var(ring, &back);
    let mut num = vec![Poly::zero(); r * r];
    for i in 0..r {
        // first row: u_{n+1} = -sum_i a_i(n+1-r)/a_r(n+1-r) u_{n+1-r+i}
        num[r - 1 - i] = op.coeffs[i].shift_var(ring, &back).neg(ring);
    }
    for j in 1..r {
        num[j * r + j - 1] = den.clone();
    }
    Ok(RatMat { size: r, num, den })
}

// ---- Laurent operators and the morphism phi ---------------------------------

/// Operator with shifts `S^val .. S^(val+len-1)`, coefficients polynomials
/// in `k`. Products use the normalization `S^i q(k) = q(k+i) S^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentOp<R: Ring> {
    pub val: i64,
    pub coeffs: Vec<Poly<R>>,
}

impl<R: Ring> LaurentOp<R> {
    pub fn zero() -> Self {
        LaurentOp {
            val: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn identity(ring: &R) -> Self {
        LaurentOp {
            val: 0,
            coeffs: vec![Poly::constant(ring, ring.one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn normalize(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.val += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.val = 0;
        }
    }

    pub fn coeff_of_shift(&self, shift: i64) -> Poly<R> {
        let idx = shift - self.val;
        if idx < 0 {
            return Poly::zero();
        }
        self.coeffs
            .get(idx as usize)
            .cloned()
            .unwrap_or_else(Poly::zero)
    }

    pub fn max_shift(&self) -> i64 {
        self.val + self.coeffs.len() as i64 - 1
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.val.min(other.val);
        let hi = self.max_shift().max(other.max_shift());
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for s in lo..=hi {
            coeffs.push(self.coeff_of_shift(s).add(ring, &other.coeff_of_shift(s)));
        }
        let mut out = LaurentOp { val: lo, coeffs };
        out.normalize();
        out
    }

    pub fn mul(&self, ring: &R, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentOp::zero();
        }
        let lo = self.val + other.val;
        let hi = self.max_shift() + other.max_shift();
        let mut coeffs = vec![Poly::zero(); (hi - lo + 1) as usize];
        for (ia, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sa = self.val + ia as i64;
            for (ib, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let sb = other.val + ib as i64;
                // (a(k) S^sa)(b(k) S^sb) = a(k) b(k+sa) S^(sa+sb)
                let shifted = b.shift_var(ring, &ring.from_i64(sa));
                let idx = (sa + sb - lo) as usize;
                coeffs[idx] = coeffs[idx].add(ring, &a.mul(ring, &shifted));
            }
        }
        let mut out = LaurentOp { val: lo, coeffs };
        out.normalize();
        out
    }

    /// Apply to a finitely supported coefficient list (indices below zero
    /// and beyond the list are zero): returns `(T c)(k)` for `k = 0..len`.
    pub fn apply_coeffs(&self, ring: &R, c: &[R::Elem], len: usize) -> Vec<R::Elem> {
        (0..len)
            .map(|k| {
                let mut acc = ring.zero();
                for (i, b) in self.coeffs.iter().enumerate() {
                    let shift = self.val + i as i64;
                    let idx = k as i64 + shift;
                    if idx < 0 || idx >= c.len() as i64 {
                        continue;
                    }
                    let bk = b.eval_bigint(ring, &BigInt::from(k));
                    acc = ring.mul_add(&acc, &bk, &c[idx as usize]);
                }
                acc
            })
            .collect()
    }
}

/// The image `phi(op)` of a difference operator under the binomial-basis
/// morphism, as a Laurent operator in `k`.
pub fn phi_image<R: Ring>(ring: &R, op: &RecOp<R>) -> LaurentOp<R> {
    let k_poly = Poly::from_coeffs(ring, vec![ring.zero(), ring.one()]);
    // phi(n) = k + k S^{-1}
    let phi_n = LaurentOp {
        val: -1,
        coeffs: vec![k_poly.clone(), k_poly],
    };
    // phi(S_n) = 1 + S_k
    let one_plus_s = LaurentOp {
        val: 0,
        coeffs: vec![
            Poly::constant(ring, ring.one()),
            Poly::constant(ring, ring.one()),
        ],
    };
    let mut acc = LaurentOp::zero();
    let mut s_pow = LaurentOp::identity(ring);
    for (i, a) in op.coeffs.iter().enumerate() {
        if i > 0 {
            s_pow = s_pow.mul(ring, &one_plus_s);
        }
        if a.is_zero() {
            continue;
        }
        // Horner evaluation of a at the operator phi(n)
        let mut horner = LaurentOp::zero();
        for c in a.coeffs.iter().rev() {
            horner = horner.mul(ring, &phi_n);
            horner = horner.add(
                ring,
                &LaurentOp {
                    val: 0,
                    coeffs: vec![Poly::constant(ring, c.clone())],
                },
            );
        }
        acc = acc.add(ring, &horner.mul(ring, &s_pow));
    }
    acc
}

// ---- RecToRec ----------------------------------------------------------------

/// The recurrence satisfied by binomial-basis coefficients, normalized so
/// the trailing coefficient is nonzero.
///
/// The relations `sum_i op.coeffs[i](j) c_{j+i} = rhs_at(j)` hold for every
/// state index `j >= valid_from`; coefficients `c_0..c_{valid_from-1}` are
/// constrained only by `constraints` (each a row over the first `ic_len()`
/// coefficients together with a right-hand side value).
#[derive(Clone, Debug)]
pub struct BinomialSystem<R: Ring> {
    pub op: RecOp<R>,
    pub valid_from: usize,
    pub constraints: Vec<(Vec<R::Elem>, R::Elem)>,
    /// Finite-support right-hand side values `g(0), g(1), ...` in the
    /// original `k` indexing; empty for homogeneous systems.
    pub rhs_values: Vec<R::Elem>,
    /// Relation at state `j` has right-hand side `rhs_values[j + rhs_offset]`.
    pub rhs_offset: i64,
}

impl<R: Ring> BinomialSystem<R> {
    /// Number of initial coefficients that determine the whole sequence.
    pub fn ic_len(&self) -> usize {
        self.valid_from + self.op.order()
    }

    /// Right-hand side of the relation at state index `j`.
    pub fn rhs_at(&self, ring: &R, j: usize) -> R::Elem {
        let idx = j as i64 + self.rhs_offset;
        if idx < 0 || idx >= self.rhs_values.len() as i64 {
            ring.zero()
        } else {
            self.rhs_values[idx as usize].clone()
        }
    }

    /// Largest state index at which the right-hand side is nonzero.
    pub fn last_inhom_state(&self, ring: &R) -> Option<usize> {
        let mut last = None;
        for (i, v) in self.rhs_values.iter().enumerate() {
            if !ring.is_zero(v) {
                let j = i as i64 - self.rhs_offset;
                if j >= self.valid_from as i64 {
                    last = Some(j as usize);
                }
            }
        }
        last
    }

    /// The indicial polynomial at infinity: the trailing coefficient in the
    /// state variable, times the boundary factors `k (k-1) ...` for the
    /// unconstrained low coefficients. Nonnegative integer roots are the
    /// candidate degrees of finitely supported solutions.
    pub fn indicial(&self, ring: &R) -> Poly<R> {
        let mut ind = self.op.trailing().clone();
        for j in 0..self.valid_from {
            let factor = Poly::from_coeffs(ring, vec![ring.from_i64(-(j as i64)), ring.one()]);
            ind = ind.mul(ring, &factor);
        }
        ind
    }
}

/// Convert an operator to the system satisfied by the binomial-basis
/// coefficients of its solutions. A nonzero `rhs` on the operator is
/// expanded in the binomial basis and threaded through.
pub fn rec_to_rec<R: Ring>(ring: &R, op: &RecOp<R>) -> BinomialSystem<R> {
    let t = phi_image(ring, &op.without_rhs());
    let g = match &op.rhs {
        Some(f) => binomial_coeffs(ring, f),
        None => Vec::new(),
    };
    assert!(!t.is_zero(), "phi image of a nonzero operator is nonzero");
    let r = t.max_shift();
    if t.val >= 0 {
        // relations `(T c)(k) = g(k)` reference c_{k+val}..; rename the state
        // index so the trailing term is c_j
        let v = t.val as usize;
        let back = ring.from_i64(-(v as i64));
        let coeffs: Vec<Poly<R>> = t.coeffs.iter().map(|c| c.shift_var(ring, &back)).collect();
        let op_k = RecOp::new(ring, coeffs, None).expect("nonzero image");
        BinomialSystem {
            op: op_k,
            valid_from: v,
            constraints: Vec::new(),
            rhs_values: g,
            rhs_offset: -(v as i64),
        }
    } else {
        // multiply by S^s on the left; emit the s boundary relations
        let s = (-t.val) as usize;
        let fwd = ring.from_i64(s as i64);
        let coeffs: Vec<Poly<R>> = t.coeffs.iter().map(|c| c.shift_var(ring, &fwd)).collect();
        let op_k = RecOp::new(ring, coeffs, None).expect("nonzero image");
        let sigma = (r + s as i64) as usize;
        let mut constraints = Vec::new();
        for i in 0..s {
            let mut row = vec![ring.zero(); sigma];
            for (idx, b) in t.coeffs.iter().enumerate() {
                let shift = t.val + idx as i64;
                let pos = i as i64 + shift;
                if pos < 0 {
                    continue; // c_k = 0 for k < 0
                }
                let value = b.eval_bigint(ring, &BigInt::from(i));
                let slot = &mut row[pos as usize];
                *slot = ring.add(slot, &value);
            }
            let rhs = g.get(i).cloned().unwrap_or_else(|| ring.zero());
            constraints.push((row, rhs));
        }
        BinomialSystem {
            op: op_k,
            valid_from: 0,
            constraints,
            rhs_values: g,
            rhs_offset: s as i64,
        }
    }
}

/// The indicial polynomial at infinity of an operator (trailing coefficient
/// of its binomial-basis system, boundary factors included).
pub fn indicial_polynomial<R: Ring>(ring: &R, op: &RecOp<R>) -> Poly<R> {
    rec_to_rec(ring, &op.without_rhs()).indicial(ring)
}

// ---- Binomial basis conversions ----------------------------------------------

/// Coefficients of `u` in the binomial basis: `c_k = Delta^k u(0)`, by a
/// forward difference table. No divisions, so this works over any ring.
pub fn binomial_coeffs<R: Ring>(ring: &R, u: &Poly<R>) -> Vec<R::Elem> {
    if u.is_zero() {
        return Vec::new();
    }
    let d = u.deg0();
    let mut row: Vec<R::Elem> = (0..=d)
        .map(|i| u.eval_bigint(ring, &BigInt::from(i)))
        .collect();
    let mut out = Vec::with_capacity(d + 1);
    for k in 0..=d {
        out.push(row[0].clone());
        for i in 0..d - k {
            row[i] = ring.sub(&row[i + 1], &row[i]);
        }
        row.truncate(d - k);
    }
    out
}

/// Binomial-basis coefficients of a rational polynomial.
pub fn binomial_expand(u: &QPoly) -> Vec<BigRat> {
    if u.is_zero() {
        return Vec::new();
    }
    let d = u.degree().unwrap();
    let mut row: Vec<BigRat> = (0..=d as i64)
        .map(|i| u.eval(&BigRat::from_integer(BigInt::from(i))))
        .collect();
    let mut out = Vec::with_capacity(d + 1);
    for k in 0..=d {
        out.push(row[0].clone());
        for i in 0..d - k {
            row[i] = &row[i + 1] - &row[i];
        }
        row.truncate(d - k);
    }
    out
}

/// Inverse of [`binomial_expand`]: `sum_k c_k binom(n, k)` as a polynomial.
pub fn binomial_collect(cs: &[BigRat]) -> QPoly {
    let mut acc = QPoly::zero();
    let mut basis = QPoly::constant(BigRat::one());
    for (k, c) in cs.iter().enumerate() {
        acc = acc.add(&basis.scale(c));
        // binom(n, k+1) = binom(n, k) * (n - k) / (k + 1)
        let factor = QPoly::from_coeffs(vec![
            BigRat::from_integer(BigInt::from(-(k as i64))),
            BigRat::one(),
        ])
        .scale(&BigRat::new(BigInt::one(), BigInt::from(k as i64 + 1)));
        basis = basis.mul(&factor);
    }
    acc
}

/// Values of `binom(x, k)` for `k = 0..=kmax` at a rational point.
pub fn binom_values(x: &BigRat, kmax: usize) -> Vec<BigRat> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut b = BigRat::one();
    out.push(b.clone());
    for k in 0..kmax {
        let num = x - BigRat::from_integer(BigInt::from(k));
        b = b * num / BigRat::from_integer(BigInt::from(k + 1));
        out.push(b.clone());
    }
    out
}

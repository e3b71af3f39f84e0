//! The factored Gosper-Petkovsek form: a pair decomposition
//! `P(n)/Q(n) = A(n)/B(n) * C(n+1)/C(n)` where
//! `C(n) = prod_i g_i(n-1) ... g_i(n-h_i)` is never expanded. The `h_i` are
//! the positive integer roots of `Res_n(P(n), Q(n+h))` (the dispersion set);
//! processing them from the smallest up yields the classical normal form,
//! whose gcd side conditions hold whenever `P` and `Q` are coprime.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::factorial::product_scalar_range;
use crate::introots::{integer_roots, integer_roots_in_range};
use crate::poly::{resultant_in_h, zpoly_gcd, ZPoly};
use crate::ring::{BigRat, FpRing, Ring, ZRing};
use crate::Result;

/// Guard for explicit evaluation/expansion of `C`: the factored blocks may
/// span astronomically many indices.
pub const DEFAULT_C_LIMIT: u64 = 1 << 22;

/// Factored Gosper-Petkovsek data. `factors` is sorted by descending shift.
#[derive(Clone, Debug, PartialEq)]
pub struct GPForm {
    pub a: ZPoly,
    pub b: ZPoly,
    pub factors: Vec<(ZPoly, BigInt)>,
}

impl GPForm {
    /// Degree of the (unexpanded) polynomial `C`.
    pub fn c_degree(&self) -> BigInt {
        let mut d = BigInt::zero();
        for (g, h) in &self.factors {
            d += h * BigInt::from(g.deg0());
        }
        d
    }

    /// True iff `C(k) != 0`, decided from the integer roots of the factors
    /// without evaluating the product.
    pub fn c_nonzero_at(&self, k: &BigInt) -> bool {
        for (g, h) in &self.factors {
            // C contains g(k - j) for j = 1..h
            let lo = k - h;
            let hi = k - 1u32;
            if !integer_roots_in_range(g, &lo, &hi).is_empty() {
                return false;
            }
        }
        true
    }

    /// Exact value `C(k) = prod_i g_i(k-1) ... g_i(k-h_i)` by binary
    /// splitting over each factor's index range.
    pub fn eval_c(&self, k: &BigInt) -> Result<BigRat> {
        let mut acc = BigInt::one();
        for (g, h) in &self.factors {
            if h.to_u64().map_or(true, |hv| hv > DEFAULT_C_LIMIT) {
                return Err(Error::DegreeLimitExceeded {
                    requested: h.clone(),
                    limit: DEFAULT_C_LIMIT,
                });
            }
            let lo = k - h;
            let hi = k - 1u32;
            let block = product_scalar_range(&ZRing, &|x: &BigInt| g.eval(x), &lo, &hi);
            acc *= block;
        }
        Ok(BigRat::from_integer(acc))
    }

    /// `C(k) mod p` via the same product splitting.
    pub fn eval_c_mod_p(&self, k: &BigInt, p: u64) -> u64 {
        let ring = FpRing::new(p);
        let mut acc = ring.one();
        for (g, h) in &self.factors {
            let lo = k - h;
            let hi = k - 1u32;
            let gp = crate::fp::zpoly_mod_p(g, &ring);
            let block = product_scalar_range(&ring, &|x: &BigInt| gp.horner(&ring, &ring.from_bigint(x)), &lo, &hi);
            acc = ring.mul(&acc, &block);
        }
        acc
    }

    /// Numerator and denominator of `C(n) / C(n+j)` from the factored form:
    /// `prod_i g_i(n+j-1-h_i) ... g_i(n-h_i) / prod_i g_i(n+j-1) ... g_i(n)`.
    /// Returned unreduced.
    pub fn shift_quotient(&self, j: u32) -> (ZPoly, ZPoly) {
        assert!(j >= 1);
        let mut num = ZPoly::from_i64s(&[1]);
        let mut den = ZPoly::from_i64s(&[1]);
        for (g, h) in &self.factors {
            for t in 0..j as i64 {
                // numerator factor g(n + t - h), denominator factor g(n + t)
                let off = BigInt::from(t) - h;
                num = num.mul(&ZRing, &g.shift_int(&off));
                den = den.mul(&ZRing, &g.shift_int(&BigInt::from(t)));
            }
        }
        (num, den)
    }

    /// Expand `C` explicitly (guarded; tests and small cases only).
    pub fn expand_c(&self, limit: u64) -> Result<ZPoly> {
        let mut acc = ZPoly::from_i64s(&[1]);
        for (g, h) in &self.factors {
            let hv = h.to_u64().filter(|&hv| hv <= limit).ok_or_else(|| {
                Error::DegreeLimitExceeded {
                    requested: h.clone(),
                    limit,
                }
            })?;
            for j in 1..=hv {
                acc = acc.mul(&ZRing, &g.shift_int(&BigInt::from(-(j as i64))));
            }
            if acc.deg0() as u64 > limit {
                return Err(Error::DegreeLimitExceeded {
                    requested: BigInt::from(acc.deg0()),
                    limit,
                });
            }
        }
        Ok(acc)
    }
}

/// Positive integer roots of `Res_n(P(n), Q(n+h))`, descending.
pub fn dispersion_set(p: &ZPoly, q: &ZPoly) -> Result<Vec<BigInt>> {
    let r = resultant_in_h(p, q)?;
    if r.is_zero() {
        // cannot happen for nonzero p, q, kept as a guard
        return Err(Error::invalid("identically zero dispersion resultant"));
    }
    if r.deg0() == 0 {
        return Ok(Vec::new());
    }
    let mut roots: Vec<BigInt> = integer_roots(&r)
        .into_iter()
        .filter(|h| h.is_positive())
        .collect();
    roots.sort();
    roots.reverse();
    Ok(roots)
}

/// The factored Gosper-Petkovsek form of an ordered pair `(P, Q)`.
///
/// Shifts are processed smallest first; each extracted factor
/// `g = gcd(A(n), B(n+h))` is primitive with positive leading coefficient
/// (contents stay in `A` and `B`). The output satisfies
/// `P/Q = A/B * C(n+1)/C(n)`, and for coprime inputs also the gcd side
/// conditions `gcd(A(n), C(n)) = gcd(B(n), C(n+1)) = 1` and
/// `gcd(A(n), B(n+h)) = 1` for all natural `h`.
pub fn compact_gpf(p: &ZPoly, q: &ZPoly) -> Result<GPForm> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroInput {
            context: "Gosper-Petkovsek form of a zero polynomial",
        });
    }
    let mut shifts = dispersion_set(p, q)?;
    shifts.reverse(); // ascending processing order
    let mut a = p.clone();
    let mut b = q.clone();
    let mut factors: Vec<(ZPoly, BigInt)> = Vec::new();
    for h in shifts {
        let bh = b.shift_int(&h);
        let g = zpoly_gcd(&a, &bh)?;
        if g.deg0() == 0 {
            continue;
        }
        a = a.exact_div(&ZRing, &g)?;
        b = b.exact_div(&ZRing, &g.shift_int(&(-&h)))?;
        factors.push((g, h));
    }
    factors.sort_by(|(_, h1), (_, h2)| h2.cmp(h1));
    Ok(GPForm { a, b, factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    #[test]
    fn dispersion_examples() {
        // (n, n - N), N = 2^100
        let n100 = BigInt::from(2u32).pow(100);
        let q = ZPoly::from_bigints(vec![-&n100, BigInt::one()]);
        assert_eq!(dispersion_set(&zp(&[0, 1]), &q).unwrap(), vec![n100]);
        // (n, n): only h = 0, excluded
        assert!(dispersion_set(&zp(&[0, 1]), &zp(&[0, 1])).unwrap().is_empty());
        // (n(n-3), n): roots 0,3 against 0 -> h = 3 only positive
        let p = zp(&[0, 1]).mul(&ZRing, &zp(&[-3, 1]));
        assert_eq!(dispersion_set(&p, &zp(&[0, 1])).unwrap(), vec![BigInt::from(3)]);
    }

    #[test]
    fn dispersion_matches_brute_force_scan() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..25 {
            // random products of linear factors with roots <= 50
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[1]);
                for _ in 0..rng.gen_range(1..=3) {
                    let r = rng.gen_range(-10i64..=50);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            let fast = dispersion_set(&p, &q).unwrap();
            let mut slow = Vec::new();
            for h in (1i64..=100).rev() {
                let qh = q.shift_int(&BigInt::from(h));
                let g = zpoly_gcd(&p, &qh).unwrap();
                if g.deg0() > 0 {
                    slow.push(BigInt::from(h));
                }
            }
            assert_eq!(fast, slow, "p {:?} q {:?}", p.coeffs, q.coeffs);
        }
    }

    #[test]
    fn gpf_single_block() {
        // CompactGPF(n, n - N) = (1, 1, {(n, N)})
        let n = BigInt::from(6);
        let q = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        let gp = compact_gpf(&zp(&[0, 1]), &q).unwrap();
        assert_eq!(gp.a, zp(&[1]));
        assert_eq!(gp.b, zp(&[1]));
        assert_eq!(gp.factors, vec![(zp(&[0, 1]), n.clone())]);
        // C(n) = (n-1)...(n-6); C(0) = 720
        assert_eq!(
            gp.eval_c(&BigInt::zero()).unwrap(),
            BigRat::from_integer(BigInt::from(720))
        );
        assert_eq!(gp.c_degree(), n);
    }

    #[test]
    fn gpf_coprime_inputs_with_empty_dispersion() {
        let p = zp(&[1, 3, 1]);
        let q = zp(&[5, 0, 0, 2]);
        let gp = compact_gpf(&p, &q).unwrap();
        assert_eq!(gp.a, p);
        assert_eq!(gp.b, q);
        assert!(gp.factors.is_empty());
        assert_eq!(gp.eval_c(&BigInt::from(9)).unwrap(), BigRat::one());
        let (num, den) = gp.shift_quotient(2);
        assert_eq!(num, zp(&[1]));
        assert_eq!(den, zp(&[1]));
    }

    /// Check identity (P/Q) = (A/B) * C(n+1)/C(n) at sample points, using
    /// the factored quotient for C(n+1)/C(n).
    fn check_identity(p: &ZPoly, q: &ZPoly, gp: &GPForm, samples: i64) {
        let (cq_num, cq_den) = gp.shift_quotient(1); // C(n)/C(n+1)
        for x in 0..samples {
            let x = BigInt::from(x * 7 + 1000); // avoid small roots
            let lhs_num = p.eval(&x).clone() * cq_num.eval(&x) * gp.b.eval(&x);
            let lhs_den = q.eval(&x).clone() * cq_den.eval(&x) * gp.a.eval(&x);
            // P/Q = A/B * C(n+1)/C(n)  <=>  P * B * (C(n)/C(n+1)).num ... =
            // Q * A * (C(n)/C(n+1)).den with the quotient inverted:
            // P/Q * C(n)/C(n+1) = A/B
            assert_eq!(lhs_num * BigInt::one(), lhs_den, "sample {x}");
        }
    }

    #[test]
    fn gpf_identity_on_spec_pair() {
        // ((n+1)(n+5), (n+1) n)
        let p = zp(&[1, 1]).mul(&ZRing, &zp(&[5, 1]));
        let q = zp(&[1, 1]).mul(&ZRing, &zp(&[0, 1]));
        let gp = compact_gpf(&p, &q).unwrap();
        check_identity(&p, &q, &gp, 20);
        // gcd conditions for this (non-coprime!) input do not apply, but C
        // should be expandable and consistent with the dispersion {1,4,5}
        let c = gp.expand_c(100).unwrap();
        assert!(c.deg0() >= 1);
    }

    #[test]
    fn gpf_side_conditions_for_coprime_inputs() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 20 {
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[1]);
                for _ in 0..rng.gen_range(1..=2) {
                    let r = rng.gen_range(-8i64..=8);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            if zpoly_gcd(&p, &q).unwrap().deg0() > 0 {
                continue;
            }
            checked += 1;
            let gp = compact_gpf(&p, &q).unwrap();
            check_identity(&p, &q, &gp, 30);
            let c = gp.expand_c(1000).unwrap();
            // gcd(A, C) = 1 and gcd(B, C(n+1)) = 1
            assert_eq!(zpoly_gcd(&gp.a, &c).unwrap().deg0(), 0, "gcd(A,C) != 1");
            let c_shift = c.shift_int(&BigInt::one());
            assert_eq!(
                zpoly_gcd(&gp.b, &c_shift).unwrap().deg0(),
                0,
                "gcd(B,C+) != 1"
            );
            // gcd(A(n), B(n+h)) = 1 for all h: the dispersion of (A, B) must
            // be empty after the loop
            assert!(dispersion_set(&gp.a, &gp.b).unwrap().is_empty());
            assert_eq!(zpoly_gcd(&gp.a, &gp.b).unwrap().deg0(), 0);
        }
    }

    #[test]
    fn shift_quotient_telescopes() {
        // example pair (n, n-N): C(n) = (n-1)...(n-N), so
        // C(n)/C(n+1) = (n-N)/n
        let n = BigInt::from(6);
        let q = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        let gp = compact_gpf(&zp(&[0, 1]), &q).unwrap();
        let (num, den) = gp.shift_quotient(1);
        assert_eq!(num, ZPoly::from_bigints(vec![-&n, BigInt::one()]));
        assert_eq!(den, zp(&[0, 1]));
    }

    #[test]
    fn shift_quotient_cocycle() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[1]);
                for _ in 0..rng.gen_range(1..=2) {
                    let r = rng.gen_range(-6i64..=6);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            let gp = compact_gpf(&p, &q).unwrap();
            // C(n)/C(n+2) = [C(n)/C(n+1)] * [C(n+1)/C(n+2)] at sample points
            let (n2, d2) = gp.shift_quotient(2);
            let (n1, d1) = gp.shift_quotient(1);
            for x in 0..10i64 {
                let x = BigInt::from(1000 + 13 * x);
                let lhs = BigRat::new(n2.eval(&x), d2.eval(&x));
                let rhs = BigRat::new(n1.eval(&x), d1.eval(&x))
                    * BigRat::new(n1.eval(&(&x + 1u32)), d1.eval(&(&x + 1u32)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn eval_c_matches_iterative_product() {
        // one moderately large block evaluated both ways
        let n = BigInt::from(100_000u32);
        let q = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        let gp = compact_gpf(&zp(&[0, 1]), &q).unwrap();
        let k = BigInt::from(-3);
        let fast = gp.eval_c(&k).unwrap();
        // slow oracle, run once
        let mut slow = BigInt::one();
        let mut j = BigInt::one();
        while j <= n {
            slow *= &k - &j;
            j += 1u32;
        }
        assert_eq!(fast, BigRat::from_integer(slow));
    }

    #[test]
    fn eval_c_mod_p_matches_exact() {
        let n = BigInt::from(500);
        let q = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        let gp = compact_gpf(&zp(&[0, 1]), &q).unwrap();
        let p = 1_000_003u64;
        let ring = FpRing::new(p);
        let exact = gp.eval_c(&BigInt::from(7)).unwrap();
        let modular = gp.eval_c_mod_p(&BigInt::from(7), p);
        assert_eq!(ring.from_bigint(exact.numer()), modular);
    }

    #[test]
    fn c_nonzero_at_checks_roots_without_evaluation() {
        let n = BigInt::from(2u32).pow(100);
        let q = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        let gp = compact_gpf(&zp(&[0, 1]), &q).unwrap();
        // C(n) = (n-1)...(n-2^100): zero on [1, 2^100], nonzero at 0
        assert!(gp.c_nonzero_at(&BigInt::zero()));
        assert!(!gp.c_nonzero_at(&BigInt::one()));
        assert!(!gp.c_nonzero_at(&BigInt::from(2u32).pow(99)));
        assert!(gp.c_nonzero_at(&(&n + 1u32)));
    }
}

//! Integer roots of integer polynomials, sized for roots as large as 2^100.
//!
//! Strategy: take the squarefree part, find its roots modulo a random 62-bit
//! prime, Hensel-lift each modular root until the modulus exceeds twice the
//! Cauchy root bound, and confirm every candidate by exact evaluation. The
//! final verification makes the output correct regardless of the prime, so
//! the prime may be drawn from a hash of the input and the whole routine is
//! deterministic.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::fp::{fp_roots, random_prime, zpoly_mod_p};
use crate::poly::{zpoly_gcd, ZPoly};
use crate::ring::{FpRing, ZRing};

/// All integer roots of `f`, ascending, each listed once.
///
/// Panics on the zero polynomial (every integer is a root).
pub fn integer_roots(f: &ZPoly) -> Vec<BigInt> {
    assert!(!f.is_zero(), "integer_roots of the zero polynomial");
    let mut roots = Vec::new();
    let mut g = f.clone();

    // root at 0 = trailing zero coefficients
    let val = g.coeffs.iter().take_while(|c| c.is_zero()).count();
    if val > 0 {
        roots.push(BigInt::zero());
        g = ZPoly::from_bigints(g.coeffs[val..].to_vec());
    }
    if g.deg0() == 0 {
        roots.sort();
        return roots;
    }

    // squarefree part
    let deriv = g.derivative(&ZRing);
    let sq = zpoly_gcd(&g, &deriv).expect("nonzero inputs");
    if sq.deg0() > 0 {
        g = g.exact_div(&ZRing, &sq).expect("gcd divides");
    }
    g = g.primitive_part(&ZRing);

    if g.deg0() == 1 {
        // linear: exact rational root test
        let (c0, c1) = (g.coeff(&ZRing, 0), g.coeff(&ZRing, 1));
        let (q, r) = (-c0).div_rem(&c1);
        if r.is_zero() {
            roots.push(q);
        }
        roots.sort();
        return roots;
    }

    // Cauchy bound: |root| <= 1 + max|c_i| / |lc|
    let lc = g.lc(&ZRing).abs();
    let bound = BigInt::one() + g.max_coeff_abs().div_ceil(&lc);
    let target = BigInt::from(2) * &bound + 1;

    let mut hasher = DefaultHasher::new();
    for c in &g.coeffs {
        c.to_signed_bytes_le().hash(&mut hasher);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(hasher.finish());

    'prime: for _attempt in 0..64 {
        let p = random_prime(&mut rng, 62);
        let ring = FpRing::new(p);
        let gp = zpoly_mod_p(&g, &ring);
        if gp.deg0() != g.deg0() {
            continue; // p divides the leading coefficient
        }
        let mod_roots = fp_roots(&ring, &gp, &mut rng);
        let gp_deriv = gp.derivative(&ring);
        let mut found = Vec::new();
        for r0 in mod_roots {
            if gp_deriv.horner(&ring, &r0) == 0 {
                // double root mod p (colliding integer roots); bad prime
                continue 'prime;
            }
            if let Some(candidate) = hensel_lift(&g, &BigInt::from(p), &BigInt::from(r0), &target)
            {
                if g.eval(&candidate).is_zero() {
                    found.push(candidate);
                }
            }
        }
        roots.extend(found);
        roots.sort();
        roots.dedup();
        return roots;
    }
    unreachable!("could not find a usable prime for integer root finding");
}

/// Quadratic Hensel lift of a simple root mod p up to a modulus >= target,
/// returned as the symmetric representative. `None` if the derivative
/// degenerates along the way (cannot happen for a simple root, kept as a
/// guard).
fn hensel_lift(f: &ZPoly, p: &BigInt, r0: &BigInt, target: &BigInt) -> Option<BigInt> {
    let deriv = f.derivative(&ZRing);
    let mut modulus = p.clone();
    let mut root = r0.mod_floor(&modulus);
    let mut inv = mod_inverse(&deriv.eval(&root).mod_floor(&modulus), &modulus)?;
    while &modulus < target {
        let m2 = &modulus * &modulus;
        // r' = r - f(r) * inv  (mod m^2)
        let fr = f.eval(&root).mod_floor(&m2);
        root = (&root - fr * &inv).mod_floor(&m2);
        // inv' = inv * (2 - f'(r') * inv)  (mod m^2)
        let d = deriv.eval(&root).mod_floor(&m2);
        inv = (&inv * ((BigInt::from(2) - d * &inv).mod_floor(&m2))).mod_floor(&m2);
        modulus = m2;
    }
    // symmetric representative
    let half = &modulus >> 1;
    if root > half {
        root -= &modulus;
    }
    Some(root)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Integer roots of `f` restricted to `[lo, hi]`, ascending.
pub fn integer_roots_in_range(f: &ZPoly, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    integer_roots(f)
        .into_iter()
        .filter(|r| r >= lo && r <= hi)
        .collect()
}

/// Largest integer root >= `floor`, if any.
pub fn largest_root_at_least(f: &ZPoly, floor: &BigInt) -> Option<BigInt> {
    integer_roots(f).into_iter().filter(|r| r >= floor).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    #[test]
    fn linear_factor_with_huge_root() {
        // h - N with N = 2^100
        let n = BigInt::from(2u32).pow(100);
        let f = ZPoly::from_bigints(vec![-&n, BigInt::one()]);
        assert_eq!(integer_roots(&f), vec![n]);
    }

    #[test]
    fn no_integer_roots() {
        assert!(integer_roots(&zp(&[1, 0, 1])).is_empty()); // n^2 + 1
        assert!(integer_roots(&zp(&[1, 2])).is_empty()); // 2n + 1
    }

    #[test]
    fn mixed_roots_with_huge_factor() {
        // (n - 3)(n - 2^100)(n^2 + n + 1)
        let n100 = BigInt::from(2u32).pow(100);
        let f = zp(&[-3, 1])
            .mul(&ZRing, &ZPoly::from_bigints(vec![-&n100, BigInt::one()]))
            .mul(&ZRing, &zp(&[1, 1, 1]));
        let roots = integer_roots(&f);
        assert_eq!(roots, vec![BigInt::from(3), n100]);
    }

    #[test]
    fn repeated_roots_reported_once() {
        // n^2 (n - 5)^3
        let f = zp(&[0, 0, 1]).mul(&ZRing, &zp(&[-5, 1]).mul(&ZRing, &zp(&[-5, 1])).mul(&ZRing, &zp(&[-5, 1])));
        assert_eq!(integer_roots(&f), vec![BigInt::zero(), BigInt::from(5)]);
    }

    #[test]
    fn roots_match_exhaustive_scan_on_random_small() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..60 {
            let deg = rng.gen_range(1..=6);
            let coeffs: Vec<BigInt> = (0..=deg)
                .map(|_| BigInt::from(rng.gen_range(-1000i64..=1000)))
                .collect();
            let f = Poly::from_coeffs(&ZRing, coeffs);
            if f.is_zero() || f.deg0() == 0 {
                continue;
            }
            let fast = integer_roots(&f);
            // exhaustive scan over the Cauchy bound
            let lc = f.lc(&ZRing).abs();
            let bound = BigInt::one() + f.max_coeff_abs().div_ceil(&lc);
            let mut slow = Vec::new();
            let mut x = -bound.clone();
            while x <= bound {
                if f.eval(&x).is_zero() {
                    slow.push(x.clone());
                }
                x += 1;
            }
            assert_eq!(fast, slow, "poly {:?}", f.coeffs);
        }
    }

    #[test]
    fn every_reported_root_evaluates_to_zero() {
        let f = zp(&[6, -5, -2, 1]); // (n-3)(n+2)(n-1)
        for r in integer_roots(&f) {
            assert!(f.eval(&r).is_zero());
        }
        assert_eq!(integer_roots(&f).len(), 3);
    }

    #[test]
    fn range_filter() {
        let f = zp(&[6, -5, -2, 1]); // roots -2, 1, 3
        let in_range = integer_roots_in_range(&f, &BigInt::zero(), &BigInt::from(2));
        assert_eq!(in_range, vec![BigInt::one()]);
        assert_eq!(
            largest_root_at_least(&f, &BigInt::zero()),
            Some(BigInt::from(3))
        );
    }
}

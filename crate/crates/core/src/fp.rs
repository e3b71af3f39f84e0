//! Modular arithmetic helpers: primality testing, prime sampling, root
//! finding over F_p, and the subproduct-tree machinery (balanced products
//! and multipoint evaluation) used by the baby-step/giant-step factorial.

use num_bigint::BigInt;
use rand::Rng;

use crate::par;
use crate::poly::{field_gcd, field_rem, Poly};
use crate::ring::{FpRing, Ring};

/// Deterministic Miller-Rabin for u64 (the standard 12-witness set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Draw a random prime with the given bit size (clamped to [16, 62] so sums
/// of residues fit in u64).
pub fn random_prime(rng: &mut impl Rng, bits: u32) -> u64 {
    let bits = bits.clamp(16, 62);
    loop {
        let mut cand: u64 = rng.gen();
        cand |= 1; // odd
        cand |= 1 << (bits - 1); // exact bit size
        cand &= (1u64 << bits) - 1;
        if is_prime_u64(cand) {
            return cand;
        }
    }
}

pub type FpPoly = Poly<FpRing>;

/// Reduce an integer polynomial mod p.
pub fn zpoly_mod_p(f: &crate::poly::ZPoly, ring: &FpRing) -> FpPoly {
    Poly::from_coeffs(ring, f.coeffs.iter().map(|c| ring.from_bigint(c)).collect())
}

/// x^e mod f over F_p by square and multiply.
pub fn pow_x_mod(ring: &FpRing, e: u64, f: &FpPoly) -> FpPoly {
    let x = Poly::from_coeffs(ring, vec![0, 1]);
    pow_poly_mod(ring, &x, e, f)
}

fn pow_poly_mod(ring: &FpRing, b: &FpPoly, e: u64, f: &FpPoly) -> FpPoly {
    assert!(f.deg0() >= 1);
    let mut base = field_rem(ring, b, f);
    let mut acc = Poly::constant(ring, 1);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = field_rem(ring, &acc.mul(ring, &base), f);
        }
        base = field_rem(ring, &base.mul(ring, &base), f);
        e >>= 1;
    }
    acc
}

/// All roots of `f` in F_p, each listed once (multiplicities dropped).
///
/// Splits off the product of the distinct linear factors with
/// gcd(x^p - x, f), then separates the roots by random quadratic-residue
/// splitting.
pub fn fp_roots(ring: &FpRing, f: &FpPoly, rng: &mut impl Rng) -> Vec<u64> {
    let mut f = f.clone();
    let mut roots = Vec::new();
    if f.is_zero() {
        return roots;
    }
    if f.deg0() >= 1 && f.coeffs[0] == 0 {
        roots.push(0);
        while f.deg0() >= 1 && f.coeffs[0] == 0 {
            f = Poly::from_coeffs(ring, f.coeffs[1..].to_vec());
        }
    }
    if f.deg0() == 0 {
        return roots;
    }
    let xp = pow_x_mod(ring, ring.p, &f);
    let x = Poly::from_coeffs(ring, vec![0, 1]);
    let lin = field_gcd(ring, &xp.sub(ring, &x), &f);
    if lin.deg0() == 0 {
        return roots;
    }
    split_linear(ring, &lin, rng, &mut roots);
    roots
}

fn split_linear(ring: &FpRing, f: &FpPoly, rng: &mut impl Rng, out: &mut Vec<u64>) {
    let d = f.deg0();
    if d == 0 {
        return;
    }
    if d == 1 {
        let inv = ring.inv(f.coeffs[1]);
        out.push(ring.mul(&ring.neg(&f.coeffs[0]), &inv));
        return;
    }
    // random (x + c)^((p-1)/2) - 1 splits the roots into residue classes
    loop {
        let c: u64 = rng.gen_range(0..ring.p);
        let shifted = Poly::from_coeffs(ring, vec![c, 1]);
        let h = pow_poly_mod(ring, &shifted, (ring.p - 1) / 2, f);
        let h1 = h.sub(ring, &Poly::constant(ring, 1));
        let g = field_gcd(ring, &h1, f);
        let dg = g.deg0();
        if dg > 0 && dg < d {
            let rest = f.exact_div(ring, &g).expect("splitting factor must divide");
            split_linear(ring, &g, rng, out);
            split_linear(ring, &rest, rng, out);
            return;
        }
    }
}

/// Balanced product of a list of polynomials; halves run on the thread pool
/// above a size cutoff.
pub fn product_tree_poly<R: Ring>(ring: &R, items: &[Poly<R>]) -> Poly<R> {
    match items.len() {
        0 => Poly::constant(ring, ring.one()),
        1 => items[0].clone(),
        n => {
            let (lo, hi) = items.split_at(n / 2);
            let (a, b) = if n >= 64 {
                par::join(
                    || product_tree_poly(ring, lo),
                    || product_tree_poly(ring, hi),
                )
            } else {
                (product_tree_poly(ring, lo), product_tree_poly(ring, hi))
            };
            a.mul(ring, &b)
        }
    }
}

/// Multipoint evaluation by remaindering down a subproduct tree.
pub fn multi_eval(ring: &FpRing, f: &FpPoly, points: &[u64]) -> Vec<u64> {
    if points.is_empty() {
        return Vec::new();
    }
    if points.len() <= 8 || f.deg0() <= 8 {
        return points.iter().map(|&x| f.horner(ring, &x)).collect();
    }
    let leaves: Vec<FpPoly> = points
        .iter()
        .map(|&x| Poly::from_coeffs(ring, vec![ring.neg(&x), 1]))
        .collect();
    let mut tree: Vec<Vec<FpPoly>> = vec![leaves];
    while tree.last().unwrap().len() > 1 {
        let prev = tree.last().unwrap();
        let mut next = Vec::with_capacity(prev.len().div_ceil(2));
        for chunk in prev.chunks(2) {
            next.push(if chunk.len() == 2 {
                chunk[0].mul(ring, &chunk[1])
            } else {
                chunk[0].clone()
            });
        }
        tree.push(next);
    }
    let root = field_rem(ring, f, &tree.last().unwrap()[0]);
    let mut rems = vec![root];
    for level in (0..tree.len() - 1).rev() {
        let nodes = &tree[level];
        let mut next = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            let parent = &rems[i / 2];
            // an odd tail node is its parent unchanged
            if i == nodes.len() - 1 && nodes.len() % 2 == 1 {
                next.push(parent.clone());
            } else {
                next.push(field_rem(ring, parent, node));
            }
        }
        rems = next;
    }
    rems.iter()
        .map(|r| r.coeffs.first().copied().unwrap_or(0))
        .collect()
}

/// Value of an integer polynomial at an integer point, mod p.
pub fn eval_zpoly_mod(ring: &FpRing, f: &crate::poly::ZPoly, x: &BigInt) -> u64 {
    zpoly_mod_p(f, ring).horner(ring, &ring.from_bigint(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(341));
        assert!(is_prime_u64(4611686018427387847)); // 62-bit prime
        assert!(!is_prime_u64(4611686018427387846));
    }

    #[test]
    fn random_primes_have_requested_size() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..5 {
            let p = random_prime(&mut rng, 62);
            assert!(is_prime_u64(p));
            assert_eq!(64 - p.leading_zeros(), 62);
        }
    }

    #[test]
    fn roots_of_factored_poly() {
        let ring = FpRing::new(1_000_003);
        let mut f = Poly::from_coeffs(&ring, vec![ring.neg(&5), 1]);
        for r in [77u64, 123456] {
            f = f.mul(&ring, &Poly::from_coeffs(&ring, vec![ring.neg(&r), 1]));
        }
        f = f.mul(&ring, &Poly::from_coeffs(&ring, vec![1, 0, 1]));
        let mut rng = StdRng::seed_from_u64(2);
        let mut roots = fp_roots(&ring, &f, &mut rng);
        roots.sort_unstable();
        for r in [5u64, 77, 123456] {
            assert!(roots.contains(&r));
        }
        for &r in &roots {
            assert_eq!(f.horner(&ring, &r), 0);
        }
    }

    #[test]
    fn root_at_zero_found_once() {
        let ring = FpRing::new(101);
        // x^2 (x - 3)
        let f = Poly::from_coeffs(&ring, vec![0, 0, ring.neg(&3), 1]);
        let mut rng = StdRng::seed_from_u64(4);
        let mut roots = fp_roots(&ring, &f, &mut rng);
        roots.sort_unstable();
        assert_eq!(roots, vec![0, 3]);
    }

    #[test]
    fn multi_eval_matches_horner() {
        let ring = FpRing::new(998_244_353);
        let mut rng = StdRng::seed_from_u64(3);
        let coeffs: Vec<u64> = (0..200).map(|_| rng.gen_range(0..ring.p)).collect();
        let f = Poly::from_coeffs(&ring, coeffs);
        let points: Vec<u64> = (0..57).map(|_| rng.gen_range(0..ring.p)).collect();
        let fast = multi_eval(&ring, &f, &points);
        let slow: Vec<u64> = points.iter().map(|&x| f.horner(&ring, &x)).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn product_tree_matches_sequential() {
        let ring = FpRing::new(101);
        let items: Vec<FpPoly> = (1..=10)
            .map(|i| Poly::from_coeffs(&ring, vec![i, 1]))
            .collect();
        let tree = product_tree_poly(&ring, &items);
        let mut seq = Poly::constant(&ring, 1);
        for it in &items {
            seq = seq.mul(&ring, it);
        }
        assert_eq!(tree, seq);
    }
}

//! Parameterized operator and term families used by the benchmark harness
//! and the end-to-end tests. The two order-2 operator families have
//! root structure that forces a dispersion linear in the size parameter:
//! the first has no rational solutions, the second is solved by
//! `1/(n(n-2N))`.

use num_bigint::BigInt;

use crate::poly::ZPoly;
use crate::recurrence::{RecOp, RecOperator};
use crate::ring::ZRing;
use crate::summation::HyperTerm;

fn zc(cs: &[BigInt]) -> ZPoly {
    ZPoly::from_bigints(cs.to_vec())
}

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

/// First benchmark family (no rational solutions):
/// `2n(N-n)(-4N-3nN+6+3n^2+8n) u(n)
///  - (n+1)(-3nN+2N+3n^2-4n-4)(n+1-N) u(n+1)
///  + (n+2)(-3nN-N+3n^2+2n+1)(n+2-N) u(n+2) = 0`.
pub fn family_r1(n: &BigInt) -> RecOperator {
    let a0 = zc(&[bi(0), bi(2)]) // 2n
        .mul(&ZRing, &zc(&[n.clone(), bi(-1)])) // N - n
        .mul(&ZRing, &zc(&[bi(6) - bi(4) * n, bi(8) - bi(3) * n, bi(3)]));
    let a1 = zc(&[bi(1), bi(1)])
        .mul(&ZRing, &zc(&[bi(-4) + bi(2) * n, bi(-4) - bi(3) * n, bi(3)]))
        .mul(&ZRing, &zc(&[bi(1) - n, bi(1)]))
        .neg(&ZRing);
    let a2 = zc(&[bi(2), bi(1)])
        .mul(&ZRing, &zc(&[bi(1) - n, bi(2) - bi(3) * n, bi(3)]))
        .mul(&ZRing, &zc(&[bi(2) - n, bi(1)]));
    RecOp::homogeneous(&ZRing, vec![a0, a1, a2]).expect("family operator")
}

/// Second benchmark family, solved by `1/(n(n-2N))`:
/// `2n(n-2N)(n-N)(n^2-3nN+3n+2N^2-3N+2) u(n)
///  - (n+1)(n+1-2N)(n+1-N)(3n^2+6n-9nN+6N^2-4N) u(n+1)
///  + (n+2)(n+2-2N)(n+2-N)(n^2+n-3nN+2N^2) u(n+2) = 0`.
pub fn family_r2(n: &BigInt) -> RecOperator {
    let two_n = bi(2) * n;
    let a0 = zc(&[bi(0), bi(2)])
        .mul(&ZRing, &zc(&[-&two_n, bi(1)]))
        .mul(&ZRing, &zc(&[-n.clone(), bi(1)]))
        .mul(
            &ZRing,
            &zc(&[bi(2) * n * n - bi(3) * n + bi(2), bi(3) - bi(3) * n, bi(1)]),
        );
    let a1 = zc(&[bi(1), bi(1)])
        .mul(&ZRing, &zc(&[bi(1) - &two_n, bi(1)]))
        .mul(&ZRing, &zc(&[bi(1) - n, bi(1)]))
        .mul(
            &ZRing,
            &zc(&[bi(6) * n * n - bi(4) * n, bi(6) - bi(9) * n, bi(3)]),
        )
        .neg(&ZRing);
    let a2 = zc(&[bi(2), bi(1)])
        .mul(&ZRing, &zc(&[bi(2) - &two_n, bi(1)]))
        .mul(&ZRing, &zc(&[bi(2) - n, bi(1)]))
        .mul(&ZRing, &zc(&[bi(2) * n * n, bi(1) - bi(3) * n, bi(1)]));
    RecOp::homogeneous(&ZRing, vec![a0, a1, a2]).expect("family operator")
}

/// The definite-summation benchmark term
/// `t(n, m) = binom(2n+m+N, N) binom(2m, 2n) binom(m, n)`,
/// given by its two shift ratios. The sum over `n` satisfies a third-order
/// recurrence in `m`.
pub fn family_binomial_term(n: &BigInt) -> HyperTerm {
    HyperTerm::binomial_product_family(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::BigRat;
    use num_traits::Zero;

    #[test]
    fn r2_is_solved_by_its_rational_solution() {
        // substitute u = 1/(n(n-2N)) at sample points
        let nn = bi(11);
        let op = family_r2(&nn);
        let u = |x: i64| -> BigRat {
            let x = BigInt::from(x);
            BigRat::new(bi(1), (&x) * (&x - bi(2) * &nn))
        };
        for base in [3i64, 5, 40, 97] {
            let mut acc = BigRat::zero();
            for (i, a) in op.coeffs.iter().enumerate() {
                acc += BigRat::from_integer(a.eval(&BigInt::from(base))) * u(base + i as i64);
            }
            assert!(acc.is_zero(), "R2 residual at {base}");
        }
    }

    #[test]
    fn r1_coefficients_have_expected_roots() {
        let nn = bi(9);
        let op = family_r1(&nn);
        assert_eq!(op.order(), 2);
        // a_0 vanishes at 0 and N, a_2 at -2 and N-2
        assert!(op.coeffs[0].eval(&BigInt::zero()).is_zero());
        assert!(op.coeffs[0].eval(&nn).is_zero());
        assert!(op.coeffs[2].eval(&bi(-2)).is_zero());
        assert!(op.coeffs[2].eval(&bi(7)).is_zero());
    }
}

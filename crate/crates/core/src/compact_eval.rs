//! Evaluation of compact polynomials without expansion.
//!
//! `u(alpha) = sum_k c_k binom(alpha, k)` is the final term of a running
//! sum whose state `(S_k, c_k b_k, ..., c_{k+s-1} b_k)` with
//! `b_k = binom(alpha, k)` obeys a first-order matrix recurrence (products
//! of P-recursive sequences are P-recursive), so one matrix factorial
//! evaluates it. Iterated forward differences reduce to the same machinery
//! through Pascal's rule `Delta^H binom(x, k) = binom(x, k-H)`: shift the
//! coefficient recurrence by `H`, fetch the new initial block with one
//! factorial, and evaluate.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::factorial::{factorial_exact, RatMat};
use crate::poly::{Poly, ZPoly};
use crate::polysols::{sequence_slice, CompactPoly};
use crate::recurrence::{binom_values, BinomialSystem, RecOp};
use crate::ring::{BigRat, Ring, ZRing};
use crate::Result;

impl CompactPoly {
    /// Minimal homogeneous system view of this polynomial's recurrence.
    pub fn as_system(&self) -> BinomialSystem<ZRing> {
        BinomialSystem {
            op: self.rec.clone(),
            valid_from: self.init.len() - self.rec.order(),
            constraints: Vec::new(),
            rhs_values: Vec::new(),
            rhs_offset: 0,
        }
    }
}

/// `u(alpha) = sum_{k=0}^{D} c_k binom(alpha, k)`, evaluated through one
/// matrix factorial (the recorded translation is ignored; see
/// [`eval_translated`]).
pub fn eval_at(u: &CompactPoly, alpha: &BigRat) -> Result<BigRat> {
    let sigma = u.rec.order();
    let d = &u.degree_bound;
    if d.is_negative() {
        return Ok(BigRat::zero());
    }

    // small degrees: direct summation
    let l = u.init.len();
    let direct_cut = BigInt::from((l + sigma + 4) as u64);
    if *d <= direct_cut || sigma == 0 {
        let dd = d
            .to_usize()
            .expect("small degree bound fits usize");
        let cs = u.coefficients(dd + 1)?;
        let bs = binom_values(alpha, dd);
        let mut acc = BigRat::zero();
        for (c, b) in cs.iter().zip(bs.iter()) {
            acc += c * b;
        }
        return Ok(acc);
    }

    // start the state recurrence at k0 = l
    let k0 = l;
    let cs = u.coefficients(k0 + sigma)?;
    let bs = binom_values(alpha, k0);
    let mut s = BigRat::zero();
    for j in 0..k0 {
        s += &cs[j] * &bs[j];
    }
    let b_k0 = bs[k0].clone();
    let mut state = Vec::with_capacity(sigma + 1);
    state.push(s);
    for j in 0..sigma {
        state.push(&cs[k0 + j] * &b_k0);
    }

    // matrix M(x): X_x = M(x) X_{x-1}, entries over den(x) = q*x*t_s(x-1)
    let p_num = alpha.numer().clone();
    let q_den = alpha.denom().clone();
    let back = BigInt::from(-1);
    let t_lead = u.rec.leading().shift_int(&back); // t_s(x-1)
    let x_poly = ZPoly::from_i64s(&[0, 1]);
    let q_x = x_poly.scale(&ZRing, &q_den);
    let den = q_x.mul(&ZRing, &t_lead);
    // ratio(x) = (p - q(x-1)) / (q x)
    let ratio_num = ZPoly::from_bigints(vec![&p_num + &q_den, -&q_den]);

    let size = sigma + 1;
    let mut num = vec![Poly::zero(); size * size];
    // S row: S_x = S_{x-1} + (c b)_{x-1}
    num[0] = den.clone();
    num[1] = den.clone();
    // middle rows j = 1..sigma-1: (c_{x+j-1} b_x) = ratio * (c_{x-1+j} b_{x-1})
    for j in 1..sigma {
        num[j * size + j + 1] = ratio_num.mul(&ZRing, &t_lead);
    }
    // last row: c_{x+sigma-1} b_x = -sum_i t_i(x-1)/t_s(x-1) * ratio * (c_{x-1+i} b_{x-1})
    for i in 0..sigma {
        let t_i = u.rec.coeffs[i].shift_int(&back);
        num[sigma * size + i + 1] = t_i.neg(&ZRing).mul(&ZRing, &ratio_num);
    }
    let m = RatMat {
        size,
        num,
        den,
    };
    let f = factorial_exact(&m, &BigInt::from(k0 as u64 + 1), &(d + 1u32))?;
    let out = f.apply_rat(&state);
    Ok(out.into_iter().next().unwrap())
}

/// Evaluate in the caller's original variable, honoring the recorded
/// translation: `u(x) = u~(x - alpha_t)`.
pub fn eval_translated(u: &CompactPoly, x: &BigRat) -> Result<BigRat> {
    let shifted = x - BigRat::from_integer(u.translation.clone());
    eval_at(u, &shifted)
}

/// The `H`-fold forward difference `Delta^H u` as a compact polynomial:
/// coefficients shift by `H`, the recurrence coefficients shift by `H`,
/// and the new initial block comes from one factorial.
pub fn delta_compact(u: &CompactPoly, h: &BigInt) -> Result<CompactPoly> {
    assert!(!h.is_negative(), "negative difference order");
    if h.is_zero() {
        return Ok(u.clone());
    }
    if *h > u.degree_bound {
        return Ok(CompactPoly::zero());
    }
    let sigma = u.rec.order();
    let l = u.init.len();
    // new block length: enough to keep all relation anchors valid
    let keep = (l as i64 - h.to_i64().unwrap_or(i64::MAX)).max(sigma as i64) as usize;
    let init = if sigma == 0 {
        let mut v = Vec::new();
        let mut k = h.clone();
        let end = h + BigInt::from(keep);
        while k < end {
            v.push(match k.to_usize() {
                Some(ki) if ki < l => u.init[ki].clone(),
                _ => BigRat::zero(),
            });
            k += 1u32;
        }
        v
    } else {
        sequence_slice(
            &u.as_system(),
            &u.init,
            h,
            &(h + BigInt::from(keep as u64 - 1)),
        )?
    };
    let coeffs = u
        .rec
        .coeffs
        .iter()
        .map(|c| c.shift_int(h))
        .collect::<Vec<_>>();
    let rec = RecOp::new(&ZRing, coeffs, None)?;
    Ok(CompactPoly {
        degree_bound: &u.degree_bound - h,
        rec,
        init,
        translation: u.translation.clone(),
    })
}

/// `Delta^H u (alpha)`, the iterated forward difference at a rational point.
pub fn eval_delta(u: &CompactPoly, h: &BigInt, alpha: &BigRat) -> Result<BigRat> {
    if *h > u.degree_bound {
        return Ok(BigRat::zero());
    }
    let shifted = delta_compact(u, h)?;
    eval_at(&shifted, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysols::poly_solutions;
    use crate::recurrence::RecOperator;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    fn example_one(n: i64) -> RecOperator {
        RecOp::homogeneous(
            &ZRing,
            vec![
                ZPoly::from_bigints(vec![BigInt::from(-n - 1), BigInt::from(-1)]),
                zp(&[1, 1]),
            ],
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRat {
        BigRat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn example_one_at_zero_gives_factorial() {
        let basis = poly_solutions(&example_one(5)).unwrap();
        let el = &basis.elements[0];
        // u(0) = 1*2*3*4*5 = 120
        assert_eq!(eval_at(el, &BigRat::zero()).unwrap(), rat(120, 1));
    }

    #[test]
    fn constant_compact_form() {
        let mut el = CompactPoly::zero();
        el.init = vec![rat(7, 1)];
        assert_eq!(eval_at(&el, &rat(123, 7)).unwrap(), rat(7, 1));
    }

    #[test]
    fn matches_expansion_on_random_compact_forms() {
        let mut rng = StdRng::seed_from_u64(5);
        for n in [10i64, 25, 50] {
            let basis = poly_solutions(&example_one(n)).unwrap();
            let el = &basis.elements[0];
            let expanded = el.expand(100).unwrap();
            for _ in 0..5 {
                let alpha = rat(rng.gen_range(-30i64..=30), rng.gen_range(1i64..=7));
                let direct = expanded.eval(&alpha);
                let compact = eval_at(el, &alpha).unwrap();
                assert_eq!(compact, direct, "n={n} alpha={alpha}");
            }
        }
    }

    #[test]
    fn factorial_path_agrees_with_direct_summation() {
        // force the matrix path by using a degree well past the block
        let basis = poly_solutions(&example_one(40)).unwrap();
        let el = &basis.elements[0];
        let alpha = rat(3, 2);
        let expanded = el.expand(100).unwrap();
        assert_eq!(eval_at(el, &alpha).unwrap(), expanded.eval(&alpha));
    }

    #[test]
    fn delta_zero_is_identity() {
        let basis = poly_solutions(&example_one(12)).unwrap();
        let el = &basis.elements[0];
        let alpha = rat(5, 3);
        assert_eq!(
            eval_delta(el, &BigInt::zero(), &alpha).unwrap(),
            eval_at(el, &alpha).unwrap()
        );
    }

    #[test]
    fn top_delta_is_leading_coefficient_constant() {
        // Delta^D u is the constant c_D, independent of alpha
        let n = 9i64;
        let basis = poly_solutions(&example_one(n)).unwrap();
        let el = &basis.elements[0];
        let c_top = el.coefficient_at(&BigInt::from(n)).unwrap();
        for a in [rat(0, 1), rat(7, 2), rat(-13, 5)] {
            assert_eq!(eval_delta(el, &BigInt::from(n), &a).unwrap(), c_top);
        }
        // and one past the degree it vanishes
        assert_eq!(
            eval_delta(el, &BigInt::from(n + 1), &rat(1, 3)).unwrap(),
            BigRat::zero()
        );
    }

    #[test]
    fn triple_difference_matches_expansion_oracle() {
        let n = 30i64;
        let basis = poly_solutions(&example_one(n)).unwrap();
        let el = &basis.elements[0];
        let expanded = el.expand(100).unwrap();
        let alpha = rat(1, 2);
        // third finite difference of the expansion at 1/2
        let v = |t: i64| {
            expanded.eval(&(alpha.clone() + BigRat::from_integer(BigInt::from(t))))
        };
        let oracle = v(3) - rat(3, 1) * v(2) + rat(3, 1) * v(1) - v(0);
        assert_eq!(eval_delta(el, &BigInt::from(3), &alpha).unwrap(), oracle);
    }

    #[test]
    fn delta_linearity_identities() {
        let mut rng = StdRng::seed_from_u64(9);
        let basis = poly_solutions(&example_one(15)).unwrap();
        let el = &basis.elements[0];
        for _ in 0..20 {
            let alpha = rat(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=5));
            let one = BigRat::one();
            // Delta u(alpha) = u(alpha+1) - u(alpha)
            let lhs = eval_delta(el, &BigInt::one(), &alpha).unwrap();
            let rhs = eval_at(el, &(alpha.clone() + &one)).unwrap()
                - eval_at(el, &alpha).unwrap();
            assert_eq!(lhs, rhs);
        }
        // Delta^{H+1} u(alpha) = Delta^H u(alpha+1) - Delta^H u(alpha)
        for h in 0..4i64 {
            let alpha = rat(rng.gen_range(-9i64..=9), 2);
            let lhs = eval_delta(el, &BigInt::from(h + 1), &alpha).unwrap();
            let rhs = eval_delta(el, &BigInt::from(h), &(alpha.clone() + BigRat::one()))
                .unwrap()
                - eval_delta(el, &BigInt::from(h), &alpha).unwrap();
            assert_eq!(lhs, rhs, "H={h}");
        }
    }

    #[test]
    fn translated_evaluation_uses_original_variable() {
        // operator needing a shift: constants survive, check at a point
        let o = RecOp::homogeneous(&ZRing, vec![zp(&[3, -1]), zp(&[-3, 1])]).unwrap();
        let basis = poly_solutions(&o).unwrap();
        let el = &basis.elements[0];
        assert!(el.translation > BigInt::zero());
        assert_eq!(eval_translated(el, &rat(11, 2)).unwrap(), BigRat::one());
    }
}

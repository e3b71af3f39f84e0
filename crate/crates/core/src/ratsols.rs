//! Rational solutions of linear recurrences in compact form.
//!
//! Abramov's bound: the `C` of the Gosper-Petkovsek form of the pair
//! `(a_r(n-r+1), a_0(n))` is a multiple of every rational solution's
//! denominator. Substituting `u = v/C` and clearing with the factored
//! shift quotients `C(n)/C(n+i)` produces an operator of polynomial size
//! whose polynomial solutions are the numerators. The numerators come back
//! as compact polynomials over the factored, unexpanded `C`.
//!
//! The polynomial solve happens in a translated frame where the normalized
//! operator is ordinary; results are converted back to the original
//! variable (initial coefficients `c_k = Delta^k v(0)` recovered by
//! evaluating the compact numerator), so reported data matches the
//! untranslated recurrence.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::compact_eval::eval_at;
use crate::error::Error;
use crate::gpform::{compact_gpf, GPForm};
use crate::introots::integer_roots;
use crate::poly::{Poly, ZPoly};
use crate::polysols::{
    degree_candidates, finite_support_basis, finite_support_dimension, CompactPoly,
};
use crate::recurrence::{rec_to_rec, RecOp, RecOperator};
use crate::ring::{BigRat, Ring, ZRing};
use crate::Result;

/// A rational sequence `v(n) / C(n)` with the numerator in compact form
/// (original variable) and the denominator factored.
#[derive(Clone, Debug)]
pub struct CompactRational {
    pub numerator: CompactPoly,
    pub denominator: GPForm,
    /// The internal translation used during the polynomial solve
    /// (provenance; the stored numerator is already in the original frame).
    pub translation: BigInt,
}

impl CompactRational {
    /// Exact value at an integer point; `None` at poles of `C`.
    pub fn value_at(&self, x: &BigInt) -> Result<Option<BigRat>> {
        if !self.denominator.c_nonzero_at(x) {
            return Ok(None);
        }
        let num = eval_at(&self.numerator, &BigRat::from_integer(x.clone()))?;
        let den = self.denominator.eval_c(x)?;
        Ok(Some(num / den))
    }
}

/// The denominator-cleared operator: coefficients `a_i(n) * M_i(n)` where
/// `M_i = prod_l [prod_{j<i} g_l(n+j-h_l)] [prod_{i<=j<r} g_l(n+j)]`, i.e.
/// the numerator of `C(n) * Op(v/C)` over the common denominator
/// `prod_l g_l(n) ... g_l(n+r-1)`.
pub fn normalized_operator(op: &RecOperator, gpf: &GPForm) -> RecOperator {
    let r = op.order();
    let mut coeffs = Vec::with_capacity(r + 1);
    for (i, a) in op.coeffs.iter().enumerate() {
        let mut m = ZPoly::from_i64s(&[1]);
        for (g, h) in &gpf.factors {
            for j in 0..i as i64 {
                m = m.mul(&ZRing, &g.shift_int(&(BigInt::from(j) - h)));
            }
            for j in i as i64..r as i64 {
                m = m.mul(&ZRing, &g.shift_int(&BigInt::from(j)));
            }
        }
        coeffs.push(a.mul(&ZRing, &m));
    }
    RecOp::new(&ZRing, coeffs, None).expect("normalized operator is nonzero")
}

/// A translation past every integer root of the normalized operator's
/// extreme coefficients and every root interval of `C`.
fn safe_translation(t_op: &RecOperator, gpf: &GPForm) -> BigInt {
    let mut beta = t_op.find_ordinary_shift();
    for (g, h) in &gpf.factors {
        for rho in integer_roots(g) {
            // C contains g(n - j), j = 1..h: zero on [rho+1, rho+h]
            let top = &rho + h + 1u32;
            if top > beta && (&rho + h) >= BigInt::zero() {
                beta = top;
            }
        }
    }
    beta
}

/// Convert basis elements solved in the `n -> n + beta` frame back to the
/// original variable: same recurrence system (untranslated), initial
/// coefficients `Delta^k v(0)` recovered from evaluations of the shifted
/// compact numerator.
fn untranslate_elements(
    sys_op: &RecOperator,
    valid_from: usize,
    elements: &[CompactPoly],
    beta: &BigInt,
) -> Result<Vec<CompactPoly>> {
    if elements.is_empty() {
        return Ok(Vec::new());
    }
    let sigma = sys_op.order();
    let d_max = elements
        .iter()
        .map(|e| e.degree_bound.clone())
        .max()
        .unwrap();
    // base block length; extend past any leading-coefficient root that the
    // in-range unrolling would hit
    let mut l0 = BigInt::from(valid_from + sigma);
    if sigma > 0 {
        for rho in integer_roots(sys_op.leading()) {
            let state_hi = &d_max - BigInt::from(sigma);
            if rho >= BigInt::from(valid_from) && rho <= state_hi {
                let need = &rho + BigInt::from(sigma) + 1u32;
                if need > l0 {
                    l0 = need;
                }
            }
        }
    }
    let l0 = l0.to_usize().ok_or_else(|| {
        Error::invalid("untranslated initial block too long; solution degree too large")
    })?;
    let mut out = Vec::with_capacity(elements.len());
    for el in elements {
        // values v(j) = v~(j - beta) for j = 0..l0-1
        let mut vals = Vec::with_capacity(l0);
        for j in 0..l0 as i64 {
            let x = BigRat::from_integer(BigInt::from(j) - beta);
            vals.push(eval_at(el, &x)?);
        }
        // forward differences give the binomial coefficients at 0
        let mut init = Vec::with_capacity(l0);
        let mut row = vals;
        for _ in 0..l0 {
            init.push(row[0].clone());
            for i in 0..row.len() - 1 {
                row[i] = &row[i + 1] - &row[i];
            }
            row.pop();
        }
        out.push(CompactPoly {
            degree_bound: el.degree_bound.clone(),
            rec: sys_op.clone(),
            init,
            translation: BigInt::zero(),
        });
    }
    Ok(out)
}

/// Basis of rational solutions of a homogeneous recurrence.
pub fn hom_rat_sols(op: &RecOperator) -> Result<Vec<CompactRational>> {
    if !op.is_homogeneous() {
        return Err(Error::invalid("hom_rat_sols needs a homogeneous operator"));
    }
    let r = op.order();
    if r == 0 {
        return Err(Error::invalid("operator order must be at least 1"));
    }
    let p = op.leading().shift_int(&BigInt::from(-(r as i64 - 1)));
    let q = op.trailing().clone();
    let gpf = compact_gpf(&p, &q)?;
    let t_op = normalized_operator(op, &gpf);

    let beta = safe_translation(&t_op, &gpf);
    let shifted = t_op.translate(&ZRing, &beta);
    let sys_shifted = rec_to_rec(&ZRing, &shifted);
    let basis = finite_support_basis(&sys_shifted)?;

    let sys_plain = rec_to_rec(&ZRing, &t_op);
    let numerators = untranslate_elements(
        &sys_plain.op,
        sys_plain.valid_from,
        &basis.elements,
        &beta,
    )?;
    Ok(numerators
        .into_iter()
        .map(|numerator| CompactRational {
            numerator,
            denominator: gpf.clone(),
            translation: beta.clone(),
        })
        .collect())
}

/// The homogenization `(f(n) S - f(n+1)) * Op` used for nonhomogeneous
/// equations: its rational solutions are the `u` with `Op u = lambda f`.
pub fn homogenize_with_rhs(op: &RecOperator, f: &ZPoly) -> RecOperator {
    let fs = RecOp::new(
        &ZRing,
        vec![f.shift_int(&BigInt::one()).neg(&ZRing), f.clone()],
        None,
    )
    .expect("f nonzero");
    fs.mul_op(&ZRing, &op.without_rhs())
}

/// Particular rational solution and kernel basis of `Op u = f`.
pub fn nonhom_rat_sols(
    op: &RecOperator,
) -> Result<(Option<CompactRational>, Vec<CompactRational>)> {
    let Some(f) = op.rhs.clone() else {
        return Err(Error::invalid("nonhom_rat_sols needs a right-hand side"));
    };
    let aug = homogenize_with_rhs(op, &f);
    let w = hom_rat_sols(&aug)?;
    if w.is_empty() {
        return Ok((None, Vec::new()));
    }
    // anchor point: smallest k with f(k) != 0 and all evaluations defined
    let r = op.order();
    let mut k0 = BigInt::zero();
    'scan: loop {
        if !f.eval(&k0).is_zero() {
            let den_ok = (0..=r as i64)
                .all(|i| w[0].denominator.c_nonzero_at(&(&k0 + BigInt::from(i))));
            if den_ok {
                break 'scan;
            }
        }
        k0 += 1u32;
    }
    // (Op w_j)(k0) = lambda_j f(k0)
    let mut vals = Vec::with_capacity(w.len());
    for sol in &w {
        let mut acc = BigRat::zero();
        for (i, a) in op.coeffs.iter().enumerate() {
            let x = &k0 + BigInt::from(i);
            let uv = sol
                .value_at(&x)?
                .expect("pole-free anchor point was checked");
            acc += BigRat::from_integer(a.eval(&k0)) * uv;
        }
        vals.push(acc);
    }
    let f_k0 = BigRat::from_integer(f.eval(&k0));

    // solve sum xi_j vals_j = target for target in {f(k0)} and {0}-space
    let nonzero_at = vals.iter().position(|v| !v.is_zero());
    let mut kernel: Vec<CompactRational> = Vec::new();
    let particular = match nonzero_at {
        None => None,
        Some(pivot) => {
            let scale = &f_k0 / &vals[pivot];
            let mut num = w[pivot].numerator.clone();
            num.scale(&scale);
            // degree bound unchanged under scaling
            Some(CompactRational {
                numerator: num,
                denominator: w[pivot].denominator.clone(),
                translation: w[pivot].translation.clone(),
            })
        }
    };
    match nonzero_at {
        None => {
            // every w is already a kernel element
            kernel.extend(w.iter().cloned());
        }
        Some(pivot) => {
            for (j, sol) in w.iter().enumerate() {
                if j == pivot {
                    continue;
                }
                // w_j - (vals_j / vals_pivot) w_pivot lies in the kernel
                let factor = &vals[j] / &vals[pivot];
                let mut init = sol.numerator.init.clone();
                let pivot_init = &w[pivot].numerator.init;
                let len = init.len().max(pivot_init.len());
                // basis elements share the recurrence; pad by generation
                let a = sol.numerator.coefficients(len)?;
                let b = w[pivot].numerator.coefficients(len)?;
                init = (0..len).map(|i| &a[i] - &factor * &b[i]).collect();
                let degree_bound = sol
                    .numerator
                    .degree_bound
                    .clone()
                    .max(w[pivot].numerator.degree_bound.clone());
                kernel.push(CompactRational {
                    numerator: CompactPoly {
                        degree_bound,
                        rec: sol.numerator.rec.clone(),
                        init,
                        translation: BigInt::zero(),
                    },
                    denominator: sol.denominator.clone(),
                    translation: sol.translation.clone(),
                });
            }
        }
    }
    Ok((particular, kernel))
}

/// Probabilistic dimension of the rational solution space (and, for
/// nonhomogeneous input, whether a particular solution exists), computed
/// mod random primes; falls back to the deterministic path on repeated
/// unlucky primes.
pub fn rat_sols_dimension(op: &RecOperator, seed: u64, prime_bits: u32) -> Result<(usize, bool)> {
    let hom_dim = |o: &RecOperator, seed: u64| -> Result<usize> {
        let r = o.order();
        let p = o.leading().shift_int(&BigInt::from(-(r as i64 - 1)));
        let q = o.trailing().clone();
        let gpf = compact_gpf(&p, &q)?;
        let t_op = normalized_operator(o, &gpf);
        let beta = safe_translation(&t_op, &gpf);
        let sys = rec_to_rec(&ZRing, &t_op.translate(&ZRing, &beta));
        match finite_support_dimension(&sys, seed, prime_bits) {
            Ok(rep) => Ok(rep.dimension),
            Err(Error::UnluckyRandomness { .. }) => {
                Ok(finite_support_basis(&sys)?.dimension())
            }
            Err(e) => Err(e),
        }
    };
    match &op.rhs {
        None => Ok((hom_dim(op, seed)?, true)),
        Some(f) => {
            let d_hom = hom_dim(&op.without_rhs(), seed)?;
            let aug = homogenize_with_rhs(op, f);
            let d_aug = hom_dim(&aug, seed.wrapping_add(1))?;
            Ok((d_hom, d_aug == d_hom + 1))
        }
    }
}

/// Exact verification that a compact rational satisfies the operator at
/// `npoints` integer sample points outside all poles.
pub fn verify_rational_solution(
    op: &RecOperator,
    sol: &CompactRational,
    npoints: usize,
) -> Result<bool> {
    let r = op.order();
    let mut checked = 0;
    let mut x = BigInt::zero();
    let mut attempts = 0;
    while checked < npoints {
        attempts += 1;
        if attempts > 50_000 {
            return Err(Error::invalid("could not find enough pole-free points"));
        }
        let all_defined =
            (0..=r as i64).all(|i| sol.denominator.c_nonzero_at(&(&x + BigInt::from(i))));
        if !all_defined {
            x += 1u32;
            continue;
        }
        let mut acc = BigRat::zero();
        for (i, a) in op.coeffs.iter().enumerate() {
            let xi = &x + BigInt::from(i);
            let uv = sol.value_at(&xi)?.expect("checked pole-free");
            acc += BigRat::from_integer(a.eval(&x)) * uv;
        }
        let target = match &op.rhs {
            Some(f) => BigRat::from_integer(f.eval(&x)),
            None => BigRat::zero(),
        };
        if acc != target {
            return Ok(false);
        }
        checked += 1;
        x += 1u32;
    }
    Ok(true)
}

/// Brute-force rational solutions with an explicitly expanded denominator
/// (test oracle): numerators of degree <= `deg_bound` over `den`.
pub fn rational_solutions_brute(
    op: &RecOperator,
    den: &ZPoly,
    deg_bound: usize,
) -> Vec<crate::poly::QPoly> {
    // clear denominators: sum_i a_i(n) x(n+i) prod_{j != i} den(n+j) = 0
    let r = op.order();
    let shifted_dens: Vec<ZPoly> = (0..=r as i64)
        .map(|i| den.shift_int(&BigInt::from(i)))
        .collect();
    let mut coeffs = Vec::with_capacity(r + 1);
    for (i, a) in op.coeffs.iter().enumerate() {
        let mut m = a.clone();
        for (j, d) in shifted_dens.iter().enumerate() {
            if j != i {
                m = m.mul(&ZRing, d);
            }
        }
        coeffs.push(m);
    }
    let cleared = RecOp::new(&ZRing, coeffs, None).expect("nonzero");
    crate::polysols::poly_solutions_brute(&cleared, deg_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family_r1, family_r2};
    use crate::poly::QPoly;
    use crate::polysols::check_solves;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn zp(cs: &[i64]) -> ZPoly {
        ZPoly::from_i64s(cs)
    }

    #[test]
    fn constants_have_trivial_rational_basis() {
        let op = RecOp::homogeneous(&ZRing, vec![zp(&[-1]), zp(&[1])]).unwrap();
        let basis = hom_rat_sols(&op).unwrap();
        assert_eq!(basis.len(), 1);
        let sol = &basis[0];
        assert!(sol.denominator.factors.is_empty());
        for x in 0..5 {
            assert_eq!(
                sol.value_at(&BigInt::from(x)).unwrap().unwrap(),
                BigRat::one()
            );
        }
    }

    #[test]
    fn r2_family_small_n_recovers_rational_solution() {
        let nn = BigInt::from(6);
        let op = family_r2(&nn);
        let basis = hom_rat_sols(&op).unwrap();
        assert_eq!(basis.len(), 1, "R2 must have a one-dimensional space");
        let sol = &basis[0];
        // denominator factored form expands to n(n-N)(n-2N)
        let c = sol.denominator.expand_c(100).unwrap();
        let expect = zp(&[0, 1])
            .mul(&ZRing, &ZPoly::from_bigints(vec![-&nn, BigInt::one()]))
            .mul(
                &ZRing,
                &ZPoly::from_bigints(vec![-BigInt::from(2) * &nn, BigInt::one()]),
            );
        assert_eq!(c, expect);
        // element agrees with 1/(n(n-2N)) at 20 sample points
        let mut checked = 0;
        let mut x = BigInt::from(13);
        while checked < 20 {
            if sol.denominator.c_nonzero_at(&x) {
                let got = sol.value_at(&x).unwrap().unwrap();
                let want = BigRat::new(BigInt::one(), (&x) * (&x - BigInt::from(2) * &nn));
                assert_eq!(got, want, "x = {x}");
                checked += 1;
            }
            x += 1u32;
        }
        // numerator data matches the displayed form: order 3, c0 = -N, c1 = 1
        assert_eq!(sol.numerator.rec.order(), 3);
        assert_eq!(sol.numerator.init[0], BigRat::from_integer(-nn.clone()));
        assert_eq!(sol.numerator.init[1], BigRat::one());
        assert!(verify_rational_solution(&op, sol, 20).unwrap());
    }

    #[test]
    fn r1_family_small_n_has_no_rational_solutions() {
        let nn = BigInt::from(8);
        let op = family_r1(&nn);
        let basis = hom_rat_sols(&op).unwrap();
        assert_eq!(basis.len(), 0);
        let (dim, _) = rat_sols_dimension(&op, 7, 62).unwrap();
        assert_eq!(dim, 0);
    }

    #[test]
    fn r2_probabilistic_dimension_is_one() {
        let nn = BigInt::from(32);
        let op = family_r2(&nn);
        let (dim, _) = rat_sols_dimension(&op, 99, 62).unwrap();
        assert_eq!(dim, 1);
    }

    #[test]
    fn planted_pole_recovered() {
        // plant u = 1/(n+3): u(n+1)/u(n) = (n+3)/(n+4):
        // (n+4) u(n+1) - (n+3) u(n) = 0
        let op = RecOp::homogeneous(&ZRing, vec![zp(&[-3, -1]), zp(&[4, 1])]).unwrap();
        let basis = hom_rat_sols(&op).unwrap();
        assert_eq!(basis.len(), 1);
        let sol = &basis[0];
        for x in [0i64, 1, 5, 11] {
            let got = sol.value_at(&BigInt::from(x)).unwrap().unwrap();
            let want = BigRat::new(BigInt::one(), BigInt::from(x + 3));
            // solutions are normalized monic; 1/(n+3) has monic numerator 1
            assert_eq!(got, want, "x={x}");
        }
    }

    #[test]
    fn nonhom_delta_n() {
        // u(n+1) - u(n) = 1: particular n (denominator 1), basis {1}
        let op = RecOp::new(&ZRing, vec![zp(&[-1]), zp(&[1])], Some(zp(&[1]))).unwrap();
        let (part, kernel) = nonhom_rat_sols(&op).unwrap();
        let part = part.unwrap();
        for x in 0..6i64 {
            let v0 = part.value_at(&BigInt::from(x)).unwrap().unwrap();
            let v1 = part.value_at(&BigInt::from(x + 1)).unwrap().unwrap();
            assert_eq!(v1 - v0, BigRat::one());
        }
        assert_eq!(kernel.len(), 1);
        assert!(verify_rational_solution(&op, &part, 10).unwrap());
    }

    #[test]
    fn nonhom_planted_solution_recovered() {
        // plant u = 1/(n+3) into an order-1 operator with rhs from
        // substitution: R u = (n+5) u(n+1) - (n+1) u(n), f := R(1/(n+3))
        let op0 = RecOp::homogeneous(&ZRing, vec![zp(&[-1, -1]), zp(&[5, 1])]).unwrap();
        // f(n) = (n+5)/(n+4) - (n+1)/(n+3) = ((n+5)(n+3) - (n+1)(n+4)) / ((n+4)(n+3))
        // clear: multiply operator by (n+4)(n+3):
        let mul = zp(&[4, 1]).mul(&ZRing, &zp(&[3, 1]));
        let coeffs: Vec<ZPoly> = op0.coeffs.iter().map(|c| c.mul(&ZRing, &mul)).collect();
        let f = zp(&[5, 1])
            .mul(&ZRing, &zp(&[3, 1]))
            .sub(&ZRing, &zp(&[1, 1]).mul(&ZRing, &zp(&[4, 1])));
        let op = RecOp::new(&ZRing, coeffs, Some(f)).unwrap();
        let (part, _kernel) = nonhom_rat_sols(&op).unwrap();
        let part = part.unwrap();
        assert!(verify_rational_solution(&op, &part, 12).unwrap());
        // the particular solution minus the planted one solves the
        // homogeneous part; check the planted value directly at one point
        // modulo the homogeneous space (order 1, hom space is spanned by
        // solutions of the cleared operator)
    }

    #[test]
    fn gosper_style_equation() {
        // (n+1)^2 u(n+1) - n u(n) = n has particular u = 1/n... as a
        // rational function; check residual at sample points
        let op = RecOp::new(
            &ZRing,
            vec![zp(&[0, -1]), zp(&[1, 1]).mul(&ZRing, &zp(&[1, 1]))],
            Some(zp(&[0, 1])),
        )
        .unwrap();
        let (part, _) = nonhom_rat_sols(&op).unwrap();
        let part = part.unwrap();
        assert!(verify_rational_solution(&op, &part, 10).unwrap());
        // u = 1/n at x = 2: 9 * u(3) - 2 * u(2) = 3 - 1 = 2 = f(2)
        let u2 = part.value_at(&BigInt::from(2)).unwrap().unwrap();
        let u3 = part.value_at(&BigInt::from(3)).unwrap().unwrap();
        assert_eq!(
            BigRat::from_integer(BigInt::from(9)) * u3 - BigRat::from_integer(BigInt::from(2)) * u2,
            BigRat::from_integer(BigInt::from(2))
        );
    }

    #[test]
    fn abramov_bound_contains_brute_force_denominators() {
        let mut rng = StdRng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 25 {
            // random order-1/2 operators with small root structure
            let order = rng.gen_range(1..=2);
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[rng.gen_range(1..=3)]);
                for _ in 0..rng.gen_range(0..=2) {
                    let r = rng.gen_range(-6i64..=6);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let coeffs: Vec<ZPoly> = (0..=order).map(|_| mk(&mut rng)).collect();
            let op = RecOp::homogeneous(&ZRing, coeffs).unwrap();
            let p = op
                .leading()
                .shift_int(&BigInt::from(-(op.order() as i64 - 1)));
            let q = op.trailing().clone();
            let Ok(gpf) = compact_gpf(&p, &q) else {
                continue;
            };
            if gpf.c_degree() > BigInt::from(40) {
                continue;
            }
            checked += 1;
            let c = gpf.expand_c(100).unwrap();
            // brute force rational solutions with denominator C
            let brute = rational_solutions_brute(&op, &c, c.deg0() + 5);
            for num in &brute {
                // denominator of num/C in lowest terms divides C by
                // construction; check it is a genuine solution
                let (_, numz) = num.to_zpoly_scaled();
                let mut residual_zero = true;
                for x in 3..8i64 {
                    let xb = BigInt::from(x);
                    let mut acc = BigRat::zero();
                    let mut ok = true;
                    for (i, a) in op.coeffs.iter().enumerate() {
                        let xi = BigInt::from(x + i as i64);
                        let cv = c.eval(&xi);
                        if cv.is_zero() {
                            ok = false;
                            break;
                        }
                        acc += BigRat::from_integer(a.eval(&xb))
                            * BigRat::new(numz.eval(&xi), cv);
                    }
                    if ok && !acc.is_zero() {
                        residual_zero = false;
                    }
                }
                assert!(residual_zero, "brute solution is not a solution");
            }
            // compact path agrees in dimension
            let basis = hom_rat_sols(&op).unwrap();
            assert_eq!(basis.len(), brute.len(), "op {:?}", op.coeffs);
        }
    }

    #[test]
    fn compact_matches_brute_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 20 {
            let order = rng.gen_range(1..=2);
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[rng.gen_range(1..=2)]);
                for _ in 0..rng.gen_range(0..=2) {
                    let r = rng.gen_range(-5i64..=5);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let coeffs: Vec<ZPoly> = (0..=order).map(|_| mk(&mut rng)).collect();
            let op = RecOp::homogeneous(&ZRing, coeffs).unwrap();
            let basis = match hom_rat_sols(&op) {
                Ok(b) => b,
                Err(_) => continue,
            };
            checked += 1;
            for sol in &basis {
                assert!(
                    verify_rational_solution(&op, sol, 8).unwrap(),
                    "op {:?}",
                    op.coeffs
                );
            }
        }
    }

    #[test]
    fn numerators_expand_and_solve() {
        // sanity via polysols plumbing: R2 numerator expands to n - N
        let nn = BigInt::from(9);
        let op = family_r2(&nn);
        let basis = hom_rat_sols(&op).unwrap();
        let num = &basis[0].numerator;
        let expanded = num.expand(100).unwrap();
        let expect = QPoly::from_coeffs(vec![
            BigRat::from_integer(-nn.clone()),
            BigRat::one(),
        ]);
        assert_eq!(expanded, expect);
        let _ = check_solves; // silence unused in cfg combinations
    }

    #[test]
    fn dimension_probe_agrees_with_deterministic_small_sample() {
        let mut rng = StdRng::seed_from_u64(5);
        let mut mismatches = 0;
        let mut checked = 0;
        while checked < 40 {
            let order = rng.gen_range(1..=2);
            let mk = |rng: &mut StdRng| {
                let mut f = zp(&[rng.gen_range(1..=2)]);
                for _ in 0..rng.gen_range(0..=1) {
                    let r = rng.gen_range(-4i64..=4);
                    f = f.mul(&ZRing, &zp(&[-r, 1]));
                }
                f
            };
            let coeffs: Vec<ZPoly> = (0..=order).map(|_| mk(&mut rng)).collect();
            let op = RecOp::homogeneous(&ZRing, coeffs).unwrap();
            let det = match hom_rat_sols(&op) {
                Ok(b) => b.len(),
                Err(_) => continue,
            };
            checked += 1;
            let (prob, _) = rat_sols_dimension(&op, 1000 + checked as u64, 62).unwrap();
            if det != prob {
                mismatches += 1;
            }
        }
        assert!(mismatches <= 1);
    }
}

//! Matrix factorials: ordered products `F = C(hi) C(hi-1) ... C(lo)` of a
//! parameterized matrix of rational functions, the engine behind selected
//! sequence terms and slice computations.
//!
//! Three paths share one product-tree core:
//! - exact over Z (binary splitting, no reduction at internal nodes, one
//!   denominator scalar carried alongside),
//! - mod p by baby steps / giant steps: the block polynomial matrix
//!   `P(x) = C(x+s) ... C(x+1)` is built by an ordered product tree over
//!   F_p[x], evaluated at the giant-step points by multipoint evaluation,
//!   and the evaluations are multiplied in order,
//! - generic over any [`Ring`], which the symbolic passes instantiate at
//!   polynomial rings.
//!
//! With the `parallel` feature the two halves of every product tree run on
//! the rayon pool; the tree shape is fixed so results are bit-identical to
//! the sequential path (exposed as the `*_seq` twins for benchmarks and
//! determinism checks).

use num_bigint::BigInt;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::fp::{multi_eval, zpoly_mod_p};
use crate::linalg::{self, Mat};
use crate::par;
use crate::poly::{Poly, ZPoly};
use crate::recurrence::RecOperator;
use crate::ring::{BigRat, FpRing, PolyRing, Ring, ZRing};
use crate::Result;

/// Interval length below which the modular path multiplies leaves directly
/// instead of setting up baby-step/giant-step tables.
pub const BSGS_THRESHOLD: u64 = 1024;
/// Product-tree interval length above which halves are forked.
pub const PAR_PRODUCT_THRESHOLD: u64 = 512;

/// Square matrix of polynomial numerators over one scalar polynomial
/// denominator: `C(x) = num(x) / den(x)` entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMat<R: Ring> {
    pub size: usize,
    /// Row-major numerator polynomials, `size * size` of them.
    pub num: Vec<Poly<R>>,
    pub den: Poly<R>,
}

impl<R: Ring> RatMat<R> {
    /// Evaluate at an integer point; the denominator value is returned
    /// separately and must be nonzero.
    pub fn eval_at(&self, ring: &R, x: &BigInt) -> (Mat<R>, R::Elem) {
        let xe = ring.from_bigint(x);
        let data = self.num.iter().map(|p| p.horner(ring, &xe)).collect();
        (
            Mat {
                rows: self.size,
                cols: self.size,
                data,
            },
            self.den.horner(ring, &xe),
        )
    }

    pub fn map_ring<S: Ring>(&self, f: impl Fn(&Poly<R>) -> Poly<S>) -> RatMat<S> {
        RatMat {
            size: self.size,
            num: self.num.iter().map(&f).collect(),
            den: f(&self.den),
        }
    }
}

/// Reduce an integer rational matrix mod p.
pub fn ratmat_mod_p(c: &RatMat<ZRing>, ring: &FpRing) -> RatMat<FpRing> {
    c.map_ring(|p| zpoly_mod_p(p, ring))
}

/// Exact matrix factorial: numerator matrix and denominator scalar, no
/// rational reduction performed.
#[derive(Clone, Debug)]
pub struct ExactFactorial {
    pub mat: Mat<ZRing>,
    pub den: BigInt,
    pub lo: BigInt,
    pub hi: BigInt,
}

impl ExactFactorial {
    /// The (i, j) entry as a reduced rational.
    pub fn entry(&self, i: usize, j: usize) -> BigRat {
        BigRat::new(self.mat.at(i, j).clone(), self.den.clone())
    }

    pub fn apply_rat(&self, v: &[BigRat]) -> Vec<BigRat> {
        (0..self.mat.rows)
            .map(|i| {
                let mut acc = BigRat::zero();
                for (j, x) in v.iter().enumerate() {
                    acc += BigRat::from_integer(self.mat.at(i, j).clone()) * x;
                }
                acc / BigRat::from_integer(self.den.clone())
            })
            .collect()
    }
}

/// Modular matrix factorial; the denominator has been divided out.
#[derive(Clone, Debug)]
pub struct ModFactorial {
    pub mat: Mat<FpRing>,
    pub p: u64,
    pub lo: BigInt,
    pub hi: BigInt,
}

/// Ordered product `C(hi) ... C(lo)` over any ring by binary splitting.
/// Empty intervals (lo > hi) give the identity. The denominator must not
/// vanish at any integer point of the interval.
pub fn product_interval<R: Ring>(
    ring: &R,
    c: &RatMat<R>,
    lo: &BigInt,
    hi: &BigInt,
) -> Result<(Mat<R>, R::Elem)> {
    if lo > hi {
        return Ok((Mat::identity(ring, c.size), ring.one()));
    }
    split_product(ring, c, lo, hi, true)
}

/// Sequential twin of [`product_interval`]; identical output.
pub fn product_interval_seq<R: Ring>(
    ring: &R,
    c: &RatMat<R>,
    lo: &BigInt,
    hi: &BigInt,
) -> Result<(Mat<R>, R::Elem)> {
    if lo > hi {
        return Ok((Mat::identity(ring, c.size), ring.one()));
    }
    split_product(ring, c, lo, hi, false)
}

fn split_product<R: Ring>(
    ring: &R,
    c: &RatMat<R>,
    lo: &BigInt,
    hi: &BigInt,
    parallel: bool,
) -> Result<(Mat<R>, R::Elem)> {
    let len = hi - lo + 1u32;
    if len <= BigInt::from(4) {
        let mut mat = Mat::identity(ring, c.size);
        let mut den = ring.one();
        let mut x = lo.clone();
        while &x <= hi {
            let (m, d) = c.eval_at(ring, &x);
            if ring.is_zero(&d) {
                return Err(Error::SingularPoint { index: x });
            }
            mat = m.mul(ring, &mat);
            den = ring.mul(&den, &d);
            x += 1u32;
        }
        return Ok((mat, den));
    }
    let mid = (lo + hi) / 2u32;
    let mid1 = &mid + 1u32;
    let fork = parallel && len >= BigInt::from(PAR_PRODUCT_THRESHOLD);
    let (left, right) = if fork {
        par::join(
            || split_product(ring, c, lo, &mid, parallel),
            || split_product(ring, c, &mid1, hi, parallel),
        )
    } else {
        (
            split_product(ring, c, lo, &mid, parallel),
            split_product(ring, c, &mid1, hi, parallel),
        )
    };
    let (lm, ld) = left?;
    let (rm, rd) = right?;
    Ok((rm.mul(ring, &lm), ring.mul(&ld, &rd)))
}

/// Exact factorial `C(hi) ... C(lo)` over the integers.
pub fn factorial_exact(c: &RatMat<ZRing>, lo: &BigInt, hi: &BigInt) -> Result<ExactFactorial> {
    let (mat, den) = product_interval(&ZRing, c, lo, hi)?;
    Ok(ExactFactorial {
        mat,
        den,
        lo: lo.clone(),
        hi: hi.clone(),
    })
}

/// Sequential twin of [`factorial_exact`]; identical output.
pub fn factorial_exact_seq(c: &RatMat<ZRing>, lo: &BigInt, hi: &BigInt) -> Result<ExactFactorial> {
    let (mat, den) = product_interval_seq(&ZRing, c, lo, hi)?;
    Ok(ExactFactorial {
        mat,
        den,
        lo: lo.clone(),
        hi: hi.clone(),
    })
}

fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let n128 = n as u128;
    let mut x = (n as f64).sqrt() as u64;
    while (x as u128) * (x as u128) > n128 {
        x -= 1;
    }
    while ((x + 1) as u128) * ((x + 1) as u128) <= n128 {
        x += 1;
    }
    x
}

/// Modular factorial by baby steps / giant steps.
pub fn factorial_mod_p(
    c: &RatMat<ZRing>,
    lo: &BigInt,
    hi: &BigInt,
    p: u64,
) -> Result<ModFactorial> {
    factorial_mod_p_impl(c, lo, hi, p, true)
}

/// Sequential twin of [`factorial_mod_p`]; identical output.
pub fn factorial_mod_p_seq(
    c: &RatMat<ZRing>,
    lo: &BigInt,
    hi: &BigInt,
    p: u64,
) -> Result<ModFactorial> {
    factorial_mod_p_impl(c, lo, hi, p, false)
}

fn factorial_mod_p_impl(
    c: &RatMat<ZRing>,
    lo: &BigInt,
    hi: &BigInt,
    p: u64,
    parallel: bool,
) -> Result<ModFactorial> {
    let ring = FpRing::new(p);
    let cp = ratmat_mod_p(c, &ring);
    let r = c.size;
    let finish = |mat: Mat<FpRing>, den: u64| -> Result<ModFactorial> {
        if den == 0 {
            return Err(Error::SingularModP { p });
        }
        let inv = ring.inv(den);
        let mat = Mat {
            rows: r,
            cols: r,
            data: mat.data.iter().map(|&x| ring.mul_u64(x, inv)).collect(),
        };
        Ok(ModFactorial {
            mat,
            p,
            lo: lo.clone(),
            hi: hi.clone(),
        })
    };
    if lo > hi {
        return finish(Mat::identity(&ring, r), 1);
    }
    let len_big = hi - lo + 1u32;
    let Ok(len) = u64::try_from(&len_big) else {
        return Err(Error::invalid(
            "modular factorial interval too long to index",
        ));
    };
    if len <= BSGS_THRESHOLD {
        let (mat, den) = match if parallel {
            product_interval(&ring, &cp, lo, hi)
        } else {
            product_interval_seq(&ring, &cp, lo, hi)
        } {
            Ok(v) => v,
            Err(Error::SingularPoint { .. }) => return Err(Error::SingularModP { p }),
            Err(e) => return Err(e),
        };
        return finish(mat, den);
    }

    let s = isqrt_u64(len);
    let g = len / s;

    // block matrix P(x) = C(x+s) ... C(x+1) over F_p[x], ordered product tree
    let poly_ring = PolyRing(ring);
    let leaves: Vec<Mat<PolyRing<FpRing>>> = (1..=s)
        .rev()
        .map(|t| {
            let shift = ring.from_i64(t as i64);
            Mat {
                rows: r,
                cols: r,
                data: cp.num.iter().map(|e| e.shift_var(&ring, &shift)).collect(),
            }
        })
        .collect();
    let pnum = ordered_mat_product(&poly_ring, &leaves, parallel);
    let den_leaves: Vec<Poly<FpRing>> = (1..=s)
        .map(|t| cp.den.shift_var(&ring, &ring.from_i64(t as i64)))
        .collect();
    let pden = crate::fp::product_tree_poly(&ring, &den_leaves);

    // giant-step points x_j = lo - 1 + j*s, j = 0..g-1
    let lo_mod = ring.from_bigint(lo);
    let s_mod = s % p;
    let points: Vec<u64> = (0..g)
        .map(|j| {
            let off = ring.mul_u64(j % p, s_mod);
            ring.add(&ring.sub(&lo_mod, &(1 % p)), &off)
        })
        .collect();
    let mut evals: Vec<Mat<FpRing>> = vec![Mat::zeros(&ring, r, r); g as usize];
    for (idx, entry) in pnum.data.iter().enumerate() {
        let vals = multi_eval(&ring, entry, &points);
        for (j, v) in vals.into_iter().enumerate() {
            evals[j].data[idx] = v;
        }
    }
    let den_vals = multi_eval(&ring, &pden, &points);

    // multiply the blocks in order (highest j leftmost), then the remainder
    let mut mat = Mat::identity(&ring, r);
    let mut den = 1u64;
    for j in 0..g as usize {
        mat = evals[j].mul(&ring, &mat);
        den = ring.mul_u64(den, den_vals[j]);
    }
    let rem_lo = lo + BigInt::from(g * s);
    let mut x = rem_lo;
    while &x <= hi {
        let (m, d) = cp.eval_at(&ring, &x);
        mat = m.mul(&ring, &mat);
        den = ring.mul_u64(den, d);
        x += 1u32;
    }
    finish(mat, den)
}

/// Ordered product `items[0] * items[1] * ... ` (leftmost applied last) by a
/// shape-fixed product tree.
fn ordered_mat_product<R: Ring>(ring: &R, items: &[Mat<R>], parallel: bool) -> Mat<R> {
    match items.len() {
        0 => panic!("ordered product of no matrices"),
        1 => items[0].clone(),
        n => {
            let (a, b) = items.split_at(n / 2);
            let (ma, mb) = if parallel && n >= 32 {
                par::join(
                    || ordered_mat_product(ring, a, parallel),
                    || ordered_mat_product(ring, b, parallel),
                )
            } else {
                (
                    ordered_mat_product(ring, a, parallel),
                    ordered_mat_product(ring, b, parallel),
                )
            };
            ma.mul(ring, &mb)
        }
    }
}

/// Scalar product `f(lo) f(lo+1) ... f(hi)` by binary splitting.
pub fn product_scalar_range<R, F>(ring: &R, f: &F, lo: &BigInt, hi: &BigInt) -> R::Elem
where
    R: Ring,
    F: Fn(&BigInt) -> R::Elem + Sync,
{
    if lo > hi {
        return ring.one();
    }
    let len = hi - lo + 1u32;
    if len <= BigInt::from(8) {
        let mut acc = ring.one();
        let mut x = lo.clone();
        while &x <= hi {
            acc = ring.mul(&acc, &f(&x));
            x += 1u32;
        }
        return acc;
    }
    let mid = (lo + hi) / 2u32;
    let mid1 = &mid + 1u32;
    let (a, b) = if len >= BigInt::from(PAR_PRODUCT_THRESHOLD) {
        par::join(
            || product_scalar_range(ring, f, lo, &mid),
            || product_scalar_range(ring, f, &mid1, hi),
        )
    } else {
        (
            product_scalar_range(ring, f, lo, &mid),
            product_scalar_range(ring, f, &mid1, hi),
        )
    };
    ring.mul(&a, &b)
}

/// Exact factorial of a nonnegative integer by binary splitting.
pub fn factorial_bigint(n: &BigInt) -> BigInt {
    product_scalar_range(&ZRing, &|x: &BigInt| x.clone(), &BigInt::one(), n)
}

/// `U_N` for a homogeneous recurrence, exactly: applies the matrix
/// factorial to the initial state. `init` is `(u_0, ..., u_{r-1})`; the
/// result is the state `(u_N, u_{N-1}, ..., u_{N-r+1})`.
pub fn nth_term_exact(op: &RecOperator, init: &[BigRat], n: &BigInt) -> Result<Vec<BigRat>> {
    let r = op.order();
    assert_eq!(init.len(), r, "need r initial values");
    let c = op.companion_matrix()?;
    if n < &BigInt::from(r as i64 - 1) {
        return Err(Error::invalid("nth_term target below the initial block"));
    }
    // state at r-1 is (u_{r-1}, ..., u_0)
    let state: Vec<BigRat> = init.iter().rev().cloned().collect();
    let f = factorial_exact(&c, &BigInt::from(r), n)?;
    Ok(f.apply_rat(&state))
}

/// `U_N mod p` for a homogeneous recurrence; initial values are reduced
/// mod p (their denominators must be invertible).
pub fn nth_term_mod_p(
    op: &RecOperator,
    init: &[BigRat],
    n: &BigInt,
    p: u64,
) -> Result<Vec<u64>> {
    let r = op.order();
    assert_eq!(init.len(), r);
    let ring = FpRing::new(p);
    let c = op.companion_matrix()?;
    if n < &BigInt::from(r as i64 - 1) {
        return Err(Error::invalid("nth_term target below the initial block"));
    }
    let state: Vec<u64> = init
        .iter()
        .rev()
        .map(|v| {
            let num = ring.from_bigint(v.numer());
            let den = ring.from_bigint(v.denom());
            if den == 0 {
                return Err(Error::SingularModP { p });
            }
            Ok(ring.mul_u64(num, ring.inv(den)))
        })
        .collect::<Result<_>>()?;
    let f = factorial_mod_p(&c, &BigInt::from(r), n, p)?;
    Ok(f.mat.mul_vec(&ring, &state))
}

/// Rank over F_p of the modular factorial; agrees with the rational rank
/// with high probability over the prime choice.
pub fn rank_mod_p(c: &RatMat<ZRing>, lo: &BigInt, hi: &BigInt, p: u64) -> Result<usize> {
    let f = factorial_mod_p(c, lo, hi, p)?;
    Ok(linalg::rank(&FpRing::new(p), &f.mat))
}

//! Indefinite and definite summation of hypergeometric terms.
//!
//! Indefinite (Gosper): a term with ratio `t(n+1)/t(n) = P/Q` has a
//! hypergeometric antidifference iff `P(n) u(n+1) - Q(n) u(n) = Q(n)` has a
//! rational solution; the compact rational solver answers that directly.
//!
//! Definite (Zeilberger): for a bivariate term `t(n, m)` we look for
//! `lambda_0(m) .. lambda_r(m)` and a rational certificate `u(n, m)` with
//! `(S_n - 1) u t = sum_i lambda_i(m) S_m^i t`. Clearing denominators turns
//! the candidate equation into `R u = f` with `R = P^ S_n - Q^` independent
//! of the `lambda_i` and `f = sum_i lambda_i F_i` linear in them. With `C`
//! the factored denominator bound of `R` and `T1` the cleared numerator
//! operator of `C R(v/C)`, the homogenized operator for `lambda = e_i`
//! factors as
//!
//! `T_i = [F_i(n) sqN(n) S - F_i(n+1) sqD(n+1)] T1`
//!
//! where `sqN/sqD = C(n)/C(n+1)`. Solutions of the `T_i` system anchored at
//! `(T1 v)(k0) = sqD(k0) C(k0) F_i(k0)` superpose linearly over the
//! `lambda_i`, so one slice vector `W_i` per unit vector plus a block `V`
//! of homogeneous directions reduces telescoper existence to a small linear
//! system. Existence is tested mod p with baby-step/giant-step factorials;
//! construction runs the same pipeline exactly at the specialization
//! `m = m_0`, and in full mode once more with `m` symbolic.

mod symbolic;

pub use symbolic::SymbolicCertificate;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::factorial::factorial_mod_p;
use crate::fp::{random_prime, zpoly_mod_p};
use crate::gpform::{compact_gpf, GPForm};
use crate::introots::integer_roots_in_range;
use crate::linalg::{self, Mat};
use crate::poly::{gcd_primitive, Poly, ZPoly, ZZPoly};
use crate::polysols::{degree_candidates, sequence_slice, CompactPoly};
use crate::ratsols::{nonhom_rat_sols, normalized_operator, rat_sols_dimension, CompactRational};
use crate::recurrence::{companion_matrix, rec_to_rec, BinomialSystem, RecOp, RecOperator};
use crate::ring::{BigRat, FpRing, PolyRing, Ring, ZRing};
use crate::Result;

pub(crate) const ZZ: PolyRing<ZRing> = PolyRing(ZRing);

// ---- bivariate polynomial helpers --------------------------------------------

/// Shift the inner variable: `p(n, m) -> p(n, m + j)`.
pub(crate) fn shift_m(p: &ZZPoly, j: i64) -> ZZPoly {
    let jj = BigInt::from(j);
    Poly {
        coeffs: p.coeffs.iter().map(|c| c.shift_int(&jj)).collect(),
    }
}

/// Specialize the inner variable: `p(n, m) -> p(n, m0)` as a polynomial in n.
pub(crate) fn specialize_m(p: &ZZPoly, m0: &BigInt) -> ZPoly {
    ZPoly::from_bigints(p.coeffs.iter().map(|c| c.eval(m0)).collect())
}

/// Evaluate fully at integers `(n0, m0)`.
pub(crate) fn eval_nm(p: &ZZPoly, n0: &BigInt, m0: &BigInt) -> BigInt {
    specialize_m(p, m0).eval(n0)
}

/// Build a bivariate polynomial from monomial terms `(coeff, n_pow, m_pow)`.
pub fn zz_from_terms(terms: &[(i64, usize, usize)]) -> ZZPoly {
    let mut acc: ZZPoly = Poly::zero();
    for &(c, np, mp) in terms {
        let inner = Poly::monomial(&ZRing, BigInt::from(c), mp);
        let mono = Poly::monomial(&ZZ, inner, np);
        acc = acc.add(&ZZ, &mono);
    }
    acc
}

fn zz_is_constant_in_m(p: &ZZPoly) -> bool {
    p.coeffs.iter().all(|c| c.deg0() == 0)
}

// ---- hypergeometric terms -----------------------------------------------------

/// A hypergeometric term given by its shift quotients, both stored reduced.
/// Univariate terms have no `ratio_m`.
#[derive(Clone, Debug)]
pub struct HyperTerm {
    pub ratio_n: (ZZPoly, ZZPoly),
    pub ratio_m: Option<(ZZPoly, ZZPoly)>,
}

fn reduce_pair(num: ZZPoly, den: ZZPoly) -> Result<(ZZPoly, ZZPoly)> {
    if num.is_zero() || den.is_zero() {
        return Err(Error::ZeroInput {
            context: "hypergeometric ratio with zero numerator or denominator",
        });
    }
    let g = gcd_primitive(&ZZ, &num, &den);
    let num = num.exact_div(&ZZ, &g)?;
    let den = den.exact_div(&ZZ, &g)?;
    // also divide out the integer-and-m content common to both
    let cn = num.content(&ZZ);
    let cd = den.content(&ZZ);
    let cc = gcd_primitive(&ZRing, &cn, &cd);
    if cc.deg0() > 0 || cc.coeffs.first().map_or(false, |c| !c.is_one() && !(-c).is_one()) {
        let ccp = Poly::constant(&ZZ, cc);
        return Ok((num.exact_div(&ZZ, &ccp)?, den.exact_div(&ZZ, &ccp)?));
    }
    Ok((num, den))
}

impl HyperTerm {
    /// Univariate term from `t(n+1)/t(n) = p/q`.
    pub fn univariate(p: ZPoly, q: ZPoly) -> Result<HyperTerm> {
        let lift = |f: &ZPoly| -> ZZPoly {
            Poly {
                coeffs: f
                    .coeffs
                    .iter()
                    .map(|c| Poly::constant(&ZRing, c.clone()))
                    .collect(),
            }
        };
        let (num, den) = reduce_pair(lift(&p), lift(&q))?;
        Ok(HyperTerm {
            ratio_n: (num, den),
            ratio_m: None,
        })
    }

    /// Bivariate term from both shift quotients.
    pub fn bivariate(pn: ZZPoly, qn: ZZPoly, pm: ZZPoly, qm: ZZPoly) -> Result<HyperTerm> {
        Ok(HyperTerm {
            ratio_n: reduce_pair(pn, qn)?,
            ratio_m: Some(reduce_pair(pm, qm)?),
        })
    }

    pub fn is_bivariate(&self) -> bool {
        self.ratio_m.is_some()
    }

    /// The univariate ratio as integer polynomials, when applicable.
    pub fn univariate_ratio(&self) -> Option<(ZPoly, ZPoly)> {
        if self.is_bivariate() {
            return None;
        }
        let (p, q) = &self.ratio_n;
        if !zz_is_constant_in_m(p) || !zz_is_constant_in_m(q) {
            return None;
        }
        let drop = |f: &ZZPoly| {
            ZPoly::from_bigints(
                f.coeffs
                    .iter()
                    .map(|c| c.coeff(&ZRing, 0))
                    .collect(),
            )
        };
        Some((drop(p), drop(q)))
    }

    /// `t(n+1,m)/t(n,m)` at integer points; `None` at ratio poles.
    pub fn ratio_n_at(&self, n: &BigInt, m: &BigInt) -> Option<BigRat> {
        let den = eval_nm(&self.ratio_n.1, n, m);
        if den.is_zero() {
            return None;
        }
        Some(BigRat::new(eval_nm(&self.ratio_n.0, n, m), den))
    }

    pub fn ratio_m_at(&self, n: &BigInt, m: &BigInt) -> Option<BigRat> {
        let (pm, qm) = self.ratio_m.as_ref()?;
        let den = eval_nm(qm, n, m);
        if den.is_zero() {
            return None;
        }
        Some(BigRat::new(eval_nm(pm, n, m), den))
    }

    /// The term `t(n, m) = binom(2n+m+N, N) binom(2m, 2n) binom(m, n)`.
    pub fn binomial_product_family(nn: &BigInt) -> HyperTerm {
        let n_big = nn.clone();
        let lin = |c0: BigInt, cn: i64, cm: i64| -> ZZPoly {
            // c0 + cn*n + cm*m
            let constant = Poly::constant(&ZRing, c0);
            let m_part = Poly::monomial(&ZRing, BigInt::from(cm), 1);
            let inner0 = constant.add(&ZRing, &m_part);
            let mut p = Poly::monomial(&ZZ, inner0, 0);
            p = p.add(
                &ZZ,
                &Poly::monomial(&ZZ, Poly::constant(&ZRing, BigInt::from(cn)), 1),
            );
            p
        };
        let pn = lin(&n_big + 1, 2, 1)
            .mul(&ZZ, &lin(&n_big + 2, 2, 1))
            .mul(&ZZ, &lin(BigInt::zero(), -2, 2))
            .mul(&ZZ, &lin(BigInt::from(-1), -2, 2))
            .mul(&ZZ, &lin(BigInt::zero(), -1, 1));
        let qn = lin(BigInt::one(), 2, 1)
            .mul(&ZZ, &lin(BigInt::from(2), 2, 1))
            .mul(&ZZ, &lin(BigInt::one(), 2, 0))
            .mul(&ZZ, &lin(BigInt::from(2), 2, 0))
            .mul(&ZZ, &lin(BigInt::one(), 1, 0));
        let pm = lin(&n_big + 1, 2, 1)
            .mul(&ZZ, &lin(BigInt::one(), 0, 2))
            .mul(&ZZ, &lin(BigInt::from(2), 0, 2))
            .mul(&ZZ, &lin(BigInt::one(), 0, 1));
        let qm = lin(BigInt::one(), 2, 1)
            .mul(&ZZ, &lin(BigInt::one(), -2, 2))
            .mul(&ZZ, &lin(BigInt::from(2), -2, 2))
            .mul(&ZZ, &lin(BigInt::one(), -1, 1));
        HyperTerm::bivariate(pn, qn, pm, qm).expect("family ratios are nonzero")
    }

    /// `t(n, m) = binom(m, n)`.
    pub fn binomial_mn() -> HyperTerm {
        let pn = zz_from_terms(&[(0, 0, 1), (-1, 1, 0)]); // m - n
        let qn = zz_from_terms(&[(1, 0, 0), (1, 1, 0)]); // n + 1
        let pm = zz_from_terms(&[(1, 0, 0), (1, 0, 1)]); // m + 1
        let qm = zz_from_terms(&[(1, 0, 0), (1, 0, 1), (-1, 1, 0)]); // m + 1 - n
        HyperTerm::bivariate(pn, qn, pm, qm).expect("nonzero")
    }
}

/// Exact values `T(m) = sum_{n=0}^{n_max} t(n, m)` for `m = 0..=m_max`,
/// built by exact term iteration from the ratios with `t(0,0) = 1`.
/// The n-range must cover the term's support for the sums to be the true
/// definite sums.
pub fn sum_values(term: &HyperTerm, m_max: u32, n_max: u32) -> Result<Vec<BigRat>> {
    if !term.is_bivariate() {
        return Err(Error::invalid("sum_values needs a bivariate term"));
    }
    let mut t0 = BigRat::one(); // t(0, m)
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        let mb = BigInt::from(m);
        // row sum at this m
        let mut acc = t0.clone();
        let mut t = t0.clone();
        for n in 0..n_max {
            if t.is_zero() {
                break;
            }
            let nb = BigInt::from(n);
            match term.ratio_n_at(&nb, &mb) {
                Some(r) => {
                    t *= r;
                    acc += &t;
                }
                None => {
                    return Err(Error::invalid(format!(
                        "ratio pole inside the summation range at n={n}, m={m}"
                    )))
                }
            }
        }
        out.push(acc);
        // advance t(0, m) -> t(0, m+1)
        if m < m_max {
            let r = term
                .ratio_m_at(&BigInt::zero(), &mb)
                .ok_or_else(|| Error::invalid(format!("ratio_m pole at n=0, m={m}")))?;
            t0 *= r;
        }
    }
    Ok(out)
}

// ---- Gosper -------------------------------------------------------------------

/// Indefinite hypergeometric summation: an antidifference certificate
/// `u(n)` with `u(n+1) r(n) - u(n) = 1` (so `U = u t` satisfies
/// `U(n+1) - U(n) = t(n)`), or `None`.
pub fn gosper(term: &HyperTerm) -> Result<Option<CompactRational>> {
    let (p, q) = term
        .univariate_ratio()
        .ok_or_else(|| Error::invalid("gosper needs a univariate term"))?;
    // P(n) u(n+1) - Q(n) u(n) = Q(n)
    let op = RecOp::new(&ZRing, vec![q.neg(&ZRing), p], Some(q.clone()))?;
    let (particular, _kernel) = nonhom_rat_sols(&op)?;
    Ok(particular)
}

/// Probabilistic pre-test for Gosper summability.
pub fn gosper_decidable(term: &HyperTerm, seed: u64, prime_bits: u32) -> Result<bool> {
    let (p, q) = term
        .univariate_ratio()
        .ok_or_else(|| Error::invalid("gosper needs a univariate term"))?;
    let op = RecOp::new(&ZRing, vec![q.neg(&ZRing), p], Some(q))?;
    let (_dim, feasible) = rat_sols_dimension(&op, seed, prime_bits)?;
    Ok(feasible)
}

// ---- the Small Linear System at a specialization ------------------------------

/// The lambda-free data of the parameterized Gosper equation `(E_r)` at an
/// integer specialization `m = m0`, plus the slice system that is linear in
/// the `lambda_i` and the auxiliary unknowns.
pub struct SmallLinearSystem {
    pub r: usize,
    pub m0: BigInt,
    pub p_hat: ZPoly,
    pub q_hat: ZPoly,
    pub f_parts: Vec<ZPoly>,
    pub gpf: GPForm,
    pub t1: RecOperator,
    sys1: BinomialSystem<ZRing>,
    t_ops: Vec<RecOperator>,
    sys_i: Vec<BinomialSystem<ZRing>>,
    /// numerator degree bound for the candidate rational solutions
    pub n_bound: BigInt,
    pub k0: BigInt,
    /// slice length (max system order)
    pub s: usize,
    sq_n: ZPoly,
    sq_d: ZPoly,
}

/// Uniform degree bound on numerators `v = u C` of rational solutions of
/// `R u = f` with `f` ranging over the span of the `f_parts`.
fn numerator_degree_bound(
    p_hat: &ZPoly,
    q_hat: &ZPoly,
    f_deg: usize,
    c_deg: &BigInt,
    t1: &RecOperator,
) -> BigInt {
    // valuation bound at infinity for u: indicial roots of R plus the
    // inhomogeneous balance deg f - deg_infinity(R)
    let r_op = RecOp::new(
        &ZRing,
        vec![q_hat.neg(&ZRing), p_hat.clone()],
        None,
    )
    .expect("nonzero");
    let ind = crate::recurrence::indicial_polynomial(&ZRing, &r_op);
    let mut vmax: Option<BigInt> = crate::introots::integer_roots(&ind).into_iter().max();
    let lp = p_hat.deg0() as i64;
    let lq = q_hat.deg0() as i64;
    let ell = lp.max(lq);
    let diff = p_hat.sub(&ZRing, q_hat);
    let d_inf = if diff.degree().map_or(true, |d| (d as i64) < ell) {
        ell - 1
    } else {
        ell
    };
    let balance = BigInt::from(f_deg as i64 - d_inf);
    vmax = Some(match vmax {
        Some(v) => v.max(balance),
        None => balance,
    });
    let mut bound = c_deg + vmax.unwrap();
    // the homogeneous numerator degrees directly
    let sys1 = rec_to_rec(&ZRing, &t1.without_rhs());
    if let Some(top) = degree_candidates(&sys1).first() {
        bound = bound.max(top.clone());
    }
    if bound.is_negative() {
        bound = BigInt::zero();
    }
    bound
}

/// Build the specialized system for telescoper order `r` at `m = m0`.
/// Degenerate specializations report an `UnluckyRandomness`-style error so
/// the driver can resample.
pub fn build_small_linear_system(
    term: &HyperTerm,
    r: usize,
    m0: &BigInt,
) -> Result<SmallLinearSystem> {
    let Some((pm, qm)) = term.ratio_m.as_ref() else {
        return Err(Error::invalid("zeilberger needs a bivariate term"));
    };
    let (pn, qn) = &term.ratio_n;

    // common right-hand denominator prod_{j<r} Qm(n, m+j)
    let mut rm_den: ZZPoly = Poly::constant(&ZZ, ZPoly::from_i64s(&[1]));
    for j in 0..r as i64 {
        rm_den = rm_den.mul(&ZZ, &shift_m(qm, j));
    }
    let p_hat_sym = pn.mul(&ZZ, &rm_den);
    let q_hat_sym = qn.mul(&ZZ, &rm_den);
    // F_i = Qn * prod_{j<i} Pm(m+j) * prod_{i<=j<r} Qm(m+j)
    let mut f_syms = Vec::with_capacity(r + 1);
    for i in 0..=r as i64 {
        let mut f = qn.clone();
        for j in 0..i {
            f = f.mul(&ZZ, &shift_m(pm, j));
        }
        for j in i..r as i64 {
            f = f.mul(&ZZ, &shift_m(qm, j));
        }
        f_syms.push(f);
    }

    let p_hat = specialize_m(&p_hat_sym, m0);
    let q_hat = specialize_m(&q_hat_sym, m0);
    let f_parts: Vec<ZPoly> = f_syms.iter().map(|f| specialize_m(f, m0)).collect();
    if p_hat.is_zero() || q_hat.is_zero() || f_parts.iter().any(|f| f.is_zero()) {
        return Err(Error::UnluckyRandomness {
            attempts: 1,
            context: "specialization degenerates the cleared equation",
        });
    }

    // Abramov bound from the pair (a_1(n), a_0(n)) = (P^, -Q^)
    let gpf = compact_gpf(&p_hat, &q_hat.neg(&ZRing))?;
    let r_op = RecOp::new(&ZRing, vec![q_hat.neg(&ZRing), p_hat.clone()], None)?;
    let t1 = normalized_operator(&r_op, &gpf);
    let (sq_n, sq_d) = gpf.shift_quotient(1);

    let f_deg = f_parts.iter().map(|f| f.deg0()).max().unwrap_or(0);
    let n_bound = numerator_degree_bound(&p_hat, &q_hat, f_deg, &gpf.c_degree(), &t1);

    // T_i = [F_i(n) sqN(n) S - F_i(n+1) sqD(n+1)] T1
    let one_shift = BigInt::one();
    let mut t_ops = Vec::with_capacity(r + 1);
    for f in &f_parts {
        let left = RecOp::new(
            &ZRing,
            vec![
                f.shift_int(&one_shift)
                    .mul(&ZRing, &sq_d.shift_int(&one_shift))
                    .neg(&ZRing),
                f.mul(&ZRing, &sq_n),
            ],
            None,
        )?;
        t_ops.push(left.mul_op(&ZRing, &t1));
    }
    let sys1 = rec_to_rec(&ZRing, &t1);
    let sys_i: Vec<BinomialSystem<ZRing>> =
        t_ops.iter().map(|t| rec_to_rec(&ZRing, t)).collect();

    let s = sys_i
        .iter()
        .map(|s| s.op.order())
        .chain(std::iter::once(sys1.op.order()))
        .max()
        .unwrap_or(1)
        .max(1);

    // ordinariness of every system over the working range [0, n_bound + s]
    let range_hi = &n_bound + BigInt::from(2 * s as u64 + 2);
    let mut lead_product = t1.leading().clone();
    for t in &t_ops {
        lead_product = lead_product.mul(&ZRing, t.leading());
    }
    if !integer_roots_in_range(&lead_product, &BigInt::zero(), &range_hi).is_empty() {
        return Err(Error::UnluckyRandomness {
            attempts: 1,
            context: "specialized leading coefficient vanishes in the working range",
        });
    }

    // anchor point k0: F_i, sqD and C all nonzero, row fits the IC block
    let max_k0 = sys_i
        .iter()
        .map(|s| s.ic_len())
        .min()
        .unwrap_or(2)
        .saturating_sub(2);
    let mut k0 = None;
    for cand in 0..=max_k0 {
        let kb = BigInt::from(cand);
        let ok = f_parts.iter().all(|f| !f.eval(&kb).is_zero())
            && !sq_d.eval(&kb).is_zero()
            && gpf.c_nonzero_at(&kb)
            && gpf.c_nonzero_at(&(&kb + 1u32));
        if ok {
            k0 = Some(kb);
            break;
        }
    }
    let Some(k0) = k0 else {
        return Err(Error::UnluckyRandomness {
            attempts: 1,
            context: "no usable anchor point in the initial block",
        });
    };

    Ok(SmallLinearSystem {
        r,
        m0: m0.clone(),
        p_hat,
        q_hat,
        f_parts,
        gpf,
        t1,
        sys1,
        t_ops,
        sys_i,
        n_bound,
        k0,
        s,
        sq_n,
        sq_d,
    })
}

impl SmallLinearSystem {
    /// Anchor row over the initial block of `sys_i[i]`:
    /// `(T1 v)(k0) = sqD(k0) C(k0) F_i(k0)` expanded over `c_0..`.
    /// Returns (row, rhs) with rational entries cleared by the caller.
    fn anchor_row(&self, i: usize, c_k0: &BigRat, ic_len: usize) -> (Vec<BigRat>, BigRat) {
        // (T1 v)(k0) = t1[1](k0) v(k0+1) + t1[0](k0) v(k0)
        // v(x) = sum_j binom(x, j) c_j for integer x
        let k0u = self.k0.to_usize().expect("anchor point is small");
        let mut row = vec![BigRat::zero(); ic_len];
        let weights = [
            (k0u, self.t1.coeffs[0].eval(&self.k0)),
            (k0u + 1, self.t1.coeffs[1].eval(&self.k0)),
        ];
        for (x, w) in weights {
            if w.is_zero() {
                continue;
            }
            let wr = BigRat::from_integer(w);
            // binom(x, j), j = 0..=x
            let mut b = BigInt::one();
            for j in 0..=x.min(ic_len - 1) {
                row[j] += &wr * BigRat::from_integer(b.clone());
                if j < x {
                    b = &b * BigInt::from(x - j) / BigInt::from(j + 1);
                }
            }
        }
        let rhs = BigRat::from_integer(self.sq_d.eval(&self.k0))
            * c_k0
            * BigRat::from_integer(self.f_parts[i].eval(&self.k0));
        (row, rhs)
    }

    /// Exact anchored initial conditions for `lambda = e_i` (free
    /// variables zero).
    fn anchored_ics(&self, i: usize) -> Result<Option<Vec<BigRat>>> {
        let sys = &self.sys_i[i];
        let ic_len = sys.ic_len();
        let c_k0 = self.gpf.eval_c(&self.k0)?;
        let (arow, arhs) = self.anchor_row(i, &c_k0, ic_len);
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let mut rhs: Vec<BigInt> = Vec::new();
        for (row, r0) in &sys.constraints {
            rows.push(row.clone());
            rhs.push(r0.clone());
        }
        // clear the anchor row
        let mut den = arhs.denom().clone();
        for v in &arow {
            den = den.lcm(v.denom());
        }
        rows.push(arow.iter().map(|v| v.numer() * (&den / v.denom())).collect());
        rhs.push(arhs.numer() * (&den / arhs.denom()));
        let mat = Mat::from_rows(&ZRing, rows);
        let sol = linalg::solve_affine(&ZRing, &mat, &rhs);
        Ok(sol.particular.map(|(nums, d)| {
            let dr = BigRat::from_integer(d);
            nums.into_iter()
                .map(|v| BigRat::from_integer(v) / &dr)
                .collect()
        }))
    }

    /// Homogeneous direction block: initial-condition vectors of `sys1`
    /// satisfying its boundary constraints.
    fn v_directions(&self) -> Vec<Vec<BigRat>> {
        let ic_len = self.sys1.ic_len();
        if self.sys1.constraints.is_empty() {
            return (0..ic_len)
                .map(|i| {
                    let mut v = vec![BigRat::zero(); ic_len];
                    v[i] = BigRat::one();
                    v
                })
                .collect();
        }
        let rows: Vec<Vec<BigInt>> = self
            .sys1
            .constraints
            .iter()
            .map(|(row, _)| row.clone())
            .collect();
        let mat = Mat::from_rows(&ZRing, rows);
        linalg::kernel(&ZRing, &mat)
            .into_iter()
            .map(|v| v.into_iter().map(BigRat::from_integer).collect())
            .collect()
    }

    /// Assemble the exact slice system: columns `W_0..W_r | V_1..V_dv`,
    /// rows `c_{N+1} .. c_{N+s}`. Returns `None` when some anchored system
    /// is infeasible (no solution for that unit lambda).
    pub fn assemble_exact(&self) -> Result<Option<SliceSystemExact>> {
        let from = &self.n_bound + 1u32;
        let to = &self.n_bound + BigInt::from(self.s as u64);
        let mut w_cols = Vec::with_capacity(self.r + 1);
        let mut w_ics = Vec::with_capacity(self.r + 1);
        for i in 0..=self.r {
            let Some(ics) = self.anchored_ics(i)? else {
                return Ok(None);
            };
            let slice = sequence_slice(&self.sys_i[i], &ics, &from, &to)?;
            w_cols.push(slice);
            w_ics.push(ics);
        }
        let v_dirs = self.v_directions();
        let mut v_cols = Vec::with_capacity(v_dirs.len());
        for dir in &v_dirs {
            v_cols.push(sequence_slice(&self.sys1, dir, &from, &to)?);
        }
        Ok(Some(SliceSystemExact {
            w_cols,
            v_cols,
            w_ics,
            v_ics: v_dirs,
        }))
    }

    /// Mod-p feasibility probe: true iff the slice system admits a solution
    /// with nonzero lambda-part mod p.
    pub fn feasible_mod_p(&self, p: u64) -> Result<bool> {
        let ring = FpRing::new(p);
        let from = &self.n_bound + 1u32;
        let to = &self.n_bound + BigInt::from(self.s as u64);
        let c_k0 = self.gpf.eval_c_mod_p(&self.k0, p);
        let c_k0r = BigRat::from_integer(BigInt::from(c_k0));
        let mut w_cols: Vec<Vec<u64>> = Vec::with_capacity(self.r + 1);
        for i in 0..=self.r {
            let sys = &self.sys_i[i];
            let ic_len = sys.ic_len();
            let (arow, arhs) = self.anchor_row(i, &c_k0r, ic_len);
            let mut rows: Vec<Vec<u64>> = Vec::new();
            let mut rhs: Vec<u64> = Vec::new();
            for (row, r0) in &sys.constraints {
                rows.push(row.iter().map(|v| ring.from_bigint(v)).collect());
                rhs.push(ring.from_bigint(r0));
            }
            let to_fp = |v: &BigRat| -> Result<u64> {
                let d = ring.from_bigint(v.denom());
                if d == 0 {
                    return Err(Error::SingularModP { p });
                }
                Ok(ring.mul_u64(ring.from_bigint(v.numer()), ring.inv(d)))
            };
            rows.push(arow.iter().map(&to_fp).collect::<Result<_>>()?);
            rhs.push(to_fp(&arhs)?);
            let mat = Mat::from_rows(&ring, rows);
            let sol = linalg::solve_affine(&ring, &mat, &rhs);
            let Some((nums, d)) = sol.particular else {
                return Ok(false);
            };
            let dinv = ring.inv(d);
            let ics: Vec<u64> = nums.iter().map(|&v| ring.mul_u64(v, dinv)).collect();
            w_cols.push(sequence_slice_mod_p(&self.sys_i[i], &ics, &from, &to, p)?);
        }
        let v_dirs = self.v_directions();
        let mut v_cols: Vec<Vec<u64>> = Vec::with_capacity(v_dirs.len());
        for dir in &v_dirs {
            let ics: Vec<u64> = dir
                .iter()
                .map(|v| {
                    let d = ring.from_bigint(v.denom());
                    ring.mul_u64(ring.from_bigint(v.numer()), ring.inv(d))
                })
                .collect();
            v_cols.push(sequence_slice_mod_p(&self.sys1, &ics, &from, &to, p)?);
        }
        // lambda-nonzero solvability via ranks
        let rows = self.s;
        let total = w_cols.len() + v_cols.len();
        let mut data = Vec::with_capacity(rows * total);
        for rix in 0..rows {
            for col in w_cols.iter().chain(v_cols.iter()) {
                data.push(col[rix]);
            }
        }
        let full = Mat {
            rows,
            cols: total,
            data,
        };
        let mut vdata = Vec::with_capacity(rows * v_cols.len());
        for rix in 0..rows {
            for col in &v_cols {
                vdata.push(col[rix]);
            }
        }
        let vmat = Mat {
            rows,
            cols: v_cols.len(),
            data: vdata,
        };
        let rank_full = linalg::rank(&ring, &full);
        let rank_v = linalg::rank(&ring, &vmat);
        Ok(total - rank_full > v_cols.len() - rank_v)
    }
}

/// Exact slice system data.
pub struct SliceSystemExact {
    pub w_cols: Vec<Vec<BigRat>>,
    pub v_cols: Vec<Vec<BigRat>>,
    pub w_ics: Vec<Vec<BigRat>>,
    pub v_ics: Vec<Vec<BigRat>>,
}

impl SliceSystemExact {
    /// Kernel vectors of `[W | V]` with nonzero lambda-part, exactly.
    pub fn lambda_solutions(&self) -> Vec<(Vec<BigRat>, Vec<BigRat>)> {
        let rows = self.w_cols.first().map_or(0, |c| c.len());
        let total = self.w_cols.len() + self.v_cols.len();
        let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
        for rix in 0..rows {
            let rat_row: Vec<BigRat> = self
                .w_cols
                .iter()
                .chain(self.v_cols.iter())
                .map(|c| c[rix].clone())
                .collect();
            let mut den = BigInt::one();
            for v in &rat_row {
                den = den.lcm(v.denom());
            }
            int_rows.push(
                rat_row
                    .iter()
                    .map(|v| v.numer() * (&den / v.denom()))
                    .collect(),
            );
        }
        let mat = Mat::from_rows(&ZRing, int_rows);
        let kernel = if rows == 0 {
            (0..total)
                .map(|i| {
                    let mut v = vec![BigInt::zero(); total];
                    v[i] = BigInt::one();
                    v
                })
                .collect()
        } else {
            linalg::kernel(&ZRing, &mat)
        };
        kernel
            .into_iter()
            .filter(|v| v[..self.w_cols.len()].iter().any(|x| !x.is_zero()))
            .map(|v| {
                let lambda: Vec<BigRat> = v[..self.w_cols.len()]
                    .iter()
                    .cloned()
                    .map(BigRat::from_integer)
                    .collect();
                let mu: Vec<BigRat> = v[self.w_cols.len()..]
                    .iter()
                    .cloned()
                    .map(BigRat::from_integer)
                    .collect();
                (lambda, mu)
            })
            .collect()
    }
}

/// Slice of the sequence generated mod p (mirror of
/// [`crate::polysols::sequence_slice`]).
fn sequence_slice_mod_p(
    sys: &BinomialSystem<ZRing>,
    init: &[u64],
    from: &BigInt,
    to: &BigInt,
    p: u64,
) -> Result<Vec<u64>> {
    let ring = FpRing::new(p);
    let sigma = sys.op.order();
    let l = init.len();
    let mut out = Vec::new();
    let mut k = from.clone();
    while &k <= to && k < BigInt::from(l) {
        out.push(init[k.to_usize().unwrap()]);
        k += 1u32;
    }
    if &k > to {
        return Ok(out);
    }
    if sigma == 0 {
        while &k <= to {
            out.push(0);
            k += 1u32;
        }
        return Ok(out);
    }
    let c = companion_matrix(&ZRing, &sys.op)?;
    let f = factorial_mod_p(&c, &BigInt::from(l), &k, p)?;
    let state0: Vec<u64> = (0..sigma).map(|i| init[l - 1 - i]).collect();
    let mut state = f.mat.mul_vec(&ring, &state0);
    out.push(state[0]);
    let cp = crate::factorial::ratmat_mod_p(&c, &ring);
    while &k < to {
        k += 1u32;
        let (cm, cd) = cp.eval_at(&ring, &k);
        if cd == 0 {
            return Err(Error::SingularModP { p });
        }
        let mut next = cm.mul_vec(&ring, &state);
        let inv = ring.inv(cd);
        for v in &mut next {
            *v = ring.mul_u64(*v, inv);
        }
        state = next;
        out.push(state[0]);
    }
    Ok(out)
}

// ---- the telescoper driver -----------------------------------------------------

/// A telescoper `sum_i lambda_i(m) S_m^i` with its certificate.
#[derive(Clone, Debug)]
pub struct TelescopeResult {
    pub order: usize,
    /// Telescoper coefficients as integer polynomials in `m` (constants for
    /// specialized results), content-normalized jointly.
    pub lambda: Vec<ZPoly>,
    /// Specialization the probe ran at.
    pub m0: BigInt,
    /// Certificate numerator (compact) over the specialized factored
    /// denominator; valid at `m = m0`.
    pub certificate: CompactRational,
    /// Full-mode certificate with symbolic `m`, when requested.
    pub symbolic: Option<SymbolicCertificate>,
}

/// Execution mode for [`zeilberger`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeilMode {
    /// Probabilistic order detection; exact solve at the specialization.
    Probe,
    /// Additionally rerun the construction with symbolic `m`.
    Full,
}

/// Zeilberger's algorithm in compact arithmetic: find the least telescoper
/// order `r <= max_order` and its certificate. `Ok(None)` when every order
/// up to the cap fails.
pub fn zeilberger(
    term: &HyperTerm,
    max_order: u32,
    seed: u64,
    mode: ZeilMode,
) -> Result<Option<TelescopeResult>> {
    if !term.is_bivariate() {
        return Err(Error::invalid("zeilberger needs a bivariate term"));
    }
    if term.ratio_n.0.is_zero() || term.ratio_m.as_ref().unwrap().0.is_zero() {
        return Err(Error::invalid("degenerate zero term"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for r in 0..=max_order as usize {
        match try_order(term, r, &mut rng, mode)? {
            Some(result) => return Ok(Some(result)),
            None => continue,
        }
    }
    Ok(None)
}

fn sample_m0(rng: &mut ChaCha12Rng, base: &BigInt) -> BigInt {
    base + BigInt::from(rng.gen_range(1u32..=(1 << 16)))
}

fn try_order(
    term: &HyperTerm,
    r: usize,
    rng: &mut ChaCha12Rng,
    mode: ZeilMode,
) -> Result<Option<TelescopeResult>> {
    let mut base = BigInt::from(1u32 << 8);
    let mut last_err: Option<Error> = None;
    for _attempt in 0..6 {
        // draw a few specializations, keep the one with the smallest C
        let mut best: Option<SmallLinearSystem> = None;
        for _ in 0..6 {
            let m0 = sample_m0(rng, &base);
            match build_small_linear_system(term, r, &m0) {
                Ok(sls) => {
                    let better = match &best {
                        Some(b) => sls.gpf.c_degree() < b.gpf.c_degree(),
                        None => true,
                    };
                    if better {
                        best = Some(sls);
                    }
                }
                Err(e @ Error::UnluckyRandomness { .. }) => {
                    last_err = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        let Some(sls) = best else {
            // raise the sampling floor and retry
            base = &base * 4u32 + BigInt::from(1u32 << 10);
            continue;
        };
        // raise the floor if the working range overtakes the specialization
        let needed = &sls.n_bound + BigInt::from(2 * sls.s as u64 + 2);
        if sls.m0 <= needed {
            base = needed + BigInt::from(1u32 << 8);
            continue;
        }

        // probabilistic existence test
        let p = random_prime(rng, 62);
        let feasible = match sls.feasible_mod_p(p) {
            Ok(f) => f,
            Err(Error::SingularModP { .. }) => {
                let p2 = random_prime(rng, 62);
                sls.feasible_mod_p(p2)?
            }
            Err(e) => return Err(e),
        };
        if !feasible {
            return Ok(None);
        }

        // exact specialized construction
        let Some(slice) = sls.assemble_exact()? else {
            return Ok(None);
        };
        let solutions = slice.lambda_solutions();
        let Some((lambda, mu)) = solutions.first() else {
            // mod-p false positive; treat as infeasible for this order
            return Ok(None);
        };
        let spec = assemble_specialized(&sls, &slice, lambda, mu, rng)?;
        if !verify_specialized(term, &sls, &spec)? {
            last_err = Some(Error::UnluckyRandomness {
                attempts: 1,
                context: "specialized telescoper failed verification",
            });
            continue;
        }
        let symbolic = if mode == ZeilMode::Full {
            match symbolic::solve_symbolic(term, &sls, &spec, rng)? {
                Some(sym) => Some(sym),
                None => {
                    // unlucky specialization per the retry rule; resample
                    last_err = Some(Error::UnluckyRandomness {
                        attempts: 1,
                        context: "symbolic system had no nonzero rational solution",
                    });
                    continue;
                }
            }
        } else {
            None
        };
        let lambda_out = match &symbolic {
            Some(sym) => sym.lambda.clone(),
            None => normalize_lambda(lambda),
        };
        return Ok(Some(TelescopeResult {
            order: r,
            lambda: lambda_out,
            m0: sls.m0.clone(),
            certificate: spec.certificate,
            symbolic,
        }));
    }
    Err(last_err.unwrap_or(Error::UnluckyRandomness {
        attempts: 6,
        context: "could not find a usable specialization",
    }))
}

/// Specialized solve output.
pub(crate) struct SpecializedSolution {
    pub lambda: Vec<BigRat>,
    pub certificate: CompactRational,
    /// actual numerator degree (with high probability)
    pub n_actual: BigInt,
}

fn normalize_lambda(lambda: &[BigRat]) -> Vec<ZPoly> {
    // clear denominators and divide by the integer content
    let mut den = BigInt::one();
    for l in lambda {
        den = den.lcm(l.denom());
    }
    let ints: Vec<BigInt> = lambda.iter().map(|l| l.numer() * (&den / l.denom())).collect();
    let mut content = BigInt::zero();
    for v in &ints {
        content = content.gcd(v);
    }
    if content.is_zero() {
        content = BigInt::one();
    }
    // sign: make the highest-order coefficient positive
    if let Some(last) = ints.iter().rev().find(|v| !v.is_zero()) {
        if last.is_negative() {
            content = -content;
        }
    }
    ints.iter()
        .map(|v| ZPoly::from_bigints(vec![v / &content]))
        .collect()
}

fn assemble_specialized(
    sls: &SmallLinearSystem,
    slice: &SliceSystemExact,
    lambda: &[BigRat],
    mu: &[BigRat],
    rng: &mut ChaCha12Rng,
) -> Result<SpecializedSolution> {
    // combined operator T(lambda) via f* = sum lambda_i F_i
    let mut den = BigInt::one();
    for l in lambda {
        den = den.lcm(l.denom());
    }
    let mut f_star = ZPoly::zero();
    for (l, f) in lambda.iter().zip(&sls.f_parts) {
        let w = l.numer() * (&den / l.denom());
        f_star = f_star.add(&ZRing, &f.scale(&ZRing, &w));
    }
    if f_star.is_zero() {
        return Err(Error::invalid("combined right-hand side vanished"));
    }
    let left = RecOp::new(
        &ZRing,
        vec![
            f_star
                .shift_int(&BigInt::one())
                .mul(&ZRing, &sls.sq_d.shift_int(&BigInt::one()))
                .neg(&ZRing),
            f_star.mul(&ZRing, &sls.sq_n),
        ],
        None,
    )?;
    let t_star = left.mul_op(&ZRing, &sls.t1);
    let sys_star = rec_to_rec(&ZRing, &t_star);

    // combined initial coefficients: sum lambda_i W-ics + sum mu_j V-ics
    let l_common = sys_star
        .ic_len()
        .max(sls.sys_i.iter().map(|s| s.ic_len()).max().unwrap_or(1))
        .max(sls.sys1.ic_len());
    let zero = BigInt::zero();
    let upto = BigInt::from(l_common as u64 - 1);
    let mut combined = vec![BigRat::zero(); l_common];
    for (i, ics) in slice.w_ics.iter().enumerate() {
        if lambda[i].is_zero() {
            continue;
        }
        let vals = sequence_slice(&sls.sys_i[i], ics, &zero, &upto)?;
        for (c, v) in combined.iter_mut().zip(vals) {
            *c += &lambda[i] * v;
        }
    }
    for (j, ics) in slice.v_ics.iter().enumerate() {
        if mu.get(j).map_or(true, |m| m.is_zero()) {
            continue;
        }
        let vals = sequence_slice(&sls.sys1, ics, &zero, &upto)?;
        for (c, v) in combined.iter_mut().zip(vals) {
            *c += &mu[j] * v;
        }
    }

    // actual degree mod a random prime
    let n_actual = detect_degree_mod_p(&sys_star, &combined, &sls.n_bound, rng)
        .unwrap_or_else(|| sls.n_bound.clone());

    let numerator = CompactPoly {
        degree_bound: n_actual.clone(),
        rec: sys_star.op.clone(),
        init: combined,
        translation: BigInt::zero(),
    };
    let certificate = CompactRational {
        numerator,
        denominator: sls.gpf.clone(),
        translation: BigInt::zero(),
    };
    Ok(SpecializedSolution {
        lambda: lambda.to_vec(),
        certificate,
        n_actual,
    })
}

/// Largest k <= bound with c_k != 0, detected mod a random prime.
fn detect_degree_mod_p(
    sys: &BinomialSystem<ZRing>,
    init: &[BigRat],
    bound: &BigInt,
    rng: &mut ChaCha12Rng,
) -> Option<BigInt> {
    let bound_u = bound.to_usize()?;
    'prime: for _ in 0..3 {
        let p = random_prime(rng, 62);
        let ring = FpRing::new(p);
        let sigma = sys.op.order();
        let l = init.len();
        let mut vals: Vec<u64> = Vec::with_capacity(bound_u + 1);
        for v in init.iter().take(bound_u + 1) {
            let d = ring.from_bigint(v.denom());
            if d == 0 {
                continue 'prime;
            }
            vals.push(ring.mul_u64(ring.from_bigint(v.numer()), ring.inv(d)));
        }
        if sigma > 0 {
            let coeffs_p: Vec<crate::fp::FpPoly> = sys
                .op
                .coeffs
                .iter()
                .map(|c| zpoly_mod_p(c, &ring))
                .collect();
            while vals.len() <= bound_u {
                let j = vals.len();
                let state = BigInt::from(j - sigma);
                let xe = ring.from_bigint(&state);
                let lead = coeffs_p[sigma].horner(&ring, &xe);
                if lead == 0 {
                    continue 'prime;
                }
                let mut s = 0u64;
                for (i, c) in coeffs_p.iter().enumerate().take(sigma) {
                    let w = c.horner(&ring, &xe);
                    s = ring.add(&s, &ring.mul_u64(w, vals[j - sigma + i]));
                }
                vals.push(ring.mul_u64(ring.neg(&s), ring.inv(lead)));
            }
        } else {
            vals.resize(bound_u + 1, 0);
        }
        if l > bound_u + 1 {
            // degree bound smaller than the block; scan directly
        }
        for k in (0..=bound_u).rev() {
            if vals[k] != 0 {
                return Some(BigInt::from(k));
            }
        }
        return Some(BigInt::zero());
    }
    None
}

/// Verify the telescoping identity at the specialization on pole-free
/// sample points: `u(n+1) ratio_n - u(n) = sum_i lambda_i Rm_i(n, m0)`.
fn verify_specialized(
    term: &HyperTerm,
    sls: &SmallLinearSystem,
    spec: &SpecializedSolution,
) -> Result<bool> {
    let (pm, qm) = term.ratio_m.as_ref().unwrap();
    let mut checked = 0;
    let mut n = BigInt::zero();
    let mut guard = 0;
    while checked < 12 {
        guard += 1;
        if guard > 4000 {
            return Err(Error::invalid("no usable verification points"));
        }
        let n1 = &n + 1u32;
        let ok = sls.gpf.c_nonzero_at(&n) && sls.gpf.c_nonzero_at(&n1);
        let rn = term.ratio_n_at(&n, &sls.m0);
        if !ok || rn.is_none() {
            n += 1u32;
            continue;
        }
        let u_n = spec.certificate.value_at(&n)?.unwrap();
        let u_n1 = spec.certificate.value_at(&n1)?.unwrap();
        let lhs = u_n1 * rn.unwrap() - &u_n;
        let mut rhs = BigRat::zero();
        let mut rm_acc = BigRat::one();
        let mut pole = false;
        for (i, l) in spec.lambda.iter().enumerate() {
            rhs += l * &rm_acc;
            if i < spec.lambda.len() - 1 {
                let mj = &sls.m0 + BigInt::from(i as u64);
                let dn = eval_nm(qm, &n, &mj);
                if dn.is_zero() {
                    pole = true;
                    break;
                }
                rm_acc *= BigRat::new(eval_nm(pm, &n, &mj), dn);
            }
        }
        if pole {
            n += 1u32;
            continue;
        }
        if lhs != rhs {
            return Ok(false);
        }
        checked += 1;
        n += 1u32;
    }
    Ok(true)
}

/// Apply a telescoper `sum_i lambda_i(m) S_m^i` to a value table `T(m)`.
pub fn apply_telescoper(lambda: &[ZPoly], values: &[BigRat], m: usize) -> BigRat {
    let mut acc = BigRat::zero();
    for (i, l) in lambda.iter().enumerate() {
        acc += BigRat::from_integer(l.eval(&BigInt::from(m))) * &values[m + i];
    }
    acc
}

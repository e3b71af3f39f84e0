//! Finite-support and polynomial solutions of linear recurrences, carried in
//! compact form: the binomial-basis recurrence, a short block of initial
//! coefficients, and a degree bound.
//!
//! The degree of any finitely supported solution of a binomial-basis system
//! is a nonnegative integer root of its indicial polynomial. The solver
//! computes the values of the delta-basis sequences on the slice just past
//! the largest candidate degree with one matrix factorial, intersects the
//! kernel of that slice map with the boundary constraints, and reads off
//! initial-condition vectors of bit size O(N log N). A probabilistic variant
//! does the same mod a random prime in O~(sqrt N) and reports dimension and
//! degrees only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::factorial::{factorial_bigint, factorial_exact, factorial_mod_p, RatMat};
use crate::fp::random_prime;
use crate::introots::integer_roots;
use crate::linalg::{self, Mat};
use crate::poly::{QPoly, ZPoly};
use crate::recurrence::{
    binomial_collect, companion_matrix, rec_to_rec, BinomialSystem, RecOp, RecOperator,
};
use crate::ring::{BigRat, FpRing, Ring, ZRing};
use crate::Result;

/// Expansion guard: refuse to materialize more coefficients than this by
/// default.
pub const DEFAULT_EXPAND_LIMIT: u64 = 100_000;

/// A polynomial of (possibly huge) degree, stored as the recurrence of its
/// binomial-basis coefficients plus the first block of coefficients.
///
/// `init` holds `c_0 .. c_{L-1}`; for `j >= L` the coefficients follow the
/// recurrence of `rec`. A recorded translation `alpha` means this object
/// represents `u(n + alpha)` where `u` solves the caller's original
/// operator; [`CompactPoly::expand`] substitutes the shift back.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactPoly {
    pub degree_bound: BigInt,
    pub rec: RecOperator,
    pub init: Vec<BigRat>,
    pub translation: BigInt,
}

impl CompactPoly {
    pub fn zero() -> CompactPoly {
        CompactPoly {
            degree_bound: BigInt::zero(),
            rec: RecOp::homogeneous(&ZRing, vec![ZPoly::from_i64s(&[1])]).unwrap(),
            init: vec![BigRat::zero()],
            translation: BigInt::zero(),
        }
    }

    /// Binomial-basis coefficients `c_0 .. c_{upto-1}` by direct unrolling.
    pub fn coefficients(&self, upto: usize) -> Result<Vec<BigRat>> {
        let sigma = self.rec.order();
        let mut c: Vec<BigRat> = self.init.iter().take(upto).cloned().collect();
        if sigma == 0 {
            c.resize(upto, BigRat::zero());
            return Ok(c);
        }
        while c.len() < upto {
            let j = c.len();
            let state = BigInt::from(j - sigma);
            let lead = self.rec.leading().eval(&state);
            if lead.is_zero() {
                return Err(Error::NonOrdinary { index: state });
            }
            let mut s = BigRat::zero();
            for (i, a) in self.rec.coeffs.iter().enumerate().take(sigma) {
                s -= BigRat::from_integer(a.eval(&state)) * &c[j - sigma + i];
            }
            c.push(s / BigRat::from_integer(lead));
        }
        Ok(c)
    }

    /// Coefficient `c_k` for a possibly huge index, via one matrix factorial.
    pub fn coefficient_at(&self, k: &BigInt) -> Result<BigRat> {
        if k.is_negative() {
            return Ok(BigRat::zero());
        }
        let l = self.init.len();
        if let Some(ki) = k.to_usize() {
            if ki < l {
                return Ok(self.init[ki].clone());
            }
        }
        let sigma = self.rec.order();
        if sigma == 0 {
            return Ok(BigRat::zero());
        }
        let c = companion_matrix(&ZRing, &self.rec)?;
        // state at L-1 is (c_{L-1}, ..., c_{L-sigma})
        let state: Vec<BigRat> = (0..sigma).map(|i| self.init[l - 1 - i].clone()).collect();
        let f = factorial_exact(&c, &BigInt::from(l), k)?;
        Ok(f.apply_rat(&state).swap_remove(0))
    }

    /// Check `c_k = 0` on the window just past the degree bound (the
    /// testable form of the support invariant).
    pub fn verify_degree_bound(&self) -> Result<bool> {
        let sigma = self.rec.order().max(1);
        for off in 1..=sigma {
            let k = &self.degree_bound + BigInt::from(off);
            if !self.coefficient_at(&k)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Expand to an explicit polynomial in the caller's original variable
    /// (the recorded translation is substituted back).
    pub fn expand(&self, limit: u64) -> Result<QPoly> {
        let d = self
            .degree_bound
            .to_u64()
            .filter(|&d| d <= limit)
            .ok_or_else(|| Error::DegreeLimitExceeded {
                requested: self.degree_bound.clone(),
                limit,
            })?;
        let cs = self.coefficients(d as usize + 1)?;
        let poly = binomial_collect(&cs);
        if self.translation.is_zero() {
            Ok(poly)
        } else {
            // u(n) = u~(n - alpha)
            Ok(poly.shift(&BigRat::from_integer(-self.translation.clone())))
        }
    }

    /// Scale so the expanded polynomial is monic: `c_D = D!` at the degree
    /// bound (which the solvers set to the actual degree).
    pub fn normalize_monic(&mut self) -> Result<()> {
        let top = self.coefficient_at(&self.degree_bound.clone())?;
        if top.is_zero() {
            return Ok(());
        }
        let target = BigRat::from_integer(factorial_bigint(&self.degree_bound));
        let scale = target / top;
        self.scale(&scale);
        Ok(())
    }

    pub fn scale(&mut self, s: &BigRat) {
        for c in &mut self.init {
            *c = &*c * s;
        }
    }
}

/// A basis of solutions sharing one recurrence, echelonized by degree.
#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub elements: Vec<CompactPoly>,
}

impl SolutionBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn set_translation(&mut self, alpha: &BigInt) {
        for el in &mut self.elements {
            el.translation = alpha.clone();
        }
    }
}

/// Dimension-and-degrees report from the probabilistic path.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionReport {
    pub dimension: usize,
    /// One entry per basis element, descending.
    pub degrees: Vec<BigInt>,
}

/// Candidate degrees of finitely supported solutions: nonnegative integer
/// roots of the indicial polynomial (boundary factors included), descending.
pub fn degree_candidates(sys: &BinomialSystem<ZRing>) -> Vec<BigInt> {
    let ind = sys.indicial(&ZRing);
    let mut roots: Vec<BigInt> = integer_roots(&ind)
        .into_iter()
        .filter(|r| !r.is_negative())
        .collect();
    roots.sort();
    roots.reverse();
    roots
}

/// Linear system over the extended initial block whose kernel (or affine
/// solution set) is exactly the set of solutions supported in `[0, bound]`.
struct SliceSystem {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    /// number of unknowns: the extended initial-coefficient block length
    ncols: usize,
}

fn slice_system(sys: &BinomialSystem<ZRing>, bound: &BigInt) -> Result<SliceSystem> {
    let sigma = sys.op.order();
    let l = sys.ic_len();

    if sigma == 0 {
        // Relations b(j) c_j = g(j') pin every position at or past
        // valid_from; work over the block extended to the bound.
        let ncols = l.max(bound.to_usize().map_or(l, |b| b + 1));
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (row, r) in &sys.constraints {
            let mut padded = row.clone();
            padded.resize(ncols, BigInt::zero());
            rows.push(padded);
            rhs.push(r.clone());
        }
        for j in sys.valid_from..ncols {
            let b = sys.op.trailing().eval(&BigInt::from(j));
            let mut row = vec![BigInt::zero(); ncols];
            row[j] = b;
            rows.push(row);
            rhs.push(sys.rhs_at(&ZRing, j));
        }
        return Ok(SliceSystem { rows, rhs, ncols });
    }

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    for (row, r) in &sys.constraints {
        rows.push(row.clone());
        rhs.push(r.clone());
    }

    // direct zero rows for initial positions beyond the bound
    let mut k = bound + 1u32;
    while k < BigInt::from(l) {
        let ki = k.to_usize().unwrap();
        let mut row = vec![BigInt::zero(); l];
        row[ki] = BigInt::one();
        rows.push(row);
        rhs.push(BigInt::zero());
        k += 1u32;
    }

    // slice rows c_{top+1} .. c_{top+sigma} = 0 via the (affine) factorial
    let top = bound.max(&BigInt::from(l as i64 - 1)).clone();
    let c = companion_matrix(&ZRing, &sys.op)?;
    let (fmat, _fden, w) = affine_factorial(sys, &c, &BigInt::from(l), &(&top + BigInt::from(sigma)))?;
    for i in 0..sigma {
        // row over the state (c_{l-1}, ..., c_{l-sigma}); rhs from -w
        let mut row = vec![BigRat::zero(); l];
        for j in 0..sigma {
            row[l - 1 - j] = BigRat::from_integer(fmat.at(i, j).clone());
        }
        let rhs_val = -w[i].clone();
        let mut den = rhs_val.denom().clone();
        for v in &row {
            den = den.lcm(v.denom());
        }
        rows.push(row.iter().map(|v| v.numer() * (&den / v.denom())).collect());
        rhs.push(rhs_val.numer() * (&den / rhs_val.denom()));
    }
    Ok(SliceSystem {
        rows,
        rhs,
        ncols: l,
    })
}

/// Exact factorial with the inhomogeneous accumulation: returns
/// `(F, den, w)` with `U_hi = (F / den) U_{lo-1} + w`. `w` is zero for
/// homogeneous systems; the denominator is folded into `w` already.
fn affine_factorial(
    sys: &BinomialSystem<ZRing>,
    c: &RatMat<ZRing>,
    lo: &BigInt,
    hi: &BigInt,
) -> Result<(Mat<ZRing>, BigInt, Vec<BigRat>)> {
    let sigma = sys.op.order();
    let last = sys.last_inhom_state(&ZRing);
    let w_hi = match last {
        Some(j) => BigInt::from(j + sigma).min(hi.clone()),
        None => lo - 1u32,
    };
    // stepwise affine accumulation over [lo, w_hi]
    let b = factorial_exact(c, lo, &w_hi)?;
    let mut w = vec![BigRat::zero(); sigma];
    let mut x = lo.clone();
    while x <= w_hi {
        let (cm, cd) = c.eval_at(&ZRing, &x);
        if cd.is_zero() {
            return Err(Error::SingularPoint { index: x });
        }
        let cdr = BigRat::from_integer(cd);
        let mut next: Vec<BigRat> = (0..sigma)
            .map(|i| {
                let mut acc = BigRat::zero();
                for (j, wj) in w.iter().enumerate() {
                    acc += BigRat::from_integer(cm.at(i, j).clone()) * wj;
                }
                acc / &cdr
            })
            .collect();
        // v_x = (g(x - sigma) / b_sigma(x - sigma)) e_1
        let state = &x - BigInt::from(sigma);
        if let Some(j) = state.to_usize() {
            let g = sys.rhs_at(&ZRing, j);
            if !g.is_zero() {
                let lead = sys.op.leading().eval(&state);
                next[0] += BigRat::new(g, lead);
            }
        }
        w = next;
        x += 1u32;
    }
    // homogeneous continuation over (w_hi, hi]
    let a = factorial_exact(c, &(&w_hi + 1u32), hi)?;
    let ad = BigRat::from_integer(a.den.clone());
    let w_final: Vec<BigRat> = (0..sigma)
        .map(|i| {
            let mut acc = BigRat::zero();
            for (j, wj) in w.iter().enumerate() {
                acc += BigRat::from_integer(a.mat.at(i, j).clone()) * wj;
            }
            acc / &ad
        })
        .collect();
    let fmat = a.mat.mul(&ZRing, &b.mat);
    let fden = &a.den * &b.den;
    // normalize: rows of fmat are over den; fold den into rational rows by
    // keeping (fmat, fden) and the already-rational w
    let _ = &fden;
    // scale w by fden so callers can treat rows as fmat·x + w·fden? Keep w
    // exact instead: slice rows use fmat with rhs -w * fden.
    let w_scaled: Vec<BigRat> = w_final
        .iter()
        .map(|v| v * BigRat::from_integer(fden.clone()))
        .collect();
    Ok((fmat, fden, w_scaled))
}

/// Basis of finitely supported solutions of a homogeneous system,
/// echelonized by degree, each element monic at its degree.
pub fn finite_support_basis(sys: &BinomialSystem<ZRing>) -> Result<SolutionBasis> {
    let candidates = degree_candidates(sys);
    let bound = candidates.first().cloned().unwrap_or_else(BigInt::zero);
    let ss = slice_system(sys, &bound)?;
    if !ss.rhs.iter().all(|r| r.is_zero()) {
        return Err(Error::invalid(
            "finite_support_basis on an inhomogeneous system (use the nonhom path)",
        ));
    }
    let mat = Mat::from_rows(&ZRing, ss.rows);
    let kernel = if mat.rows == 0 {
        // no conditions at all: full space
        (0..ss.ncols)
            .map(|i| {
                let mut v = vec![BigInt::zero(); ss.ncols];
                v[i] = BigInt::one();
                v
            })
            .collect()
    } else {
        linalg::kernel(&ZRing, &mat)
    };
    let elements = echelonize_by_degree(sys, kernel, &candidates, ss.ncols)?;
    Ok(SolutionBasis { elements })
}

/// Turn raw kernel vectors into per-degree monic basis elements.
fn echelonize_by_degree(
    sys: &BinomialSystem<ZRing>,
    kernel: Vec<Vec<BigInt>>,
    candidates: &[BigInt],
    ncols: usize,
) -> Result<Vec<CompactPoly>> {
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let sigma = sys.op.order();
    let mut vectors: Vec<Vec<BigRat>> = kernel
        .into_iter()
        .map(|v| v.into_iter().map(BigRat::from_integer).collect())
        .collect();
    // per-candidate value rows: c_d as a function of each vector
    let mut value_rows: Vec<Vec<BigRat>> = Vec::new();
    for d in candidates {
        let row: Vec<BigRat> = if let Some(di) = d.to_usize().filter(|&di| di < ncols) {
            vectors.iter().map(|v| v[di].clone()).collect()
        } else {
            assert!(sigma >= 1, "order-0 candidates lie in the extended block");
            let c = companion_matrix(&ZRing, &sys.op)?;
            let f = factorial_exact(&c, &BigInt::from(ncols), d)?;
            vectors
                .iter()
                .map(|v| {
                    let state: Vec<BigRat> =
                        (0..sigma).map(|i| v[ncols - 1 - i].clone()).collect();
                    f.apply_rat(&state).swap_remove(0)
                })
                .collect()
        };
        value_rows.push(row);
    }
    let mut used = vec![false; vectors.len()];
    let mut out = Vec::new();
    for (ci, d) in candidates.iter().enumerate() {
        let Some(pivot) = (0..vectors.len()).find(|&i| !used[i] && !value_rows[ci][i].is_zero())
        else {
            continue;
        };
        used[pivot] = true;
        let pval = value_rows[ci][pivot].clone();
        for i in 0..vectors.len() {
            if used[i] || value_rows[ci][i].is_zero() {
                continue;
            }
            let factor = &value_rows[ci][i] / &pval;
            for j in 0..ncols {
                let sub = &factor * &vectors[pivot][j];
                vectors[i][j] -= sub;
            }
            for row in value_rows.iter_mut() {
                let sub = &factor * &row[pivot];
                row[i] -= sub;
            }
        }
        let mut element = CompactPoly {
            degree_bound: d.clone(),
            rec: sys.op.clone(),
            init: vectors[pivot].clone(),
            translation: BigInt::zero(),
        };
        element.normalize_monic()?;
        out.push(element);
    }
    Ok(out)
}

/// Probabilistic dimension/degree report mod a random prime: one
/// baby-step/giant-step factorial per candidate degree.
pub fn finite_support_dimension(
    sys: &BinomialSystem<ZRing>,
    seed: u64,
    prime_bits: u32,
) -> Result<DimensionReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let candidates = degree_candidates(sys);
    'prime: for _ in 0..4 {
        let p = random_prime(&mut rng, prime_bits);
        let ring = FpRing::new(p);
        let mut nullities = Vec::new();
        for d in &candidates {
            match slice_nullity_mod_p(sys, d, &ring) {
                Ok(nl) => nullities.push(nl),
                Err(Error::SingularModP { .. }) => continue 'prime,
                Err(e) => return Err(e),
            }
        }
        let mut degrees = Vec::new();
        for (i, d) in candidates.iter().enumerate() {
            let below = if i + 1 < candidates.len() {
                nullities[i + 1]
            } else {
                0
            };
            for _ in below..nullities[i] {
                degrees.push(d.clone());
            }
        }
        let dimension = nullities.first().copied().unwrap_or(0);
        return Ok(DimensionReport { dimension, degrees });
    }
    Err(Error::UnluckyRandomness {
        attempts: 4,
        context: "finite-support dimension mod p",
    })
}

fn slice_nullity_mod_p(
    sys: &BinomialSystem<ZRing>,
    bound: &BigInt,
    ring: &FpRing,
) -> Result<usize> {
    let sigma = sys.op.order();
    let l = sys.ic_len();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    if sigma == 0 {
        let ncols = l.max(bound.to_usize().map_or(l, |b| b + 1));
        for (row, _) in &sys.constraints {
            let mut r: Vec<u64> = row.iter().map(|v| ring.from_bigint(v)).collect();
            r.resize(ncols, 0);
            rows.push(r);
        }
        for j in sys.valid_from..ncols {
            let b = ring.from_bigint(&sys.op.trailing().eval(&BigInt::from(j)));
            let mut row = vec![0u64; ncols];
            row[j] = b;
            rows.push(row);
        }
        let m = Mat::from_rows(ring, rows);
        return Ok(ncols - linalg::rank(ring, &m));
    }
    for (row, _) in &sys.constraints {
        rows.push(row.iter().map(|v| ring.from_bigint(v)).collect());
    }
    let mut k = bound + 1u32;
    while k < BigInt::from(l) {
        let ki = k.to_usize().unwrap();
        let mut row = vec![0u64; l];
        row[ki] = 1;
        rows.push(row);
        k += 1u32;
    }
    let top = bound.max(&BigInt::from(l as i64 - 1)).clone();
    let c = companion_matrix(&ZRing, &sys.op)?;
    let f = factorial_mod_p(&c, &BigInt::from(l), &(&top + BigInt::from(sigma)), ring.p)?;
    for i in 0..sigma {
        let mut row = vec![0u64; l];
        for j in 0..sigma {
            row[l - 1 - j] = *f.mat.at(i, j);
        }
        rows.push(row);
    }
    let m = Mat::from_rows(ring, rows);
    Ok(l - linalg::rank(ring, &m))
}

/// Polynomial solutions of a homogeneous recurrence, in compact form.
/// Translates internally to an ordinary point; the applied shift is
/// recorded on every returned element.
pub fn poly_solutions(op: &RecOperator) -> Result<SolutionBasis> {
    if !op.is_homogeneous() {
        return Err(Error::invalid(
            "poly_solutions needs a homogeneous operator (see poly_solutions_nonhom)",
        ));
    }
    let alpha = op.find_ordinary_shift();
    let shifted = op.translate(&ZRing, &alpha);
    let sys = rec_to_rec(&ZRing, &shifted);
    let mut basis = finite_support_basis(&sys)?;
    basis.set_translation(&alpha);
    Ok(basis)
}

/// Probabilistic dimension of the polynomial solution space.
pub fn poly_solutions_dimension(
    op: &RecOperator,
    seed: u64,
    prime_bits: u32,
) -> Result<DimensionReport> {
    let alpha = op.find_ordinary_shift();
    let shifted = op.without_rhs().translate(&ZRing, &alpha);
    let sys = rec_to_rec(&ZRing, &shifted);
    finite_support_dimension(&sys, seed, prime_bits)
}

/// Polynomial solutions of `R u = f`: a particular solution (when one
/// exists) plus the homogeneous basis.
pub fn poly_solutions_nonhom(op: &RecOperator) -> Result<(Option<CompactPoly>, SolutionBasis)> {
    if op.rhs.is_none() {
        return Err(Error::invalid(
            "poly_solutions_nonhom needs a right-hand side",
        ));
    }
    let alpha = op.find_ordinary_shift();
    let shifted = op.translate(&ZRing, &alpha);
    let sys = rec_to_rec(&ZRing, &shifted);

    let candidates = degree_candidates(&sys);
    let mut bound = candidates.first().cloned().unwrap_or_else(BigInt::zero);
    if let Some(last) = sys.last_inhom_state(&ZRing) {
        bound = bound.max(BigInt::from(last));
    }
    // rhs support visible only through boundary constraints still needs a
    // nonnegative block
    if let Some(m) = sys.rhs_values.iter().rposition(|v| !v.is_zero()) {
        bound = bound.max(BigInt::from(m));
    }

    let ss = slice_system(&sys, &bound)?;
    let mat = Mat::from_rows(&ZRing, ss.rows);
    let sol = linalg::solve_affine(&ZRing, &mat, &ss.rhs);
    let mut hom = SolutionBasis {
        elements: echelonize_by_degree(&sys, sol.kernel, &candidates, ss.ncols)?,
    };
    hom.set_translation(&alpha);
    let particular = sol.particular.map(|(nums, den)| {
        let denr = BigRat::from_integer(den);
        let init: Vec<BigRat> = nums
            .into_iter()
            .map(|v| BigRat::from_integer(v) / &denr)
            .collect();
        CompactPoly {
            degree_bound: bound.clone(),
            rec: sys.op.clone(),
            init,
            translation: alpha.clone(),
        }
    });
    Ok((particular, hom))
}

/// Slice values `c_from .. c_to` of the sequence generated by a homogeneous
/// system from an initial block (used by the summation pipeline).
pub fn sequence_slice(
    sys: &BinomialSystem<ZRing>,
    init: &[BigRat],
    from: &BigInt,
    to: &BigInt,
) -> Result<Vec<BigRat>> {
    let sigma = sys.op.order();
    let l = init.len();
    assert!(l >= sys.ic_len());
    let mut out = Vec::new();
    let mut k = from.clone();
    while &k <= to && k < BigInt::from(l) {
        let ki = k.to_usize().unwrap();
        out.push(init[ki].clone());
        k += 1u32;
    }
    if &k > to {
        return Ok(out);
    }
    if sigma == 0 {
        while &k <= to {
            out.push(BigRat::zero());
            k += 1u32;
        }
        return Ok(out);
    }
    let c = companion_matrix(&ZRing, &sys.op)?;
    let f = factorial_exact(&c, &BigInt::from(l), &k)?;
    let state0: Vec<BigRat> = (0..sigma).map(|i| init[l - 1 - i].clone()).collect();
    let mut state = f.apply_rat(&state0);
    out.push(state[0].clone());
    while &k < to {
        k += 1u32;
        let (cm, cd) = c.eval_at(&ZRing, &k);
        if cd.is_zero() {
            return Err(Error::SingularPoint { index: k });
        }
        let cdr = BigRat::from_integer(cd);
        state = (0..sigma)
            .map(|i| {
                let mut acc = BigRat::zero();
                for (j, sj) in state.iter().enumerate() {
                    acc += BigRat::from_integer(cm.at(i, j).clone()) * sj;
                }
                acc / &cdr
            })
            .collect();
        out.push(state[0].clone());
    }
    Ok(out)
}

/// Brute-force polynomial solutions in the monomial basis (oracle and
/// small-case fallback): for homogeneous input a kernel basis, for
/// nonhomogeneous input the particular solution first (if one exists)
/// followed by the kernel.
pub fn poly_solutions_brute(op: &RecOperator, deg_bound: usize) -> Vec<QPoly> {
    let mut cols: Vec<QPoly> = Vec::new();
    for j in 0..=deg_bound {
        let mut mono = vec![BigRat::zero(); j + 1];
        mono[j] = BigRat::one();
        cols.push(op.apply_qpoly(&QPoly::from_coeffs(mono)));
    }
    let out_deg = cols.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let rhs_deg = op
        .rhs
        .as_ref()
        .and_then(|f| f.degree())
        .unwrap_or(0)
        .max(out_deg);
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    for i in 0..=rhs_deg {
        let row_rat: Vec<BigRat> = cols.iter().map(|p| p.coeff(i)).collect();
        let mut den = BigInt::one();
        for v in &row_rat {
            den = den.lcm(v.denom());
        }
        let frow = op
            .rhs
            .as_ref()
            .map(|f| f.coeff(&ZRing, i))
            .unwrap_or_else(BigInt::zero);
        rows.push(
            row_rat
                .iter()
                .map(|v| v.numer() * (&den / v.denom()))
                .collect(),
        );
        rhs.push(frow * den);
    }
    let mat = Mat::from_rows(&ZRing, rows);
    if op.rhs.is_some() {
        let sol = linalg::solve_affine(&ZRing, &mat, &rhs);
        let mut out = Vec::new();
        if let Some((nums, den)) = sol.particular {
            let d = BigRat::from_integer(den);
            out.push(QPoly::from_coeffs(
                nums.into_iter()
                    .map(|v| BigRat::from_integer(v) / &d)
                    .collect(),
            ));
        }
        for v in sol.kernel {
            out.push(QPoly::from_coeffs(
                v.into_iter().map(BigRat::from_integer).collect(),
            ));
        }
        out
    } else {
        linalg::kernel(&ZRing, &mat)
            .into_iter()
            .map(|v| QPoly::from_coeffs(v.into_iter().map(BigRat::from_integer).collect()))
            .collect()
    }
}

/// Expand a compact element and check it against the operator (small
/// degrees; tests and verification).
pub fn check_solves(op: &RecOperator, el: &CompactPoly, limit: u64) -> Result<bool> {
    let expanded = el.expand(limit)?;
    let image = op.apply_qpoly(&expanded);
    match &op.rhs {
        None => Ok(image.is_zero()),
        Some(f) => Ok(image == f.to_qpoly()),
    }
}

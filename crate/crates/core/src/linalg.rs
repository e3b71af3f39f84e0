//! Exact linear algebra over a generic coefficient ring: a dense matrix
//! type, fraction-free (Bareiss) echelon form, kernel bases and affine
//! solves. Divisions are the exact ones guaranteed by the Bareiss identity,
//! so everything works unchanged over Z, Z[m] and F_p.

use crate::ring::Ring;

/// Dense row-major matrix over `R`.
#[derive(Clone, Debug)]
pub struct Mat<R: Ring> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for Mat<R> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<R: Ring> Mat<R> {
    pub fn zeros(ring: &R, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &R, n: usize) -> Self {
        let mut m = Mat::zeros(ring, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ring.one();
        }
        m
    }

    pub fn from_rows(ring: &R, rows: Vec<Vec<R::Elem>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        let _ = ring;
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut R::Elem {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, ring: &R, other: &Mat<R>) -> Mat<R> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = ring.mul(a, other.at(k, j));
                    let cur = out.at_mut(i, j);
                    *cur = ring.add(cur, &t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, ring: &R, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ring.zero();
                for j in 0..self.cols {
                    acc = ring.mul_add(&acc, self.at(i, j), &v[j]);
                }
                acc
            })
            .collect()
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R::Elem) -> S::Elem) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn stack(ring: &R, top: &Mat<R>, bottom: &Mat<R>) -> Mat<R> {
        assert_eq!(top.cols, bottom.cols);
        let _ = ring;
        let mut data = top.data.clone();
        data.extend(bottom.data.iter().cloned());
        Mat {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        }
    }
}

/// Result of the fraction-free echelon reduction.
pub struct Echelon<R: Ring> {
    pub mat: Mat<R>,
    /// (row, col) of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

impl<R: Ring> Echelon<R> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Bareiss fraction-free row echelon form. Entries of the result are
/// determinants of minors of the input, so they stay in the ring.
pub fn echelon<R: Ring>(ring: &R, mut m: Mat<R>) -> Echelon<R> {
    let mut pivots = Vec::new();
    let mut prev = ring.one();
    let mut rank = 0usize;
    for col in 0..m.cols {
        if rank >= m.rows {
            break;
        }
        let Some(prow) = (rank..m.rows).find(|&r| !ring.is_zero(m.at(r, col))) else {
            continue;
        };
        if prow != rank {
            for j in 0..m.cols {
                m.data.swap(rank * m.cols + j, prow * m.cols + j);
            }
        }
        let pivot = m.at(rank, col).clone();
        for r in rank + 1..m.rows {
            let head = m.at(r, col).clone();
            for j in 0..m.cols {
                let a = ring.mul(&pivot, m.at(r, j));
                let b = ring.mul(&head, m.at(rank, j));
                let num = ring.sub(&a, &b);
                *m.at_mut(r, j) = ring.exact_div(&num, &prev);
            }
        }
        prev = pivot;
        pivots.push((rank, col));
        rank += 1;
    }
    Echelon { mat: m, pivots }
}

/// Basis of the right kernel, as vectors over the ring (denominators
/// cleared; no content normalization, so entries can be large).
pub fn kernel<R: Ring>(ring: &R, m: &Mat<R>) -> Vec<Vec<R::Elem>> {
    let ech = echelon(ring, m.clone());
    let piv_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut is_pivot = vec![false; m.cols];
    for &c in &piv_cols {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        // Solve the triangular pivot system for x_piv with x_free = 1,
        // all other free variables 0, sharing a single denominator.
        let t = ech.pivots.len();
        let mut nums = vec![ring.zero(); t];
        let mut den = ring.one();
        for i in (0..t).rev() {
            let (prow, _) = ech.pivots[i];
            // rhs_i = -A[prow][free]
            let rhs = ring.neg(ech.mat.at(prow, free));
            let mut s = ring.mul(&rhs, &den);
            for j in i + 1..t {
                let a = ech.mat.at(prow, piv_cols[j]);
                s = ring.sub(&s, &ring.mul(a, &nums[j]));
            }
            let tii = ech.mat.at(prow, piv_cols[i]).clone();
            for num in nums.iter_mut().skip(i + 1) {
                *num = ring.mul(num, &tii);
            }
            nums[i] = s;
            den = ring.mul(&den, &tii);
        }
        let mut v = vec![ring.zero(); m.cols];
        v[free] = den;
        for (j, &c) in piv_cols.iter().enumerate() {
            v[c] = nums[j].clone();
        }
        basis.push(v);
    }
    basis
}

/// Outcome of an exact affine solve `M x = b`.
pub struct AffineSolution<R: Ring> {
    /// Particular solution as (numerators, shared denominator); free
    /// variables are set to zero.
    pub particular: Option<(Vec<R::Elem>, R::Elem)>,
    /// Kernel basis of M (denominators cleared).
    pub kernel: Vec<Vec<R::Elem>>,
}

/// Solve `M x = b` exactly over the fraction field of `R`.
pub fn solve_affine<R: Ring>(ring: &R, m: &Mat<R>, b: &[R::Elem]) -> AffineSolution<R> {
    assert_eq!(m.rows, b.len());
    // augment and eliminate
    let mut aug = Mat::zeros(ring, m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, m.cols) = b[i].clone();
    }
    let ech = echelon(ring, aug);
    let inconsistent = ech.pivots.iter().any(|&(_, c)| c == m.cols);
    let kernel = kernel(ring, m);
    if inconsistent {
        return AffineSolution {
            particular: None,
            kernel,
        };
    }
    let piv_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let t = piv_cols.len();
    let mut nums = vec![ring.zero(); t];
    let mut den = ring.one();
    for i in (0..t).rev() {
        let (prow, _) = ech.pivots[i];
        let rhs = ech.mat.at(prow, m.cols).clone();
        let mut s = ring.mul(&rhs, &den);
        for j in i + 1..t {
            let a = ech.mat.at(prow, piv_cols[j]);
            s = ring.sub(&s, &ring.mul(a, &nums[j]));
        }
        let tii = ech.mat.at(prow, piv_cols[i]).clone();
        for num in nums.iter_mut().skip(i + 1) {
            *num = ring.mul(num, &tii);
        }
        nums[i] = s;
        den = ring.mul(&den, &tii);
    }
    let mut x = vec![ring.zero(); m.cols];
    for (j, &c) in piv_cols.iter().enumerate() {
        x[c] = nums[j].clone();
    }
    AffineSolution {
        particular: Some((x, den)),
        kernel,
    }
}

/// Rank of a matrix over the ring's fraction field.
pub fn rank<R: Ring>(ring: &R, m: &Mat<R>) -> usize {
    echelon(ring, m.clone()).rank()
}

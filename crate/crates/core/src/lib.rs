//! Solvers for linear recurrence equations with integer polynomial
//! coefficients, built around a compact representation of their polynomial
//! and rational solutions.
//!
//! A polynomial solution of degree `N` expanded in the monomial basis takes
//! roughly `N^2 log N` bits. Its coefficients in the binomial basis
//! `{binom(n,k)}` satisfy a small recurrence, so the solution can instead be
//! carried as that recurrence plus a handful of initial conditions and a
//! degree bound: size `O(N log N)`. This crate implements the arithmetic and
//! the solvers that keep everything in that form:
//!
//! - [`poly`], [`ring`]: dense univariate polynomials over a generic
//!   coefficient ring (integers, residues mod p, and integer polynomials for
//!   the bivariate work).
//! - [`recurrence`]: difference operators, the binomial-basis conversion and
//!   the indicial polynomial at infinity.
//! - [`factorial`]: matrix factorials `C(N)...C(r)` by exact binary
//!   splitting and by baby-step/giant-step modular arithmetic, plus selected
//!   sequence terms and Monte-Carlo rank.
//! - [`polysols`]: finite-support and polynomial solutions in compact form.
//! - [`compact_eval`]: evaluation of compact polynomials and their iterated
//!   differences without expansion.
//! - [`gpform`]: the factored Gosper-Petkovsek form and the dispersion set.
//! - [`ratsols`]: rational solutions over the factored denominator bound.
//! - [`summation`]: indefinite (Gosper) and definite (Zeilberger) summation
//!   of hypergeometric terms with compact certificates.
//! - [`json`]: the serialization schemas used by the CLI (all integers as
//!   decimal strings).
//!
//! With the default `parallel` feature the divide-and-conquer product trees
//! split across threads via rayon; the tree shape is fixed, so parallel and
//! sequential runs produce identical results.

pub mod compact_eval;
pub mod error;
pub mod factorial;
pub mod families;
pub mod fp;
pub mod gpform;
pub mod introots;
pub mod json;
pub mod linalg;
pub(crate) mod par;
pub mod poly;
pub mod polysols;
pub mod ratsols;
pub mod recurrence;
pub mod ring;
pub mod summation;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

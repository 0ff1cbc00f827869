//! Exact arithmetic for the Carlitz module over A = F_q[x].
//!
//! The crate is organized bottom-up:
//!
//! - [`algebra`]: finite fields F_{p^m}, dense univariate polynomials over
//!   them, reduced fractions, and enumeration/valuation utilities.
//! - [`mvpoly`]: sparse multivariate polynomials over a pluggable
//!   coefficient ring, used for the interpolation variables t_1..t_s, z, t.
//! - [`carlitz`]: the special quantities attached to the Carlitz module
//!   (brackets [d], factorials D_d, ell_d, b_d(t), E_d(z)), twisted
//!   polynomials, the module action, and base-q digit utilities.
//! - [`interp`]: evaluation-interpolation operators over the finite sets
//!   A(d) and the product/obstruction identities they satisfy.
//! - [`infty`]: finite-precision arithmetic at the infinite place
//!   (truncated Laurent series in u = 1/x, the ramified degree-(q-1)
//!   extension containing iota, Tate-style truncated series), and the
//!   analytic functions pi_bar, omega, carlitz_exp, agf.
//! - [`lseries`]: truncated zeta and Pellarin L-series special values and
//!   the numerical verification of the closed-form identities they satisfy.
//! - [`bcnum`]: Bernoulli-Carlitz numbers, their denominators, recurrences,
//!   tuple norms, and divisibility bounds.
//! - [`report`]: serializable pass/fail reports shared by the verification
//!   entry points and the command-line tool.

pub mod algebra;
pub mod bcnum;
pub mod carlitz;
pub mod error;
pub mod infty;
pub mod interp;
pub mod lseries;
pub mod mvpoly;
pub mod report;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

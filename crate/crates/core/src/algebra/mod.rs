//! Base field and univariate polynomial layer.
//!
//! Everything downstream works over a runtime-chosen finite field F_{p^m}
//! and the polynomial ring A = F_q[x] (the paper-side variable theta is
//! spelled `x` throughout serialized input and output).

pub mod enumerate;
pub mod field;
pub mod fraction;
pub mod poly;

pub use enumerate::{
    enumerate_irreducibles, enumerate_monic, irreducible_count, roots_in_extension, valuation,
    MonicMode,
};
pub use field::{Embedding, Field, Fq};
pub use fraction::Frac;
pub use poly::Poly;

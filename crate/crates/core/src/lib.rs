//! Arithmetic of the trinomial discriminant values `n^n ± (n-m)^(n-m) m^m`.

pub mod error;
pub mod modarith;
pub mod correspondence;
pub mod roots;
pub mod trinomials;
pub mod density;
pub mod cache;
pub mod scan;

pub use correspondence::Sign;
pub use error::{Error, Result};

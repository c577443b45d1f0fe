//! Exact algebra over twisted polynomial, Laurent, power-series and Novikov
//! rings `A_ρ[z]`, `A_ρ[z,z⁻¹]`, `A_ρ[[z]]`, `A_ρ((z))`, with the splitting
//! maps of their Whitehead groups computed on explicit representatives.

pub mod ring;
pub mod series;
pub mod matrix;
pub mod error;
pub mod nil;
pub mod decompose;
pub mod random;
pub mod witt;

pub use error::{Error, Result};

//! Exact-arithmetic toolkit for quadratic lattices and their orbit geometry.
//!
//! Everything here computes with exact integers and rationals; floating point
//! appears only in regression fits and report rendering. The main pieces:
//!
//! - [`lattice`]: integral quadratic lattices, primitivity, the scale-invariant
//!   value of a rational vector and its square-free/square decomposition,
//!   exact congruence diagonalization and signatures.
//! - [`siegel`]: the isotropic coordinate system for `SO(r,s)`, Lie-algebra and
//!   parabolic membership, torus and Siegel-region inequalities, and the
//!   quadric projection that drops one coordinate and stays injective.
//! - [`enumerate`]: rational points of bounded denominator on indefinite
//!   quadrics inside boxes or Siegel regions, with a naive-grid oracle and
//!   log-log slope fits.
//! - [`density`]: p-adic local densities of diagonal quadratic forms, both in
//!   closed form and by exact solution counting modulo p^e, plus the
//!   Euler-product lower bound machinery.
//! - [`exponents`]: closed-form growth-exponent calculators with full
//!   derivations.
//! - [`splitting`]: symplectic lattices, rational idempotents, denominators,
//!   and the index identity for the split lattice.
//! - [`acceptance`]: the cross-validation suite tying all of the above
//!   together, runnable from tests or the CLI.

pub mod acceptance;
pub mod arith;
pub mod density;
pub mod enumerate;
pub mod error;
pub mod exponents;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod siegel;
pub mod splitting;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

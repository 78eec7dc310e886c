//! Metric Mahler measures of the rationals `α_n = p^{h_n} / q^{h_{n-1}}`, where
//! `h_i` is the Fibonacci sequence with `h_0 = 0`, `h_1 = 1`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: Fibonacci tables, exact power comparison, 64-bit primality and
//!   the multi-precision [`Real`] scalar.
//! * [`lattice`]: the vector families `V_n ⊇ C_n ⊇ R_n ⊇ S_n`, the shift map,
//!   factorizations and the exact vertex test.
//! * [`measure`]: Mahler measures `c_i` of the building blocks and the measure
//!   functions `f_x(t)`.
//! * [`solver`]: the breakpoints `t_n(p, q)` and `s_n`, compatibility of prime
//!   pairs, and the prime-pair search.
//! * [`verify`]: the piecewise minimum envelope over `S_n`, certificates for the
//!   inequality `f_z ≥ min_{S_n} f_x`, exceptional points and plot tables.
//!
//! Everything here is pure and allocation-only; file formats, caching and
//! threading live in the `fibmahler` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
mod error;
pub mod lattice;
pub mod measure;
pub mod solver;
pub mod verify;

pub use arith::{cmp_power, golden_ratio, is_prime, BigNat, Ctx, FibTable, Real};
pub use error::{Error, Result};
pub use lattice::{ExponentVector, FamilyKind, FibSystem, SetFamily};
pub use measure::{CoefficientVector, PrimePair};
pub use solver::{Breakpoint, CompatibilityReport};

/// Working precision used when a caller does not ask for one.
pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Relative tolerance for solved breakpoints.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

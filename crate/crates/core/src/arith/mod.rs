//! Exact integer arithmetic and the multi-precision real scalar.

mod fib;
mod power;
mod prime;
mod real;

pub use fib::{fib_u64, FibTable};
pub use power::cmp_power;
pub use prime::{is_prime, next_prime_above, prev_prime_below};
pub use real::{golden_ratio, Ctx, Real};

/// Arbitrary-precision non-negative integer.
pub type BigNat = num_bigint::BigUint;

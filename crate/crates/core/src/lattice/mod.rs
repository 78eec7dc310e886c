//! The vector families `V_n ⊇ C_n ⊇ R_n ⊇ S_n` of the Fibonacci system
//! `A·x = (h_n, h_{n-1})` and the combinatorics built on them.

mod enumerate;
mod factor;
mod family;
mod restricted;
mod vector;
mod vertex;

use alloc::vec::Vec;

pub use enumerate::Branch;
pub use factor::{enumerate_factorizations, for_each_factorization, Factorization};
pub use family::{FamilyKind, SetFamily};
pub use restricted::{delta, enumerate_r, is_s_restricted_by_definition, r_tower};
pub use vector::ExponentVector;
pub use vertex::{check_witness, hull_witness, vertex_filter, VertexReport, Witness};

use crate::arith::fib_u64;
use crate::{Error, Result};

/// Largest supported ambient dimension (`h_{N+1}` must fit a `u64`).
pub const MAX_DIM: usize = 90;

/// The `2 × N` matrix `A` with rows `(h_1..h_N)` and `(h_0..h_{N-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibSystem {
    dim: usize,
    h: Vec<u64>,
}

impl FibSystem {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::domain(alloc::format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        let h = (0..=dim + 1).map(|i| fib_u64(i).unwrap_or(0)).collect();
        Ok(Self { dim, h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `h_i` for `0 ≤ i ≤ N+1`.
    pub fn h(&self, i: usize) -> u64 {
        self.h[i]
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.dim {
            return Err(Error::domain(alloc::format!("level {n} outside 1..={}", self.dim)));
        }
        Ok(())
    }

    /// `A·x` as exact integers.
    pub fn apply(&self, entries: &[u32]) -> (u128, u128) {
        let mut top = 0u128;
        let mut bottom = 0u128;
        for (k, &e) in entries.iter().enumerate() {
            let i = k + 1;
            let h_i = self.h.get(i).copied().unwrap_or(u64::MAX);
            top += u128::from(e) * u128::from(h_i);
            bottom += u128::from(e) * u128::from(self.h[i - 1]);
        }
        (top, bottom)
    }

    /// The `n` with `A·x = (h_n, h_{n-1})`, if any.
    pub fn level_of(&self, entries: &[u32]) -> Option<usize> {
        if entries.len() > self.dim {
            return None;
        }
        let (top, bottom) = self.apply(entries);
        (1..=self.dim).find(|&n| top == u128::from(self.h[n]) && bottom == u128::from(self.h[n - 1]))
    }

    /// True when `x` has this dimension and solves the system at its level.
    pub fn check(&self, x: &ExponentVector) -> bool {
        x.dim() == self.dim && self.level_of(x.entries()) == Some(x.level())
    }

    /// Generator `x_n(i)`: `h_{n+1-i}` in slot `i-2`, `h_{n+2-i}` in slot `i-1`.
    pub fn x_vector(&self, n: usize, i: usize) -> Result<ExponentVector> {
        self.check_level(n)?;
        if n == 1 && i == 2 {
            return ExponentVector::unit(1, self.dim);
        }
        if i < 3 || i > n + 1 {
            return Err(Error::domain(alloc::format!("x_{n}({i}) needs 3 ≤ i ≤ {}", n + 1)));
        }
        let mut entries = alloc::vec![0u32; self.dim];
        entries[i - 3] = self.h[n + 1 - i] as u32;
        entries[i - 2] = self.h[n + 2 - i] as u32;
        Ok(ExponentVector::new(entries, n))
    }

    /// `S_n` as the generator list `[x_n(3), …, x_n(n+1)]` (`[x_1(2)]` for `n = 1`).
    pub fn s_generators(&self, n: usize) -> Result<Vec<ExponentVector>> {
        if n == 1 {
            return Ok(alloc::vec![self.x_vector(1, 2)?]);
        }
        (3..=n + 1).map(|i| self.x_vector(n, i)).collect()
    }

    /// Index `i` with `x == x_n(i)`, when `x ∈ S_n`.
    pub fn s_index(&self, x: &ExponentVector) -> Option<usize> {
        let n = x.level();
        if n == 1 {
            return (x.trimmed() == [1]).then_some(2);
        }
        let t = x.trimmed();
        (3..=n + 1).find(|&i| {
            let top = i - 1;
            t.len() == top
                && u64::from(t[top - 1]) == self.h[n + 2 - i]
                && u64::from(t[top - 2]) == self.h[n + 1 - i]
                && t[..top - 2].iter().all(|&e| e == 0)
        })
    }
}

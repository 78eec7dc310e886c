use alloc::vec::Vec;

use crate::arith::{Ctx, Real};
use crate::lattice::{ExponentVector, FibSystem};
use crate::measure::{CoefficientVector, PowerTable};
use crate::solver::{Breakpoint, CompatibilityReport};
use crate::{Error, Result};

/// `min_{x ∈ S_n} f_x(t)` as a piecewise function:
/// generator `n+1` on `(0, t_n]`, generator `i` on `[t_i, t_{i-1}]`, and
/// generator `3` on `[t_3, ∞)`.
#[derive(Debug, Clone)]
pub struct Envelope {
    n: usize,
    /// `x_n(3), …, x_n(n+1)`; `[x_1(2)]` when `n = 1`.
    generators: Vec<ExponentVector>,
    /// `t_3, …, t_n`, strictly decreasing.
    breakpoints: Vec<Breakpoint>,
}

impl Envelope {
    /// Requires a compatibility report with a positive verdict for the ambient `N`.
    pub fn from_report(sys: &FibSystem, n: usize, report: &CompatibilityReport) -> Result<Self> {
        if !report.verdict {
            return Err(Error::Incompatible {
                p: report.p,
                q: report.q,
                dim: report.dim,
            });
        }
        if n > report.dim {
            return Err(Error::domain(alloc::format!("n = {n} exceeds N = {}", report.dim)));
        }
        let generators = sys.s_generators(n)?;
        let breakpoints = if n >= 3 { report.breakpoints[..n - 2].to_vec() } else { Vec::new() };
        Ok(Self {
            n,
            generators,
            breakpoints,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    /// `x_n(i)`.
    pub fn generator(&self, i: usize) -> &ExponentVector {
        if self.n == 1 {
            return &self.generators[0];
        }
        &self.generators[i - 3]
    }

    /// Generator indices in the order of [`generators`](Self::generators).
    pub fn indices(&self) -> core::ops::RangeInclusive<usize> {
        if self.n == 1 {
            2..=2
        } else {
            3..=self.n + 1
        }
    }

    /// `t_3, …, t_n`.
    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    /// `t_i` for `3 ≤ i ≤ n`.
    pub fn t(&self, i: usize) -> &Real {
        &self.breakpoints[i - 3].value
    }

    /// Generator index of the segment containing `t`.
    pub fn segment(&self, t: &Real) -> usize {
        if self.n == 1 {
            return 2;
        }
        if self.n == 2 {
            return 3;
        }
        if t <= self.t(self.n) {
            return self.n + 1;
        }
        // t_i ≤ t < t_{i-1}
        for i in (4..=self.n).rev() {
            if t < self.t(i - 1) {
                return i;
            }
        }
        3
    }

    /// `f^t` of the segment generator.
    pub fn pow_at(&self, table: &PowerTable) -> Real {
        let i = self.segment(table.t());
        table.pow_sum(self.generator(i))
    }

    pub fn value(&self, cv: &CoefficientVector, t: &Real, ctx: &mut Ctx) -> Result<Real> {
        let table = cv.powers(t, ctx)?;
        let s = self.pow_at(&table);
        Ok(table.root(&s, ctx))
    }

    /// Minimum of `f_x^t` over all generators: `(index, value, runner-up)`.
    pub fn brute_min(&self, table: &PowerTable) -> (usize, Real, Option<Real>) {
        let mut best: Option<(usize, Real)> = None;
        let mut second: Option<Real> = None;
        for (i, x) in self.indices().zip(&self.generators) {
            let v = table.pow_sum(x);
            match &best {
                Some((_, b)) if v >= *b => {
                    if second.as_ref().is_none_or(|s| v < *s) {
                        second = Some(v);
                    }
                }
                _ => {
                    if let Some((_, b)) = best.take() {
                        second = Some(b);
                    }
                    best = Some((i, v));
                }
            }
        }
        let (i, v) = best.expect("S_n is never empty");
        (i, v, second)
    }

    /// Index of the unique minimiser, or `None` on a tie at working precision.
    pub fn unique_argmin(&self, table: &PowerTable) -> Option<usize> {
        let (i, v, second) = self.brute_min(table);
        match second {
            Some(s) if s <= v => None,
            _ => Some(i),
        }
    }
}

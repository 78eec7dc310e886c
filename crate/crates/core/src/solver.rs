//! Breakpoints `t_n(p, q)` and `s_n`, compatibility of prime pairs, and the
//! search for pairs with `log q / log p` near the golden ratio.

use core::cmp::Ordering;

use alloc::format;
use alloc::vec::Vec;

use crate::arith::{cmp_power, fib_u64, golden_ratio, next_prime_above, prev_prime_below, BigNat, Ctx, Real};
use crate::measure::{Branch, CoefficientVector, PrimePair};
use crate::{Error, Result};

/// Doubling stops at `2^DOUBLING_LIMIT` without a sign change.
pub const DOUBLING_LIMIT: u32 = 20;

/// Primes tried on each side of `p^φ` by the search.
pub const SEARCH_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakpointKind {
    TPoint,
    SPoint,
}

/// A root of `(a/c)^t + (b/c)^t = 1` with a bracket `[lo, hi]` across which the
/// residual changes sign.
#[derive(Debug, Clone)]
pub struct Breakpoint {
    pub index: usize,
    pub kind: BreakpointKind,
    pub value: Real,
    pub lo: Real,
    pub hi: Real,
    /// Set when the three measures sit on one branch, forcing `t = 1` exactly.
    pub exact: bool,
}

impl Breakpoint {
    fn exact_one(index: usize, kind: BreakpointKind, prec: usize) -> Self {
        let one = Real::one(prec);
        Breakpoint {
            index,
            kind,
            value: one.clone(),
            lo: one.clone(),
            hi: one,
            exact: true,
        }
    }

    /// Certified order against another breakpoint, `None` when the brackets overlap.
    pub fn certified_cmp(&self, other: &Breakpoint) -> Option<Ordering> {
        if self.exact && other.exact {
            return Some(self.value.total_cmp(&other.value));
        }
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// `g(t) = e^{t·u} + e^{t·v} - 1` with `u, v < 0` the log-ratios.
fn residual(u: &Real, v: &Real, t: &Real, ctx: &mut Ctx) -> Real {
    let a = ctx.exp(&(u * t));
    let b = ctx.exp(&(v * t));
    &(&a + &b) - &Real::one(ctx.precision())
}

fn bisect(u: &Real, v: &Real, index: usize, kind: BreakpointKind, tol: f64, ctx: &mut Ctx) -> Result<Breakpoint> {
    let prec = ctx.precision();
    let floor = f64::from_bits(((1023 - prec as i64 + 8).max(1) as u64) << 52);
    let tol = ctx.from_f64(tol.max(floor));
    let mut lo = ctx.from_u64(1);
    let g1 = residual(u, v, &lo, ctx);
    if g1.is_zero() {
        return Ok(Breakpoint::exact_one(index, kind, prec));
    }
    if g1.is_negative() {
        return Err(Error::domain(format!("residual for index {index} is negative at t = 1")));
    }
    let mut hi = ctx.from_u64(2);
    let mut k = 1;
    while !residual(u, v, &hi, ctx).is_negative() {
        if k >= DOUBLING_LIMIT {
            return Err(Error::Divergence {
                n: index,
                limit_log2: DOUBLING_LIMIT,
            });
        }
        lo = hi.clone();
        hi = hi.mul_u64(2);
        k += 1;
    }
    for _ in 0..prec + 64 {
        if &hi - &lo <= &lo * &tol {
            break;
        }
        let mid = lo.midpoint(&hi);
        let g = residual(u, v, &mid, ctx);
        if g.is_negative() {
            hi = mid;
        } else if g.is_positive() {
            lo = mid;
        } else {
            lo = mid.clone();
            hi = mid;
            break;
        }
    }
    Ok(Breakpoint {
        index,
        kind,
        value: lo.midpoint(&hi),
        lo,
        hi,
        exact: false,
    })
}

/// `t_n(p, q)`: the unique `t ≥ 1` with `c_n^t = c_{n-1}^t + c_{n-2}^t`.
///
/// Bisection on `[1, 2^k]`, doubling `k` until the residual turns negative;
/// the bracket is narrowed to relative width `tol`.
pub fn solve_tn(cv: &CoefficientVector, n: usize, tol: f64, ctx: &mut Ctx) -> Result<Breakpoint> {
    if n < 3 {
        return Err(Error::domain(format!("t_{n} needs n ≥ 3")));
    }
    cv.coefficient(n)?;
    let (b0, b1, b2) = (cv.branch(n), cv.branch(n - 1), cv.branch(n - 2));
    if b0 == b1 && b1 == b2 && matches!(b0, Branch::PTerm | Branch::QTerm) {
        // same branch: c_n = c_{n-1} + c_{n-2} by the Fibonacci recurrence
        return Ok(Breakpoint::exact_one(n, BreakpointKind::TPoint, ctx.precision()));
    }
    let u = cv.ln_c(n - 1) - cv.ln_c(n);
    let v = cv.ln_c(n - 2) - cv.ln_c(n);
    bisect(&u, &v, n, BreakpointKind::TPoint, tol, ctx)
}

/// `max{h_k, φ h_{k-1}}`: `h_k` wins exactly when `k` is odd.
fn golden_weight(k: usize, phi: &Real, ctx: &Ctx) -> Result<Real> {
    let h = |i: usize| fib_u64(i).ok_or(Error::OutOfRange { index: i, max: 93 });
    Ok(if k % 2 == 1 { ctx.from_u64(h(k)?) } else { phi.mul_u64(h(k - 1)?) })
}

/// `s_n`: the breakpoint of the golden-ratio idealisation
/// `max{h_n, φh_{n-1}}^s = max{h_{n-1}, φh_{n-2}}^s + max{h_{n-2}, φh_{n-3}}^s`.
pub fn solve_sn(n: usize, tol: f64, ctx: &mut Ctx) -> Result<Breakpoint> {
    if n < 3 {
        return Err(Error::domain(format!("s_{n} needs n ≥ 3")));
    }
    let phi = golden_ratio(ctx.precision().max(96))?.with_precision(ctx.precision());
    let d0 = golden_weight(n, &phi, ctx)?;
    let d1 = golden_weight(n - 1, &phi, ctx)?;
    let d2 = golden_weight(n - 2, &phi, ctx)?;
    let l0 = ctx.ln(&d0);
    let u = &ctx.ln(&d1) - &l0;
    let v = &ctx.ln(&d2) - &l0;
    bisect(&u, &v, n, BreakpointKind::SPoint, tol, ctx)
}

/// The inequality chain `h_N/h_{N-1} < log q/log p < h_{N-1}/h_{N-2}` (or
/// reversed), decided with exact powers.
pub fn weak_compatible(pair: &PrimePair, dim: usize) -> Result<bool> {
    if dim < 3 {
        return Err(Error::domain("weak compatibility needs N ≥ 3"));
    }
    let h = |i: usize| fib_u64(i).map(BigNat::from).ok_or(Error::OutOfRange { index: i, max: 93 });
    // ratio > h_N/h_{N-1}  ⇔  p^{h_N} < q^{h_{N-1}}
    let upper = cmp_power(pair.p(), &h(dim)?, pair.q(), &h(dim - 1)?);
    let lower = cmp_power(pair.p(), &h(dim - 1)?, pair.q(), &h(dim - 2)?);
    Ok(matches!(
        (upper, lower),
        (Ordering::Less, Ordering::Greater) | (Ordering::Greater, Ordering::Less)
    ))
}

#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub p: u64,
    pub q: u64,
    pub dim: usize,
    pub weak_ok: bool,
    /// `t_3, …, t_{N+1}`; empty when the weak chain already fails.
    pub breakpoints: Vec<Breakpoint>,
    pub strictly_decreasing: bool,
    pub verdict: bool,
}

/// Lazily solved `t_n` for one pair, refined on demand when neighbours overlap.
pub struct BreakpointSet<'a> {
    cv: &'a CoefficientVector,
    tol: f64,
    points: Vec<Breakpoint>,
}

impl<'a> BreakpointSet<'a> {
    pub fn new(cv: &'a CoefficientVector, tol: f64) -> Self {
        Self {
            cv,
            tol,
            points: Vec::new(),
        }
    }

    /// `t_n`, solving `t_3 … t_n` as needed.
    pub fn get(&mut self, n: usize, ctx: &mut Ctx) -> Result<&Breakpoint> {
        while self.points.len() + 3 <= n {
            let k = self.points.len() + 3;
            self.points.push(solve_tn(self.cv, k, self.tol, ctx)?);
        }
        Ok(&self.points[n - 3])
    }

    /// Certified `t_{n+1} < t_n`; one refinement at `tol/4` before giving up.
    pub fn decreasing_at(&mut self, n: usize, ctx: &mut Ctx) -> Result<bool> {
        self.get(n + 1, ctx)?;
        let ord = self.points[n - 2].certified_cmp(&self.points[n - 3]);
        let ord = match ord {
            Some(o) => o,
            None => {
                let fine = self.tol / 4.0;
                let a = solve_tn(self.cv, n + 1, fine, ctx)?;
                let b = solve_tn(self.cv, n, fine, ctx)?;
                let o = a.certified_cmp(&b).ok_or(Error::Precision { upper: n + 1, lower: n })?;
                self.points[n - 2] = a;
                self.points[n - 3] = b;
                o
            }
        };
        Ok(ord == Ordering::Less)
    }

    pub fn solved(&self) -> &[Breakpoint] {
        &self.points
    }
}

fn compatible_in(pair: &PrimePair, dim: usize, set: &mut BreakpointSet<'_>, ctx: &mut Ctx) -> Result<CompatibilityReport> {
    let weak_ok = weak_compatible(pair, dim)?;
    let mut report = CompatibilityReport {
        p: pair.p(),
        q: pair.q(),
        dim,
        weak_ok,
        breakpoints: Vec::new(),
        strictly_decreasing: false,
        verdict: false,
    };
    if !weak_ok {
        return Ok(report);
    }
    let mut decreasing = true;
    for n in 3..=dim {
        if !set.decreasing_at(n, ctx)? {
            decreasing = false;
            break;
        }
    }
    set.get(dim + 1, ctx)?;
    report.breakpoints = set.solved()[..dim - 1].to_vec();
    report.strictly_decreasing = decreasing;
    report.verdict = decreasing;
    Ok(report)
}

/// Weak chain plus certified `t_{N+1} < t_N < … < t_3`.
pub fn compatible(pair: &PrimePair, dim: usize, tol: f64, ctx: &mut Ctx) -> Result<CompatibilityReport> {
    if dim < 3 {
        return Err(Error::domain("compatibility needs N ≥ 3"));
    }
    let cv = CoefficientVector::new(pair, dim, ctx)?;
    let mut set = BreakpointSet::new(&cv, tol);
    compatible_in(pair, dim, &mut set, ctx)
}

/// Largest `N ≤ cap` with `compatible(pair, N)`, or 0.
pub fn max_compatible_n(pair: &PrimePair, cap: usize, tol: f64, ctx: &mut Ctx) -> Result<usize> {
    if cap < 3 {
        return Err(Error::domain("cap must be at least 3"));
    }
    let cv = CoefficientVector::new(pair, cap, ctx)?;
    let mut set = BreakpointSet::new(&cv, tol);
    for dim in (3..=cap).rev() {
        if compatible_in(pair, dim, &mut set, ctx)?.verdict {
            return Ok(dim);
        }
    }
    Ok(0)
}

/// Largest `N ≤ cap` with `t_{N+1} < … < t_3`, ignoring the weak chain.
pub fn max_ordered_n(pair: &PrimePair, cap: usize, tol: f64, ctx: &mut Ctx) -> Result<usize> {
    let cv = CoefficientVector::new(pair, cap.max(3), ctx)?;
    let mut set = BreakpointSet::new(&cv, tol);
    let mut best = 0;
    for n in 3..=cap {
        if !set.decreasing_at(n, ctx)? {
            break;
        }
        best = n;
    }
    Ok(best)
}

/// A compatible pair found by the search.
#[derive(Debug, Clone)]
pub struct SearchHit {
    pub pair: PrimePair,
    /// `|log q / log p - φ|`.
    pub offset: Real,
}

/// `q` candidates for one `p`: the primes nearest `p^φ`, [`SEARCH_WINDOW`] on each side.
pub fn q_candidates(p: u64, ctx: &mut Ctx) -> Result<Vec<u64>> {
    let phi = golden_ratio(ctx.precision().max(96))?.with_precision(ctx.precision());
    let target = ctx.powf(&ctx.from_u64(p), &phi).to_f64();
    if target.is_nan() || target >= 9.0e18 {
        return Ok(Vec::new());
    }
    let centre = libm_round(target);
    let mut out = Vec::with_capacity(2 * SEARCH_WINDOW);
    let mut below = centre + 1;
    for _ in 0..SEARCH_WINDOW {
        match prev_prime_below(below) {
            Some(q) => {
                out.push(q);
                below = q;
            }
            None => break,
        }
    }
    let mut above = centre;
    for _ in 0..SEARCH_WINDOW {
        match next_prime_above(above) {
            Some(q) => {
                out.push(q);
                above = q;
            }
            None => break,
        }
    }
    out.sort_unstable();
    out.dedup();
    out.retain(|&q| q != p);
    Ok(out)
}

fn libm_round(x: f64) -> u64 {
    (x + 0.5) as u64
}

/// Compatible pairs `(p, q)` for a single `p`.
pub fn search_one(p: u64, dim: usize, tol: f64, ctx: &mut Ctx) -> Result<Vec<SearchHit>> {
    let phi = golden_ratio(ctx.precision().max(96))?.with_precision(ctx.precision());
    let mut hits = Vec::new();
    for q in q_candidates(p, ctx)? {
        let pair = PrimePair::new(p, q, ctx)?;
        let verdict = match compatible(&pair, dim, tol, ctx) {
            Ok(r) => r.verdict,
            Err(Error::Precision { .. }) | Err(Error::Divergence { .. }) => false,
            Err(e) => return Err(e),
        };
        if verdict {
            let offset = (pair.ratio() - &phi).abs();
            hits.push(SearchHit { pair, offset });
        }
    }
    Ok(hits)
}

/// Orders hits by offset (then `p`, `q`) and keeps the first `max_results`.
pub fn rank_hits(mut hits: Vec<SearchHit>, max_results: usize) -> Vec<SearchHit> {
    hits.sort_by(|a, b| {
        a.offset
            .total_cmp(&b.offset)
            .then(a.pair.p().cmp(&b.pair.p()))
            .then(a.pair.q().cmp(&b.pair.q()))
    });
    hits.truncate(max_results);
    hits
}

/// Every prime `p` in `[p_min, p_max]` paired with the primes nearest `p^φ`,
/// keeping the compatible ones.
pub fn find_compatible_pairs(dim: usize, p_min: u64, p_max: u64, max_results: usize, tol: f64, ctx: &mut Ctx) -> Result<Vec<SearchHit>> {
    check_search_range(p_min, p_max)?;
    let mut hits = Vec::new();
    let mut p = p_min.saturating_sub(1);
    while let Some(next) = next_prime_above(p) {
        if next > p_max {
            break;
        }
        hits.extend(search_one(next, dim, tol, ctx)?);
        p = next;
    }
    Ok(rank_hits(hits, max_results))
}

pub fn check_search_range(p_min: u64, p_max: u64) -> Result<()> {
    if p_min < 2 || p_min > p_max || p_max >= 1 << 40 {
        return Err(Error::domain(format!(
            "search range [{p_min}, {p_max}] must satisfy 2 ≤ p_min ≤ p_max < 2^40"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(128).unwrap()
    }

    #[test]
    fn synthetic_closed_form() {
        // c_{n-1} = c_{n-2} = c_n · 2^{-1/t0}  ⇒  root t0
        let mut c = ctx();
        for t0 in [1.5f64, 2.0, 3.25, 7.0] {
            let u = c.from_f64(-core::f64::consts::LN_2 / t0);
            let bp = bisect(&u, &u, 3, BreakpointKind::TPoint, 1e-14, &mut c).unwrap();
            assert!((bp.value.to_f64() - t0).abs() < 1e-12 * t0, "{t0}");
            assert!(bp.lo <= bp.value && bp.value <= bp.hi);
        }
    }

    #[test]
    fn divergence_when_no_root() {
        let mut c = ctx();
        let u = c.from_f64(-1e-9);
        let v = c.from_f64(-1e-9);
        assert!(matches!(
            bisect(&u, &v, 5, BreakpointKind::TPoint, 1e-12, &mut c),
            Err(Error::Divergence { n: 5, .. })
        ));
    }

    #[test]
    fn t3_dense_scan() {
        let mut c = ctx();
        let pair = PrimePair::new(1879, 198_301, &mut c).unwrap();
        let cv = CoefficientVector::new(&pair, 13, &mut c).unwrap();
        let t3 = solve_tn(&cv, 3, 1e-12, &mut c).unwrap();
        let (a, b, cc) = (cv.c(2).to_f64(), cv.c(1).to_f64(), cv.c(3).to_f64());
        let g = |t: f64| (a / cc).powf(t) + (b / cc).powf(t) - 1.0;
        let mut root = f64::NAN;
        let step = 63.0 / 10_000.0;
        for k in 0..10_000 {
            let (x0, x1) = (1.0 + k as f64 * step, 1.0 + (k + 1) as f64 * step);
            if g(x0) > 0.0 && g(x1) <= 0.0 {
                let (mut lo, mut hi) = (x0, x1);
                for _ in 0..80 {
                    let m = 0.5 * (lo + hi);
                    if g(m) > 0.0 {
                        lo = m
                    } else {
                        hi = m
                    }
                }
                root = lo;
            }
        }
        assert!((t3.value.to_f64() - root).abs() < 1e-9);
        assert!((t3.value.to_f64() - 1.714_617_242_05).abs() < 1e-10);
    }

    #[test]
    fn s3_value_and_decrease() {
        let mut c = ctx();
        let s3 = solve_sn(3, 1e-14, &mut c).unwrap();
        assert!((s3.value.to_f64() - 1.714_617_180_911_212_8).abs() < 1e-12);
        let s4 = solve_sn(4, 1e-14, &mut c).unwrap();
        assert!(s4.value < s3.value);
    }

    #[test]
    fn weak_chain_examples() {
        let mut c = ctx();
        let small = PrimePair::new(2, 3, &mut c).unwrap();
        assert!(weak_compatible(&small, 3).unwrap());
        let pair = PrimePair::new(1879, 198_301, &mut c).unwrap();
        assert!(weak_compatible(&pair, 13).unwrap());
        assert!(weak_compatible(&pair, 20).unwrap());
        assert!(!weak_compatible(&pair, 21).unwrap());
        let swapped = PrimePair::new(198_301, 1879, &mut c).unwrap();
        assert!(!weak_compatible(&swapped, 13).unwrap());
    }

    #[test]
    fn short_circuit_without_solving() {
        let mut c = ctx();
        let swapped = PrimePair::new(198_301, 1879, &mut c).unwrap();
        let r = compatible(&swapped, 13, 1e-12, &mut c).unwrap();
        assert!(!r.weak_ok && !r.verdict && r.breakpoints.is_empty());
    }

    #[test]
    fn default_pair_ordering() {
        let mut c = ctx();
        let pair = PrimePair::new(1879, 198_301, &mut c).unwrap();
        let r = compatible(&pair, 13, 1e-12, &mut c).unwrap();
        assert!(r.verdict);
        assert_eq!(r.breakpoints.len(), 12);
        assert!(r.breakpoints.iter().all(|b| b.value >= Real::one(128)));
        assert!(!compatible(&pair, 22, 1e-12, &mut c).unwrap().verdict);
        // t_22 = t_23 = 1 on a single branch, so ordering alone stops at 21
        assert_eq!(max_ordered_n(&pair, 30, 1e-12, &mut c).unwrap(), 21);
        let m = max_compatible_n(&pair, 30, 1e-12, &mut c).unwrap();
        for dim in 3..=m {
            assert!(compatible(&pair, dim, 1e-12, &mut c).unwrap().verdict, "N = {dim}");
        }
    }

    #[test]
    fn q_window_brackets_golden_power() {
        let mut c = ctx();
        let qs = q_candidates(1879, &mut c).unwrap();
        assert_eq!(qs.len(), 2 * SEARCH_WINDOW);
        assert!(qs.contains(&198_301));
        assert!(check_search_range(1, 10).is_err());
        assert!(check_search_range(10, 5).is_err());
    }
}

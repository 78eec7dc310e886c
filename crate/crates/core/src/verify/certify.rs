//! Certificates for `f_z(t) ≥ min_{x ∈ S_n} f_x(t)` on all of `(0, ∞)`.
//!
//! The half-line splits into three pieces:
//!
//! * head `(0, ε]`: `f_z(t) ≥ (Σz)^{1/t} · min c_i ≥ c_n`, and the envelope
//!   never exceeds `c_n` (the trivial generator is constant);
//! * tail `[T, ∞)`: `f_z ≥ max{c_i : z_i > 0}`, which the generator `x_n(3)`
//!   drops below at `T`;
//! * `[ε, T]`: both sides are non-increasing in `t`, so on `[a, b]` it is
//!   enough that `f_z(b) ≥ env(a)`. Intervals failing that test are bisected.
//!
//! Comparisons are made on `t`-th powers: `f_z(b) ≥ env(a)` is
//! `Σ z_i c_i^b ≥ env(a)^b`, so each target costs no transcendental calls
//! once the shared grid is built.

use alloc::vec::Vec;

use crate::arith::{Ctx, Real};
use crate::lattice::ExponentVector;
use crate::measure::{CoefficientVector, PowerTable};
use crate::solver::DOUBLING_LIMIT;
use crate::{Error, Result};

use super::Envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Certified,
    Violated,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Log-spaced points per level.
    pub points: usize,
    /// Bisection depth allowed for a failing interval.
    pub max_depth: u32,
    /// Right end of the grid when no tail cutoff exists.
    pub fallback_tail: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: 4096,
            max_depth: 24,
            fallback_tail: 512.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationCertificate {
    pub target: ExponentVector,
    pub n: usize,
    pub status: Status,
    /// `ε`: the head bound covers `(0, ε]`.
    pub head_cutoff: Real,
    /// `T`: the tail bound covers `[T, ∞)`; `None` when no such `T` exists.
    pub tail_cutoff: Option<Real>,
    /// Grid points inside `[ε, T]`.
    pub grid_size: usize,
    /// Smallest `(f_z - env) / env` seen on the grid (`0` for generators).
    pub min_margin: f64,
    /// `t` with `f_z(t) < env(t)`, when violated.
    pub witness: Option<Real>,
    /// Extra evaluations spent bisecting intervals.
    pub refinements: usize,
}

struct Node {
    table: PowerTable,
    env_pow: Real,
    /// `ln env(t) = ln(env^t) / t`.
    env_ln: Real,
}

impl Node {
    fn new(env: &Envelope, cv: &CoefficientVector, t: &Real, ctx: &mut Ctx) -> Result<Self> {
        let table = cv.powers(t, ctx)?;
        let env_pow = env.pow_at(&table);
        let env_ln = &ctx.ln(&env_pow) / t;
        Ok(Self { table, env_pow, env_ln })
    }

    fn t(&self) -> &Real {
        self.table.t()
    }

    /// `env(self.t)^b`.
    fn env_pow_at(&self, b: &Real, ctx: &mut Ctx) -> Real {
        ctx.exp(&(&self.env_ln * b))
    }
}

/// Envelope data on a log-spaced grid, shared by every target at one level.
pub struct LevelGrid<'a> {
    env: &'a Envelope,
    cv: &'a CoefficientVector,
    nodes: Vec<Node>,
    /// `env(t_k)^{t_{k+1}}` for consecutive nodes.
    bounds: Vec<Real>,
    max_depth: u32,
}

impl<'a> LevelGrid<'a> {
    /// `points` log-spaced nodes on `[lo, hi]`.
    pub fn new(env: &'a Envelope, cv: &'a CoefficientVector, lo: &Real, hi: &Real, cfg: &GridConfig, ctx: &mut Ctx) -> Result<Self> {
        if !lo.is_positive() || hi < lo || cfg.points < 2 {
            return Err(Error::domain("grid needs 0 < lo ≤ hi and at least 2 points"));
        }
        let (llo, lhi) = (ctx.ln(lo), ctx.ln(hi));
        let step = (&lhi - &llo).div_u64(cfg.points as u64 - 1);
        let mut nodes = Vec::with_capacity(cfg.points);
        for k in 0..cfg.points {
            let t = if k == 0 {
                lo.clone()
            } else if k + 1 == cfg.points {
                hi.clone()
            } else {
                ctx.exp(&(&llo + &step.mul_u64(k as u64)))
            };
            nodes.push(Node::new(env, cv, &t, ctx)?);
        }
        let bounds = nodes.windows(2).map(|w| w[0].env_pow_at(w[1].t(), ctx)).collect();
        Ok(Self {
            env,
            cv,
            nodes,
            bounds,
            max_depth: cfg.max_depth,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> &Real {
        self.nodes[0].t()
    }

    pub fn hi(&self) -> &Real {
        self.nodes[self.nodes.len() - 1].t()
    }
}

/// Head and tail cutoffs of one target.
#[derive(Debug, Clone)]
pub struct Cutoffs {
    pub head: Real,
    pub tail: Option<Real>,
}

/// `ε = ln(Σz) / ln(c_n / min c_i)` and the `T` with `f_{x_n(3)}(T) = max c_i`.
pub fn cutoffs(z: &ExponentVector, env: &Envelope, cv: &CoefficientVector, ctx: &mut Ctx) -> Result<Cutoffs> {
    let n = env.n();
    let support: Vec<usize> = z.support().collect();
    let (Some(&i_min), Some(&i_max)) = (support.first(), support.last()) else {
        return Err(Error::domain("zero target"));
    };
    let weight = ctx.from_u64(z.weight());
    let gap = &ctx.ln(cv.c(n)) - &ctx.ln(cv.c(i_min));
    let head = if gap.is_positive() && z.weight() > 1 {
        &ctx.ln(&weight) / &gap
    } else {
        // f_z ≥ c_n everywhere only if min c_i ≥ c_n; otherwise no head bound
        Real::zero(ctx.precision())
    };
    let tail = if n >= 3 {
        tail_cutoff(env.generator(3), cv.ln_c(i_max), cv, ctx)?
    } else {
        None
    };
    Ok(Cutoffs { head, tail })
}

/// Root of `Σ x_i c_i^t = c_max^t` for the generator `x`; `None` when the
/// generator's limit `max c_i` is not below `c_max`.
fn tail_cutoff(x: &ExponentVector, ln_cmax: &Real, cv: &CoefficientVector, ctx: &mut Ctx) -> Result<Option<Real>> {
    let top = x.support().last().unwrap_or(1);
    if cv.ln_c(top) >= ln_cmax {
        return Ok(None);
    }
    // positive while f_x(t) > c_max
    let above = |t: &Real, ctx: &mut Ctx| -> Result<bool> {
        let table = cv.powers(t, ctx)?;
        let lhs = table.pow_sum(x);
        let rhs = ctx.exp(&(ln_cmax * t));
        Ok(lhs > rhs)
    };
    let mut lo = ctx.from_f64(1.0 / 1024.0);
    if !above(&lo, ctx)? {
        return Ok(Some(lo));
    }
    let mut hi = ctx.from_u64(1);
    let mut k = 0;
    while above(&hi, ctx)? {
        if k >= DOUBLING_LIMIT {
            return Ok(None);
        }
        lo = hi.clone();
        hi = hi.mul_u64(2);
        k += 1;
    }
    for _ in 0..64 {
        let mid = lo.midpoint(&hi);
        if above(&mid, ctx)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the upper end keeps f_x(T) ≤ c_max
    Ok(Some(hi))
}

fn relative_margin(z_pow: &Real, env_pow: &Real, t: &Real) -> f64 {
    // (z/env)^{1/t} - 1
    let d = (z_pow.ln_f64() - env_pow.ln_f64()) / t.to_f64();
    libm::expm1(d)
}

enum Outcome {
    Ok,
    Violated(Real),
    TooDeep,
}

struct Checker<'g, 'a> {
    grid: &'g LevelGrid<'a>,
    z: &'g ExponentVector,
    refinements: usize,
    min_margin: f64,
}

impl Checker<'_, '_> {
    fn note(&mut self, z_pow: &Real, env_pow: &Real, t: &Real) {
        let m = relative_margin(z_pow, env_pow, t);
        if m < self.min_margin {
            self.min_margin = m;
        }
    }

    /// `[a, b]` given `f_z(b)^b` and `env(a)^b`.
    fn interval(&mut self, a: &Node, b: &Node, z_b: &Real, bound: &Real, depth: u32, ctx: &mut Ctx) -> Result<Outcome> {
        if z_b >= bound {
            return Ok(Outcome::Ok);
        }
        if depth >= self.grid.max_depth {
            return Ok(Outcome::TooDeep);
        }
        // geometric midpoint, matching the log spacing
        let mt = ctx.sqrt(&(a.t() * b.t()));
        let m = Node::new(self.grid.env, self.grid.cv, &mt, ctx)?;
        self.refinements += 1;
        let z_m = m.table.pow_sum(self.z);
        self.note(&z_m, &m.env_pow, &mt);
        if z_m < m.env_pow {
            return Ok(Outcome::Violated(mt));
        }
        let left_bound = a.env_pow_at(&mt, ctx);
        match self.interval(a, &m, &z_m, &left_bound, depth + 1, ctx)? {
            Outcome::Ok => {}
            other => return Ok(other),
        }
        let right_bound = m.env_pow_at(b.t(), ctx);
        self.interval(&m, b, z_b, &right_bound, depth + 1, ctx)
    }
}

/// Certificate for one target against the envelope of its level.
///
/// Members of `S_n` are certified outright. Everything else needs
/// the grid to reach from the head cutoff to the tail cutoff.
pub fn verify_mintest(z: &ExponentVector, grid: &LevelGrid<'_>, ctx: &mut Ctx) -> Result<VerificationCertificate> {
    let env = grid.env;
    let n = env.n();
    let prec = ctx.precision();
    let mut cert = VerificationCertificate {
        target: z.clone(),
        n,
        status: Status::Certified,
        head_cutoff: Real::zero(prec),
        tail_cutoff: None,
        grid_size: 0,
        min_margin: 0.0,
        witness: None,
        refinements: 0,
    };
    if env.generators().contains(z) {
        return Ok(cert);
    }
    let cut = cutoffs(z, env, grid.cv, ctx)?;
    cert.head_cutoff = cut.head.clone();
    cert.tail_cutoff = cut.tail.clone();
    let mut checker = Checker {
        grid,
        z,
        refinements: 0,
        min_margin: f64::INFINITY,
    };

    let open_head = !cut.head.is_positive();
    let head = if open_head { grid.lo().clone() } else { cut.head.clone() };
    let (tail, closed) = match &cut.tail {
        Some(t) => (t.clone(), true),
        None => (grid.hi().clone(), false),
    };
    if head < *grid.lo() || tail > *grid.hi() {
        return Err(Error::domain("grid does not span the target's cutoffs"));
    }
    if tail > head {
        // nodes k0 ≤ head and k1 ≥ tail
        let nodes = &grid.nodes;
        let k0 = nodes.iter().rposition(|nd| *nd.t() <= head).unwrap_or(0);
        let k1 = nodes.iter().position(|nd| *nd.t() >= tail).unwrap_or(nodes.len() - 1);
        cert.grid_size = k1 - k0 + 1;
        let z_pows: Vec<Real> = nodes[k0..=k1].iter().map(|nd| nd.table.pow_sum(z)).collect();
        for (nd, zp) in nodes[k0..=k1].iter().zip(&z_pows) {
            checker.note(zp, &nd.env_pow, nd.t());
            if *zp < nd.env_pow {
                cert.status = Status::Violated;
                cert.witness = Some(nd.t().clone());
                break;
            }
        }
        if cert.status == Status::Certified {
            for k in k0..k1 {
                let out = checker.interval(&nodes[k], &nodes[k + 1], &z_pows[k + 1 - k0], &grid.bounds[k], 0, ctx)?;
                match out {
                    Outcome::Ok => {}
                    Outcome::Violated(t) => {
                        cert.status = Status::Violated;
                        cert.witness = Some(t);
                        break;
                    }
                    Outcome::TooDeep => {
                        cert.status = Status::Inconclusive;
                        break;
                    }
                }
            }
        }
    }
    if cert.status == Status::Certified && (open_head || !closed) {
        cert.status = Status::Inconclusive;
    }
    cert.refinements = checker.refinements;
    cert.min_margin = if checker.min_margin.is_finite() { checker.min_margin } else { 0.0 };
    Ok(cert)
}

/// Grid range covering every target's cutoffs (plus the envelope's own
/// breakpoints, so the grid is never degenerate).
pub fn grid_span(
    targets: &[ExponentVector],
    env: &Envelope,
    cv: &CoefficientVector,
    cfg: &GridConfig,
    ctx: &mut Ctx,
) -> Result<(Real, Real)> {
    let mut lo: Option<Real> = None;
    let mut hi: Option<Real> = None;
    let widen = |v: Real, lo: &mut Option<Real>, hi: &mut Option<Real>| {
        if lo.as_ref().is_none_or(|l| v < *l) {
            *lo = Some(v.clone());
        }
        if hi.as_ref().is_none_or(|h| v > *h) {
            *hi = Some(v);
        }
    };
    for bp in env.breakpoints() {
        widen(bp.value.clone(), &mut lo, &mut hi);
    }
    for z in targets {
        if env.generators().contains(z) {
            continue;
        }
        let c = cutoffs(z, env, cv, ctx)?;
        if c.head.is_positive() {
            widen(c.head, &mut lo, &mut hi);
        }
        match c.tail {
            Some(t) => widen(t, &mut lo, &mut hi),
            None => widen(ctx.from_f64(cfg.fallback_tail), &mut lo, &mut hi),
        }
    }
    let lo = lo.unwrap_or_else(|| ctx.from_f64(0.5));
    let hi = hi.unwrap_or_else(|| ctx.from_f64(2.0));
    // keep a little room on both sides
    let lo = lo.mul_u64(15).div_u64(16);
    let hi = hi.mul_u64(17).div_u64(16);
    Ok((lo, hi))
}

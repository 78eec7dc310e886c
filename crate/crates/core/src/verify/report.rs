use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::arith::{Ctx, Real};
use crate::lattice::{ExponentVector, FibSystem, SetFamily};
use crate::measure::CoefficientVector;
use crate::solver::Breakpoint;
use crate::{Error, Result};

use super::{grid_span, verify_mintest, Envelope, GridConfig, LevelGrid, Status, VerificationCertificate};

/// Outcome of checking every member of `R_n ∖ S_n` at one level.
#[derive(Debug, Clone)]
pub struct ConjectureSummary {
    pub n: usize,
    pub status: Status,
    pub certificates: Vec<VerificationCertificate>,
    /// Targets that are not certified.
    pub offending: Vec<ExponentVector>,
}

/// `R_n ∖ S_n`, the targets that need a certificate.
pub fn targets(sys: &FibSystem, r_n: &SetFamily) -> Result<Vec<ExponentVector>> {
    Ok(r_n.minus(&sys.build_s(r_n.n())?))
}

/// Checks that levels `1..n` have certified summaries, in order.
pub fn check_prior(n: usize, prior: &[ConjectureSummary]) -> Result<()> {
    for i in 1..n {
        match prior.get(i - 1) {
            Some(s) if s.n == i && s.status == Status::Certified => {}
            Some(s) if s.n == i => return Err(Error::Dependency(format!("level {i} is {}, not certified", s.status.as_str()))),
            _ => return Err(Error::Dependency(format!("level {i} has not been verified"))),
        }
    }
    Ok(())
}

/// Combines per-target certificates (sorted by target) into a level summary.
pub fn summarize(n: usize, mut certificates: Vec<VerificationCertificate>) -> ConjectureSummary {
    certificates.sort_by(|a, b| a.target.cmp(&b.target));
    let offending: Vec<ExponentVector> = certificates
        .iter()
        .filter(|c| c.status != Status::Certified)
        .map(|c| c.target.clone())
        .collect();
    let status = if certificates.iter().any(|c| c.status == Status::Violated) {
        Status::Violated
    } else if offending.is_empty() {
        Status::Certified
    } else {
        Status::Inconclusive
    };
    ConjectureSummary {
        n,
        status,
        certificates,
        offending,
    }
}

/// Verifies `f_z ≥ min_{S_n} f_x` for every `z ∈ R_n ∖ S_n`, given certified
/// summaries for all lower levels.
pub fn verify_conjecture(
    sys: &FibSystem,
    r_n: &SetFamily,
    env: &Envelope,
    cv: &CoefficientVector,
    prior: &[ConjectureSummary],
    cfg: &GridConfig,
    ctx: &mut Ctx,
) -> Result<ConjectureSummary> {
    let n = r_n.n();
    if env.n() != n {
        return Err(Error::domain(format!("envelope is for level {}, family for {n}", env.n())));
    }
    check_prior(n, prior)?;
    let todo = targets(sys, r_n)?;
    if todo.is_empty() {
        return Ok(summarize(n, Vec::new()));
    }
    let (lo, hi) = grid_span(&todo, env, cv, cfg, ctx)?;
    let grid = LevelGrid::new(env, cv, &lo, &hi, cfg, ctx)?;
    let mut certs = Vec::with_capacity(todo.len());
    for z in &todo {
        certs.push(verify_mintest(z, &grid, ctx)?);
    }
    Ok(summarize(n, certs))
}

#[derive(Debug, Clone)]
pub struct ExceptionalReport {
    pub n: usize,
    pub p: u64,
    pub q: u64,
    /// `t_3, …, t_n`.
    pub points: Vec<Breakpoint>,
    pub count: usize,
}

/// The exceptional points `t_3, …, t_n` of `α_n`, once level `n` is certified.
pub fn exceptional_points(summary: &ConjectureSummary, env: &Envelope, cv: &CoefficientVector) -> Result<ExceptionalReport> {
    if summary.n != env.n() {
        return Err(Error::domain("summary and envelope levels differ"));
    }
    if summary.status != Status::Certified {
        return Err(Error::Dependency(format!("level {} is not certified", summary.n)));
    }
    let points = env.breakpoints().to_vec();
    Ok(ExceptionalReport {
        n: summary.n,
        p: cv.pair().p(),
        q: cv.pair().q(),
        count: points.len(),
        points,
    })
}

/// Rows of measure-function values for plotting.
#[derive(Debug, Clone)]
pub struct PlotTable {
    pub columns: Vec<String>,
    pub rows: Vec<PlotRow>,
}

#[derive(Debug, Clone)]
pub struct PlotRow {
    pub t: f64,
    /// One value per column after `t`, ending with the envelope.
    pub values: Vec<f64>,
    /// Breakpoints `t_i` falling in `(previous t, t]`, as `t<i>`.
    pub marker: String,
}

/// `samples` evenly spaced rows on `[t_min, t_max]`: every generator, every
/// extra vector, and the envelope (row-wise minimum of the generators).
pub fn emit_plot_data(
    env: &Envelope,
    extra: &[ExponentVector],
    cv: &CoefficientVector,
    t_min: f64,
    t_max: f64,
    samples: usize,
    ctx: &mut Ctx,
) -> Result<PlotTable> {
    if !(t_min > 0.0 && t_min < t_max) || samples < 2 {
        return Err(Error::domain("plot needs 0 < t_min < t_max and at least 2 samples"));
    }
    let n = env.n();
    let mut columns = Vec::new();
    columns.push("t".to_string());
    for i in env.indices() {
        columns.push(format!("x{n}({i})"));
    }
    for z in extra {
        columns.push(z.to_string());
    }
    columns.push("envelope".to_string());
    columns.push("breakpoint".to_string());

    let mut rows = Vec::with_capacity(samples);
    let mut prev: Option<f64> = None;
    for k in 0..samples {
        let t = t_min + (t_max - t_min) * k as f64 / (samples - 1) as f64;
        let tr = ctx.from_f64(t);
        let table = cv.powers(&tr, ctx)?;
        let mut values = Vec::with_capacity(columns.len() - 2);
        let mut env_pow: Option<Real> = None;
        for x in env.generators() {
            let s = table.pow_sum(x);
            if env_pow.as_ref().is_none_or(|e| s < *e) {
                env_pow = Some(s.clone());
            }
            values.push(table.root(&s, ctx).to_f64());
        }
        for z in extra {
            values.push(table.norm(z, ctx).to_f64());
        }
        let e = env_pow.expect("S_n is never empty");
        values.push(table.root(&e, ctx).to_f64());
        let marker = env
            .breakpoints()
            .iter()
            .filter(|bp| {
                let v = bp.value.to_f64();
                v <= t && prev.is_none_or(|p| v > p)
            })
            .map(|bp| format!("t{}", bp.index))
            .collect::<Vec<_>>()
            .join(";");
        rows.push(PlotRow { t, values, marker });
        prev = Some(t);
    }
    Ok(PlotTable { columns, rows })
}

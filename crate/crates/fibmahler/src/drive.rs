//! Parallel drivers over the pure routines in `fibmahler-core`.

use std::ops::ControlFlow;

use fibmahler_core::lattice::{enumerate_r, FamilyKind};
use fibmahler_core::verify::{
    check_prior, grid_span, summarize, targets, verify_mintest, ConjectureSummary, Envelope, GridConfig, LevelGrid,
};
use fibmahler_core::{CoefficientVector, Ctx, ExponentVector, FibSystem, SetFamily};
use rayon::prelude::*;

/// `C_n` together with `#V_n`, one DFS task per top-level branch.
pub fn c_with_count(sys: &FibSystem, n: usize) -> fibmahler_core::Result<(SetFamily, u64)> {
    let branches = sys.branches(n, 4 * rayon::current_num_threads().max(1))?;
    let parts: Vec<(Vec<ExponentVector>, u64)> = branches
        .par_iter()
        .map(|br| {
            let mut keep = Vec::new();
            let mut count = 0u64;
            let _ = sys.visit_branch(br, |e| {
                count += 1;
                let x = ExponentVector::new(e.to_vec(), n);
                if x.is_almost_consecutive_free() {
                    keep.push(x);
                }
                ControlFlow::Continue(())
            });
            (keep, count)
        })
        .collect();
    let total = parts.iter().map(|p| p.1).sum();
    let members = parts.into_iter().flat_map(|p| p.0).collect();
    Ok((SetFamily::from_unsorted(FamilyKind::C, n, sys.dim(), members), total))
}

/// `R_1, …, R_k` from the given `C` families.
pub fn r_from_c(sys: &FibSystem, cs: &[SetFamily]) -> fibmahler_core::Result<Vec<SetFamily>> {
    let mut out: Vec<SetFamily> = Vec::with_capacity(cs.len());
    for c in cs {
        let r = enumerate_r(sys, c, &out)?;
        out.push(r);
    }
    Ok(out)
}

/// Same result as `verify_conjecture`, with targets checked in parallel.
pub fn verify_level(
    sys: &FibSystem,
    r_n: &SetFamily,
    env: &Envelope,
    cv: &CoefficientVector,
    prior: &[ConjectureSummary],
    cfg: &GridConfig,
    precision_bits: usize,
) -> fibmahler_core::Result<ConjectureSummary> {
    let n = r_n.n();
    check_prior(n, prior)?;
    let todo = targets(sys, r_n)?;
    if todo.is_empty() {
        return Ok(summarize(n, Vec::new()));
    }
    let mut ctx = Ctx::new(precision_bits)?;
    let (lo, hi) = grid_span(&todo, env, cv, cfg, &mut ctx)?;
    let grid = LevelGrid::new(env, cv, &lo, &hi, cfg, &mut ctx)?;
    let certs = todo
        .par_iter()
        .map_init(
            || Ctx::new(precision_bits),
            |ctx, z| match ctx {
                Ok(ctx) => verify_mintest(z, &grid, ctx),
                Err(e) => Err(e.clone()),
            },
        )
        .collect::<fibmahler_core::Result<Vec<_>>>()?;
    Ok(summarize(n, certs))
}

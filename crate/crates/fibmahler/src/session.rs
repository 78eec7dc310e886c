//! Lazily computed families, breakpoints and summaries for one [`RunConfig`].

use anyhow::{bail, Context};
use fibmahler_core::lattice::{delta, enumerate_r, vertex_filter};
use fibmahler_core::solver::compatible;
use fibmahler_core::verify::{ConjectureSummary, Envelope, GridConfig, Status};
use fibmahler_core::{CoefficientVector, CompatibilityReport, Ctx, ExponentVector, FamilyKind, FibSystem, PrimePair, SetFamily};

use crate::cache::{Cache, SummaryKey};
use crate::config::RunConfig;
use crate::drive;

pub struct Session {
    cfg: RunConfig,
    sys: FibSystem,
    cache: Option<Cache>,
    ctx: Ctx,
    pair: PrimePair,
    c: Vec<(SetFamily, u64)>,
    r: Vec<SetFamily>,
    cv: Option<CoefficientVector>,
    report: Option<CompatibilityReport>,
    summaries: Vec<ConjectureSummary>,
    /// Drop non-vertices of `R_n` before verifying.
    pub vertices_only: bool,
    pub grid: GridConfig,
}

impl Session {
    pub fn new(cfg: RunConfig) -> anyhow::Result<Self> {
        cfg.validate()?;
        let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
        let mut ctx = cfg.ctx()?;
        let pair = PrimePair::new(cfg.p, cfg.q, &mut ctx)?;
        Ok(Self {
            sys: FibSystem::new(cfg.dim)?,
            cfg,
            cache,
            ctx,
            pair,
            c: Vec::new(),
            r: Vec::new(),
            cv: None,
            report: None,
            summaries: Vec::new(),
            vertices_only: false,
            grid: GridConfig::default(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn system(&self) -> &FibSystem {
        &self.sys
    }

    pub fn pair(&self) -> &PrimePair {
        &self.pair
    }

    pub fn ctx(&mut self) -> &mut Ctx {
        &mut self.ctx
    }

    fn check_n(&self, n: usize) -> anyhow::Result<()> {
        if n == 0 || n > self.cfg.dim {
            bail!("level {n} is outside 1..={} (raise --N)", self.cfg.dim);
        }
        Ok(())
    }

    /// `C_n` and `#V_n`, from the cache when present.
    pub fn c(&mut self, n: usize) -> anyhow::Result<&(SetFamily, u64)> {
        self.check_n(n)?;
        while self.c.len() < n {
            let k = self.c.len() + 1;
            let hit = match &self.cache {
                Some(cache) => cache.load_c(k, self.cfg.dim)?,
                None => None,
            };
            let entry = match hit {
                Some(e) => e,
                None => {
                    let e = drive::c_with_count(&self.sys, k)?;
                    if let Some(cache) = &self.cache {
                        cache.store_c(&e.0, e.1)?;
                    }
                    e
                }
            };
            self.c.push(entry);
        }
        Ok(&self.c[n - 1])
    }

    pub fn r(&mut self, n: usize) -> anyhow::Result<&SetFamily> {
        self.check_n(n)?;
        while self.r.len() < n {
            let k = self.r.len() + 1;
            let c = self.c(k)?.0.clone();
            let r = enumerate_r(&self.sys, &c, &self.r)?;
            self.r.push(r);
        }
        Ok(&self.r[n - 1])
    }

    pub fn s(&self, n: usize) -> anyhow::Result<SetFamily> {
        self.check_n(n)?;
        Ok(self.sys.build_s(n)?)
    }

    pub fn delta(&mut self, n: usize) -> anyhow::Result<Vec<ExponentVector>> {
        self.r(n)?;
        let prev = if n > 1 { Some(&self.r[n - 2]) } else { None };
        Ok(delta(&self.sys, &self.r[n - 1], prev)?)
    }

    pub fn coefficients(&mut self) -> anyhow::Result<&CoefficientVector> {
        if self.cv.is_none() {
            self.cv = Some(CoefficientVector::new(&self.pair, self.cfg.dim, &mut self.ctx)?);
        }
        Ok(self.cv.as_ref().expect("just set"))
    }

    /// Compatibility with `N`. A tie that refinement cannot separate is an error.
    pub fn compat(&mut self) -> anyhow::Result<&CompatibilityReport> {
        if self.report.is_none() {
            let rep = compatible(&self.pair, self.cfg.dim, self.cfg.tol, &mut self.ctx)
                .with_context(|| format!("compatibility of ({}, {}) with N = {}", self.cfg.p, self.cfg.q, self.cfg.dim))?;
            self.report = Some(rep);
        }
        Ok(self.report.as_ref().expect("just set"))
    }

    pub fn envelope(&mut self, n: usize) -> anyhow::Result<Envelope> {
        self.check_n(n)?;
        let sys = self.sys.clone();
        let rep = self.compat()?;
        Ok(Envelope::from_report(&sys, n, rep)?)
    }

    fn key(&self, n: usize) -> SummaryKey {
        SummaryKey {
            n,
            dim: self.cfg.dim,
            p: self.cfg.p,
            q: self.cfg.q,
            bits: self.cfg.precision_bits,
            tol: self.cfg.tol,
            vertices_only: self.vertices_only,
        }
    }

    /// The family handed to the verifier at level `n`.
    fn verify_family(&mut self, n: usize) -> anyhow::Result<SetFamily> {
        let r = self.r(n)?.clone();
        if !self.vertices_only {
            return Ok(r);
        }
        let keep = vertex_filter(&r).vertices;
        let s = self.s(n)?;
        let mut members = keep;
        members.extend(s.iter().cloned());
        Ok(SetFamily::from_unsorted(FamilyKind::R, n, r.dim(), members))
    }

    /// Summaries for levels `1..=n`. Stops after the first level that is not
    /// certified, since higher levels depend on it.
    pub fn verify_through(&mut self, n: usize) -> anyhow::Result<&[ConjectureSummary]> {
        self.check_n(n)?;
        if !self.compat()?.verdict {
            bail!(fibmahler_core::Error::Incompatible {
                p: self.cfg.p,
                q: self.cfg.q,
                dim: self.cfg.dim
            });
        }
        while self.summaries.len() < n {
            if self.summaries.last().is_some_and(|s| s.status != Status::Certified) {
                break;
            }
            let k = self.summaries.len() + 1;
            let key = self.key(k);
            let cached = match &self.cache {
                Some(cache) => cache.load_summary(&key)?,
                None => None,
            };
            let summary = match cached {
                Some(s) => s,
                None => {
                    let fam = self.verify_family(k)?;
                    let env = self.envelope(k)?;
                    let cv = self.coefficients()?.clone();
                    let s = drive::verify_level(&self.sys, &fam, &env, &cv, &self.summaries, &self.grid, self.cfg.precision_bits)?;
                    if let Some(cache) = &self.cache {
                        cache.store_summary(&key, &s)?;
                    }
                    s
                }
            };
            self.summaries.push(summary);
        }
        Ok(&self.summaries)
    }
}

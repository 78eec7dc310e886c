use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use fibmahler_core::solver::{find_compatible_pairs, max_compatible_n, max_ordered_n};
use fibmahler_core::verify::{emit_plot_data, exceptional_points, Status};
use fibmahler_core::{Error, PrimePair};
use serde_json::json;

use crate::config::{read_config_file, OutputFormat, Overrides, RunConfig};
use crate::format::{emit, g15, Table};
use crate::json;
use crate::session::Session;

/// Largest `N` tried by `compat` and `search` when reporting the best dimension.
pub const MAX_N_CAP: usize = 30;

#[derive(Debug, Parser)]
#[command(
    name = "fibmahler",
    version,
    about = "Metric Mahler measures of p^{h_n}/q^{h_{n-1}}: tables, verification and plot data"
)]
pub struct Cli {
    /// First prime.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Second prime.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Vector dimension N.
    #[arg(long = "N", global = true)]
    pub dim: Option<usize>,
    /// Mantissa bits for multi-precision values.
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Relative tolerance for breakpoints.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory for C_n families and verification summaries
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// key=value file applied before the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// #V_n, #C_n, #R_n, #S_n for n = 1..=n-max.
    Table {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// The new members Δ_n of R_n ∖ S_n, zero-trimmed.
    Delta {
        #[arg(long)]
        n: usize,
    },
    /// Certify f_z ≥ min over S_k for every z in R_k ∖ S_k, k = 1..=n.
    Verify {
        #[arg(long)]
        n: usize,
        /// Only check vertices of the convex hull of R_k.
        #[arg(long)]
        vertices_only: bool,
    },
    /// Weak chain and strict ordering of t_3, ..., t_{N+1}.
    Compat {
        /// Print the breakpoints instead of the verdict row.
        #[arg(long)]
        breakpoints: bool,
    },
    /// Compatible pairs with log q / log p near the golden ratio.
    Search {
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = 20)]
        max_results: usize,
    },
    /// Measure functions of S_n and R_n ∖ S_n with the envelope.
    Plot {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 251)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The exceptional points t_3, ..., t_n once level n is certified.
    Exceptional {
        #[arg(long)]
        n: usize,
    },
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const VIOLATED: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
    pub const INCOMPATIBLE: i32 = 4;
}

impl Cli {
    pub fn run_config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply(&read_config_file(path)?);
        }
        cfg.apply(&Overrides {
            dim: self.dim,
            p: self.p,
            q: self.q,
            precision_bits: self.precision,
            tol: self.tol,
            cache_dir: self.cache_dir.clone(),
            format: self.format,
        });
        Ok(cfg)
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Certified => exit::OK,
        Status::Violated => exit::VIOLATED,
        Status::Inconclusive => exit::INCONCLUSIVE,
    }
}

/// Maps an error to its exit code.
pub fn error_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Incompatible { .. }) | Some(Error::Precision { .. }) => exit::INCOMPATIBLE,
        _ => exit::ERROR,
    }
}

/// Runs one command, writing results to `out` and progress to `log`.
pub fn run(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> anyhow::Result<i32> {
    let cfg = cli.run_config()?;
    let fmt = cfg.format;
    let mut s = Session::new(cfg)?;
    match &cli.command {
        Command::Table { n_max } => {
            let n_max = n_max.unwrap_or(s.config().dim);
            let mut t = Table::new(["n", "V", "C", "R", "S"]);
            let mut rows = Vec::new();
            for n in 1..=n_max {
                let (c, v) = s.c(n)?;
                let (c, v) = (c.len(), *v);
                let r = s.r(n)?.len();
                let sn = s.s(n)?.len();
                t.push([n.to_string(), v.to_string(), c.to_string(), r.to_string(), sn.to_string()]);
                rows.push(json!({"n": n, "V": v, "C": c, "R": r, "S": sn}));
            }
            emit(fmt, &t, || json!(rows), out)?;
            Ok(exit::OK)
        }
        Command::Delta { n } => {
            let d = s.delta(*n)?;
            let mut t = Table::new(["n", "vector"]);
            if d.is_empty() {
                t.push([n.to_string(), "None".into()]);
            }
            for z in &d {
                t.push([n.to_string(), z.to_string()]);
            }
            emit(fmt, &t, || json!({"n": n, "vectors": json::vectors(&d)}), out)?;
            Ok(exit::OK)
        }
        Command::Verify { n, vertices_only } => {
            s.vertices_only = *vertices_only;
            let summaries = s.verify_through(*n)?.to_vec();
            let mut t = Table::new([
                "n",
                "vector",
                "status",
                "min_margin",
                "head_cutoff",
                "tail_cutoff",
                "grid_size",
                "refinements",
            ]);
            for sum in &summaries {
                writeln!(log, "level {}: {} ({} targets)", sum.n, sum.status.as_str(), sum.certificates.len())?;
                for c in &sum.certificates {
                    t.push([
                        sum.n.to_string(),
                        c.target.to_string(),
                        c.status.as_str().to_string(),
                        g15(c.min_margin),
                        g15(c.head_cutoff.to_f64()),
                        c.tail_cutoff.as_ref().map_or("none".into(), |x| g15(x.to_f64())),
                        c.grid_size.to_string(),
                        c.refinements.to_string(),
                    ]);
                }
            }
            let bps = s.compat()?.breakpoints.clone();
            emit(
                fmt,
                &t,
                || {
                    json!({
                        "n": n,
                        "levels": summaries.iter().map(json::summary).collect::<Vec<_>>(),
                        "breakpoints": bps.iter().map(json::breakpoint).collect::<Vec<_>>(),
                    })
                },
                out,
            )?;
            let last = summaries.last().expect("level 1 is always verified");
            if last.n < *n {
                writeln!(log, "stopped at level {}; levels above it depend on it", last.n)?;
            }
            Ok(status_code(last.status))
        }
        Command::Compat { breakpoints } => {
            let rep = s.compat()?.clone();
            let pair = s.pair().clone();
            let tol = s.config().tol;
            let best = max_compatible_n(&pair, MAX_N_CAP, tol, s.ctx())?;
            let ordered = max_ordered_n(&pair, MAX_N_CAP, tol, s.ctx())?;
            let t = if *breakpoints {
                let mut t = Table::new(["index", "t", "lo", "hi", "exact"]);
                for bp in &rep.breakpoints {
                    t.push([
                        bp.index.to_string(),
                        g15(bp.value.to_f64()),
                        g15(bp.lo.to_f64()),
                        g15(bp.hi.to_f64()),
                        bp.exact.to_string(),
                    ]);
                }
                t
            } else {
                let mut t = Table::new(["p", "q", "N", "weak", "ordered", "compatible", "max_compatible_N", "max_ordered_N"]);
                t.push([
                    rep.p.to_string(),
                    rep.q.to_string(),
                    rep.dim.to_string(),
                    rep.weak_ok.to_string(),
                    rep.strictly_decreasing.to_string(),
                    rep.verdict.to_string(),
                    best.to_string(),
                    ordered.to_string(),
                ]);
                t
            };
            emit(
                fmt,
                &t,
                || {
                    json!({
                        "p": rep.p, "q": rep.q, "N": rep.dim,
                        "weak": rep.weak_ok, "ordered": rep.strictly_decreasing, "compatible": rep.verdict,
                        "max_compatible_N": best, "max_ordered_N": ordered, "cap": MAX_N_CAP,
                        "breakpoints": rep.breakpoints.iter().map(json::breakpoint).collect::<Vec<_>>(),
                    })
                },
                out,
            )?;
            Ok(if rep.verdict { exit::OK } else { exit::INCOMPATIBLE })
        }
        Command::Search { p_min, p_max, max_results } => {
            let (dim, tol) = (s.config().dim, s.config().tol);
            let hits = find_compatible_pairs(dim, *p_min, *p_max, *max_results, tol, s.ctx())?;
            let mut t = Table::new(["p", "q", "offset", "max_N"]);
            let mut rows = Vec::new();
            for h in &hits {
                let pair: &PrimePair = &h.pair;
                let best = max_compatible_n(pair, MAX_N_CAP, tol, s.ctx())?;
                t.push([pair.p().to_string(), pair.q().to_string(), g15(h.offset.to_f64()), best.to_string()]);
                rows.push(json!({"p": pair.p(), "q": pair.q(), "offset": json::real(&h.offset), "max_N": best}));
            }
            writeln!(log, "{} compatible pairs with N = {dim}", hits.len())?;
            emit(fmt, &t, || json!({"N": dim, "pairs": rows}), out)?;
            Ok(exit::OK)
        }
        Command::Plot {
            n,
            t_min,
            t_max,
            samples,
            out: path,
        } => {
            let env = s.envelope(*n)?;
            let sn = s.s(*n)?;
            let extra = s.r(*n)?.minus(&sn);
            let cv = s.coefficients()?.clone();
            let plot = emit_plot_data(&env, &extra, &cv, *t_min, *t_max, *samples, s.ctx())?;
            let mut t = Table::new(plot.columns.clone());
            for row in &plot.rows {
                let mut cells = vec![g15(row.t)];
                cells.extend(row.values.iter().map(|&v| g15(v)));
                cells.push(row.marker.clone());
                t.push(cells);
            }
            let doc = || {
                json!({
                    "n": n,
                    "columns": plot.columns,
                    "vectors": json::vectors(env.generators().iter().chain(&extra)),
                    "breakpoints": env.breakpoints().iter().map(json::breakpoint).collect::<Vec<_>>(),
                    "rows": plot.rows.iter().map(|r| {
                        let mut v = vec![json::num(r.t)];
                        v.extend(r.values.iter().map(|&x| json::num(x)));
                        v.push(json!(r.marker));
                        v
                    }).collect::<Vec<_>>(),
                })
            };
            match path {
                Some(p) => {
                    let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    emit(fmt, &t, doc, &mut w)?;
                    w.flush()?;
                    writeln!(log, "wrote {} rows to {}", plot.rows.len(), p.display())?;
                }
                None => emit(fmt, &t, doc, out)?,
            }
            Ok(exit::OK)
        }
        Command::Exceptional { n } => {
            if *n < 2 {
                bail!("exceptional points start at n = 2");
            }
            let summaries = s.verify_through(*n)?.to_vec();
            let last = summaries.last().expect("level 1 is always verified");
            if last.n != *n || last.status != Status::Certified {
                writeln!(log, "level {} is {}; no exceptional points reported", last.n, last.status.as_str())?;
                return Ok(status_code(if last.status == Status::Certified {
                    Status::Inconclusive
                } else {
                    last.status
                }));
            }
            let env = s.envelope(*n)?;
            let cv = s.coefficients()?.clone();
            let rep = exceptional_points(last, &env, &cv)?;
            let mut t = Table::new(["n", "index", "t"]);
            for bp in &rep.points {
                t.push([n.to_string(), bp.index.to_string(), g15(bp.value.to_f64())]);
            }
            writeln!(log, "{} exceptional points", rep.count)?;
            emit(
                fmt,
                &t,
                || {
                    json!({
                        "n": n, "p": rep.p, "q": rep.q, "count": rep.count,
                        "breakpoints": rep.points.iter().map(json::breakpoint).collect::<Vec<_>>(),
                    })
                },
                out,
            )?;
            Ok(exit::OK)
        }
    }
}

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use fibmahler_core::lattice::MAX_DIM;
use fibmahler_core::{Ctx, PrimePair, DEFAULT_PRECISION_BITS, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    #[default]
    Tsv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown output format `{other}` (expected csv, tsv or json)"),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Tsv => "tsv",
            OutputFormat::Json => "json",
        })
    }
}

/// Everything a subcommand needs besides its own arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub p: u64,
    pub q: u64,
    pub precision_bits: usize,
    pub tol: f64,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 13,
            p: 1879,
            q: 198_301,
            precision_bits: DEFAULT_PRECISION_BITS,
            tol: DEFAULT_TOLERANCE,
            cache_dir: None,
            format: OutputFormat::Tsv,
        }
    }
}

/// Optional overrides, from a config file or from flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub precision_bits: Option<usize>,
    pub tol: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.dim {
            self.dim = v;
        }
        if let Some(v) = o.p {
            self.p = v;
        }
        if let Some(v) = o.q {
            self.q = v;
        }
        if let Some(v) = o.precision_bits {
            self.precision_bits = v;
        }
        if let Some(v) = o.tol {
            self.tol = v;
        }
        if let Some(v) = &o.cache_dir {
            self.cache_dir = Some(v.clone());
        }
        if let Some(v) = o.format {
            self.format = v;
        }
    }

    /// Checks ranges, primality and that the cache directory is writable.
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(3..=MAX_DIM).contains(&self.dim) {
            bail!("N = {} is outside 3..={MAX_DIM}", self.dim);
        }
        if !(64..=4096).contains(&self.precision_bits) {
            bail!("precision {} is outside 64..=4096 bits", self.precision_bits);
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            bail!("tolerance {} must lie in (0, 1e-3)", self.tol);
        }
        self.pair()?;
        if let Some(dir) = &self.cache_dir {
            fs::create_dir_all(dir).with_context(|| format!("cannot create cache directory {}", dir.display()))?;
            let probe = dir.join(".probe");
            fs::write(&probe, b"").with_context(|| format!("cache directory {} is not writable", dir.display()))?;
            let _ = fs::remove_file(probe);
        }
        Ok(())
    }

    pub fn ctx(&self) -> anyhow::Result<Ctx> {
        Ok(Ctx::new(self.precision_bits)?)
    }

    pub fn pair(&self) -> anyhow::Result<PrimePair> {
        let mut ctx = self.ctx()?;
        Ok(PrimePair::new(self.p, self.q, &mut ctx)?)
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> anyhow::Result<Overrides> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_config(text: &str) -> anyhow::Result<Overrides> {
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value", lineno + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = || format!("line {}: bad value `{value}` for `{key}`", lineno + 1);
        match key {
            "N" | "dim" => o.dim = Some(value.parse().with_context(bad)?),
            "p" => o.p = Some(value.parse().with_context(bad)?),
            "q" => o.q = Some(value.parse().with_context(bad)?),
            "precision" => o.precision_bits = Some(value.parse().with_context(bad)?),
            "tol" => o.tol = Some(value.parse().with_context(bad)?),
            "cache-dir" | "cache_dir" => o.cache_dir = Some(PathBuf::from(value)),
            "format" => o.format = Some(value.parse().with_context(bad)?),
            other => bail!("line {}: unknown key `{other}`", lineno + 1),
        }
    }
    Ok(o)
}

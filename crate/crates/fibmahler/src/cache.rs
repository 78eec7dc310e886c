//! On-disk cache of `C_n` families and per-level verification summaries.
//!
//! Family files hold one vector per line (comma-separated, all `N` entries,
//! sorted) after a manifest line such as
//!
//! ```text
//! #n=7,N=13,count=7,alg=dfs-v1,kind=C,source_count=38,sum=3f1c09a2b4d5e6f7
//! ```
//!
//! `source_count` is `#V_n`; `sum` is the first 16 hex digits of the SHA-256 of
//! the body. A `.lock` file keeps two processes out of the same directory.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use fibmahler_core::verify::ConjectureSummary;
use fibmahler_core::{ExponentVector, FamilyKind, SetFamily};
use sha2::{Digest, Sha256};

use crate::json;

pub const ALGORITHM: &str = "dfs-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub n: usize,
    pub dim: usize,
    pub count: usize,
    pub source_count: u64,
    pub sum: String,
}

impl Manifest {
    pub fn line(&self) -> String {
        format!(
            "#n={},N={},count={},alg={ALGORITHM},kind=C,source_count={},sum={}",
            self.n, self.dim, self.count, self.source_count, self.sum
        )
    }

    pub fn parse(line: &str) -> anyhow::Result<Self> {
        let body = line.strip_prefix('#').ok_or_else(|| anyhow!("manifest must start with `#`"))?;
        let get = |key: &str| -> anyhow::Result<String> {
            body.split(',')
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_owned)
                .ok_or_else(|| anyhow!("manifest lacks `{key}`"))
        };
        if get("alg")? != ALGORITHM {
            bail!("manifest algorithm is not {ALGORITHM}");
        }
        if get("kind")? != "C" {
            bail!("manifest kind is not C");
        }
        Ok(Manifest {
            n: get("n")?.parse()?,
            dim: get("N")?.parse()?,
            count: get("count")?.parse()?,
            source_count: get("source_count")?.parse()?,
            sum: get("sum")?,
        })
    }
}

fn checksum(body: &str) -> String {
    let digest = Sha256::digest(body.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn body_of(family: &SetFamily) -> String {
    let mut body = String::new();
    for x in family.iter() {
        let line: Vec<String> = x.entries().iter().map(u32::to_string).collect();
        body.push_str(&line.join(","));
        body.push('\n');
    }
    body
}

/// Serialises `C_n` in the cache format.
pub fn encode_family(family: &SetFamily, source_count: u64) -> String {
    let body = body_of(family);
    let m = Manifest {
        n: family.n(),
        dim: family.dim(),
        count: family.len(),
        source_count,
        sum: checksum(&body),
    };
    format!("{}\n{body}", m.line())
}

/// Parses a family file, checking count and checksum against the manifest.
pub fn decode_family(text: &str) -> anyhow::Result<(SetFamily, u64)> {
    let (head, body) = text.split_once('\n').ok_or_else(|| anyhow!("empty cache file"))?;
    let m = Manifest::parse(head)?;
    if checksum(body) != m.sum {
        bail!("checksum mismatch");
    }
    let mut members = Vec::with_capacity(m.count);
    for line in body.lines() {
        let entries: Vec<u32> = line
            .split(',')
            .map(|e| e.parse::<u32>().with_context(|| format!("bad entry in `{line}`")))
            .collect::<anyhow::Result<_>>()?;
        if entries.len() != m.dim {
            bail!("line `{line}` has {} entries, expected {}", entries.len(), m.dim);
        }
        members.push(ExponentVector::new(entries, m.n));
    }
    if members.len() != m.count {
        bail!("manifest count {} but {} lines", m.count, members.len());
    }
    let family = SetFamily::from_unsorted(FamilyKind::C, m.n, m.dim, members);
    if family.len() != m.count {
        bail!("duplicate lines");
    }
    Ok((family, m.source_count))
}

/// An open cache directory. Holds the lock until dropped.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    lock: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let lock = dir.join(".lock");
        for _ in 0..2 {
            match OpenOptions::new().write(true).create_new(true).open(&lock) {
                Ok(mut f) => {
                    writeln!(f, "{}", std::process::id())?;
                    return Ok(Cache {
                        dir: dir.to_path_buf(),
                        lock,
                    });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if !lock_is_stale(&lock) {
                        bail!(
                            "cache {} is locked by another process (remove {} if it is stale)",
                            dir.display(),
                            lock.display()
                        );
                    }
                    let _ = fs::remove_file(&lock);
                }
                Err(e) => return Err(e).with_context(|| format!("creating {}", lock.display())),
            }
        }
        bail!("could not acquire {}", lock.display())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn family_path(&self, n: usize, dim: usize) -> PathBuf {
        self.dir.join(format!("C_n{n}_N{dim}.txt"))
    }

    pub fn load_c(&self, n: usize, dim: usize) -> anyhow::Result<Option<(SetFamily, u64)>> {
        let path = self.family_path(n, dim);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        let (family, count) = decode_family(&text).with_context(|| format!("corrupt cache file {}", path.display()))?;
        if family.n() != n || family.dim() != dim {
            bail!("{} holds level {} of N = {}", path.display(), family.n(), family.dim());
        }
        Ok(Some((family, count)))
    }

    pub fn store_c(&self, family: &SetFamily, source_count: u64) -> anyhow::Result<()> {
        let path = self.family_path(family.n(), family.dim());
        write_atomic(&path, &encode_family(family, source_count))
    }

    fn summary_path(&self, key: &SummaryKey) -> PathBuf {
        self.dir.join(format!(
            "verify_n{}_N{}_p{}_q{}_b{}_tol{:e}{}.json",
            key.n,
            key.dim,
            key.p,
            key.q,
            key.bits,
            key.tol,
            if key.vertices_only { "_vertices" } else { "" }
        ))
    }

    pub fn load_summary(&self, key: &SummaryKey) -> anyhow::Result<Option<ConjectureSummary>> {
        let path = self.summary_path(key);
        if !path.exists() {
            return Ok(None);
        }
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path)?)?;
        let s = json::parse_summary(&v, key.dim, key.bits).with_context(|| format!("corrupt {}", path.display()))?;
        Ok(Some(s))
    }

    pub fn store_summary(&self, key: &SummaryKey, s: &ConjectureSummary) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(&json::summary(s))?;
        write_atomic(&self.summary_path(key), &text)
    }
}

impl Drop for Cache {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

/// A lock whose owner process no longer exists (checked where `/proc` is available).
fn lock_is_stale(lock: &Path) -> bool {
    let Ok(text) = fs::read_to_string(lock) else {
        return false;
    };
    let Ok(pid) = text.trim().parse::<u32>() else {
        return false;
    };
    Path::new("/proc/self").exists() && !Path::new(&format!("/proc/{pid}")).exists()
}

fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// What a cached verification summary depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryKey {
    pub n: usize,
    pub dim: usize,
    pub p: u64,
    pub q: u64,
    pub bits: usize,
    pub tol: f64,
    pub vertices_only: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use fibmahler_core::FibSystem;

    #[test]
    fn manifest_round_trip() {
        let m = Manifest {
            n: 7,
            dim: 13,
            count: 7,
            source_count: 38,
            sum: "0123456789abcdef".into(),
        };
        assert_eq!(Manifest::parse(&m.line()).unwrap(), m);
        assert!(Manifest::parse("n=7").is_err());
        assert!(Manifest::parse(&m.line().replace("dfs-v1", "other")).is_err());
    }

    #[test]
    fn tampered_files_are_rejected() {
        let sys = FibSystem::new(13).unwrap();
        let c = sys.enumerate_c(8).unwrap();
        let text = encode_family(&c, 139);
        assert!(text.starts_with("#n=8,N=13,count=11,alg=dfs-v1,kind=C,source_count=139,sum="));
        assert_eq!(decode_family(&text).unwrap(), (c, 139));
        let flipped = text.replacen("1,0,", "2,0,", 1);
        assert!(decode_family(&flipped).is_err());
        let short: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(decode_family(&short).is_err());
    }

    #[test]
    fn lock_excludes_second_open() {
        let dir = tempfile::tempdir().unwrap();
        let a = Cache::open(dir.path()).unwrap();
        assert!(Cache::open(dir.path()).is_err());
        drop(a);
        let _b = Cache::open(dir.path()).unwrap();
    }

    #[test]
    fn stale_lock_is_taken_over() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(".lock"), "4000000000\n").unwrap();
        if Path::new("/proc/self").exists() {
            Cache::open(dir.path()).unwrap();
        }
    }
}

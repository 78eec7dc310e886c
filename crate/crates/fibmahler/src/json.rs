//! JSON shapes shared by CLI output and the summary cache.

use anyhow::{anyhow, bail, Context};
use fibmahler_core::solver::{Breakpoint, BreakpointKind};
use fibmahler_core::verify::{summarize, ConjectureSummary, Status, VerificationCertificate};
use fibmahler_core::{ExponentVector, Real};
use serde_json::{json, Value};

use crate::format::g15;

pub fn vector(x: &ExponentVector) -> Value {
    json!(x.trimmed())
}

pub fn vectors<'a>(xs: impl IntoIterator<Item = &'a ExponentVector>) -> Value {
    Value::Array(xs.into_iter().map(vector).collect())
}

/// Floats go out as 15-significant-digit strings so output is byte-stable.
pub fn real(x: &Real) -> Value {
    num(x.to_f64())
}

pub fn num(x: f64) -> Value {
    Value::String(g15(x))
}

pub fn breakpoint(bp: &Breakpoint) -> Value {
    json!({
        "index": bp.index,
        "kind": match bp.kind { BreakpointKind::TPoint => "t", BreakpointKind::SPoint => "s" },
        "value": real(&bp.value),
        "bracket": [real(&bp.lo), real(&bp.hi)],
        "exact": bp.exact,
    })
}

pub fn certificate(c: &VerificationCertificate) -> Value {
    json!({
        "vector": vector(&c.target),
        "status": c.status.as_str(),
        "min_margin": num(c.min_margin),
        "head_cutoff": real(&c.head_cutoff),
        "tail_cutoff": c.tail_cutoff.as_ref().map(real),
        "grid_size": c.grid_size,
        "refinements": c.refinements,
        "witness": c.witness.as_ref().map(real),
    })
}

pub fn summary(s: &ConjectureSummary) -> Value {
    json!({
        "n": s.n,
        "status": s.status.as_str(),
        "vectors": vectors(s.certificates.iter().map(|c| &c.target)),
        "certificates": s.certificates.iter().map(certificate).collect::<Vec<_>>(),
    })
}

pub fn parse_status(s: &str) -> anyhow::Result<Status> {
    Ok(match s {
        "certified" => Status::Certified,
        "violated" => Status::Violated,
        "inconclusive" => Status::Inconclusive,
        other => bail!("unknown status `{other}`"),
    })
}

fn field<'a>(v: &'a Value, key: &str) -> anyhow::Result<&'a Value> {
    v.get(key).ok_or_else(|| anyhow!("missing field `{key}`"))
}

fn parse_real(v: &Value, bits: usize) -> anyhow::Result<Real> {
    let s = v.as_str().ok_or_else(|| anyhow!("expected a numeric string"))?;
    Ok(Real::from_f64(s.parse::<f64>()?, bits))
}

/// Rebuilds a summary written by [`summary`]. Cutoffs and witnesses come back
/// at double precision; they are only ever reported.
pub fn parse_summary(v: &Value, dim: usize, bits: usize) -> anyhow::Result<ConjectureSummary> {
    let n = field(v, "n")?.as_u64().context("n")? as usize;
    let status = parse_status(field(v, "status")?.as_str().context("status")?)?;
    let mut certs = Vec::new();
    for c in field(v, "certificates")?.as_array().context("certificates")? {
        let mut entries: Vec<u32> = field(c, "vector")?
            .as_array()
            .context("vector")?
            .iter()
            .map(|e| e.as_u64().map(|e| e as u32).context("entry"))
            .collect::<anyhow::Result<_>>()?;
        entries.resize(dim, 0);
        let opt = |key: &str| -> anyhow::Result<Option<Real>> {
            match field(c, key)? {
                Value::Null => Ok(None),
                x => parse_real(x, bits).map(Some),
            }
        };
        certs.push(VerificationCertificate {
            target: ExponentVector::new(entries, n),
            n,
            status: parse_status(field(c, "status")?.as_str().context("status")?)?,
            head_cutoff: parse_real(field(c, "head_cutoff")?, bits)?,
            tail_cutoff: opt("tail_cutoff")?,
            grid_size: field(c, "grid_size")?.as_u64().context("grid_size")? as usize,
            min_margin: field(c, "min_margin")?.as_str().context("min_margin")?.parse()?,
            witness: opt("witness")?,
            refinements: field(c, "refinements")?.as_u64().context("refinements")? as usize,
        });
    }
    let out = summarize(n, certs);
    if out.status != status {
        bail!("level {n}: stored status {} disagrees with its certificates", status.as_str());
    }
    Ok(out)
}

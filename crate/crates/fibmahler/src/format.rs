use std::io::Write;

use serde_json::Value;

use crate::config::OutputFormat;

/// `%.15g`: 15 significant digits, trailing zeros dropped.
pub fn g15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let m = trim(mant.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A header plus string rows, written as CSV or TSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, fmt: OutputFormat, out: &mut dyn Write) -> anyhow::Result<()> {
        let delim = match fmt {
            OutputFormat::Csv => b',',
            OutputFormat::Tsv => b'\t',
            OutputFormat::Json => anyhow::bail!("tables are not written as JSON"),
        };
        let mut w = csv::WriterBuilder::new()
            .delimiter(delim)
            .quote_style(if fmt == OutputFormat::Tsv {
                csv::QuoteStyle::Never
            } else {
                csv::QuoteStyle::Necessary
            })
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Writes either the table or the JSON document, depending on `fmt`.
pub fn emit(fmt: OutputFormat, table: &Table, json: impl FnOnce() -> Value, out: &mut dyn Write) -> anyhow::Result<()> {
    match fmt {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &json())?;
            writeln!(out)?;
            Ok(())
        }
        _ => table.write(fmt, out),
    }
}

/// Reads back a CSV or TSV table written by [`Table::write`].
pub fn read_table(text: &str, fmt: OutputFormat) -> anyhow::Result<Table> {
    let delim = if fmt == OutputFormat::Csv { b',' } else { b'\t' };
    let mut r = csv::ReaderBuilder::new()
        .delimiter(delim)
        .quoting(fmt == OutputFormat::Csv)
        .from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(Table { header, rows })
}

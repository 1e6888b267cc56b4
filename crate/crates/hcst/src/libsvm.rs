//! LIBSVM sparse text format.
//!
//! Each data line is `<label> <idx>:<val> ...` with whitespace separation.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use hcst_core::{Dataset, SparseInstance};

use crate::Error;

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_line(text: &str, line: usize) -> Result<(f64, SparseInstance), Error> {
    let mut tokens = text.split_whitespace();
    let label_tok = tokens.next().ok_or_else(|| parse_error(line, "missing label"))?;
    let label: f64 = label_tok
        .parse()
        .map_err(|_| parse_error(line, format!("invalid label '{label_tok}'")))?;
    if !label.is_finite() {
        return Err(parse_error(line, format!("non-finite label '{label_tok}'")));
    }
    let mut features = Vec::new();
    let mut prev = 0u32;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| parse_error(line, format!("expected <index>:<value>, got '{tok}'")))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| parse_error(line, format!("invalid feature index '{idx}'")))?;
        if idx == 0 {
            return Err(parse_error(line, "feature indices start at 1"));
        }
        if idx <= prev {
            return Err(parse_error(line, format!("non-increasing index {idx} after {prev}")));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| parse_error(line, format!("invalid feature value '{val}'")))?;
        if !val.is_finite() {
            return Err(parse_error(line, format!("non-finite value for index {idx}")));
        }
        features.push((idx, val));
        prev = idx;
    }
    let inst = SparseInstance::new(features).map_err(|e| parse_error(line, e.to_string()))?;
    Ok((label, inst))
}

/// Parse a whole LIBSVM document. Instance `i` is the `i`-th data line;
/// errors name the 1-based line number in `text`.
pub fn parse_libsvm(text: &str) -> Result<Dataset, Error> {
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (label, inst) = parse_line(trimmed, k + 1)?;
        labels.push(label);
        instances.push(inst);
    }
    if instances.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset::new(instances, labels)?)
}

/// Serialize `ds` so that [`parse_libsvm`] reproduces it exactly.
pub fn write_libsvm(ds: &Dataset) -> String {
    let mut out = String::new();
    for (x, label) in ds.instances().iter().zip(ds.labels()) {
        write!(out, "{label}").unwrap();
        for (idx, val) in x.features() {
            write!(out, " {idx}:{val}").unwrap();
        }
        out.push('\n');
    }
    out
}

//! Trace files: a `# n=<n> q=<q> iterations=<T>` header, then one
//! `<iteration>,<row_index>` line per access.

use std::fmt::Write as _;

use hcst_core::AccessTrace;

use crate::Error;

pub fn write_trace(trace: &AccessTrace) -> String {
    let mut out = String::with_capacity(16 * trace.len() + 48);
    writeln!(
        out,
        "# n={} q={} iterations={}",
        trace.n, trace.q, trace.total_iterations
    )
    .unwrap();
    for ev in &trace.events {
        writeln!(out, "{},{}", ev.iteration, ev.row_index).unwrap();
    }
    out
}

fn header_field(token: Option<&str>, key: &str) -> Result<u64, Error> {
    let bad = || Error::Parse {
        line: 1,
        msg: format!("trace header must be '# n=<n> q=<q> iterations=<T>', bad '{key}'"),
    };
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)
}

/// Parse and validate a trace file.
pub fn parse_trace(text: &str) -> Result<AccessTrace, Error> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| Error::Format("empty trace file".into()))?;
    let mut fields = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing '#' header".into(),
        })?
        .split_whitespace();
    let n = header_field(fields.next(), "n")? as usize;
    let q = header_field(fields.next(), "q")? as usize;
    let total = header_field(fields.next(), "iterations")?;

    let mut pairs = Vec::new();
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<u64>().ok()?, b.trim().parse::<usize>().ok()?)));
        let pair = parsed.ok_or_else(|| Error::Parse {
            line: no,
            msg: format!("expected <iteration>,<row_index>, got '{line}'"),
        })?;
        pairs.push(pair);
    }
    let mut trace = AccessTrace::from_pairs(n, q, pairs);
    trace.total_iterations = total;
    trace.validate()?;
    Ok(trace)
}

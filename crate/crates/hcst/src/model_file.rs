//! Text model files.
//!
//! ```text
//! svm_type c_svc
//! kernel_type gaussian
//! gamma 0.5
//! coef0 0
//! nr_class 3
//! total_sv 12
//! rho 0.1 -0.2 0.05
//! label 1 2 3
//! SV
//! 0.5 0 -1 1:0.25 3:1
//! ...
//! ```
//!
//! A binary classifier has one `rho` and one coefficient per support
//! vector, and its first label is the positive side. A one-vs-all
//! classifier has one `rho` and one coefficient column per label; a
//! coefficient of 0 means the vector is not a support vector of that model.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hcst_core::{Classifier, KernelKind, KernelParams, SparseInstance, SvmModel};

use crate::Error;

/// Regularization is not stored in model files; parsed models carry this
/// placeholder.
const PARSED_C: f64 = 1.0;

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_model(clf: &Classifier) -> String {
    let models = clf.models();
    let params = clf.params();
    // Support vectors of all models merged by identity, in index order.
    let mut svs: BTreeMap<usize, (&SparseInstance, Vec<f64>)> = BTreeMap::new();
    for (k, m) in models.iter().enumerate() {
        for ((&idx, sv), &coef) in m.sv_indices.iter().zip(&m.support_vectors).zip(&m.sv_coef) {
            svs.entry(idx).or_insert_with(|| (sv, vec![0.0; models.len()])).1[k] = coef;
        }
    }

    let mut out = String::new();
    writeln!(out, "svm_type c_svc").unwrap();
    writeln!(out, "kernel_type {}", params.kind).unwrap();
    writeln!(out, "gamma {}", params.gamma).unwrap();
    writeln!(out, "coef0 {}", params.coef0).unwrap();
    writeln!(out, "nr_class {}", clf.labels().len()).unwrap();
    writeln!(out, "total_sv {}", svs.len()).unwrap();
    writeln!(out, "rho {}", join(models.iter().map(|m| m.rho))).unwrap();
    writeln!(out, "label {}", join(clf.labels())).unwrap();
    writeln!(out, "SV").unwrap();
    for (sv, coefs) in svs.values() {
        out.push_str(&join(coefs.iter().copied()));
        for (idx, val) in sv.features() {
            write!(out, " {idx}:{val}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn format_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_reals(line: usize, tokens: &[&str]) -> Result<Vec<f64>, Error> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format_error(line, format!("invalid number '{t}'")))
        })
        .collect()
}

#[derive(Default)]
struct Header {
    kind: Option<KernelKind>,
    gamma: Option<f64>,
    coef0: Option<f64>,
    nr_class: Option<usize>,
    total_sv: Option<usize>,
    rho: Option<Vec<f64>>,
    label: Option<Vec<f64>>,
}

pub fn parse_model(text: &str) -> Result<Classifier, Error> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let mut h = Header::default();
    let mut sv_start = None;
    for (no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (key, rest) = (tokens[0], &tokens[1..]);
        let single = || -> Result<f64, Error> {
            match parse_reals(no, rest)?.as_slice() {
                [v] => Ok(*v),
                _ => Err(format_error(no, format!("'{key}' takes one value"))),
            }
        };
        match key {
            "svm_type" if rest == ["c_svc"] => {}
            "svm_type" => return Err(format_error(no, "only c_svc models are supported")),
            "kernel_type" => {
                let name = rest.first().ok_or_else(|| format_error(no, "missing kernel type"))?;
                h.kind = Some(
                    name.parse()
                        .map_err(|e: hcst_core::Error| format_error(no, e.to_string()))?,
                );
            }
            "gamma" => h.gamma = Some(single()?),
            "coef0" => h.coef0 = Some(single()?),
            "nr_class" | "total_sv" => {
                let v: usize = rest
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| format_error(no, format!("'{key}' takes a count")))?;
                if key == "nr_class" {
                    h.nr_class = Some(v);
                } else {
                    h.total_sv = Some(v);
                }
            }
            "rho" => h.rho = Some(parse_reals(no, rest)?),
            "label" => h.label = Some(parse_reals(no, rest)?),
            "SV" => {
                sv_start = Some(no);
                break;
            }
            other => return Err(format_error(no, format!("unknown header field '{other}'"))),
        }
    }
    let sv_line = sv_start.ok_or_else(|| Error::Format("model file has no SV section".into()))?;
    let missing = |f: &str| Error::Format(format!("model header lacks '{f}'"));
    let kind = h.kind.ok_or_else(|| missing("kernel_type"))?;
    let gamma = h.gamma.ok_or_else(|| missing("gamma"))?;
    let coef0 = h.coef0.unwrap_or(0.0);
    let labels = h.label.ok_or_else(|| missing("label"))?;
    let rhos = h.rho.ok_or_else(|| missing("rho"))?;
    let nr_class = h.nr_class.ok_or_else(|| missing("nr_class"))?;
    if labels.len() != nr_class || nr_class < 2 {
        return Err(format_error(
            sv_line,
            format!("{} labels for nr_class {nr_class}", labels.len()),
        ));
    }
    let binary = rhos.len() == 1;
    if !binary && rhos.len() != nr_class {
        return Err(format_error(
            sv_line,
            format!("{} rho values for nr_class {nr_class}", rhos.len()),
        ));
    }
    if binary && nr_class != 2 {
        return Err(format_error(sv_line, "a single rho requires nr_class 2"));
    }
    let params = KernelParams::new(kind, gamma, coef0, PARSED_C)?;

    let mut models: Vec<SvmModel> = rhos
        .iter()
        .map(|&rho| SvmModel {
            params,
            rho,
            sv_indices: Vec::new(),
            sv_coef: Vec::new(),
            support_vectors: Vec::new(),
        })
        .collect();
    let mut count = 0;
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < models.len() {
            return Err(format_error(no, format!("expected {} coefficients", models.len())));
        }
        let coefs = parse_reals(no, &tokens[..models.len()])?;
        let mut feats = Vec::new();
        for tok in &tokens[models.len()..] {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| format_error(no, format!("expected <index>:<value>, got '{tok}'")))?;
            let i: u32 = i
                .parse()
                .map_err(|_| format_error(no, format!("invalid index '{i}'")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| format_error(no, format!("invalid value '{v}'")))?;
            feats.push((i, v));
        }
        let sv = SparseInstance::new(feats).map_err(|e| format_error(no, e.to_string()))?;
        for (m, &c) in models.iter_mut().zip(&coefs) {
            if c != 0.0 {
                m.sv_indices.push(count);
                m.sv_coef.push(c);
                m.support_vectors.push(sv.clone());
            }
        }
        count += 1;
    }
    if let Some(total) = h.total_sv {
        if total != count {
            return Err(Error::Format(format!("total_sv is {total} but {count} vectors follow")));
        }
    }
    Ok(if binary {
        Classifier::Binary {
            model: models.pop().expect("one model"),
            labels: [labels[0], labels[1]],
        }
    } else {
        Classifier::OneVsAll { labels, models }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(f: &[(u32, f64)]) -> SparseInstance {
        SparseInstance::new(f.to_vec()).unwrap()
    }

    fn binary() -> Classifier {
        Classifier::Binary {
            model: SvmModel {
                params: KernelParams::gaussian(0.5, 100.0).unwrap(),
                rho: 0.25,
                sv_indices: vec![0, 3],
                sv_coef: vec![0.5, -0.5],
                support_vectors: vec![inst(&[(1, 1.0)]), inst(&[(1, -1.0), (4, 2.5)])],
            },
            labels: [1.0, -1.0],
        }
    }

    #[test]
    fn binary_layout() {
        let text = write_model(&binary());
        assert_eq!(
            text,
            "svm_type c_svc\nkernel_type gaussian\ngamma 0.5\ncoef0 0\nnr_class 2\ntotal_sv 2\n\
             rho 0.25\nlabel 1 -1\nSV\n0.5 1:1\n-0.5 1:-1 4:2.5\n"
        );
        let back = parse_model(&text).unwrap();
        let x = inst(&[(1, 0.3)]);
        assert_eq!(
            back.models()[0].decision_value(&x),
            binary().models()[0].decision_value(&x)
        );
        assert_eq!(write_model(&back), text);
    }

    #[test]
    fn one_vs_all_merges_vectors() {
        let sv = |i: usize, c: f64| (i, c);
        let make = |rho: f64, svs: &[(usize, f64)]| SvmModel {
            params: KernelParams::linear(1.0).unwrap(),
            rho,
            sv_indices: svs.iter().map(|s| s.0).collect(),
            sv_coef: svs.iter().map(|s| s.1).collect(),
            support_vectors: svs.iter().map(|s| inst(&[(1, s.0 as f64 + 1.0)])).collect(),
        };
        let clf = Classifier::OneVsAll {
            labels: vec![1.0, 2.0, 3.0],
            models: vec![
                make(0.0, &[sv(0, 1.0), sv(2, -1.0)]),
                make(1.0, &[sv(2, 0.5)]),
                make(2.0, &[sv(1, 0.25)]),
            ],
        };
        let text = write_model(&clf);
        assert!(text
            .contains("nr_class 3\ntotal_sv 3\nrho 0 1 2\nlabel 1 2 3\nSV\n1 0 0 1:1\n0 0 0.25 1:2\n-1 0.5 0 1:3\n"));
        let back = parse_model(&text).unwrap();
        assert_eq!(back.labels(), [1.0, 2.0, 3.0]);
        for (a, b) in back.models().iter().zip(clf.models()) {
            assert_eq!(a.sv_coef.len(), b.sv_coef.len());
        }
        assert_eq!(write_model(&back), text);
    }

    #[test]
    fn malformed_files() {
        assert!(parse_model("").is_err());
        assert!(parse_model("svm_type nu_svc\nSV\n").is_err());
        let good = write_model(&binary());
        assert!(parse_model(&good.replace("total_sv 2", "total_sv 3")).is_err());
        assert!(parse_model(&good.replace("gamma 0.5", "gamma x")).is_err());
        assert!(parse_model(&good.replace("kernel_type gaussian", "kernel_type poly")).is_err());
    }
}

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{PairModel, Standardizer, SvmModel};
use crate::error::{Error, Result};

/// First line of every model file.
pub const MODEL_MAGIC: &str = "SE2N-SVM v1";

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt(v)).collect::<Vec<_>>().join(",")
}

pub fn write_model(path: &Path, header: &str, model: &SvmModel) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_model_to(&mut out, header, model).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Text format: magic line, optional `#` comment lines, then `key value`
/// records, the standardized support vectors as CSV rows, and one block
/// per class pair listing `index,coef` rows into that pool.
pub fn write_model_to<W: Write>(mut out: W, header: &str, model: &SvmModel) -> std::io::Result<()> {
    writeln!(out, "{MODEL_MAGIC}")?;
    for line in header.lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "manifest_hash {}", model.manifest_hash)?;
    writeln!(out, "sigma {}", fmt(model.sigma))?;
    writeln!(out, "c {}", fmt(model.c))?;
    writeln!(out, "dim {}", model.dim())?;
    let classes: Vec<String> = model.classes.iter().map(|c| c.to_string()).collect();
    writeln!(out, "classes {}", classes.join(","))?;
    writeln!(out, "mean {}", join(&model.scaler.mean))?;
    writeln!(out, "std {}", join(&model.scaler.std))?;
    writeln!(out, "support_vectors {}", model.support_vectors.len())?;
    for sv in &model.support_vectors {
        writeln!(out, "{}", join(sv))?;
    }
    writeln!(out, "pairs {}", model.pairs.len())?;
    for p in &model.pairs {
        let constant = p.constant.map_or("none".to_string(), |c| c.to_string());
        writeln!(
            out,
            "pair {} {} {} {} {}",
            p.a,
            p.b,
            constant,
            fmt(p.bias),
            p.support.len()
        )?;
        for (s, c) in p.support.iter().zip(&p.coef) {
            writeln!(out, "{s},{}", fmt(*c))?;
        }
    }
    writeln!(out, "end")
}

pub fn read_model(path: &Path) -> Result<SvmModel> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model_from(BufReader::new(file))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        loop {
            self.number += 1;
            let line = self
                .inner
                .next()
                .ok_or_else(|| Error::format("model", "unexpected end of file"))?
                .map_err(|e| Error::format("model", e.to_string()))?;
            if !line.starts_with('#') {
                return Ok(line);
            }
        }
    }

    fn record(&mut self, key: &str) -> Result<String> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| {
                rest.strip_prefix(' ')
                    .or(if rest.is_empty() { Some("") } else { None })
            })
            .map(str::to_string)
            .ok_or_else(|| self.err(format!("expected `{key}`, found `{line}`")))
    }

    fn err(&self, detail: impl std::fmt::Display) -> Error {
        Error::format("model", format!("line {}: {detail}", self.number))
    }
}

fn parse<T: std::str::FromStr>(s: &str, lines: &Lines<impl BufRead>) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| lines.err(format!("cannot parse `{s}`")))
}

fn parse_list<T: std::str::FromStr>(s: &str, lines: &Lines<impl BufRead>) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| parse(v, lines)).collect()
}

pub fn read_model_from<R: BufRead>(input: R) -> Result<SvmModel> {
    let mut lines = Lines {
        inner: input.lines(),
        number: 0,
    };
    let magic = lines.next()?;
    if magic.trim_end() != MODEL_MAGIC {
        return Err(lines.err(format!("expected `{MODEL_MAGIC}`, found `{magic}`")));
    }
    let manifest_hash = lines.record("manifest_hash")?.trim().to_string();
    let sigma: f64 = parse(&lines.record("sigma")?, &lines)?;
    let c: f64 = parse(&lines.record("c")?, &lines)?;
    let dim: usize = parse(&lines.record("dim")?, &lines)?;
    let classes: Vec<usize> = parse_list(&lines.record("classes")?, &lines)?;
    let mean: Vec<f64> = parse_list(&lines.record("mean")?, &lines)?;
    let std: Vec<f64> = parse_list(&lines.record("std")?, &lines)?;
    if mean.len() != dim || std.len() != dim {
        return Err(lines.err("scaler length differs from dim"));
    }
    let nsv: usize = parse(&lines.record("support_vectors")?, &lines)?;
    let mut support_vectors = Vec::with_capacity(nsv);
    for _ in 0..nsv {
        let row: Vec<f64> = parse_list(&lines.next()?, &lines)?;
        if row.len() != dim {
            return Err(lines.err(format!(
                "support vector has {} values, expected {dim}",
                row.len()
            )));
        }
        support_vectors.push(row);
    }
    let count: usize = parse(&lines.record("pairs")?, &lines)?;
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let head = lines.record("pair")?;
        let f: Vec<&str> = head.split_whitespace().collect();
        if f.len() != 5 {
            return Err(lines.err("pair record needs five fields"));
        }
        let constant = if f[2] == "none" {
            None
        } else {
            Some(parse(f[2], &lines)?)
        };
        let count: usize = parse(f[4], &lines)?;
        let mut support = Vec::with_capacity(count);
        let mut coef = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines.next()?;
            let (s, c) = line
                .split_once(',')
                .ok_or_else(|| lines.err("expected `index,coef`"))?;
            let s: usize = parse(s, &lines)?;
            if s >= nsv {
                return Err(lines.err(format!("support index {s} out of range")));
            }
            support.push(s);
            coef.push(parse(c, &lines)?);
        }
        pairs.push(PairModel {
            a: parse(f[0], &lines)?,
            b: parse(f[1], &lines)?,
            constant,
            support,
            coef,
            bias: parse(f[3], &lines)?,
        });
    }
    if lines.next()?.trim() != "end" {
        return Err(lines.err("expected `end`"));
    }
    Ok(SvmModel {
        sigma,
        c,
        classes,
        scaler: Standardizer { mean, std },
        pairs,
        support_vectors,
        manifest_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{train_svm, SvmParams};

    fn model() -> SvmModel {
        let x: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                vec![
                    (i % 3) as f64 * 2.0 + 0.1 * i as f64,
                    1.0 / (1.0 + i as f64),
                ]
            })
            .collect();
        let y: Vec<usize> = (0..12).map(|i| i % 3).collect();
        train_svm(
            &x,
            &y,
            &SvmParams {
                sigma: 0.7,
                ..SvmParams::default()
            },
            "abc123",
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let mut buf = Vec::new();
        write_model_to(&mut buf, "tool 0.1\nflags --x", &m).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("SE2N-SVM v1\n# tool 0.1\n"));
        let back = read_model_from(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        for x in [[0.3, 0.2], [4.0, 0.9]] {
            assert_eq!(
                back.decision_values(&x).unwrap(),
                m.decision_values(&x).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(read_model_from("nope\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        write_model_to(&mut buf, "", &model()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated = &text[..text.len() - 4];
        assert!(read_model_from(truncated.as_bytes()).is_err());
        let broken = text.replace("sigma ", "sigma x");
        assert!(read_model_from(broken.as_bytes()).is_err());
    }
}

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{DescriptorKind, FeatureVector};
use crate::error::{Error, Result};

/// Writes feature vectors as CSV: a `# header` comment line, then
/// `label,kind,manifest_hash,f0,f1,...`, values with 17 significant digits.
pub fn write_features(path: &Path, header: &str, rows: &[FeatureVector]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_features_to(file, header, rows).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn write_features_to<W: Write>(mut out: W, header: &str, rows: &[FeatureVector]) -> Result<()> {
    let width = rows.first().map_or(0, |r| r.values.len());
    if let Some(bad) = rows.iter().find(|r| r.values.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: bad.values.len(),
        });
    }
    for line in header.lines() {
        writeln!(out, "# {line}").map_err(|e| Error::io("<features>", e))?;
    }
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut head = vec!["label".to_string(), "kind".into(), "manifest_hash".into()];
    head.extend((0..width).map(|i| format!("f{i}")));
    wtr.write_record(&head)?;
    for r in rows {
        let mut rec = Vec::with_capacity(width + 3);
        rec.push(r.label.map(|l| l.to_string()).unwrap_or_default());
        rec.push(r.kind.name().to_string());
        rec.push(r.manifest_hash.clone());
        rec.extend(r.values.iter().map(|v| format!("{v:.16e}")));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<features>", e))?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureVector>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_features_from(file)
}

pub fn read_features_from<R: std::io::Read>(input: R) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.len() < 3
        || &headers[0] != "label"
        || &headers[1] != "kind"
        || &headers[2] != "manifest_hash"
    {
        return Err(Error::format(
            "features",
            "header must start with label,kind,manifest_hash",
        ));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let label = if rec[0].is_empty() {
            None
        } else {
            Some(rec[0].parse().map_err(|_| {
                Error::format(
                    "features",
                    format!("row {}: bad label `{}`", line + 1, &rec[0]),
                )
            })?)
        };
        let kind: DescriptorKind = rec[1].parse()?;
        let values = rec
            .iter()
            .skip(3)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        Error::format("features", format!("row {}: bad value `{v}`", line + 1))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(FeatureVector {
            values,
            kind,
            manifest_hash: rec[2].to_string(),
            label,
        });
    }
    Ok(rows)
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;

use super::{to_grayscale, LabeledSample, Raster, RgbImage};
use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.csv";

/// One row of a dataset `manifest.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub filename: String,
    pub class_id: usize,
    pub pose_deg: String,
}

/// Result of scanning a COIL-style directory.
#[derive(Debug, Clone, Default)]
pub struct CoilLoad {
    pub samples: Vec<LabeledSample>,
    /// File names that did not match `obj<i>__<deg>.<ext>`.
    pub skipped: Vec<String>,
}

/// Writes an 8-bit binary PGM; intensities are rounded and clamped.
///
/// `comment` is emitted as a `#` line right after the magic number.
pub fn write_pgm(path: &Path, raster: &Raster, comment: Option<&str>) -> Result<()> {
    let mut bytes = Vec::with_capacity(raster.pixels().len() + 64);
    bytes.extend_from_slice(b"P5\n");
    if let Some(c) = comment {
        for line in c.lines() {
            bytes.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    bytes.extend_from_slice(format!("{} {}\n255\n", raster.width(), raster.height()).as_bytes());
    bytes.extend(
        raster
            .pixels()
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8),
    );
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_pgm(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|detail| Error::Decode {
        path: path.to_path_buf(),
        detail,
    })
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<Raster, String> {
    let mut pos = 0usize;
    let next_token = |pos: &mut usize| -> std::result::Result<String, String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = next_token(&mut pos)?;
    if magic != "P5" {
        return Err(format!("unsupported magic {magic:?}, expected P5"));
    }
    let num = |pos: &mut usize| -> std::result::Result<usize, String> {
        next_token(pos)?
            .parse::<usize>()
            .map_err(|e| format!("bad header number: {e}"))
    };
    let width = num(&mut pos)?;
    let height = num(&mut pos)?;
    let maxval = num(&mut pos)?;
    if maxval == 0 || maxval > 255 {
        return Err(format!("only 8-bit PGM is supported (maxval {maxval})"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let n = width * height;
    if bytes.len() < pos + n {
        return Err(format!(
            "expected {n} pixel bytes, found {}",
            bytes.len().saturating_sub(pos)
        ));
    }
    let scale = 255.0 / maxval as f64;
    let pixels = bytes[pos..pos + n]
        .iter()
        .map(|&b| b as f64 * scale)
        .collect();
    Raster::new(width, height, pixels).map_err(|e| e.to_string())
}

/// Reads a PGM (P5) or PNG (8-bit gray or RGB) file as a grayscale raster.
pub fn read_image(path: &Path) -> Result<Raster> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("pgm") => read_pgm(path),
        Some("png") => read_png(path),
        _ => Err(Error::Decode {
            path: path.to_path_buf(),
            detail: "unsupported extension (expected .pgm or .png)".into(),
        }),
    }
}

fn read_png(path: &Path) -> Result<Raster> {
    let decode_err = |detail: String| Error::Decode {
        path: path.to_path_buf(),
        detail,
    };
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| decode_err(e.to_string()))?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    if img.color().has_color() {
        let rgb = img.into_rgb8();
        let mut chans = RgbImage {
            width,
            height,
            red: Vec::with_capacity(width * height),
            green: Vec::with_capacity(width * height),
            blue: Vec::with_capacity(width * height),
        };
        for p in rgb.pixels() {
            chans.red.push(p[0] as f64);
            chans.green.push(p[1] as f64);
            chans.blue.push(p[2] as f64);
        }
        to_grayscale(&chans)
    } else {
        let gray = img.into_luma8();
        Raster::new(
            width,
            height,
            gray.into_raw().into_iter().map(f64::from).collect(),
        )
    }
}

/// Splits `obj<i>__<deg>.<ext>` into `(i, deg)`.
pub fn parse_coil_name(name: &str) -> Option<(usize, String)> {
    let (stem, ext) = name.rsplit_once('.')?;
    if !matches!(ext.to_ascii_lowercase().as_str(), "png" | "pgm") {
        return None;
    }
    let rest = stem.strip_prefix("obj")?;
    let (idx, deg) = rest.split_once("__")?;
    let idx: usize = idx.parse().ok()?;
    if idx == 0 || deg.is_empty() || deg.parse::<f64>().is_err() {
        return None;
    }
    Some((idx, deg.to_string()))
}

fn sorted_file_names(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry
            .file_type()
            .map_err(|e| Error::io(entry.path(), e))?
            .is_file()
        {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    Ok(names)
}

/// Loads a COIL-100 style directory. Class ids are the object index minus one.
///
/// Files that do not follow the naming scheme are skipped with a warning;
/// `manifest.csv` is ignored silently.
pub fn load_coil_directory(dir: &Path) -> Result<CoilLoad> {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for name in sorted_file_names(dir)? {
        if name == MANIFEST_NAME {
            continue;
        }
        match parse_coil_name(&name) {
            Some((idx, deg)) => entries.push((name, idx - 1, deg)),
            None => {
                warn!("skipping {name}: not of the form obj<i>__<deg>.png");
                skipped.push(name);
            }
        }
    }
    let samples = entries
        .into_par_iter()
        .map(|(name, class_id, deg)| {
            read_image(&dir.join(&name)).map(|raster| LabeledSample {
                raster,
                class_id,
                pose_tag: Some(deg),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoilLoad { samples, skipped })
}

pub fn write_manifest(path: &Path, header: &str, rows: &[ManifestRow]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# {header}").map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    wtr.write_record(["filename", "class_id", "pose_deg"])?;
    for row in rows {
        wtr.write_record([
            row.filename.as_str(),
            &row.class_id.to_string(),
            row.pose_deg.as_str(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::format(
                "manifest",
                format!("expected 3 columns, got {}", rec.len()),
            ));
        }
        let class_id = rec[1]
            .parse()
            .map_err(|_| Error::format("manifest", format!("bad class id {:?}", &rec[1])))?;
        rows.push(ManifestRow {
            filename: rec[0].to_string(),
            class_id,
            pose_deg: rec[2].to_string(),
        });
    }
    Ok(rows)
}

/// Loads a dataset directory: through `manifest.csv` when present, otherwise
/// by COIL naming. Returns the samples and the file names, in load order.
pub fn load_dataset_dir(dir: &Path) -> Result<(Vec<LabeledSample>, Vec<String>)> {
    let manifest: PathBuf = dir.join(MANIFEST_NAME);
    if manifest.is_file() {
        let rows = read_manifest(&manifest)?;
        let samples = rows
            .par_iter()
            .map(|row| {
                read_image(&dir.join(&row.filename)).map(|raster| LabeledSample {
                    raster,
                    class_id: row.class_id,
                    pose_tag: Some(row.pose_deg.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((samples, rows.into_iter().map(|r| r.filename).collect()))
    } else {
        let load = load_coil_directory(dir)?;
        let mut names: Vec<String> = sorted_file_names(dir)?
            .into_iter()
            .filter(|n| parse_coil_name(n).is_some())
            .collect();
        names.truncate(load.samples.len());
        Ok((load.samples, names))
    }
}

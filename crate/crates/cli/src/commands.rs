use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use se2n_core::checks::{run_suite, CheckReport};
use se2n_core::classify::{
    default_sigma_grid, read_model, run_trials, select_sigma, train_clean_test_noisy, train_svm,
    write_model, EvalReport, NoisyProtocol, Split, SvmParams,
};
use se2n_core::descriptors::io::{read_features, write_features};
use se2n_core::descriptors::{extract_batch, DescriptorConfig, FeatureVector};
use se2n_core::imagecore::synth_dataset;
use se2n_core::imagecore::{
    load_dataset_dir, write_manifest, write_pgm, ManifestRow, MANIFEST_NAME,
};

use crate::args::{
    CheckArgs, DescriptorArgs, EvalArgs, ExtractArgs, PredictArgs, SvmArgs, SynthArgs, TrainArgs,
};
use crate::overlay::Overlay;
use crate::{ChecksFailed, UsageError};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_C: f64 = 10.0;

/// Comment line opening every output file.
fn header(argv: &[String], manifest_hash: &str) -> String {
    format!(
        "se2n {VERSION} | args: {} | manifest_hash={manifest_hash}",
        argv.join(" ")
    )
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `path` with `suffix` appended to its file name.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

/// Runs `write` against a temporary sibling of `path` and renames it into
/// place; on failure the temporary file is removed.
fn write_atomically(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let tmp = sibling(path, ".partial");
    match write(&tmp).and_then(|()| {
        fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))
    }) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("{what}: cannot parse `{v}`")))
        })
        .collect()
}

pub fn descriptor_config(d: &DescriptorArgs, o: &Overlay) -> Result<DescriptorConfig> {
    let mut c = DescriptorConfig::default();
    if let Some(k) = o.pick::<String>(d.kind.clone(), "kind")? {
        c.kind = k
            .parse()
            .map_err(|e: se2n_core::Error| usage(e.to_string()))?;
    }
    if let Some(n) = o.pick(d.n, "N")? {
        c.n = n;
    }
    if let Some(w) = o.pick(d.window, "window")? {
        c.window = w;
    }
    if let Some(s) = o.pick(d.lattice_step, "lattice_step")? {
        c.lattice_step = s;
    }
    if let Some(p) = o.pick(d.padding, "padding")? {
        c.padding = p;
    }
    if let Some(e) = o.pick::<String>(d.encoding.clone(), "encoding")? {
        c.encoding = e
            .parse()
            .map_err(|e: se2n_core::Error| usage(e.to_string()))?;
    }
    c.center = if d.no_center {
        false
    } else {
        o.pick(None, "center")?.unwrap_or(true)
    };
    if !(c.lattice_step > 0.0 && c.lattice_step.is_finite()) {
        return Err(usage("lattice step must be positive"));
    }
    c.validate().map_err(|e| usage(e.to_string()))?;
    Ok(c)
}

struct SvmChoice {
    params: SvmParams,
    sigma_grid: Option<Vec<f64>>,
    seed: u64,
}

fn svm_choice(s: &SvmArgs, o: &Overlay, dim: usize) -> Result<SvmChoice> {
    let c = o.pick(s.c, "C")?.unwrap_or(DEFAULT_C);
    if !(c > 0.0 && c.is_finite()) {
        return Err(usage("C must be positive"));
    }
    let seed = o.pick(s.seed, "seed")?.unwrap_or(0);
    let sigma: Option<f64> = o.pick(s.sigma, "sigma")?;
    let grid = match s.sigma_grid.as_deref().or(o.raw("sigma_grid")) {
        Some(text) => Some(parse_list(text, "sigma grid")?),
        None => None,
    };
    if sigma.is_some() && grid.is_some() {
        return Err(usage("give either a fixed sigma or a sigma grid, not both"));
    }
    if let Some(g) = &grid {
        if g.is_empty() || g.iter().any(|&v| v <= 0.0) {
            return Err(usage("sigma grid values must be positive"));
        }
    }
    let params = SvmParams {
        sigma: sigma.unwrap_or(1.0),
        c,
        ..SvmParams::default()
    };
    if params.sigma <= 0.0 {
        return Err(usage("sigma must be positive"));
    }
    let sigma_grid = if sigma.is_some() {
        None
    } else {
        Some(grid.unwrap_or_else(|| default_sigma_grid(dim)))
    };
    Ok(SvmChoice {
        params,
        sigma_grid,
        seed,
    })
}

pub fn synth(a: &SynthArgs, argv: &[String]) -> Result<()> {
    let samples =
        synth_dataset(a.classes, a.poses, a.size, a.seed).map_err(|e| usage(e.to_string()))?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let head = header(argv, "none");
    let rows: Vec<ManifestRow> = samples
        .iter()
        .map(|s| {
            let pose = s.pose_tag.clone().unwrap_or_default();
            ManifestRow {
                filename: format!("obj{}__{}.pgm", s.class_id + 1, pose),
                class_id: s.class_id,
                pose_deg: pose,
            }
        })
        .collect();
    samples
        .par_iter()
        .zip(&rows)
        .try_for_each(|(s, r)| write_pgm(&a.out.join(&r.filename), &s.raster, Some(&head)))?;
    write_manifest(&a.out.join(MANIFEST_NAME), &head, &rows)?;
    println!("wrote {} images to {}", rows.len(), a.out.display());
    Ok(())
}

pub fn extract(a: &ExtractArgs, config: Option<&Path>, argv: &[String]) -> Result<()> {
    let overlay = Overlay::load(config)?;
    let cfg = descriptor_config(&a.descriptor, &overlay)?;
    let grid = cfg.build_grid().map_err(|e| usage(e.to_string()))?;
    let (samples, _) =
        load_dataset_dir(&a.input).with_context(|| format!("loading {}", a.input.display()))?;
    if samples.is_empty() {
        bail!("no images found in {}", a.input.display());
    }
    let features = extract_batch(&samples, &grid, &cfg)?;
    let hash = cfg.manifest_hash(&grid);
    let head = header(argv, &hash);
    write_atomically(&a.out, |tmp| Ok(write_features(tmp, &head, &features)?))?;
    if cfg.kind.is_spectral() {
        for (suffix, body) in [
            (".grid_points.csv", grid.points_csv()),
            (".grid_pairs.csv", grid.pairs_csv()),
        ] {
            let path = sibling(&a.out, suffix);
            fs::write(&path, format!("# {head}\n{body}"))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    println!(
        "{} rows x {} features ({}) -> {}",
        features.len(),
        features[0].values.len(),
        cfg.kind,
        a.out.display()
    );
    Ok(())
}

/// Rows, optional labels and the shared layout hash of a feature file.
type FeatureTable = (Vec<Vec<f64>>, Vec<Option<usize>>, String);

/// Feature rows, labels and the shared layout hash of a feature file.
fn load_labelled(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<usize>, String)> {
    let features = read_features(path).with_context(|| format!("reading {}", path.display()))?;
    let (rows, labels, hash) = split_features(features, path)?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| anyhow::anyhow!("{}: row {} has no label", path.display(), i + 1))
        })
        .collect::<Result<_>>()?;
    Ok((rows, labels, hash))
}

fn split_features(features: Vec<FeatureVector>, path: &Path) -> Result<FeatureTable> {
    let Some(first) = features.first() else {
        bail!("{} contains no feature rows", path.display());
    };
    let hash = first.manifest_hash.clone();
    if features.iter().any(|f| f.manifest_hash != hash) {
        bail!("{} mixes feature layouts", path.display());
    }
    let labels = features.iter().map(|f| f.label).collect();
    Ok((
        features.into_iter().map(|f| f.values).collect(),
        labels,
        hash,
    ))
}

pub fn train(a: &TrainArgs, config: Option<&Path>, argv: &[String]) -> Result<()> {
    let overlay = Overlay::load(config)?;
    let (rows, labels, hash) = load_labelled(&a.features)?;
    let choice = svm_choice(&a.svm, &overlay, rows[0].len())?;
    let sigma = select_sigma(
        &rows,
        &labels,
        &choice.params,
        choice.sigma_grid.as_deref(),
        choice.seed,
    )?;
    let params = SvmParams {
        sigma,
        ..choice.params
    };
    let model = train_svm(&rows, &labels, &params, &hash)?;
    write_model(&a.model, &header(argv, &hash), &model)?;
    let svs: usize = model.pairs.iter().map(|p| p.support.len()).sum();
    println!(
        "trained {} pair classifiers on {} rows (sigma {sigma:.6}, C {}, {} support entries) -> {}",
        model.pairs.len(),
        rows.len(),
        params.c,
        svs,
        a.model.display()
    );
    Ok(())
}

pub fn predict(a: &PredictArgs, argv: &[String]) -> Result<()> {
    let model = read_model(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let features =
        read_features(&a.features).with_context(|| format!("reading {}", a.features.display()))?;
    let (rows, labels, hash) = split_features(features, &a.features)?;
    if hash != model.manifest_hash {
        bail!(
            "feature layout {hash} does not match the model's {}",
            model.manifest_hash
        );
    }
    let predicted = model.predict_batch(&rows)?;
    write_atomically(&a.out, |tmp| {
        let mut out = std::io::BufWriter::new(fs::File::create(tmp)?);
        writeln!(out, "# {}", header(argv, &hash))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["index", "label", "predicted"])?;
        for (i, (l, p)) in labels.iter().zip(&predicted).enumerate() {
            w.write_record([
                i.to_string(),
                l.map(|v| v.to_string()).unwrap_or_default(),
                p.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let known: Vec<(usize, usize)> = labels
        .iter()
        .zip(&predicted)
        .filter_map(|(l, &p)| l.map(|l| (l, p)))
        .collect();
    if !known.is_empty() {
        let correct = known.iter().filter(|(l, p)| l == p).count();
        println!(
            "accuracy {:.2}% ({correct}/{})",
            100.0 * correct as f64 / known.len() as f64,
            known.len()
        );
    }
    println!("{} predictions -> {}", predicted.len(), a.out.display());
    Ok(())
}

fn write_csv_report(path: &Path, head: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_atomically(path, |tmp| {
        let mut out = std::io::BufWriter::new(fs::File::create(tmp)?);
        writeln!(out, "# {head}")?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn confusion_rows(total: &EvalReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut columns = vec!["true\\predicted".to_string()];
    columns.extend(total.classes.iter().map(|c| c.to_string()));
    let rows = total
        .classes
        .iter()
        .zip(&total.confusion)
        .map(|(c, row)| {
            let mut r = vec![c.to_string()];
            r.extend(row.iter().map(|v| v.to_string()));
            r
        })
        .collect();
    (columns, rows)
}

fn pooled(reports: &[EvalReport]) -> EvalReport {
    let (mut truth, mut predicted) = (Vec::new(), Vec::new());
    for r in reports {
        for (t, row) in r.confusion.iter().enumerate() {
            for (p, &count) in row.iter().enumerate() {
                truth.extend(std::iter::repeat_n(r.classes[t], count));
                predicted.extend(std::iter::repeat_n(r.classes[p], count));
            }
        }
    }
    EvalReport::from_predictions(&truth, &predicted)
}

pub fn eval(a: &EvalArgs, config: Option<&Path>, argv: &[String]) -> Result<()> {
    let overlay = Overlay::load(config)?;
    if a.train_clean_test_noisy {
        return eval_noisy(a, &overlay, argv);
    }
    let path = a
        .features
        .as_ref()
        .ok_or_else(|| usage("--features is required"))?;
    let split = Split {
        train_ratio: overlay.pick(a.ratio, "ratio")?.unwrap_or(0.75),
        seed: overlay.pick(a.svm.seed, "seed")?.unwrap_or(0),
        stratified: !a.no_stratify,
        trials: overlay.pick(a.trials, "trials")?.unwrap_or(5),
    };
    if !(split.train_ratio > 0.0 && split.train_ratio < 1.0) {
        return Err(usage("--ratio must lie strictly between 0 and 1"));
    }
    if split.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let (rows, labels, hash) = load_labelled(path)?;
    let choice = svm_choice(&a.svm, &overlay, rows[0].len())?;
    let summary = run_trials(
        &rows,
        &labels,
        &split,
        &choice.params,
        choice.sigma_grid.as_deref(),
    )?;
    let mut table = Vec::new();
    for (t, (r, sigma)) in summary.reports.iter().zip(&summary.sigmas).enumerate() {
        println!(
            "trial {t}: accuracy {:.2}% ({}/{}), sigma {sigma:.6}",
            100.0 * r.accuracy,
            r.correct,
            r.total
        );
        table.push(vec![
            t.to_string(),
            format!("{sigma:.6e}"),
            format!("{:.4}", 100.0 * r.accuracy),
            r.correct.to_string(),
            r.total.to_string(),
        ]);
    }
    let (mean, std) = (
        100.0 * summary.mean_accuracy(),
        100.0 * summary.std_accuracy(),
    );
    println!(
        "mean accuracy over {} trials: {mean:.2}% (std {std:.2})",
        split.trials
    );
    table.push(vec![
        "mean".into(),
        String::new(),
        format!("{mean:.4}"),
        String::new(),
        String::new(),
    ]);
    table.push(vec![
        "std".into(),
        String::new(),
        format!("{std:.4}"),
        String::new(),
        String::new(),
    ]);
    if let Some(out) = &a.out {
        let head = header(argv, &hash);
        write_csv_report(
            out,
            &head,
            &["trial", "sigma", "accuracy_percent", "correct", "total"],
            &table,
        )?;
        let (cols, rows) = confusion_rows(&pooled(&summary.reports));
        let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
        write_csv_report(&sibling(out, ".confusion.csv"), &head, &cols, &rows)?;
    }
    Ok(())
}

fn eval_noisy(a: &EvalArgs, overlay: &Overlay, argv: &[String]) -> Result<()> {
    let input = a
        .input
        .as_ref()
        .ok_or_else(|| usage("--in is required with --train-clean-test-noisy"))?;
    let levels = parse_list(&a.noise_sd, "noise levels")?;
    if levels.iter().any(|&s| s < 0.0) {
        return Err(usage("noise levels must be >= 0"));
    }
    if a.views == 0 {
        return Err(usage("--views must be at least 1"));
    }
    let cfg = descriptor_config(&a.descriptor, overlay)?;
    let grid = cfg.build_grid().map_err(|e| usage(e.to_string()))?;
    let choice = svm_choice(&a.svm, overlay, cfg.feature_len(&grid))?;
    let (samples, _) =
        load_dataset_dir(input).with_context(|| format!("loading {}", input.display()))?;
    if samples.is_empty() {
        bail!("no images found in {}", input.display());
    }
    let protocol = NoisyProtocol {
        noise_levels: levels,
        views_per_class: a.views,
        seed: choice.seed,
        params: choice.params,
        sigma_grid: choice.sigma_grid,
    };
    let results = train_clean_test_noisy(&samples, &grid, &cfg, &protocol)?;
    let mut table = Vec::new();
    for (s_d, r) in &results {
        println!(
            "noise sd {s_d}: accuracy {:.2}% ({}/{})",
            100.0 * r.accuracy,
            r.correct,
            r.total
        );
        table.push(vec![
            s_d.to_string(),
            format!("{:.4}", 100.0 * r.accuracy),
            r.correct.to_string(),
            r.total.to_string(),
        ]);
    }
    if let Some(out) = &a.out {
        let head = header(argv, &cfg.manifest_hash(&grid));
        write_csv_report(
            out,
            &head,
            &["noise_sd", "accuracy_percent", "correct", "total"],
            &table,
        )?;
    }
    Ok(())
}

/// Identity name without a trailing `_<n>` or `_h<n>` index.
fn group_name(identity: &str) -> &str {
    let stem = identity.trim_end_matches(|c: char| c.is_ascii_digit());
    if stem.len() == identity.len() {
        return identity;
    }
    stem.strip_suffix("_h")
        .or_else(|| stem.strip_suffix('_'))
        .unwrap_or(identity)
}

fn summarize(report: &CheckReport) {
    let mut groups: Vec<String> = report
        .rows
        .iter()
        .map(|r| group_name(&r.identity).to_string())
        .collect();
    groups.sort();
    groups.dedup();
    for g in groups {
        let rows: Vec<_> = report.select(&g).collect();
        let gated = rows.iter().any(|r| r.tolerance.is_some());
        let status = if !gated {
            "info"
        } else if rows.iter().all(|r| r.passed()) {
            "pass"
        } else {
            "FAIL"
        };
        eprintln!(
            "{status:>4}  {g:<36} worst {:.3e}  ({} rows)",
            report.worst(&g),
            rows.len()
        );
    }
}

pub fn check(a: &CheckArgs, argv: &[String]) -> Result<()> {
    let report = run_suite(a.suite, a.seed)?;
    let head = header(argv, "none");
    match &a.out {
        Some(path) => write_atomically(path, |tmp| Ok(report.write_csv(tmp, &head)?))?,
        None => report.write_csv_to(std::io::stdout().lock(), &head)?,
    }
    summarize(&report);
    let failures = report.failures().len();
    if failures > 0 {
        return Err(ChecksFailed(failures).into());
    }
    eprintln!(
        "suite {}: all {} rows within tolerance",
        a.suite,
        report.rows.len()
    );
    Ok(())
}

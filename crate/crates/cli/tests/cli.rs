use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn se2n(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_se2n"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = se2n(args, cwd);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn synth_small(cwd: &Path) {
    ok(
        &[
            "synth",
            "--classes",
            "3",
            "--poses",
            "8",
            "--size",
            "64",
            "--seed",
            "4",
            "--out",
            "ds",
        ],
        cwd,
    );
}

/// Data rows of a CSV file (comment lines and header skipped).
fn data_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn feature_width(path: &Path) -> usize {
    data_rows(path)[0].len() - 3
}

#[test]
fn synth_writes_images_and_manifest_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let pgms = fs::read_dir(dir.path().join("ds"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "pgm")
        })
        .count();
    assert_eq!(pgms, 24);
    assert_eq!(data_rows(&dir.path().join("ds/manifest.csv")).len(), 24);
    ok(
        &[
            "synth",
            "--classes",
            "3",
            "--poses",
            "8",
            "--size",
            "64",
            "--seed",
            "4",
            "--out",
            "again",
        ],
        dir.path(),
    );
    let a = fs::read(dir.path().join("ds/obj2__45.pgm")).unwrap();
    let b = fs::read(dir.path().join("again/obj2__45.pgm")).unwrap();
    assert_eq!(
        a[a.len() - 64 * 64..],
        b[b.len() - 64 * 64..],
        "pixel data differs between runs"
    );
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(se2n(&["synth"], dir.path()).status.code(), Some(2));
    assert_eq!(
        se2n(&["check", "--suite", "nope"], dir.path())
            .status
            .code(),
        Some(2)
    );
    synth_small(dir.path());
    let bad_kind = se2n(
        &["extract", "--in", "ds", "--out", "f.csv", "--kind", "XYZ"],
        dir.path(),
    );
    assert_eq!(bad_kind.status.code(), Some(2));
    fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    let bad_conf = se2n(
        &[
            "--config", "bad.conf", "extract", "--in", "ds", "--out", "f.csv",
        ],
        dir.path(),
    );
    assert_eq!(bad_conf.status.code(), Some(2));
    assert!(!dir.path().join("f.csv").exists());
}

#[test]
fn extract_lengths_and_concatenation() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    let mut widths = std::collections::BTreeMap::new();
    for kind in ["PS", "BS", "RPS", "RBS", "RPS+BS", "HU"] {
        let out = format!("{kind}.csv");
        ok(
            &["extract", "--in", "ds", "--out", &out, "--kind", kind],
            dir.path(),
        );
        assert_eq!(data_rows(&dir.path().join(&out)).len(), 24);
        widths.insert(kind, feature_width(&dir.path().join(&out)));
    }
    assert_eq!(widths["PS"], 55);
    assert_eq!(widths["BS"], 544);
    assert_eq!(widths["RPS"], 660);
    assert_eq!(widths["RBS"], 3264);
    assert_eq!(widths["RPS+BS"], widths["RPS"] + widths["BS"]);
    assert_eq!(widths["HU"], 7);
    assert!(dir.path().join("RBS.csv.grid_points.csv").exists());
    assert!(dir.path().join("RBS.csv.grid_pairs.csv").exists());
    assert!(!dir.path().join("HU.csv.grid_points.csv").exists());
}

#[test]
fn config_overlay_applies_unless_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    fs::write(
        dir.path().join("o.conf"),
        "# overlay\nkind = PS\nencoding = modulus\n",
    )
    .unwrap();
    ok(
        &[
            "--config", "o.conf", "extract", "--in", "ds", "--out", "a.csv",
        ],
        dir.path(),
    );
    assert_eq!(feature_width(&dir.path().join("a.csv")), 55);
    ok(
        &[
            "--config", "o.conf", "extract", "--in", "ds", "--out", "b.csv", "--kind", "BS",
        ],
        dir.path(),
    );
    assert_eq!(feature_width(&dir.path().join("b.csv")), 272);
}

#[test]
fn unreadable_image_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    fs::write(dir.path().join("ds/obj1__0.pgm"), b"P5\n64 64\n255\nshort").unwrap();
    let out = se2n(&["extract", "--in", "ds", "--out", "f.csv"], dir.path());
    assert_ne!(out.status.code(), Some(0));
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(leftovers, vec![std::ffi::OsString::from("ds")]);
}

#[test]
fn train_predict_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    synth_small(dir.path());
    ok(
        &["extract", "--in", "ds", "--out", "f.csv", "--kind", "BS"],
        dir.path(),
    );
    ok(
        &["train", "--features", "f.csv", "--model", "m.txt"],
        dir.path(),
    );
    let stdout = ok(
        &[
            "predict",
            "--features",
            "f.csv",
            "--model",
            "m.txt",
            "--out",
            "p.csv",
        ],
        dir.path(),
    );
    assert!(stdout.contains("accuracy 100.00%"), "{stdout}");
    let preds = data_rows(&dir.path().join("p.csv"));
    assert_eq!(preds.len(), 24);
    assert!(preds.iter().all(|r| r[1] == r[2]));

    ok(
        &["extract", "--in", "ds", "--out", "ps.csv", "--kind", "PS"],
        dir.path(),
    );
    let mismatch = se2n(
        &[
            "predict",
            "--features",
            "ps.csv",
            "--model",
            "m.txt",
            "--out",
            "q.csv",
        ],
        dir.path(),
    );
    assert_eq!(mismatch.status.code(), Some(1));

    ok(
        &[
            "eval",
            "--features",
            "f.csv",
            "--trials",
            "3",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    let report = data_rows(&dir.path().join("r.csv"));
    assert_eq!(report.len(), 5);
    assert_eq!(report[3][0], "mean");
    let confusion = data_rows(&dir.path().join("r.csv.confusion.csv"));
    assert_eq!(confusion.len(), 3);

    ok(
        &[
            "eval",
            "--train-clean-test-noisy",
            "--in",
            "ds",
            "--kind",
            "PS",
            "--views",
            "2",
            "--out",
            "n.csv",
        ],
        dir.path(),
    );
    let noisy = data_rows(&dir.path().join("n.csv"));
    assert_eq!(
        noisy.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(),
        ["5", "10", "20"]
    );
    assert!(noisy.iter().all(|r| r[3] == "6"));
}

#[test]
fn check_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["check", "--suite", "identities", "--out", "c.csv"],
        dir.path(),
    );
    let text = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("# se2n "));
    let rows = data_rows(&dir.path().join("c.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().any(|r| r[5] == "true"));
    assert!(rows
        .iter()
        .all(|r| r[5] == "true" || (r[5] == "info" && r[4].is_empty())));
    let stdout = ok(&["check", "--suite", "genericity"], dir.path());
    assert!(stdout.contains("generic_fraction_zero_image"));
}

#[test]
fn thread_count_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_se2n"))
        .args(["check", "--suite", "identities"])
        .env("SE2N_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

use se2n_core::classify::{
    default_sigma_grid, read_model, run_trials, train_clean_test_noisy, train_svm, write_model,
    NoisyProtocol, Split, SvmParams,
};
use se2n_core::descriptors::io::{read_features, write_features};
use se2n_core::descriptors::{extract_batch, DescriptorConfig, DescriptorKind};
use se2n_core::imagecore::{
    load_dataset_dir, synth_dataset, write_manifest, write_pgm, ManifestRow, MANIFEST_NAME,
};

#[test]
fn every_kind_produces_its_declared_length() {
    let samples = synth_dataset(2, 2, 64, 3).unwrap();
    for kind in DescriptorKind::ALL {
        let cfg = DescriptorConfig::with_kind(kind);
        let grid = cfg.build_grid().unwrap();
        let features = extract_batch(&samples, &grid, &cfg).unwrap();
        for f in &features {
            assert_eq!(f.values.len(), cfg.feature_len(&grid), "{kind}");
            assert!(f.values.iter().all(|v| v.is_finite()), "{kind}");
        }
    }
}

#[test]
fn disk_round_trip_preserves_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let samples = synth_dataset(3, 8, 64, 11).unwrap();
    let rows: Vec<ManifestRow> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| ManifestRow {
            filename: format!("img{i}.pgm"),
            class_id: s.class_id,
            pose_deg: "0".into(),
        })
        .collect();
    for (s, r) in samples.iter().zip(&rows) {
        write_pgm(&dir.path().join(&r.filename), &s.raster, None).unwrap();
    }
    write_manifest(&dir.path().join(MANIFEST_NAME), "test", &rows).unwrap();
    let (loaded, _) = load_dataset_dir(dir.path()).unwrap();
    assert_eq!(loaded.len(), samples.len());

    let cfg = DescriptorConfig::with_kind(DescriptorKind::Bs);
    let grid = cfg.build_grid().unwrap();
    let hash = cfg.manifest_hash(&grid);
    let features = extract_batch(&loaded, &grid, &cfg).unwrap();
    let path = dir.path().join("features.csv");
    write_features(&path, "test", &features).unwrap();
    let back = read_features(&path).unwrap();
    assert_eq!(back, features);

    let x: Vec<Vec<f64>> = back.iter().map(|f| f.values.clone()).collect();
    let y: Vec<usize> = back.iter().map(|f| f.label.unwrap()).collect();
    let params = SvmParams {
        sigma: default_sigma_grid(x[0].len())[2],
        ..SvmParams::default()
    };
    let model = train_svm(&x, &y, &params, &hash).unwrap();
    let model_path = dir.path().join("model.txt");
    write_model(&model_path, "test", &model).unwrap();
    let reread = read_model(&model_path).unwrap();
    assert_eq!(reread.manifest_hash, hash);
    assert_eq!(
        reread.predict_batch(&x).unwrap(),
        model.predict_batch(&x).unwrap()
    );
}

#[test]
fn small_benchmark_separates_classes() {
    let samples = synth_dataset(4, 12, 64, 5).unwrap();
    let cfg = DescriptorConfig::with_kind(DescriptorKind::Rbs);
    let grid = cfg.build_grid().unwrap();
    let features = extract_batch(&samples, &grid, &cfg).unwrap();
    let x: Vec<Vec<f64>> = features.into_iter().map(|f| f.values).collect();
    let y: Vec<usize> = samples.iter().map(|s| s.class_id).collect();
    let split = Split {
        trials: 2,
        ..Split::default()
    };
    let sigmas = default_sigma_grid(x[0].len());
    let summary = run_trials(&x, &y, &split, &SvmParams::default(), Some(&sigmas)).unwrap();
    assert_eq!(summary.reports.len(), 2);
    assert!(
        summary.mean_accuracy() >= 0.9,
        "{}",
        summary.mean_accuracy()
    );
}

#[test]
fn noisy_protocol_is_deterministic_and_reuses_views() {
    let samples = synth_dataset(3, 6, 64, 2).unwrap();
    let cfg = DescriptorConfig::with_kind(DescriptorKind::Ps);
    let grid = cfg.build_grid().unwrap();
    let protocol = NoisyProtocol {
        noise_levels: vec![0.0, 20.0],
        views_per_class: 4,
        seed: 9,
        params: SvmParams::default(),
        sigma_grid: Some(default_sigma_grid(cfg.feature_len(&grid))),
    };
    let a = train_clean_test_noisy(&samples, &grid, &cfg, &protocol).unwrap();
    let b = train_clean_test_noisy(&samples, &grid, &cfg, &protocol).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|(_, r)| r.total == 12));
    assert_eq!(a[0].1.accuracy, 1.0);
}

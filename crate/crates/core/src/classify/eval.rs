use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{class_list, split_dataset, train_svm, Split, SvmModel, SvmParams};

use crate::descriptors::{extract_batch, extract_features, DescriptorConfig};
use crate::error::{Error, Result};
use crate::imagecore::{add_gaussian_noise, LabeledSample};
use crate::spectral::HexGrid;

/// Recognition result on one test set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<usize>,
    /// `confusion[t][p]`: samples of class `classes[t]` predicted as `classes[p]`.
    pub confusion: Vec<Vec<usize>>,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
}

impl EvalReport {
    pub fn from_predictions(truth: &[usize], predicted: &[usize]) -> EvalReport {
        let mut all = truth.to_vec();
        all.extend_from_slice(predicted);
        let classes = class_list(&all);
        let pos = |c: usize| classes.binary_search(&c).expect("class listed");
        let mut confusion = vec![vec![0; classes.len()]; classes.len()];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[pos(t)][pos(p)] += 1;
        }
        let correct = truth.iter().zip(predicted).filter(|(t, p)| t == p).count();
        let total = truth.len();
        EvalReport {
            classes,
            confusion,
            total,
            correct,
            accuracy: if total == 0 {
                0.0
            } else {
                correct as f64 / total as f64
            },
        }
    }
}

/// Accuracies over repeated random splits.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub reports: Vec<EvalReport>,
    /// Bandwidth used in each trial.
    pub sigmas: Vec<f64>,
}

impl TrialSummary {
    pub fn accuracies(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.accuracy).collect()
    }

    pub fn mean_accuracy(&self) -> f64 {
        let a = self.accuracies();
        a.iter().sum::<f64>() / a.len().max(1) as f64
    }

    pub fn std_accuracy(&self) -> f64 {
        let a = self.accuracies();
        let m = self.mean_accuracy();
        (a.iter().map(|x| (x - m).powi(2)).sum::<f64>() / a.len().max(1) as f64).sqrt()
    }
}

pub fn evaluate(model: &SvmModel, rows: &[Vec<f64>], labels: &[usize]) -> Result<EvalReport> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    if rows.is_empty() {
        return Err(Error::Empty("test set".into()));
    }
    let predicted = model.predict_batch(rows)?;
    Ok(EvalReport::from_predictions(labels, &predicted))
}

/// Bandwidth with the best validation accuracy (ties to the smallest σ),
/// together with the accuracy of every candidate.
pub fn sigma_search(
    train: (&[Vec<f64>], &[usize]),
    validation: (&[Vec<f64>], &[usize]),
    grid: &[f64],
    params: &SvmParams,
) -> Result<(f64, Vec<(f64, f64)>)> {
    if grid.is_empty() {
        return Err(Error::Empty("sigma grid".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut scores = Vec::with_capacity(sorted.len());
    let mut best = (sorted[0], f64::NEG_INFINITY);
    for &sigma in &sorted {
        let p = SvmParams {
            sigma,
            ..params.clone()
        };
        let model = train_svm(train.0, train.1, &p, "")?;
        let acc = evaluate(&model, validation.0, validation.1)?.accuracy;
        log::debug!("sigma {sigma:.4}: validation accuracy {acc:.4}");
        if acc > best.1 {
            best = (sigma, acc);
        }
        scores.push((sigma, acc));
    }
    Ok((best.0, scores))
}

/// Candidate bandwidths scaled to the feature dimension (standardized
/// features have expected squared distance about `2d`).
pub fn default_sigma_grid(dim: usize) -> Vec<f64> {
    let s = (dim.max(1) as f64).sqrt();
    [0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|f| f * s).collect()
}

fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// Bandwidth for a training set: `params.sigma` if no grid is given,
/// otherwise the winner of a search on an inner stratified split.
pub fn select_sigma(
    rows: &[Vec<f64>],
    labels: &[usize],
    params: &SvmParams,
    grid: Option<&[f64]>,
    seed: u64,
) -> Result<f64> {
    let Some(grid) = grid else {
        return Ok(params.sigma);
    };
    let inner = Split {
        train_ratio: 2.0 / 3.0,
        seed: seed ^ 0x5eed_5167,
        stratified: true,
        trials: 1,
    };
    let (tr, va) = split_dataset(labels, &inner, 0)?;
    let (sigma, _) = sigma_search(
        (&pick(rows, &tr), &pick(labels, &tr)),
        (&pick(rows, &va), &pick(labels, &va)),
        grid,
        params,
    )?;
    Ok(sigma)
}

/// Train/test over `split.trials` random splits. With a `sigma_grid`, each
/// trial picks its bandwidth on its own training portion only.
pub fn run_trials(
    rows: &[Vec<f64>],
    labels: &[usize],
    split: &Split,
    params: &SvmParams,
    sigma_grid: Option<&[f64]>,
) -> Result<TrialSummary> {
    let mut reports = Vec::with_capacity(split.trials);
    let mut sigmas = Vec::with_capacity(split.trials);
    for trial in 0..split.trials {
        let (tr, te) = split_dataset(labels, split, trial)?;
        let (xtr, ytr) = (pick(rows, &tr), pick(labels, &tr));
        let sigma = select_sigma(
            &xtr,
            &ytr,
            params,
            sigma_grid,
            split.seed.wrapping_add(trial as u64),
        )?;
        let model = train_svm(
            &xtr,
            &ytr,
            &SvmParams {
                sigma,
                ..params.clone()
            },
            "",
        )?;
        let report = evaluate(&model, &pick(rows, &te), &pick(labels, &te))?;
        log::info!(
            "trial {trial}: sigma {sigma:.4}, accuracy {:.4}",
            report.accuracy
        );
        reports.push(report);
        sigmas.push(sigma);
    }
    Ok(TrialSummary { reports, sigmas })
}

/// Noise-robustness protocol: learn on every clean image, test on
/// `views_per_class` random images per class corrupted by `N(0, s_d²)`,
/// for each noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyProtocol {
    pub noise_levels: Vec<f64>,
    pub views_per_class: usize,
    pub seed: u64,
    pub params: SvmParams,
    pub sigma_grid: Option<Vec<f64>>,
}

/// One report per noise level, in the order given. The test views are the
/// same at every level; only the noise differs.
pub fn train_clean_test_noisy(
    samples: &[LabeledSample],
    grid: &HexGrid,
    config: &DescriptorConfig,
    protocol: &NoisyProtocol,
) -> Result<Vec<(f64, EvalReport)>> {
    if protocol.views_per_class == 0 {
        return Err(Error::InvalidParameter(
            "views per class must be >= 1".into(),
        ));
    }
    let features = extract_batch(samples, grid, config)?;
    let rows: Vec<Vec<f64>> = features.iter().map(|f| f.values.clone()).collect();
    let labels: Vec<usize> = samples.iter().map(|s| s.class_id).collect();
    let sigma = select_sigma(
        &rows,
        &labels,
        &protocol.params,
        protocol.sigma_grid.as_deref(),
        protocol.seed,
    )?;
    log::info!("clean-trained model uses sigma {sigma:.4}");
    let params = SvmParams {
        sigma,
        ..protocol.params.clone()
    };
    let model = train_svm(&rows, &labels, &params, &config.manifest_hash(grid))?;

    let mut rng = ChaCha8Rng::seed_from_u64(protocol.seed);
    let mut test = Vec::new();
    for c in class_list(&labels) {
        let members: Vec<usize> = (0..samples.len()).filter(|&i| labels[i] == c).collect();
        let take = protocol.views_per_class.min(members.len());
        let mut chosen: Vec<usize> = sample(&mut rng, members.len(), take)
            .into_iter()
            .map(|j| members[j])
            .collect();
        chosen.sort_unstable();
        test.extend(chosen);
    }
    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    protocol
        .noise_levels
        .iter()
        .enumerate()
        .map(|(level, &s_d)| {
            let predicted = test
                .par_iter()
                .enumerate()
                .map(|(t, &i)| {
                    let noise_seed = protocol
                        .seed
                        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                        .wrapping_add((level * test.len() + t) as u64);
                    let noisy = add_gaussian_noise(&samples[i].raster, s_d, noise_seed)?;
                    model.predict(&extract_features(&noisy, grid, config)?.values)
                })
                .collect::<Result<Vec<_>>>()?;
            let report = EvalReport::from_predictions(&truth, &predicted);
            log::info!("noise sd {s_d}: accuracy {:.4}", report.accuracy);
            Ok((s_d, report))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for c in 0..3usize {
            for i in 0..12 {
                let t = i as f64 * 0.37;
                x.push(vec![
                    c as f64 * 4.0 + t.sin(),
                    (c % 2) as f64 * 3.0 + t.cos(),
                ]);
                y.push(c);
            }
        }
        (x, y)
    }

    #[test]
    fn confusion_counts() {
        let r = EvalReport::from_predictions(&[0, 0, 1, 2], &[0, 1, 1, 2]);
        assert_eq!(r.classes, vec![0, 1, 2]);
        assert_eq!(
            r.confusion,
            vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!((r.correct, r.total), (3, 4));
        assert!((r.accuracy - 0.75).abs() < 1e-15);
    }

    #[test]
    fn evaluate_extremes() {
        let x = vec![vec![0.0], vec![5.0]];
        let m = train_svm(&x, &[0, 1], &SvmParams::default(), "").unwrap();
        let r = evaluate(&m, &x, &[0, 1]).unwrap();
        assert_eq!(r.accuracy, 1.0);
        let r = evaluate(&m, &x, &[1, 0]).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert_eq!(r.confusion, vec![vec![0, 1], vec![1, 0]]);
        assert!(evaluate(&m, &[], &[]).is_err());
    }

    #[test]
    fn trials_on_separable_data() {
        let (x, y) = blobs();
        let split = Split {
            trials: 3,
            ..Split::default()
        };
        let s = run_trials(
            &x,
            &y,
            &split,
            &SvmParams::default(),
            Some(&default_sigma_grid(2)),
        )
        .unwrap();
        assert_eq!(s.reports.len(), 3);
        assert!(s.mean_accuracy() > 0.9, "{:?}", s.accuracies());
        assert!(s.std_accuracy() >= 0.0);
        let again = run_trials(
            &x,
            &y,
            &split,
            &SvmParams::default(),
            Some(&default_sigma_grid(2)),
        )
        .unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn sigma_search_tie_prefers_smallest() {
        let (x, y) = blobs();
        let (best, scores) =
            sigma_search((&x, &y), (&x, &y), &[2.0, 1.0, 1.5], &SvmParams::default()).unwrap();
        assert_eq!(
            scores.iter().map(|s| s.0).collect::<Vec<_>>(),
            vec![1.0, 1.5, 2.0]
        );
        let top = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let first = scores.iter().find(|s| s.1 == top).unwrap().0;
        assert_eq!(best, first);
        assert!(sigma_search((&x, &y), (&x, &y), &[], &SvmParams::default()).is_err());
    }

    /// Checkerboard of Gaussian blobs with spread `s` on a unit lattice.
    fn checkerboard(s: f64, per_cell: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, s).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for a in 0..4 {
            for b in 0..4 {
                for _ in 0..per_cell {
                    x.push(vec![
                        a as f64 + noise.sample(&mut rng),
                        b as f64 + noise.sample(&mut rng),
                    ]);
                    y.push((a + b) % 2);
                }
            }
        }
        (x, y)
    }

    #[test]
    fn sigma_search_finds_generating_bandwidth() {
        let s = 0.3;
        let (xt, yt) = checkerboard(s, 12, 1);
        let (xv, yv) = checkerboard(s, 12, 2);
        // the search runs on standardized features: express s in those units
        let scale = super::super::Standardizer::fit(&xt)
            .unwrap()
            .std
            .iter()
            .sum::<f64>()
            / 2.0;
        let steps = [1.0 / 9.0, 1.0 / 3.0, 1.0, 3.0, 9.0];
        let grid: Vec<f64> = steps.iter().map(|f| f * s / scale).collect();
        let (best, _) = sigma_search((&xt, &yt), (&xv, &yv), &grid, &SvmParams::default()).unwrap();
        assert!(
            best >= grid[1] && best <= grid[3],
            "picked {best}, grid {grid:?}"
        );
    }
}

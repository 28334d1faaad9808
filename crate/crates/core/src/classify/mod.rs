//! Supervised evaluation: stratified splits, a Gaussian-kernel SVM trained
//! by SMO in one-against-one fashion, a kNN control, bandwidth search and
//! recognition-rate reports.

mod eval;
mod knn;
mod model_io;
mod svm;

pub use eval::{
    default_sigma_grid, evaluate, run_trials, select_sigma, sigma_search, train_clean_test_noisy,
    EvalReport, NoisyProtocol, TrialSummary,
};
pub use knn::{knn_predict, Knn};
pub use model_io::{read_model, read_model_from, write_model, write_model_to, MODEL_MAGIC};
pub use svm::{train_svm, PairModel, SvmModel, SvmParams};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Train/test split protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train_ratio: f64,
    pub seed: u64,
    pub stratified: bool,
    pub trials: usize,
}

impl Default for Split {
    fn default() -> Self {
        Split {
            train_ratio: 0.75,
            seed: 0,
            stratified: true,
            trials: 5,
        }
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn train_count(count: usize, ratio: f64) -> usize {
    ((count as f64 * ratio).round() as usize).clamp(1, count - 1)
}

/// Sorted distinct labels.
pub fn class_list(labels: &[usize]) -> Vec<usize> {
    let mut c = labels.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Random split of sample indices into `(train, test)`, each sorted.
/// Deterministic per `(seed, trial)`; stratified splits take the same
/// fraction from every class.
pub fn split_dataset(
    labels: &[usize],
    split: &Split,
    trial: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(split.train_ratio > 0.0 && split.train_ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train ratio must lie in (0, 1), got {}",
            split.train_ratio
        )));
    }
    let classes = class_list(labels);
    if classes.len() < 2 {
        return Err(Error::InvalidParameter("need at least two classes".into()));
    }
    let mut rng = trial_rng(split.seed, trial);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if split.stratified {
        for &c in &classes {
            let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            if idx.len() < 2 {
                return Err(Error::ClassTooSmall {
                    class: c,
                    count: idx.len(),
                    required: 2,
                });
            }
            idx.shuffle(&mut rng);
            let k = train_count(idx.len(), split.train_ratio);
            train.extend_from_slice(&idx[..k]);
            test.extend_from_slice(&idx[k..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.shuffle(&mut rng);
        let k = train_count(idx.len(), split.train_ratio);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Per-dimension standardization fitted on training data; constant
/// dimensions get unit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Empty("cannot standardize an empty set".into()))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

/// Majority vote; ties go to the lowest class id.
pub(crate) fn majority(votes: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut counts = std::collections::BTreeMap::new();
    for v in votes {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, c)| c == best).map(|(k, _)| k)
}

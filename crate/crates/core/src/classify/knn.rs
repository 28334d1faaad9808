use super::{majority, Standardizer};
use crate::error::{Error, Result};

/// k-nearest-neighbour control classifier on standardized features.
#[derive(Debug, Clone)]
pub struct Knn {
    scaler: Standardizer,
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    k: usize,
}

impl Knn {
    pub fn fit(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Result<Knn> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if k > rows.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds the {} training rows",
                rows.len()
            )));
        }
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let scaler = Standardizer::fit(rows)?;
        let rows = rows
            .iter()
            .map(|r| scaler.apply(r))
            .collect::<Result<_>>()?;
        Ok(Knn {
            scaler,
            rows,
            labels: labels.to_vec(),
            k,
        })
    }

    /// Majority label among the `k` closest training rows (distance ties
    /// broken by training order, vote ties by the lowest class id).
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let z = self.scaler.apply(x)?;
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        majority(d[..self.k].iter().map(|&(_, i)| self.labels[i]))
            .ok_or_else(|| Error::Empty("no training rows".into()))
    }
}

/// One-shot kNN prediction for a batch of queries.
pub fn knn_predict(
    train: &[Vec<f64>],
    labels: &[usize],
    queries: &[Vec<f64>],
    k: usize,
) -> Result<Vec<usize>> {
    let knn = Knn::fit(train, labels, k)?;
    queries.iter().map(|q| knn.predict(q)).collect()
}

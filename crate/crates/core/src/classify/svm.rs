use rayon::prelude::*;

use super::{class_list, majority, Standardizer};
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    /// Bandwidth of `K(x,y) = exp(-|x-y|² / 2σ²)` on standardized features.
    pub sigma: f64,
    pub c: f64,
    /// Stop once the maximal KKT violation falls below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            sigma: 1.0,
            c: 10.0,
            tolerance: 1e-3,
            max_iter: 1_000_000,
        }
    }
}

/// Binary classifier for classes `a < b`; positive decision votes for `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairModel {
    pub a: usize,
    pub b: usize,
    /// Set when the pair could not be separated at all (identical inputs):
    /// the pair always votes for this class.
    pub constant: Option<usize>,
    /// Indices into the model's support-vector pool.
    pub support: Vec<usize>,
    /// `α_i y_i` per support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub sigma: f64,
    pub c: f64,
    pub classes: Vec<usize>,
    pub scaler: Standardizer,
    pub pairs: Vec<PairModel>,
    /// Standardized support vectors shared by all pairs.
    pub support_vectors: Vec<Vec<f64>>,
    /// Layout digest of the training features.
    pub manifest_hash: String,
}

fn kernel(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

impl PairModel {
    /// Decision value given the kernel values of the query against the
    /// support-vector pool.
    pub fn decision(&self, kernel_row: &[f64]) -> f64 {
        if let Some(c) = self.constant {
            return if c == self.a { 1.0 } else { -1.0 };
        }
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(&s, c)| c * kernel_row[s])
            .sum::<f64>()
            + self.bias
    }

    fn vote(&self, kernel_row: &[f64]) -> usize {
        if self.decision(kernel_row) >= 0.0 {
            self.a
        } else {
            self.b
        }
    }
}

impl SvmModel {
    fn gamma(&self) -> f64 {
        1.0 / (2.0 * self.sigma * self.sigma)
    }

    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    fn kernel_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.scaler.apply(x)?;
        let gamma = self.gamma();
        Ok(self
            .support_vectors
            .iter()
            .map(|sv| kernel(sv, &z, gamma))
            .collect())
    }

    /// Pairwise decision values, in pair order.
    pub fn decision_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        let k = self.kernel_row(x)?;
        Ok(self.pairs.iter().map(|p| p.decision(&k)).collect())
    }

    /// One vote per class pair; majority wins, ties to the lowest class id.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<usize>> {
        let k = self.kernel_row(x)?;
        Ok(self.pairs.iter().map(|p| p.vote(&k)).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let votes = self.votes(x)?;
        Ok(majority(votes).unwrap_or(self.classes[0]))
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        xs.par_iter().map(|x| self.predict(x)).collect()
    }
}

/// Pairwise squared distances, shared by every class pair.
fn sq_distances(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j >= i {
                        upper[i][j - i]
                    } else {
                        upper[j][i - j]
                    }
                })
                .collect()
        })
        .collect()
}

/// `min ½ αᵀQα - Σα` s.t. `0 ≤ α ≤ C`, `yᵀα = 0`, by SMO with
/// maximal-violating-pair selection. Returns `(α, bias)`.
fn smo(k: &[Vec<f64>], y: &[f64], params: &SvmParams) -> (Vec<f64>, f64) {
    let n = y.len();
    let c = params.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, yi: f64| if yi > 0.0 { a < c } else { a > 0.0 };
    let low = |a: f64, yi: f64| if yi > 0.0 { a > 0.0 } else { a < c };
    for _ in 0..params.max_iter {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < params.tolerance {
            break;
        }
        let (ai, aj) = (alpha[i], alpha[j]);
        let qij = y[i] * y[j] * k[i][j];
        if y[i] != y[j] {
            let quad = (k[i][i] + k[j][j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (k[i][i] + k[j][j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k[t][i] * di + y[j] * k[t][j] * dj);
        }
    }
    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    (alpha, -rho)
}

/// Binary classifier whose `support` indexes the training rows.
fn train_pair(
    a: usize,
    b: usize,
    labels: &[usize],
    d2: &[Vec<f64>],
    params: &SvmParams,
) -> PairModel {
    // exact duplicates (same class, same vector) carry no extra information
    let mut idx: Vec<usize> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    let (mut na, mut nb) = (0usize, 0usize);
    for (i, &l) in labels.iter().enumerate() {
        if l != a && l != b {
            continue;
        }
        let yl = if l == a { 1.0 } else { -1.0 };
        if idx
            .iter()
            .zip(&y)
            .any(|(&j, &yj)| yj == yl && d2[i][j] == 0.0)
        {
            continue;
        }
        if l == a {
            na += 1;
        } else {
            nb += 1;
        }
        idx.push(i);
        y.push(yl);
    }
    if idx.iter().all(|&i| d2[i][idx[0]] == 0.0) {
        return PairModel {
            a,
            b,
            constant: Some(if nb > na { b } else { a }),
            support: Vec::new(),
            coef: Vec::new(),
            bias: 0.0,
        };
    }
    let gamma = 1.0 / (2.0 * params.sigma * params.sigma);
    let k: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| (-gamma * d2[i][j]).exp()).collect())
        .collect();
    let (alpha, bias) = smo(&k, &y, params);
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for ((i, yi), ai) in idx.into_iter().zip(y).zip(alpha) {
        if ai > 0.0 {
            support.push(i);
            coef.push(ai * yi);
        }
    }
    PairModel {
        a,
        b,
        constant: None,
        support,
        coef,
        bias,
    }
}

/// One SMO-trained binary classifier per unordered class pair, on
/// standardized features.
pub fn train_svm(
    rows: &[Vec<f64>],
    labels: &[usize],
    params: &SvmParams,
    manifest_hash: &str,
) -> Result<SvmModel> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    if !(params.sigma > 0.0 && params.c > 0.0) {
        return Err(Error::InvalidParameter(
            "sigma and C must be positive".into(),
        ));
    }
    let classes = class_list(labels);
    if classes.len() < 2 {
        return Err(Error::InvalidParameter("need at least two classes".into()));
    }
    let scaler = Standardizer::fit(rows)?;
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| scaler.apply(r))
        .collect::<Result<_>>()?;
    let pair_ids: Vec<(usize, usize)> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| classes[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let d2 = sq_distances(&z);
    let mut pairs: Vec<PairModel> = pair_ids
        .par_iter()
        .map(|&(a, b)| train_pair(a, b, labels, &d2, params))
        .collect();
    // pool the rows that are support vectors of any pair
    let mut used: Vec<usize> = pairs
        .iter()
        .flat_map(|p| p.support.iter().copied())
        .collect();
    used.sort_unstable();
    used.dedup();
    for p in &mut pairs {
        for s in &mut p.support {
            *s = used.binary_search(s).expect("pooled index");
        }
    }
    let support_vectors = used.into_iter().map(|i| z[i].clone()).collect();
    Ok(SvmModel {
        sigma: params.sigma,
        c: params.c,
        classes,
        scaler,
        pairs,
        support_vectors,
        manifest_hash: manifest_hash.to_string(),
    })
}

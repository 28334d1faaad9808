use nalgebra::DMatrix;
use num_complex::Complex64;

use super::group::CMatrix;
use crate::error::Result;
use crate::spectral::{omega, FourierSampler, FrequencyPoint, OmegaVector};

/// Smallest-to-largest singular value ratio below which a circulant matrix
/// is treated as singular.
pub const GENERICITY_RATIO: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityRow {
    pub freq: FrequencyPoint,
    pub generic: bool,
    pub sv_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub rows: Vec<GenericityRow>,
}

impl GenericityReport {
    pub fn fraction_generic(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.generic).count() as f64 / self.rows.len() as f64
    }

    pub fn all_generic(&self) -> bool {
        self.rows.iter().all(|r| r.generic)
    }
}

/// `[ω, Sω, …, S^{N-1}ω]`: column `k` is `S^k ω`.
pub fn circulant_matrix(w: &OmegaVector) -> CMatrix {
    let n = w.n();
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        for (j, v) in w.shift(k as i64).into_iter().enumerate() {
            m[(j, k)] = v;
        }
    }
    m
}

fn ratio(sv: &[f64]) -> f64 {
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

/// Singular-value ratio of the circulant of `ω`. For odd `N` the rank is
/// taken over `C`; for even `N` the columns live in the real space of
/// vectors with `v(h + N/2) = conj v(h)`, so each column is written in
/// real coordinates `(Re v(h), Im v(h))_{h < N/2}` and the rank is taken
/// over `R`.
pub fn circulant_sv_ratio(w: &OmegaVector) -> f64 {
    let n = w.n();
    let circ = circulant_matrix(w);
    if n % 2 == 1 {
        ratio(circ.singular_values().as_slice())
    } else {
        let half = n / 2;
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| {
            let z: Complex64 = circ[(r % half, c)];
            if r < half {
                z.re
            } else {
                z.im
            }
        });
        ratio(real.singular_values().as_slice())
    }
}

/// Test whether the circulant built from `ω_f(λ)` has full rank at each
/// frequency.
pub fn check_genericity<S: FourierSampler + ?Sized>(
    src: &S,
    freqs: &[FrequencyPoint],
    n: usize,
) -> Result<GenericityReport> {
    let rows = freqs
        .iter()
        .map(|&freq| {
            let r = circulant_sv_ratio(&omega(src, freq, n)?);
            Ok(GenericityRow {
                freq,
                generic: r > GENERICITY_RATIO,
                sv_ratio: r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenericityReport { rows })
}

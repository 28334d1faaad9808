use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{omega, rotate_freq, FourierSampler, FrequencyPoint, OmegaVector};

fn check_same_n(vs: &[&OmegaVector]) -> Result<usize> {
    let n = vs[0].n();
    for v in vs {
        if v.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.n(),
            });
        }
    }
    Ok(n)
}

/// Power spectrum `Σ_k |f̂(R_{-k}λ)|²`.
pub fn ps_fast(w: &OmegaVector) -> f64 {
    w.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Bispectrum `Σ_k f̂(R_{-k}λ1) f̂(R_{-k}λ2) conj f̂(R_{-k}(λ1+λ2))`.
pub fn bs_fast(w1: &OmegaVector, w2: &OmegaVector, w12: &OmegaVector) -> Result<Complex64> {
    check_same_n(&[w1, w2, w12])?;
    Ok(triple(&w1.entries, &w2.entries, &w12.entries))
}

fn triple(a: &[Complex64], b: &[Complex64], c: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| x * y * z.conj())
        .sum()
}

/// Rotational power spectrum `<ω(R_h λ), ω(λ)> = Σ_k conj f̂(R_{h-k}λ) f̂(R_{-k}λ)`.
pub fn rps_fast(w_h: &OmegaVector, w: &OmegaVector) -> Result<Complex64> {
    check_same_n(&[w_h, w])?;
    Ok(w_h
        .entries
        .iter()
        .zip(&w.entries)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Rotational bispectrum `<ω(R_h λ1) ⊙ ω(λ2), ω(λ1+λ2)>`.
pub fn rbs_fast(w1_h: &OmegaVector, w2: &OmegaVector, w12: &OmegaVector) -> Result<Complex64> {
    check_same_n(&[w1_h, w2, w12])?;
    Ok(triple(&w1_h.entries, &w2.entries, &w12.entries))
}

/// Bispectrum of the cyclic lift,
/// `<ω(R_h λ1) ⊙ ω(R_k λ2), ω(λ1 + R_{h+k} λ2)>`.
pub fn cyclic_bs<S: FourierSampler + ?Sized>(
    src: &S,
    l1: FrequencyPoint,
    l2: FrequencyPoint,
    k: i64,
    h: i64,
    n: usize,
) -> Result<Complex64> {
    let w1 = omega(src, l1, n)?;
    let w2 = omega(src, l2, n)?;
    let w12 = omega(src, l1 + rotate_freq(l2, h + k, n), n)?;
    cyclic_bs_from(&w1, &w2, &w12, k, h)
}

/// Same as [`cyclic_bs`] from `ω(λ1)`, `ω(λ2)` and `ω(λ1 + R_{h+k} λ2)`,
/// with the two rotations applied by exact re-indexing.
pub fn cyclic_bs_from(
    w1: &OmegaVector,
    w2: &OmegaVector,
    w_sum: &OmegaVector,
    k: i64,
    h: i64,
) -> Result<Complex64> {
    check_same_n(&[w1, w2, w_sum])?;
    Ok(triple(
        &w1.rotated(h).entries,
        &w2.rotated(k).entries,
        &w_sum.entries,
    ))
}

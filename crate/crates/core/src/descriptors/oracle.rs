//! Descriptors computed from their matrix definitions. Slow and only used to
//! validate the fast formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::se2n::{kron, lift_ft_rank1, BlockMatrix, CMatrix, InductionMap, MotherWavelet};
use crate::spectral::{omega, rotate_freq, FourierSampler, FrequencyPoint};

fn check_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

/// `φ̂(T^λ) φ̂(T^λ)*`.
pub fn ps_matrix(phi: &CMatrix) -> Result<CMatrix> {
    check_square(phi, phi.nrows())?;
    Ok(phi * phi.adjoint())
}

/// `φ̂(T^{R_h λ}) φ̂(T^λ)*`.
pub fn rps_matrix(phi_h: &CMatrix, phi: &CMatrix) -> Result<CMatrix> {
    check_square(phi_h, phi.nrows())?;
    check_square(phi, phi.nrows())?;
    Ok(phi_h * phi.adjoint())
}

/// `φ̂(T^{λ1}) ⊗ φ̂(T^{λ2}) · φ̂(T^{λ1} ⊗ T^{λ2})*`; pass `φ̂(T^{R_h λ1})` as
/// the first factor for the rotational bispectrum.
pub fn bs_matrix(phi1: &CMatrix, phi2: &CMatrix, tensor: &CMatrix) -> Result<CMatrix> {
    let n = phi1.nrows();
    check_square(phi1, n)?;
    check_square(phi2, n)?;
    check_square(tensor, n * n)?;
    Ok(kron(phi1, phi2) * tensor.adjoint())
}

/// Same product as [`bs_matrix`]; named for readability at call sites.
pub fn rbs_matrix(phi1_h: &CMatrix, phi2: &CMatrix, tensor: &CMatrix) -> Result<CMatrix> {
    bs_matrix(phi1_h, phi2, tensor)
}

/// Lift coefficient on the tensor representation, assembled from the
/// direct-sum decomposition `A^{-1} (⊕_k L̂f(T^{λ1 + R_k λ2})) A`.
pub fn lift_tensor_ft<S: FourierSampler + ?Sized>(
    f_src: &S,
    psi: &MotherWavelet,
    l1: FrequencyPoint,
    l2: FrequencyPoint,
    n: usize,
) -> Result<CMatrix> {
    let diag = (0..n)
        .map(|k| lift_ft_rank1(f_src, psi, l1 + rotate_freq(l2, k as i64, n), n))
        .collect::<Result<Vec<_>>>()?;
    InductionMap::new(n).unconjugate(&BlockMatrix::diagonal(&diag).to_dense())
}

/// Scalars recovered from a rank-one descriptor matrix together with the
/// relative residual of the fitted structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFit {
    pub scalars: Vec<Complex64>,
    pub residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn rel_residual(m: &CMatrix, fit: &CMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        fit.norm()
    } else {
        (m - fit).norm() / norm
    }
}

/// Projects `m` onto `u v^T` (Frobenius inner product).
fn fit_outer(m: &CMatrix, u: &[Complex64], v: &[Complex64]) -> ScalarFit {
    let basis = CMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j]);
    let denom = basis.norm_squared();
    let s = if denom == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        basis
            .iter()
            .zip(m.iter())
            .map(|(b, x)| b.conj() * x)
            .sum::<Complex64>()
            / denom
    };
    ScalarFit {
        scalars: vec![s],
        residual: rel_residual(m, &(basis * s)),
    }
}

fn conj(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|z| z.conj()).collect()
}

/// Power-spectrum matrix of a lift is `I · conj(ω_Ψ) conj(ω_Ψ)*`.
pub fn ps_scalar(m: &CMatrix, psi: &MotherWavelet, freq: FrequencyPoint) -> Result<ScalarFit> {
    let a = conj(&omega(psi, freq, m.nrows())?.entries);
    Ok(fit_outer(m, &a, &conj(&a)))
}

/// Rotational power-spectrum matrix of a lift is
/// `s · conj(ω_Ψ(R_h λ)) ω_Ψ(λ)^T` with `s = Σ_k ω_f(R_h λ)_k conj ω_f(λ)_k`,
/// the complex conjugate of the fast rotational power spectrum.
pub fn rps_scalar(
    m: &CMatrix,
    psi: &MotherWavelet,
    freq: FrequencyPoint,
    h: i64,
) -> Result<ScalarFit> {
    let n = m.nrows();
    let a = conj(&omega(psi, rotate_freq(freq, h, n), n)?.entries);
    let b = omega(psi, freq, n)?.entries;
    Ok(fit_outer(m, &a, &b))
}

/// Bispectrum matrix of a lift is `u r^T` with
/// `u = conj ω_Ψ(λ1') ⊗ conj ω_Ψ(λ2)` and
/// `A r = ⊕_k s_k ω_Ψ(λ1 + R_k λ2)`. Returns the block scalars `s_k`;
/// `s_0` is the (rotational) bispectrum value. `first` is `λ1` for the
/// bispectrum and `R_h λ1` for the rotational one.
pub fn bs_scalars(
    m: &CMatrix,
    psi: &MotherWavelet,
    first: FrequencyPoint,
    l1: FrequencyPoint,
    l2: FrequencyPoint,
) -> Result<ScalarFit> {
    let d = m.nrows();
    let n = (d as f64).sqrt().round() as usize;
    if n * n != d {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: d,
        });
    }
    check_square(m, d)?;
    let a1 = conj(&omega(psi, first, n)?.entries);
    let a2 = conj(&omega(psi, l2, n)?.entries);
    let u: Vec<Complex64> = (0..d).map(|i| a1[i / n] * a2[i % n]).collect();
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let map = InductionMap::new(n);
    let psis = (0..n)
        .map(|k| omega(psi, l1 + rotate_freq(l2, k as i64, n), n).map(|w| w.entries))
        .collect::<Result<Vec<_>>>()?;
    if uu == 0.0 {
        return Ok(ScalarFit {
            scalars: vec![Complex64::new(0.0, 0.0); n],
            residual: rel_residual(m, &CMatrix::zeros(d, d)),
        });
    }
    // r = M^T conj(u) / |u|²
    let r: Vec<Complex64> = (0..d)
        .map(|j| (0..d).map(|i| m[(i, j)] * u[i].conj()).sum::<Complex64>() / uu)
        .collect();
    let q = map.apply(&r);
    let mut scalars = Vec::with_capacity(n);
    let mut fitted = vec![Complex64::new(0.0, 0.0); d];
    for (k, wpsi) in psis.iter().enumerate() {
        let block = &q[k * n..(k + 1) * n];
        let denom: f64 = wpsi.iter().map(|z| z.norm_sqr()).sum();
        let s = if denom == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            dot(wpsi, block) / denom
        };
        for h in 0..n {
            fitted[k * n + h] = s * wpsi[h];
        }
        scalars.push(s);
    }
    let r_fit = map.apply_inverse(&fitted);
    let fit = CMatrix::from_fn(d, d, |i, j| u[i] * r_fit[j]);
    Ok(ScalarFit {
        scalars,
        residual: rel_residual(m, &fit),
    })
}

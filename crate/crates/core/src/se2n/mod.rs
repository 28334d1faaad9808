//! The group `SE(2,N)`, its irreducible representations, the lift of images
//! to cortex functions, and the matrix-valued Fourier transform used as the
//! brute-force reference for the fast descriptor formulas.

mod genericity;
mod group;
mod induction;
mod lift;

pub use genericity::{
    check_genericity, circulant_matrix, circulant_sv_ratio, GenericityReport, GenericityRow,
    GENERICITY_RATIO,
};
pub use group::{rep_matrix, rep_nonzeros, unitarity_residual, CMatrix, GroupElement, RepMatrix};
pub use induction::{induction_apply, kron, BlockMatrix, InductionMap};
pub use lift::{lift, lift_ft_rank1, matrix_ft, CortexFunction, MotherWavelet};

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{rotate_freq, FrequencyPoint};

/// `Σ_{(x,k)} φ(x,k) T^λ((x,k)^{-1}) · spacing²` summed directly over the
/// group samples. Slow; used only to cross-check [`matrix_ft`].
pub fn haar_ft(phi: &CortexFunction, freq: FrequencyPoint) -> CMatrix {
    let n = phi.n();
    let mut out = CMatrix::zeros(n, n);
    for (k, slice) in phi.slices().iter().enumerate() {
        let s2 = slice.spacing * slice.spacing;
        for j in 0..slice.height {
            for i in 0..slice.width {
                let v = slice.values[j * slice.width + i];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = GroupElement::new(slice.coords(i, j), k as i64, n).inverse();
                for (r, c, t) in rep_nonzeros(freq, &a) {
                    out[(r, c)] += v * t * s2;
                }
            }
        }
    }
    out
}

/// Haar sum against the tensor product `T^{λ1} ⊗ T^{λ2}`.
pub fn haar_tensor_ft(phi: &CortexFunction, l1: FrequencyPoint, l2: FrequencyPoint) -> CMatrix {
    let n = phi.n();
    let mut out = CMatrix::zeros(n * n, n * n);
    for (k, slice) in phi.slices().iter().enumerate() {
        let s2 = slice.spacing * slice.spacing;
        for j in 0..slice.height {
            for i in 0..slice.width {
                let v = slice.values[j * slice.width + i];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = GroupElement::new(slice.coords(i, j), k as i64, n).inverse();
                let t1 = rep_nonzeros(l1, &a);
                let t2 = rep_nonzeros(l2, &a);
                for &(r1, c1, x1) in &t1 {
                    for &(r2, c2, x2) in &t2 {
                        out[(r1 * n + r2, c1 * n + c2)] += v * x1 * x2 * s2;
                    }
                }
            }
        }
    }
    out
}

/// Tensor-product coefficient rebuilt from the direct-sum decomposition:
/// `A^{-1} (⊕_k φ̂(λ1 + R_k λ2)) A`.
pub fn tensor_ft_via_induction<S: crate::spectral::FourierSampler>(
    slices: &[S],
    l1: FrequencyPoint,
    l2: FrequencyPoint,
) -> Result<CMatrix> {
    let n = slices.len();
    let diag = (0..n)
        .map(|k| matrix_ft(slices, l1 + rotate_freq(l2, k as i64, n)))
        .collect::<Result<Vec<_>>>()?;
    InductionMap::new(n).unconjugate(&BlockMatrix::diagonal(&diag).to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ComplexRaster;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cortex(seed: u64, n: usize) -> CortexFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slices = (0..n)
            .map(|_| ComplexRaster {
                width: 10,
                height: 9,
                values: (0..90)
                    .map(|_| {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect(),
                origin: [-4.5, -4.0],
                spacing: 1.0,
            })
            .collect();
        CortexFunction::new(slices).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn explicit_formula_matches_haar_sum() {
        for n in [3, 6] {
            let phi = random_cortex(n as u64, n);
            let lam = FrequencyPoint::new(0.7, -0.4);
            let a = matrix_ft(&phi.dtfts(), lam).unwrap();
            let b = haar_ft(&phi, lam);
            assert!(max_abs(&(&a - &b)) <= 1e-10 * max_abs(&b));
        }
    }

    #[test]
    fn induction_splits_tensor_coefficient() {
        for n in [3, 6] {
            let phi = random_cortex(10 + n as u64, n);
            let (l1, l2) = (
                FrequencyPoint::new(0.5, 0.2),
                FrequencyPoint::new(-0.3, 0.6),
            );
            let direct = haar_tensor_ft(&phi, l1, l2);
            let blocks = induction_apply(&direct).unwrap();
            assert!(blocks.off_diagonal_ratio() <= 1e-12);
            let slices = phi.dtfts();
            for k in 0..n {
                let expect = matrix_ft(&slices, l1 + rotate_freq(l2, k as i64, n)).unwrap();
                assert!(max_abs(&(blocks.block(k, k) - &expect)) <= 1e-10 * max_abs(&expect));
            }
            let rebuilt = tensor_ft_via_induction(&slices, l1, l2).unwrap();
            assert!(max_abs(&(&rebuilt - &direct)) <= 1e-10 * max_abs(&direct));
        }
    }

    #[test]
    fn fundamental_property_for_rotations() {
        // (Λ(0,r) φ)(y, k) = φ(R_{-r} y, k - r) on a lattice closed under R_r
        let n = 4;
        let phi = random_cortex(99, n);
        // square grid centred at 0 is invariant under quarter turns
        let sq = |c: &ComplexRaster| ComplexRaster {
            width: 9,
            height: 9,
            values: c.values[..81].to_vec(),
            origin: [-4.0, -4.0],
            spacing: 1.0,
        };
        let base = CortexFunction::new(phi.slices().iter().map(sq).collect()).unwrap();
        let r = 1usize;
        let moved_slices = (0..n)
            .map(|k| {
                let src = base.slice((k + n - r) % n);
                let mut out = ComplexRaster::zeros_like(src);
                for j in 0..9 {
                    for i in 0..9 {
                        let y = out.coords(i, j);
                        let p = crate::spectral::rotate_vec(y, -(r as i64), n);
                        let (si, sj) =
                            ((p[0] + 4.0).round() as usize, (p[1] + 4.0).round() as usize);
                        out.values[j * 9 + i] = src.values[sj * 9 + si];
                    }
                }
                out
            })
            .collect();
        let moved = CortexFunction::new(moved_slices).unwrap();
        let lam = FrequencyPoint::new(0.45, 0.3);
        let lhs = matrix_ft(&moved.dtfts(), lam).unwrap();
        let a = GroupElement::new([0.0, 0.0], r as i64, n);
        let rhs = matrix_ft(&base.dtfts(), lam).unwrap() * rep_matrix(lam, &a.inverse()).matrix;
        assert!(max_abs(&(&lhs - &rhs)) <= 1e-10 * max_abs(&rhs));
    }
}

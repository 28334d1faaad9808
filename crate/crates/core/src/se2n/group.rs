use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{rotate_vec, FrequencyPoint};

pub type CMatrix = DMatrix<Complex64>;

/// Element `(x, k)` of `SE(2,N)`: translation `x` and rotation `R_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub x: [f64; 2],
    k: usize,
    n: usize,
}

impl GroupElement {
    pub fn new(x: [f64; 2], k: i64, n: usize) -> Self {
        assert!(n > 0, "rotation order must be positive");
        GroupElement {
            x,
            k: k.rem_euclid(n as i64) as usize,
            n,
        }
    }

    pub fn identity(n: usize) -> Self {
        GroupElement::new([0.0, 0.0], 0, n)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(x,k)(y,r) = (x + R_k y, k + r)`.
    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let ry = rotate_vec(other.x, self.k as i64, self.n);
        Ok(GroupElement::new(
            [self.x[0] + ry[0], self.x[1] + ry[1]],
            (self.k + other.k) as i64,
            self.n,
        ))
    }

    /// `(x,k)^{-1} = (-R_{-k} x, -k)`.
    pub fn inverse(&self) -> GroupElement {
        let r = rotate_vec(self.x, -(self.k as i64), self.n);
        GroupElement::new([-r[0], -r[1]], -(self.k as i64), self.n)
    }

    /// Distance used by tests: translation gap plus rotation mismatch.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        let dx = (self.x[0] - other.x[0]).hypot(self.x[1] - other.x[1]);
        dx + if self.k == other.k { 0.0 } else { 1.0 }
    }
}

/// Value `T^λ(a)` of the irreducible representation attached to `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    pub matrix: CMatrix,
    pub freq: FrequencyPoint,
    pub element: GroupElement,
}

/// `T^λ(x,k) = diag_h(e^{i<λ, R_h x>}) S^k`: entry `(h, h+k)` is
/// `e^{i<λ, R_h x>}`, all others vanish.
pub fn rep_matrix(freq: FrequencyPoint, a: &GroupElement) -> RepMatrix {
    let n = a.n();
    let mut matrix = CMatrix::zeros(n, n);
    for (h, col, value) in rep_nonzeros(freq, a) {
        matrix[(h, col)] = value;
    }
    RepMatrix {
        matrix,
        freq,
        element: *a,
    }
}

/// The `N` nonzero entries `(row, col, value)` of `T^λ(a)`.
pub fn rep_nonzeros(freq: FrequencyPoint, a: &GroupElement) -> Vec<(usize, usize, Complex64)> {
    let n = a.n();
    (0..n)
        .map(|h| {
            let rx = rotate_vec(a.x, h as i64, n);
            (h, (h + a.k()) % n, Complex64::from_polar(1.0, freq.dot(rx)))
        })
        .collect()
}

/// `max |M M* - I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    let id = CMatrix::identity(m.nrows(), m.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

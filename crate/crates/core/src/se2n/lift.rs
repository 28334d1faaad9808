use num_complex::Complex64;

use super::group::CMatrix;
use crate::error::{Error, Result};
use crate::imagecore::Raster;
use crate::spectral::{
    dft2_complex, fft2_forward, ifft2_in_place, omega, rotate_freq, rotate_vec, ComplexRaster,
    Dtft, FourierSampler, FrequencyPoint, Spectrum,
};

/// Gabor mother wavelet `Ψ(x) = e^{-|x|²/2σ²} e^{i<ν,x>}` with closed-form
/// transform `Ψ̂(λ) = 2πσ² e^{-σ²|λ-ν|²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotherWavelet {
    pub sigma: f64,
    pub carrier: [f64; 2],
}

impl Default for MotherWavelet {
    fn default() -> Self {
        MotherWavelet::gabor(4.0, std::f64::consts::PI / 4.0)
    }
}

impl MotherWavelet {
    /// Carrier along the first axis.
    pub fn gabor(sigma: f64, carrier: f64) -> Self {
        MotherWavelet {
            sigma,
            carrier: [carrier, 0.0],
        }
    }

    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        Complex64::from_polar(
            (-r2 / (2.0 * self.sigma * self.sigma)).exp(),
            self.carrier[0] * x[0] + self.carrier[1] * x[1],
        )
    }

    pub fn transform(&self, freq: FrequencyPoint) -> Complex64 {
        let dx = freq.x - self.carrier[0];
        let dy = freq.y - self.carrier[1];
        let s2 = self.sigma * self.sigma;
        Complex64::new(
            2.0 * std::f64::consts::PI * s2 * (-0.5 * s2 * (dx * dx + dy * dy)).exp(),
            0.0,
        )
    }

    /// `Σ_k |Ψ̂(R_{-k} λ)|²`.
    pub fn admissibility(&self, freq: FrequencyPoint, n: usize) -> f64 {
        (0..n as i64)
            .map(|k| self.transform(rotate_freq(freq, -k, n)).norm_sqr())
            .sum()
    }

    /// Smallest admissibility value over the given frequencies; errors when
    /// it vanishes numerically.
    pub fn check_admissible(&self, freqs: &[FrequencyPoint], n: usize) -> Result<f64> {
        let min = freqs
            .iter()
            .map(|&f| self.admissibility(f, n))
            .fold(f64::INFINITY, f64::min);
        if !(min > 1e-200) {
            return Err(Error::InvalidParameter(format!(
                "wavelet is not weakly admissible on the band (min {min:e})"
            )));
        }
        Ok(min)
    }
}

impl FourierSampler for MotherWavelet {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64> {
        Ok(self.transform(freq))
    }
}

/// Function on `Z_N × grid`; slice `k` is `φ(·, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CortexFunction {
    slices: Vec<ComplexRaster>,
}

impl CortexFunction {
    pub fn new(slices: Vec<ComplexRaster>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::Empty("cortex function needs at least one slice".into()))?;
        for s in &slices {
            if s.width != first.width
                || s.height != first.height
                || s.origin != first.origin
                || s.spacing != first.spacing
            {
                return Err(Error::InvalidParameter(
                    "all cortex slices must share one grid".into(),
                ));
            }
            if s.values.len() != s.width * s.height {
                return Err(Error::DimensionMismatch {
                    expected: s.width * s.height,
                    got: s.values.len(),
                });
            }
            if s.values
                .iter()
                .any(|v| !v.re.is_finite() || !v.im.is_finite())
            {
                return Err(Error::InvalidParameter("non-finite cortex value".into()));
            }
        }
        Ok(CortexFunction { slices })
    }

    pub fn n(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[ComplexRaster] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &ComplexRaster {
        &self.slices[k]
    }

    /// Exact per-slice transforms.
    pub fn dtfts(&self) -> Vec<Dtft> {
        self.slices.iter().cloned().map(Dtft::new).collect()
    }

    /// Per-slice DC-centered spectra for interpolated sampling.
    pub fn spectra(&self, padding: usize) -> Vec<Spectrum> {
        self.slices
            .iter()
            .map(|s| dft2_complex(s, padding))
            .collect()
    }

    /// `[Λ(x,0) φ](y, r) = φ(y - x, r)` for a whole-pixel translation.
    pub fn translate(&self, dx: i64, dy: i64) -> CortexFunction {
        let slices = self
            .slices
            .iter()
            .map(|s| {
                let mut out = ComplexRaster::zeros_like(s);
                for j in 0..s.height as i64 {
                    for i in 0..s.width as i64 {
                        let (si, sj) = (i - dx, j - dy);
                        if si >= 0 && sj >= 0 && si < s.width as i64 && sj < s.height as i64 {
                            out.values[(j as usize) * s.width + i as usize] =
                                s.values[(sj as usize) * s.width + si as usize];
                        }
                    }
                }
                out
            })
            .collect();
        CortexFunction { slices }
    }
}

/// Matrix Fourier coefficient: entry `(i, j)` is the transform of slice
/// `i - j` evaluated at `R_{-j} λ`.
pub fn matrix_ft<S: FourierSampler>(slices: &[S], freq: FrequencyPoint) -> Result<CMatrix> {
    let n = slices.len();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let rotated = rotate_freq(freq, -(j as i64), n);
        for i in 0..n {
            m[(i, j)] = slices[(i + n - j) % n].eval(rotated)?;
        }
    }
    Ok(m)
}

/// `L f(x,k) = Σ_y f(y) conj(Ψ(R_{-k}(y - x))) · spacing²`, computed as a
/// circular cross-correlation through FFTs on the raster's own grid. Embed
/// `f` in a margin wide enough for the wavelet when wrap-around matters.
pub fn lift(f: &Raster, psi: &MotherWavelet, n: usize) -> Result<CortexFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "rotation order must be >= 1".into(),
        ));
    }
    let (w, h) = (f.width(), f.height());
    let s = f.spacing();
    let mut fhat: Vec<Complex64> = f.pixels().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_forward(&mut fhat, w, h);
    let wrap = |i: usize, len: usize| -> f64 {
        let i = i as i64;
        let len = len as i64;
        (if i >= (len + 1) / 2 { i - len } else { i }) as f64
    };
    let mut slices = Vec::with_capacity(n);
    for k in 0..n {
        let mut kernel = Vec::with_capacity(w * h);
        for j in 0..h {
            for i in 0..w {
                let z = [wrap(i, w) * s, wrap(j, h) * s];
                kernel.push(psi.value(rotate_vec(z, -(k as i64), n)));
            }
        }
        fft2_forward(&mut kernel, w, h);
        let mut prod: Vec<Complex64> = fhat
            .iter()
            .zip(&kernel)
            .map(|(a, g)| a * g.conj() * (s * s))
            .collect();
        ifft2_in_place(&mut prod, w, h);
        slices.push(ComplexRaster {
            width: w,
            height: h,
            values: prod,
            origin: f.origin(),
            spacing: s,
        });
    }
    CortexFunction::new(slices)
}

/// Rank-one closed form of the lift's matrix coefficient: entry `(k, h)` is
/// `conj(ω_Ψ(λ)_k) · ω_f(λ)_h`.
pub fn lift_ft_rank1<S: FourierSampler + ?Sized>(
    f_src: &S,
    psi: &MotherWavelet,
    freq: FrequencyPoint,
    n: usize,
) -> Result<CMatrix> {
    let wf = omega(f_src, freq, n)?;
    let wpsi = omega(psi, freq, n)?;
    Ok(CMatrix::from_fn(n, n, |k, h| {
        wpsi.entries[k].conj() * wf.entries[h]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se2n::group::{rep_matrix, GroupElement};
    use crate::spectral::dft2_shifted;

    fn test_image() -> Raster {
        // smooth bump pair inside a wide zero margin
        Raster::from_fn(96, 96, |x, y| {
            let g = |cx: f64, cy: f64, s: f64| {
                (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp()
            };
            50.0 * g(46.0, 49.0, 3.0) + 30.0 * g(51.0, 44.0, 2.5)
        })
        .unwrap()
        .with_origin([-48.0, -48.0])
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_image_lifts_to_zero() {
        let phi = lift(&Raster::zeros(32, 32), &MotherWavelet::default(), 6).unwrap();
        assert!(phi
            .slices()
            .iter()
            .all(|s| s.values.iter().all(|v| v.norm() == 0.0)));
        let m = lift_ft_rank1(
            &Dtft::from_raster(&Raster::zeros(8, 8)),
            &MotherWavelet::default(),
            FrequencyPoint::new(0.1, 0.0),
            6,
        )
        .unwrap();
        assert_eq!(max_abs(&m), 0.0);
    }

    #[test]
    fn slice_spectra_follow_correlation_theorem() {
        let f = test_image();
        let psi = MotherWavelet::default();
        let phi = lift(&f, &psi, 6).unwrap();
        let fspec = dft2_shifted(&f);
        let scale = fspec.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
            * psi
                .transform(FrequencyPoint::new(psi.carrier[0], 0.0))
                .norm();
        for (k, slice) in phi.slices().iter().enumerate() {
            let spec = dft2_complex(slice, 1);
            let mut worst: f64 = 0.0;
            for v in (0..spec.height()).step_by(3) {
                for u in (0..spec.width()).step_by(3) {
                    let lam = spec.bin_frequency(u, v);
                    let expect =
                        fspec.bin(u, v) * psi.transform(rotate_freq(lam, -(k as i64), 6)).conj();
                    worst = worst.max((spec.bin(u, v) - expect).norm());
                }
            }
            assert!(worst <= 1e-9 * scale, "slice {k}: {}", worst / scale);
        }
    }

    #[test]
    fn lift_is_left_invariant_under_translation() {
        let f = test_image();
        let psi = MotherWavelet::default();
        let lifted_shift = lift(&f.translate(3, -2), &psi, 6).unwrap();
        let shifted_lift = lift(&f, &psi, 6).unwrap().translate(3, -2);
        let scale = shifted_lift
            .slices()
            .iter()
            .flat_map(|s| s.values.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        for (a, b) in lifted_shift.slices().iter().zip(shifted_lift.slices()) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).norm() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn rank_one_formula_matches_lift_transform() {
        let f = test_image();
        let psi = MotherWavelet::default();
        let phi = lift(&f, &psi, 6).unwrap();
        let slices = phi.dtfts();
        let fsrc = Dtft::from_raster(&f);
        for lam in [
            FrequencyPoint::new(0.3, 0.1),
            FrequencyPoint::new(0.55, 0.2),
            FrequencyPoint::new(0.9, 0.35),
        ] {
            let numeric = matrix_ft(&slices, lam).unwrap();
            let closed = lift_ft_rank1(&fsrc, &psi, lam, 6).unwrap();
            let err = max_abs(&(&numeric - &closed)) / max_abs(&closed);
            assert!(err <= 1e-6, "{lam:?}: {err}");
            let sv = closed.clone().svd(false, false).singular_values;
            assert!(sv[1] <= 1e-9 * sv[0]);
        }
    }

    #[test]
    fn fundamental_property_for_translations() {
        let f = test_image();
        let phi = lift(&f, &MotherWavelet::default(), 6).unwrap();
        let moved = phi.translate(4, 1);
        let lam = FrequencyPoint::new(0.4, 0.15);
        let lhs = matrix_ft(&moved.dtfts(), lam).unwrap();
        let a = GroupElement::new([4.0, 1.0], 0, 6);
        let tinv = rep_matrix(lam, &a.inverse()).matrix;
        let rhs = matrix_ft(&phi.dtfts(), lam).unwrap() * tinv;
        assert!(max_abs(&(&lhs - &rhs)) <= 1e-6 * max_abs(&rhs));
    }

    #[test]
    fn radial_slice_zero_gives_scalar_diagonal() {
        let radial = Raster::from_fn(33, 33, |x, y| {
            (-((x - 16.0).powi(2) + (y - 16.0).powi(2)) / 8.0).exp()
        })
        .unwrap()
        .with_origin([-16.0, -16.0]);
        let zero = ComplexRaster::zeros_like(&ComplexRaster::from_raster(&radial));
        let mut slices = vec![ComplexRaster::from_raster(&radial)];
        slices.extend((1..6).map(|_| zero.clone()));
        let phi = CortexFunction::new(slices).unwrap();
        let m = matrix_ft(&phi.dtfts(), FrequencyPoint::new(0.4, 0.2)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    assert!((m[(i, j)] - m[(0, 0)]).norm() < 1e-10 * m[(0, 0)].norm());
                } else {
                    assert_eq!(m[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn gabor_is_admissible_on_low_band() {
        let psi = MotherWavelet::default();
        let freqs: Vec<_> = (1..20)
            .map(|i| FrequencyPoint::new(0.02 * i as f64, 0.01 * i as f64))
            .collect();
        assert!(psi.check_admissible(&freqs, 6).unwrap() > 0.0);
    }
}

//! DC-centered Fourier analysis of rasters, off-grid sampling and the
//! rotation-orbit vectors ω_f(λ) every descriptor is built from.
//!
//! Transform convention: `f̂(λ) = Σ_x f(x) e^{-i<λ,x>} · spacing²`, a Riemann
//! sum of the non-unitary continuous transform, so the DC value equals
//! [`average`](crate::imagecore::average). Frequencies are angular
//! (radians per unit length).

mod grid;

pub use grid::{GridSpec, HexGrid, LatticePoint};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::imagecore::{Barycenter, Raster};

/// Angular frequency in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrequencyPoint {
    pub x: f64,
    pub y: f64,
}

impl FrequencyPoint {
    pub const ZERO: FrequencyPoint = FrequencyPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        FrequencyPoint { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, p: [f64; 2]) -> f64 {
        self.x * p[0] + self.y * p[1]
    }
}

impl Add for FrequencyPoint {
    type Output = FrequencyPoint;
    fn add(self, o: Self) -> Self {
        FrequencyPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for FrequencyPoint {
    type Output = FrequencyPoint;
    fn sub(self, o: Self) -> Self {
        FrequencyPoint::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for FrequencyPoint {
    type Output = FrequencyPoint;
    fn neg(self) -> Self {
        FrequencyPoint::new(-self.x, -self.y)
    }
}

impl Mul<f64> for FrequencyPoint {
    type Output = FrequencyPoint;
    fn mul(self, s: f64) -> Self {
        FrequencyPoint::new(self.x * s, self.y * s)
    }
}

/// Angle of the discrete rotation `R_k` in `Z_N`.
pub fn rotation_angle(k: i64, n: usize) -> f64 {
    let k = k.rem_euclid(n as i64);
    2.0 * PI * k as f64 / n as f64
}

/// Counterclockwise rotation of a plane vector by `2πk/N`.
pub fn rotate_vec(v: [f64; 2], k: i64, n: usize) -> [f64; 2] {
    let (s, c) = rotation_angle(k, n).sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// `R_k λ`: counterclockwise rotation by `2πk/N`.
pub fn rotate_freq(freq: FrequencyPoint, k: i64, n: usize) -> FrequencyPoint {
    let [x, y] = rotate_vec([freq.x, freq.y], k, n);
    FrequencyPoint::new(x, y)
}

/// Anything that can evaluate a Fourier transform at an arbitrary frequency.
pub trait FourierSampler {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64>;
}

/// Complex-valued samples on a square lattice, used for cortex slices.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRaster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Complex64>,
    pub origin: [f64; 2],
    pub spacing: f64,
}

impl ComplexRaster {
    pub fn from_raster(f: &Raster) -> Self {
        ComplexRaster {
            width: f.width(),
            height: f.height(),
            values: f.pixels().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            origin: f.origin(),
            spacing: f.spacing(),
        }
    }

    pub fn zeros_like(f: &ComplexRaster) -> Self {
        ComplexRaster {
            values: vec![Complex64::new(0.0, 0.0); f.values.len()],
            ..f.clone()
        }
    }

    pub fn coords(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
        ]
    }
}

/// DC-centered DFT of a raster; `values[v * width + u]` holds the transform
/// at `((u - width/2) Δx, (v - height/2) Δy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    values: Vec<Complex64>,
    freq_step: [f64; 2],
    padding: usize,
}

impl Spectrum {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn freq_step(&self) -> [f64; 2] {
        self.freq_step
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    /// Index of the DC bin.
    pub fn dc_index(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    /// Frequency of lattice bin `(u, v)`.
    pub fn bin_frequency(&self, u: usize, v: usize) -> FrequencyPoint {
        FrequencyPoint::new(
            (u as f64 - (self.width / 2) as f64) * self.freq_step[0],
            (v as f64 - (self.height / 2) as f64) * self.freq_step[1],
        )
    }

    pub fn bin(&self, u: usize, v: usize) -> Complex64 {
        self.values[v * self.width + u]
    }

    /// Bilinear interpolation of the four lattice values around `freq`.
    pub fn sample(&self, freq: FrequencyPoint) -> Result<Complex64> {
        let pu = (self.width / 2) as f64 + freq.x / self.freq_step[0];
        let pv = (self.height / 2) as f64 + freq.y / self.freq_step[1];
        let max_u = (self.width - 1) as f64;
        let max_v = (self.height - 1) as f64;
        if !(pu >= 0.0 && pu <= max_u && pv >= 0.0 && pv <= max_v) {
            return Err(Error::OutOfBand {
                x: freq.x,
                y: freq.y,
            });
        }
        let u0 = (pu.floor() as usize).min(self.width.saturating_sub(2));
        let v0 = (pv.floor() as usize).min(self.height.saturating_sub(2));
        let tu = pu - u0 as f64;
        let tv = pv - v0 as f64;
        let at = |u: usize, v: usize| -> Complex64 {
            if u < self.width && v < self.height {
                self.values[v * self.width + u]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        Ok(at(u0, v0) * ((1.0 - tu) * (1.0 - tv))
            + at(u0 + 1, v0) * (tu * (1.0 - tv))
            + at(u0, v0 + 1) * ((1.0 - tu) * tv)
            + at(u0 + 1, v0 + 1) * (tu * tv))
    }

    /// Largest |λ| (per axis) that can still be sampled.
    pub fn band_limit(&self) -> [f64; 2] {
        [
            ((self.width - 1) - self.width / 2) as f64 * self.freq_step[0],
            ((self.height - 1) - self.height / 2) as f64 * self.freq_step[1],
        ]
    }
}

impl FourierSampler for Spectrum {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64> {
        self.sample(freq)
    }
}

/// Shifted DFT without zero padding.
pub fn dft2_shifted(f: &Raster) -> Spectrum {
    dft2_shifted_padded(f, 1)
}

/// Shifted DFT of `f` zero-padded to `padding` times its size.
pub fn dft2_shifted_padded(f: &Raster, padding: usize) -> Spectrum {
    dft2_complex(&ComplexRaster::from_raster(f), padding)
}

pub fn dft2_complex(f: &ComplexRaster, padding: usize) -> Spectrum {
    let padding = padding.max(1);
    let w = f.width * padding;
    let h = f.height * padding;
    let mut buf = vec![Complex64::new(0.0, 0.0); w * h];
    for j in 0..f.height {
        buf[j * w..j * w + f.width].copy_from_slice(&f.values[j * f.width..(j + 1) * f.width]);
    }
    fft2_in_place(&mut buf, w, h);

    let s2 = f.spacing * f.spacing;
    let step = [
        2.0 * PI / (w as f64 * f.spacing),
        2.0 * PI / (h as f64 * f.spacing),
    ];
    let (cu, cv) = (w / 2, h / 2);
    let mut values = vec![Complex64::new(0.0, 0.0); w * h];
    for v in 0..h {
        let src_v = (v + h - cv) % h;
        let ly = (v as f64 - cv as f64) * step[1];
        for u in 0..w {
            let src_u = (u + w - cu) % w;
            let lx = (u as f64 - cu as f64) * step[0];
            let phase = -(lx * f.origin[0] + ly * f.origin[1]);
            values[v * w + u] = buf[src_v * w + src_u] * Complex64::from_polar(s2, phase);
        }
    }
    Spectrum {
        width: w,
        height: h,
        values,
        freq_step: step,
        padding,
    }
}

/// Unnormalized forward 2D FFT of a row-major buffer.
fn fft2_in_place(buf: &mut [Complex64], w: usize, h: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let row = planner.plan_fft_forward(w);
    for chunk in buf.chunks_exact_mut(w) {
        row.process(chunk);
    }
    let col = planner.plan_fft_forward(h);
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for u in 0..w {
        for v in 0..h {
            column[v] = buf[v * w + u];
        }
        col.process(&mut column);
        for v in 0..h {
            buf[v * w + u] = column[v];
        }
    }
}

/// Inverse of [`fft2_in_place`] including the 1/(wh) factor.
pub(crate) fn ifft2_in_place(buf: &mut [Complex64], w: usize, h: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let row = planner.plan_fft_inverse(w);
    for chunk in buf.chunks_exact_mut(w) {
        row.process(chunk);
    }
    let col = planner.plan_fft_inverse(h);
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for u in 0..w {
        for v in 0..h {
            column[v] = buf[v * w + u];
        }
        col.process(&mut column);
        for v in 0..h {
            buf[v * w + u] = column[v];
        }
    }
    let norm = 1.0 / (w * h) as f64;
    buf.iter_mut().for_each(|z| *z *= norm);
}

pub(crate) fn fft2_forward(buf: &mut [Complex64], w: usize, h: usize) {
    fft2_in_place(buf, w, h)
}

/// Multiplies every bin by `e^{+i<λ,c>}`: the spectrum of `x ↦ f(x + c)`,
/// whose barycenter is the origin when `c` is the barycenter of `f`.
pub fn center_spectrally(spec: &Spectrum, c: Barycenter) -> Spectrum {
    let mut out = spec.clone();
    for v in 0..spec.height {
        for u in 0..spec.width {
            let lam = spec.bin_frequency(u, v);
            let phase = lam.x * c.cx + lam.y * c.cy;
            out.values[v * spec.width + u] *= Complex64::from_polar(1.0, phase);
        }
    }
    out
}

/// Exact transform by direct summation over the samples (no interpolation).
///
/// Costs `O(width·height)` per frequency; this is the brute-force reference
/// used by the oracle checks.
#[derive(Debug, Clone)]
pub struct Dtft {
    data: ComplexRaster,
}

impl Dtft {
    pub fn new(data: ComplexRaster) -> Self {
        Dtft { data }
    }

    pub fn from_raster(f: &Raster) -> Self {
        Dtft::new(ComplexRaster::from_raster(f))
    }
}

impl FourierSampler for Dtft {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64> {
        let d = &self.data;
        let nyquist = PI / d.spacing;
        if freq.x.abs() > nyquist || freq.y.abs() > nyquist {
            return Err(Error::OutOfBand {
                x: freq.x,
                y: freq.y,
            });
        }
        let ex: Vec<Complex64> = (0..d.width)
            .map(|i| Complex64::from_polar(1.0, -freq.x * (d.origin[0] + i as f64 * d.spacing)))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..d.height {
            let row = &d.values[j * d.width..(j + 1) * d.width];
            let acc: Complex64 = row.iter().zip(&ex).map(|(v, e)| v * e).sum();
            let ey = Complex64::from_polar(1.0, -freq.y * (d.origin[1] + j as f64 * d.spacing));
            total += acc * ey;
        }
        Ok(total * d.spacing * d.spacing)
    }
}

/// `ω_f(λ) = (f̂(R_{-k}λ))_{k=0..N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaVector {
    pub entries: Vec<Complex64>,
    pub freq: FrequencyPoint,
}

impl OmegaVector {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// `ω(R_h λ)`, obtained exactly by re-indexing: entry k is `ω(λ)_{k-h}`.
    pub fn rotated(&self, h: i64) -> OmegaVector {
        let n = self.n() as i64;
        let entries = (0..n)
            .map(|k| self.entries[(k - h).rem_euclid(n) as usize])
            .collect();
        OmegaVector {
            entries,
            freq: rotate_freq(self.freq, h, self.n()),
        }
    }

    /// `S^k v` with `(S^k v)_j = v_{j+k}`.
    pub fn shift(&self, k: i64) -> Vec<Complex64> {
        let n = self.n() as i64;
        (0..n)
            .map(|j| self.entries[(j + k).rem_euclid(n) as usize])
            .collect()
    }
}

pub fn omega<S: FourierSampler + ?Sized>(
    src: &S,
    freq: FrequencyPoint,
    n: usize,
) -> Result<OmegaVector> {
    let entries = (0..n as i64)
        .map(|k| src.eval(rotate_freq(freq, -k, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OmegaVector { entries, freq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::{average, barycenter};
    use approx::assert_relative_eq;

    fn gaussian(w: usize, h: usize, cx: f64, cy: f64, sigma: f64) -> Raster {
        Raster::from_fn(w, h, |x, y| {
            (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * sigma * sigma)).exp()
        })
        .unwrap()
    }

    fn smooth_image() -> Raster {
        Raster::from_fn(64, 64, |x, y| {
            let g = |cx: f64, cy: f64, s: f64, a: f64| {
                a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp()
            };
            g(30.0, 33.0, 5.0, 100.0) + g(38.0, 26.0, 3.5, 60.0) + g(25.0, 24.0, 4.0, 40.0)
        })
        .unwrap()
    }

    #[test]
    fn zero_and_constant_rasters() {
        let z = dft2_shifted(&Raster::zeros(8, 8));
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
        let c = dft2_shifted(&Raster::new(8, 8, vec![1.0; 64]).unwrap());
        let (du, dv) = c.dc_index();
        for v in 0..8 {
            for u in 0..8 {
                let expect = if (u, v) == (du, dv) { 64.0 } else { 0.0 };
                assert!((c.bin(u, v) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dc_equals_average() {
        let f = smooth_image();
        let spec = dft2_shifted_padded(&f, 2);
        let (du, dv) = spec.dc_index();
        assert_relative_eq!(spec.bin(du, dv).re, average(&f), max_relative = 1e-12);
    }

    #[test]
    fn gaussian_matches_closed_form() {
        for &sigma in &[3.0, 4.5] {
            let spacing = 1.0;
            let f = gaussian(64, 64, 31.0, 32.0, sigma);
            let spec = dft2_shifted(&f);
            let peak = 2.0 * PI * sigma * sigma;
            let mut max_err: f64 = 0.0;
            for v in 0..spec.height() {
                for u in 0..spec.width() {
                    let lam = spec.bin_frequency(u, v);
                    let env = peak * (-0.5 * sigma * sigma * (lam.x.powi(2) + lam.y.powi(2))).exp();
                    let expect =
                        Complex64::from_polar(env, -(lam.x * 31.0 + lam.y * 32.0) * spacing);
                    max_err = max_err.max((spec.bin(u, v) - expect).norm());
                }
            }
            assert!(max_err / peak <= 1e-6, "sigma {sigma}: {}", max_err / peak);
        }
    }

    #[test]
    fn parseval() {
        let f = smooth_image();
        for pad in [1, 2] {
            let spec = dft2_shifted_padded(&f, pad);
            let lhs: f64 = f.pixels().iter().map(|v| v * v).sum::<f64>();
            let [dx, dy] = spec.freq_step();
            let rhs =
                spec.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dy / (4.0 * PI * PI);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }

    #[test]
    fn conjugate_symmetry_on_lattice() {
        let f = smooth_image();
        let spec = dft2_shifted_padded(&f, 2);
        let [dx, dy] = spec.freq_step();
        for (a, b) in [(1, 0), (3, -2), (7, 5), (-4, 9)] {
            let lam = FrequencyPoint::new(a as f64 * dx, b as f64 * dy);
            let p = spec.sample(lam).unwrap();
            let m = spec.sample(-lam).unwrap();
            assert!((p - m.conj()).norm() <= 1e-12 * p.norm().max(1.0));
        }
        let off = FrequencyPoint::new(0.123, -0.077);
        let p = spec.sample(off).unwrap();
        let m = spec.sample(-off).unwrap();
        assert!((p - m.conj()).norm() <= 1e-12 * p.norm());
    }

    #[test]
    fn sampling_on_and_between_lattice_points() {
        let spec = dft2_shifted(&smooth_image());
        let [dx, _] = spec.freq_step();
        let (du, dv) = spec.dc_index();
        let lam = spec.bin_frequency(du + 3, dv - 2);
        assert_eq!(spec.sample(lam).unwrap(), spec.bin(du + 3, dv - 2));
        let mid = lam + FrequencyPoint::new(0.5 * dx, 0.0);
        let expect = (spec.bin(du + 3, dv - 2) + spec.bin(du + 4, dv - 2)) * 0.5;
        assert!((spec.sample(mid).unwrap() - expect).norm() < 1e-9);
    }

    #[test]
    fn sampling_out_of_band() {
        let spec = dft2_shifted(&smooth_image());
        assert!(matches!(
            spec.sample(FrequencyPoint::new(3.5, 0.0)),
            Err(Error::OutOfBand { .. })
        ));
        assert!(Dtft::from_raster(&smooth_image())
            .eval(FrequencyPoint::new(0.0, -3.2))
            .is_err());
    }

    #[test]
    fn off_grid_sampling_against_direct_sum() {
        let f = smooth_image();
        let spec = dft2_shifted_padded(&f, 2);
        let c = barycenter(&f).unwrap();
        let centered = center_spectrally(&spec, c);
        let shifted = f.clone().with_origin([-c.cx, -c.cy]);
        let direct = Dtft::from_raster(&shifted);
        for (x, y) in [(0.05, 0.02), (-0.11, 0.07), (0.173, -0.141), (0.021, 0.19)] {
            let lam = FrequencyPoint::new(x, y);
            let a = centered.sample(lam).unwrap();
            let b = direct.eval(lam).unwrap();
            assert!((a - b).norm() <= 0.02 * b.norm(), "{lam:?}: {a} vs {b}");
        }
    }

    #[test]
    fn rotations() {
        let e = FrequencyPoint::new(1.0, 0.0);
        assert_eq!(rotate_freq(e, 0, 6), e);
        let r = rotate_freq(e, 1, 6);
        assert_relative_eq!(r.x, 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.y, 0.866_025_403_784_438_6, epsilon = 1e-15);
        let h = rotate_freq(e, 3, 6);
        assert_relative_eq!(h.x, -1.0, epsilon = 1e-15);
        assert!(h.y.abs() < 1e-15);
        let lam = FrequencyPoint::new(0.37, -1.2);
        for k in 0..6 {
            let back = rotate_freq(rotate_freq(lam, k, 6), 6 - k, 6);
            assert!((back - lam).norm() < 1e-12);
        }
    }

    #[test]
    fn center_spectrally_basics() {
        let f = smooth_image();
        let spec = dft2_shifted_padded(&f, 2);
        assert_eq!(
            center_spectrally(&spec, Barycenter { cx: 0.0, cy: 0.0 }),
            spec
        );
        let c = center_spectrally(&spec, Barycenter { cx: 3.3, cy: -7.1 });
        for (a, b) in spec.values().iter().zip(c.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn centering_removes_integer_shifts() {
        let f = smooth_image().embed(96, 96, 16, 16).unwrap();
        let g = f.translate(5, -4);
        let sf = center_spectrally(&dft2_shifted_padded(&f, 2), barycenter(&f).unwrap());
        let sg = center_spectrally(&dft2_shifted_padded(&g, 2), barycenter(&g).unwrap());
        let scale = sf.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in sf.values().iter().zip(sg.values()) {
            assert!((a - b).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn centered_image_has_zero_barycenter() {
        // first moments are -i ∂f̂ at 0; estimate them by central differences
        let f = smooth_image();
        let c = barycenter(&f).unwrap();
        let centered = center_spectrally(&dft2_shifted_padded(&f, 2), c);
        let direct_centered = Dtft::from_raster(&f.clone().with_origin([-c.cx, -c.cy]));
        let h = 1e-4;
        // the interpolated spectrum only resolves the moments to the bin
        // spacing, the direct sum resolves them exactly
        for (src, tol) in [
            (&centered as &dyn FourierSampler, 1e-2),
            (&direct_centered, 1e-6),
        ] {
            let dx = src.eval(FrequencyPoint::new(h, 0.0)).unwrap()
                - src.eval(FrequencyPoint::new(-h, 0.0)).unwrap();
            let dy = src.eval(FrequencyPoint::new(0.0, h)).unwrap()
                - src.eval(FrequencyPoint::new(0.0, -h)).unwrap();
            let avg = average(&f);
            assert!(dx.norm() / (2.0 * h) / avg < tol);
            assert!(dy.norm() / (2.0 * h) / avg < tol);
        }
    }

    #[test]
    fn omega_of_radial_and_zero_images() {
        let f = gaussian(64, 64, 32.0, 32.0, 4.0).with_origin([-32.0, -32.0]);
        let spec = dft2_shifted_padded(&f, 2);
        let w = omega(&spec, FrequencyPoint::new(0.21, 0.05), 6).unwrap();
        for e in &w.entries {
            assert!((e - w.entries[0]).norm() <= 2e-2 * w.entries[0].norm());
        }
        let direct = Dtft::from_raster(&f);
        let wd = omega(&direct, FrequencyPoint::new(0.21, 0.05), 6).unwrap();
        for e in &wd.entries {
            assert!((e - wd.entries[0]).norm() <= 1e-9 * wd.entries[0].norm());
        }
        let z = dft2_shifted(&Raster::zeros(16, 16));
        let wz = omega(&z, FrequencyPoint::new(0.3, 0.1), 6).unwrap();
        assert!(wz.entries.iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn omega_against_direct_evaluations() {
        let f = smooth_image();
        let c = barycenter(&f).unwrap();
        let f = f.with_origin([-c.cx, -c.cy]);
        let spec = dft2_shifted_padded(&f, 2);
        let direct = Dtft::from_raster(&f);
        let lam = FrequencyPoint::new(0.08, 0.03);
        let a = omega(&spec, lam, 6).unwrap();
        for k in 0..6 {
            let b = direct.eval(rotate_freq(lam, -(k as i64), 6)).unwrap();
            assert!((a.entries[k] - b).norm() <= 0.02 * b.norm().max(1.0));
        }
    }

    #[test]
    fn omega_rotation_reindexing() {
        let f = smooth_image();
        let direct = Dtft::from_raster(&f);
        let lam = FrequencyPoint::new(0.1, 0.04);
        let w = omega(&direct, lam, 6).unwrap();
        for h in 0..6 {
            let by_shift = w.rotated(h);
            let by_eval = omega(&direct, rotate_freq(lam, h, 6), 6).unwrap();
            for (a, b) in by_shift.entries.iter().zip(&by_eval.entries) {
                assert!((a - b).norm() <= 1e-9 * b.norm());
            }
        }
    }

    #[test]
    fn even_n_omega_lies_in_x_space() {
        let f = smooth_image();
        let direct = Dtft::from_raster(&f);
        let w = omega(&direct, FrequencyPoint::new(0.13, 0.06), 6).unwrap();
        for h in 0..3 {
            assert!((w.entries[h] - w.entries[h + 3].conj()).norm() <= 1e-9 * w.entries[h].norm());
        }
    }
}

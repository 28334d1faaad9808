//! Grayscale rasters and the pixel-domain operations the descriptor pipeline
//! needs: averages, barycenters, resampling, noise and dataset handling.
//!
//! A [`Raster`] is treated as a compactly supported function on the plane:
//! pixel `(i, j)` (column, row) sits at `origin + (i, j) * spacing` and the
//! function is zero outside the raster extent.

mod io;
mod synth;

pub use io::{
    load_coil_directory, load_dataset_dir, parse_coil_name, read_image, read_manifest, read_pgm,
    write_manifest, write_pgm, CoilLoad, ManifestRow, MANIFEST_NAME,
};
pub use synth::{synth_dataset, synth_dataset_with, SynthConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Real-valued grayscale image on a square pixel lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    origin: [f64; 2],
    spacing: f64,
}

/// Intensity barycenter in continuous coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barycenter {
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub raster: Raster,
    pub class_id: usize,
    pub pose_tag: Option<String>,
}

/// Three-channel image with intensities on the 0..255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub red: Vec<f64>,
    pub green: Vec<f64>,
    pub blue: Vec<f64>,
}

impl Raster {
    /// Builds a raster with origin `(0, 0)` and unit spacing.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        Self::with_geometry(width, height, pixels, [0.0, 0.0], 1.0)
    }

    pub fn with_geometry(
        width: usize,
        height: usize,
        pixels: Vec<f64>,
        origin: [f64; 2],
        spacing: f64,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster("zero-sized raster".into()));
        }
        if width * height != pixels.len() {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height} raster needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidRaster(format!(
                "spacing {spacing} must be > 0"
            )));
        }
        if !origin.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidRaster("origin must be finite".into()));
        }
        if let Some(pos) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidRaster(format!("pixel {pos} is not finite")));
        }
        Ok(Raster {
            width,
            height,
            pixels,
            origin,
            spacing,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Raster::new(width, height, vec![0.0; width * height]).expect("valid zero raster")
    }

    /// Samples `func` at every pixel's continuous coordinates.
    pub fn from_fn(width: usize, height: usize, func: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let pixels = (0..height)
            .flat_map(|j| (0..width).map(move |i| (i as f64, j as f64)))
            .map(|(x, y)| func(x, y))
            .collect();
        Raster::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels[j * self.width + i]
    }

    /// Continuous coordinates of pixel `(i, j)`.
    pub fn coords(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
        ]
    }

    /// Continuous coordinates of the geometric center of the pixel lattice.
    pub fn geometric_center(&self) -> [f64; 2] {
        [
            self.origin[0] + 0.5 * (self.width - 1) as f64 * self.spacing,
            self.origin[1] + 0.5 * (self.height - 1) as f64 * self.spacing,
        ]
    }

    pub fn with_origin(mut self, origin: [f64; 2]) -> Self {
        self.origin = origin;
        self
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn map(&self, func: impl Fn(f64) -> f64) -> Result<Raster> {
        Raster::with_geometry(
            self.width,
            self.height,
            self.pixels.iter().map(|&v| func(v)).collect(),
            self.origin,
            self.spacing,
        )
    }

    /// Bilinear value at fractional pixel indices, zero outside the lattice.
    pub fn interpolate(&self, px: f64, py: f64) -> f64 {
        let x0 = px.floor();
        let y0 = py.floor();
        let tx = px - x0;
        let ty = py - y0;
        let (x0, y0) = (x0 as i64, y0 as i64);
        let at = |i: i64, j: i64| -> f64 {
            if i < 0 || j < 0 || i >= self.width as i64 || j >= self.height as i64 {
                0.0
            } else {
                self.pixels[j as usize * self.width + i as usize]
            }
        };
        (1.0 - ty) * ((1.0 - tx) * at(x0, y0) + tx * at(x0 + 1, y0))
            + ty * ((1.0 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1))
    }

    /// Resamples through a map from output coordinates to source coordinates.
    pub fn resample(&self, source_of: impl Fn([f64; 2]) -> [f64; 2]) -> Raster {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for j in 0..self.height {
            for i in 0..self.width {
                let [sx, sy] = source_of(self.coords(i, j));
                let px = (sx - self.origin[0]) / self.spacing;
                let py = (sy - self.origin[1]) / self.spacing;
                pixels.push(self.interpolate(px, py));
            }
        }
        Raster {
            pixels,
            ..self.clone()
        }
    }

    /// Counterclockwise rotation by `angle` radians about `center`.
    pub fn rotate_about(&self, angle: f64, center: [f64; 2]) -> Raster {
        let (s, c) = angle.sin_cos();
        self.resample(|[x, y]| {
            let dx = x - center[0];
            let dy = y - center[1];
            [center[0] + c * dx + s * dy, center[1] - s * dx + c * dy]
        })
    }

    /// Magnification by `factor` about `center`.
    pub fn scale_about(&self, factor: f64, center: [f64; 2]) -> Raster {
        self.resample(|[x, y]| {
            [
                center[0] + (x - center[0]) / factor,
                center[1] + (y - center[1]) / factor,
            ]
        })
    }

    /// Shift by whole pixels; content leaving the raster is dropped.
    pub fn translate(&self, dx: i64, dy: i64) -> Raster {
        let mut pixels = vec![0.0; self.pixels.len()];
        for j in 0..self.height as i64 {
            let sj = j - dy;
            if sj < 0 || sj >= self.height as i64 {
                continue;
            }
            for i in 0..self.width as i64 {
                let si = i - dx;
                if si < 0 || si >= self.width as i64 {
                    continue;
                }
                pixels[(j as usize) * self.width + i as usize] =
                    self.pixels[(sj as usize) * self.width + si as usize];
            }
        }
        Raster {
            pixels,
            ..self.clone()
        }
    }

    /// Embeds the raster at offset `(ox, oy)` inside a larger zero raster.
    pub fn embed(&self, width: usize, height: usize, ox: usize, oy: usize) -> Result<Raster> {
        if ox + self.width > width || oy + self.height > height {
            return Err(Error::InvalidParameter(format!(
                "{}x{} raster does not fit in {width}x{height} at ({ox},{oy})",
                self.width, self.height
            )));
        }
        let mut pixels = vec![0.0; width * height];
        for j in 0..self.height {
            let dst = (oy + j) * width + ox;
            pixels[dst..dst + self.width]
                .copy_from_slice(&self.pixels[j * self.width..(j + 1) * self.width]);
        }
        let origin = [
            self.origin[0] - ox as f64 * self.spacing,
            self.origin[1] - oy as f64 * self.spacing,
        ];
        Raster::with_geometry(width, height, pixels, origin, self.spacing)
    }
}

/// ITU-R BT.601 luma.
pub fn to_grayscale(rgb: &RgbImage) -> Result<Raster> {
    let n = rgb.width * rgb.height;
    for (name, chan) in [
        ("red", &rgb.red),
        ("green", &rgb.green),
        ("blue", &rgb.blue),
    ] {
        if chan.len() != n {
            return Err(Error::ChannelMismatch(format!(
                "{name} channel has {} values for a {}x{} image",
                chan.len(),
                rgb.width,
                rgb.height
            )));
        }
    }
    let pixels = rgb
        .red
        .iter()
        .zip(&rgb.green)
        .zip(&rgb.blue)
        .map(|((r, g), b)| 0.299 * r + 0.587 * g + 0.114 * b)
        .collect();
    Raster::new(rgb.width, rgb.height, pixels)
}

/// Riemann approximation of the integral of the image.
pub fn average(f: &Raster) -> f64 {
    f.pixels.iter().sum::<f64>() * f.spacing * f.spacing
}

pub fn barycenter(f: &Raster) -> Result<Barycenter> {
    let mut m0 = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for j in 0..f.height {
        for i in 0..f.width {
            let v = f.pixels[j * f.width + i];
            let [x, y] = f.coords(i, j);
            m0 += v;
            mx += x * v;
            my += y * v;
        }
    }
    let tol = 1e-12 * f.pixels.len() as f64 * 255.0;
    if m0.abs() < tol {
        return Err(Error::ZeroAverage {
            average: m0 * f.spacing * f.spacing,
        });
    }
    Ok(Barycenter {
        cx: mx / m0,
        cy: my / m0,
    })
}

/// Adds N(0, s_d²) noise per pixel and clips to [0, 255].
pub fn add_gaussian_noise(f: &Raster, s_d: f64, seed: u64) -> Result<Raster> {
    if !(s_d >= 0.0) || !s_d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise standard deviation {s_d} must be >= 0"
        )));
    }
    if s_d == 0.0 {
        return Ok(f.clone());
    }
    let normal = Normal::new(0.0, s_d).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = f
        .pixels
        .iter()
        .map(|&v| (v + normal.sample(&mut rng)).clamp(0.0, 255.0))
        .collect();
    Ok(Raster {
        pixels,
        ..f.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn blob(w: usize, h: usize, cx: f64, cy: f64, sigma: f64) -> Raster {
        Raster::from_fn(w, h, |x, y| {
            200.0 * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * sigma * sigma)).exp()
        })
        .unwrap()
    }

    #[test]
    fn grayscale_weights() {
        let rgb = RgbImage {
            width: 3,
            height: 1,
            red: vec![255.0, 0.0, 100.0],
            green: vec![255.0, 0.0, 150.0],
            blue: vec![255.0, 0.0, 200.0],
        };
        let g = to_grayscale(&rgb).unwrap();
        assert_relative_eq!(g.pixels()[0], 255.0, epsilon = 1e-12);
        assert_eq!(g.pixels()[1], 0.0);
        assert_relative_eq!(g.pixels()[2], 140.75, epsilon = 1e-12);
    }

    #[test]
    fn grayscale_rejects_mismatched_channels() {
        let rgb = RgbImage {
            width: 2,
            height: 1,
            red: vec![1.0, 2.0],
            green: vec![1.0],
            blue: vec![1.0, 2.0],
        };
        assert!(matches!(to_grayscale(&rgb), Err(Error::ChannelMismatch(_))));
    }

    #[test]
    fn raster_invariants_enforced() {
        assert!(Raster::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Raster::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Raster::with_geometry(1, 1, vec![0.0], [0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn averages() {
        assert_eq!(average(&Raster::zeros(4, 4)), 0.0);
        assert_eq!(average(&Raster::new(2, 2, vec![1.0; 4]).unwrap()), 4.0);
        let ramp =
            Raster::with_geometry(3, 3, (0..9).map(f64::from).collect(), [0.0, 0.0], 0.5).unwrap();
        assert_relative_eq!(average(&ramp), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn average_is_shift_invariant() {
        let f = blob(48, 48, 20.0, 22.0, 3.0);
        let g = f.translate(5, -3);
        assert_relative_eq!(average(&f), average(&g), max_relative = 1e-9);
    }

    #[test]
    fn barycenter_of_single_pixel() {
        let mut px = vec![0.0; 25];
        px[3 * 5 + 2] = 7.0;
        let f = Raster::with_geometry(5, 5, px, [1.0, -2.0], 0.5).unwrap();
        let c = barycenter(&f).unwrap();
        assert_relative_eq!(c.cx, 1.0 + 2.0 * 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.cy, -2.0 + 3.0 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn barycenter_of_symmetric_blob_and_shift() {
        let f = blob(61, 61, 30.0, 30.0, 3.0);
        let c = barycenter(&f).unwrap();
        assert_relative_eq!(c.cx, 30.0, epsilon = 1e-9);
        assert_relative_eq!(c.cy, 30.0, epsilon = 1e-9);
        let g = f.translate(4, -6);
        let d = barycenter(&g).unwrap();
        assert_relative_eq!(d.cx - c.cx, 4.0, epsilon = 1e-9);
        assert_relative_eq!(d.cy - c.cy, -6.0, epsilon = 1e-9);
    }

    #[test]
    fn barycenter_zero_average() {
        assert!(matches!(
            barycenter(&Raster::zeros(8, 8)),
            Err(Error::ZeroAverage { .. })
        ));
    }

    #[test]
    fn noise_zero_sd_is_identity() {
        let f = blob(16, 16, 8.0, 8.0, 2.0);
        assert_eq!(add_gaussian_noise(&f, 0.0, 3).unwrap(), f);
        assert!(add_gaussian_noise(&f, -1.0, 3).is_err());
    }

    #[test]
    fn noise_statistics_and_determinism() {
        let f = Raster::new(128, 128, vec![128.0; 128 * 128]).unwrap();
        let a = add_gaussian_noise(&f, 20.0, 11).unwrap();
        let b = add_gaussian_noise(&f, 20.0, 11).unwrap();
        assert_eq!(a, b);
        let n = a.pixels().len() as f64;
        let mean = a.pixels().iter().sum::<f64>() / n;
        let var = a.pixels().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        assert!((18.0..=22.0).contains(&sd), "sd = {sd}");
        assert_eq!(a.width(), 128);
    }

    #[test]
    fn rotation_by_zero_and_full_turn() {
        let f = blob(32, 32, 14.0, 17.0, 3.0);
        let r = f.rotate_about(0.0, [10.0, 10.0]);
        for (a, b) in f.pixels().iter().zip(r.pixels()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn rotation_quarter_turn_is_exact_on_lattice() {
        let f = blob(33, 33, 12.0, 18.0, 3.0);
        let r = f.rotate_about(std::f64::consts::FRAC_PI_2, [16.0, 16.0]);
        // (x, y) -> (32 - y, x) under a counterclockwise quarter turn about (16, 16)
        for j in 0..33 {
            for i in 0..33 {
                let src = f.get(j, 32 - i);
                assert!((r.get(i, j) - src).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn embed_preserves_coordinates() {
        let f = blob(8, 8, 3.0, 4.0, 1.5);
        let g = f.embed(20, 20, 5, 6).unwrap();
        assert_eq!(g.coords(5, 6), f.coords(0, 0));
        assert_relative_eq!(average(&f), average(&g), epsilon = 1e-12);
        let cf = barycenter(&f).unwrap();
        let cg = barycenter(&g).unwrap();
        assert_relative_eq!(cf.cx, cg.cx, epsilon = 1e-12);
        assert!(f.embed(4, 4, 0, 0).is_err());
    }
}

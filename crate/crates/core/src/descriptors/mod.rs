//! Invariant descriptors on the hexagonal frequency grid and feature-vector
//! assembly.

pub mod fast;
pub mod io;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::baselines::{afmt_features, hu_features, zernike_features, BaselineConfig};
use crate::error::{Error, Result};
use crate::imagecore::{barycenter, Barycenter, LabeledSample, Raster};
use crate::spectral::{
    center_spectrally, dft2_shifted_padded, omega, FourierSampler, FrequencyPoint, GridSpec,
    HexGrid, OmegaVector,
};

pub use fast::{bs_fast, cyclic_bs, cyclic_bs_from, ps_fast, rbs_fast, rps_fast};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DescriptorKind {
    Ps,
    Bs,
    Rps,
    Rbs,
    RpsBs,
    CyclicBs,
    Hu,
    Zernike,
    Afmt,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 9] = [
        DescriptorKind::Ps,
        DescriptorKind::Bs,
        DescriptorKind::Rps,
        DescriptorKind::Rbs,
        DescriptorKind::RpsBs,
        DescriptorKind::CyclicBs,
        DescriptorKind::Hu,
        DescriptorKind::Zernike,
        DescriptorKind::Afmt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DescriptorKind::Ps => "PS",
            DescriptorKind::Bs => "BS",
            DescriptorKind::Rps => "RPS",
            DescriptorKind::Rbs => "RBS",
            DescriptorKind::RpsBs => "RPS+BS",
            DescriptorKind::CyclicBs => "CYCLIC_BS",
            DescriptorKind::Hu => "HU",
            DescriptorKind::Zernike => "ZERNIKE",
            DescriptorKind::Afmt => "AFMT",
        }
    }

    /// Whether the descriptor is computed from the hexagonal grid.
    pub fn is_spectral(self) -> bool {
        !matches!(
            self,
            DescriptorKind::Hu | DescriptorKind::Zernike | DescriptorKind::Afmt
        )
    }
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        DescriptorKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown descriptor kind `{s}`")))
    }
}

/// How complex invariants become real features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Encoding {
    /// Real and imaginary parts, two entries per value.
    #[default]
    ReIm,
    /// Modulus, one entry per value.
    Modulus,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::ReIm => "re_im",
            Encoding::Modulus => "modulus",
        }
    }

    fn width(self) -> usize {
        match self {
            Encoding::ReIm => 2,
            Encoding::Modulus => 1,
        }
    }

    fn push(self, z: Complex64, out: &mut Vec<f64>) {
        match self {
            Encoding::ReIm => {
                out.push(z.re);
                out.push(z.im);
            }
            Encoding::Modulus => out.push(z.norm()),
        }
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "re_im" | "reim" => Ok(Encoding::ReIm),
            "modulus" | "abs" => Ok(Encoding::Modulus),
            other => Err(Error::InvalidParameter(format!(
                "unknown encoding `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorConfig {
    pub n: usize,
    /// Full side of the square frequency window, in padded-spectrum bins.
    pub window: usize,
    /// Hexagonal lattice step, in padded-spectrum bins.
    pub lattice_step: f64,
    /// Zero-padding factor applied before the FFT.
    pub padding: usize,
    pub kind: DescriptorKind,
    pub encoding: Encoding,
    /// Translate the image to its barycenter (spectrally) before sampling.
    pub center: bool,
    pub baseline: BaselineConfig,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        DescriptorConfig {
            n: g.n,
            window: g.window,
            lattice_step: g.lattice_step,
            padding: g.padding,
            kind: DescriptorKind::Rbs,
            encoding: Encoding::ReIm,
            center: true,
            baseline: BaselineConfig::default(),
        }
    }
}

impl DescriptorConfig {
    pub fn with_kind(kind: DescriptorKind) -> Self {
        DescriptorConfig {
            kind,
            ..DescriptorConfig::default()
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            n: self.n,
            window: self.window,
            lattice_step: self.lattice_step,
            padding: self.padding,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("N must be >= 1".into()));
        }
        if self.window < 4 {
            return Err(Error::InvalidParameter("window must be >= 4".into()));
        }
        if self.padding == 0 {
            return Err(Error::InvalidParameter("padding must be >= 1".into()));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<HexGrid> {
        self.validate()?;
        HexGrid::build(&self.grid_spec())
    }

    /// Digest identifying the feature layout: the grid manifest for spectral
    /// kinds, the baseline parameters otherwise. Encoding and centering are
    /// folded in because they change the meaning of the columns.
    pub fn manifest_hash(&self, grid: &HexGrid) -> String {
        let body = if self.kind.is_spectral() {
            grid.manifest_hash().to_string()
        } else {
            self.baseline.describe()
        };
        let text = format!(
            "{} {} center={} {}",
            self.kind,
            self.encoding.name(),
            self.center,
            body
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Number of features produced for this configuration and grid.
    pub fn feature_len(&self, grid: &HexGrid) -> usize {
        let n = grid.n();
        let (p, q) = (grid.points().len(), grid.pairs().len());
        let w = self.encoding.width();
        match self.kind {
            DescriptorKind::Ps => p,
            DescriptorKind::Rps => p * n * w,
            DescriptorKind::Bs => q * w,
            DescriptorKind::Rbs => q * n * w,
            DescriptorKind::RpsBs => p * n * w + q * w,
            DescriptorKind::CyclicBs => q * n * n * w,
            DescriptorKind::Hu => 7,
            DescriptorKind::Zernike => {
                let m = self.baseline.zernike_order;
                (0..=m).map(|k| k / 2 + 1).sum()
            }
            DescriptorKind::Afmt => {
                (2 * self.baseline.afmt_u_max + 1) * self.baseline.afmt_v.len() * w
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub kind: DescriptorKind,
    pub manifest_hash: String,
    pub label: Option<usize>,
}

/// `ω` vectors of one image on the grid, in physical frequency units.
struct OmegaTable<'a> {
    src: &'a dyn FourierSampler,
    unit: f64,
    n: usize,
}

impl OmegaTable<'_> {
    fn at(&self, bins: FrequencyPoint) -> Result<OmegaVector> {
        omega(self.src, bins * self.unit, self.n)
    }
}

/// Raw complex invariants of a spectral descriptor kind, in feature order.
/// `src` is sampled at grid frequencies scaled by `unit` (radians per unit
/// length per grid bin). The power spectrum is real and returned with zero
/// imaginary part.
pub fn spectral_invariants(
    src: &dyn FourierSampler,
    unit: f64,
    grid: &HexGrid,
    kind: DescriptorKind,
) -> Result<Vec<Complex64>> {
    let n = grid.n();
    let table = OmegaTable { src, unit, n };
    let points = grid.points();
    let needs_points = !matches!(
        kind,
        DescriptorKind::Hu | DescriptorKind::Zernike | DescriptorKind::Afmt
    );
    let omegas: Vec<OmegaVector> = if needs_points {
        points.iter().map(|&p| table.at(p)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut out = Vec::new();
    let ps = |out: &mut Vec<Complex64>| {
        for w in &omegas {
            out.push(Complex64::new(ps_fast(w), 0.0));
        }
    };
    let rps = |out: &mut Vec<Complex64>| -> Result<()> {
        for w in &omegas {
            for h in 0..n as i64 {
                out.push(rps_fast(&w.rotated(h), w)?);
            }
        }
        Ok(())
    };
    let sums = || -> Result<Vec<OmegaVector>> {
        grid.pairs()
            .iter()
            .map(|&(i, j)| table.at(grid.pair_sum(i, j)))
            .collect()
    };
    match kind {
        DescriptorKind::Ps => ps(&mut out),
        DescriptorKind::Rps => rps(&mut out)?,
        DescriptorKind::Bs | DescriptorKind::RpsBs => {
            if kind == DescriptorKind::RpsBs {
                rps(&mut out)?;
            }
            for (&(i, j), w12) in grid.pairs().iter().zip(sums()?) {
                out.push(bs_fast(&omegas[i], &omegas[j], &w12)?);
            }
        }
        DescriptorKind::Rbs => {
            for (&(i, j), w12) in grid.pairs().iter().zip(sums()?) {
                for h in 0..n as i64 {
                    out.push(rbs_fast(&omegas[i].rotated(h), &omegas[j], &w12)?);
                }
            }
        }
        DescriptorKind::CyclicBs => {
            for &(i, j) in grid.pairs() {
                let (l1, l2) = (points[i], points[j]);
                // λ1 + R_m λ2 for every m = h + k
                let shifted = (0..n as i64)
                    .map(|m| table.at(l1 + crate::spectral::rotate_freq(l2, m, n)))
                    .collect::<Result<Vec<_>>>()?;
                for k in 0..n as i64 {
                    for h in 0..n as i64 {
                        let w_sum = &shifted[(h + k).rem_euclid(n as i64) as usize];
                        out.push(cyclic_bs_from(&omegas[i], &omegas[j], w_sum, k, h)?);
                    }
                }
            }
        }
        DescriptorKind::Hu | DescriptorKind::Zernike | DescriptorKind::Afmt => {
            return Err(Error::InvalidParameter(format!(
                "{kind} is not a spectral descriptor"
            )))
        }
    }
    Ok(out)
}

fn encode(kind: DescriptorKind, encoding: Encoding, raw: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len() * 2);
    if kind == DescriptorKind::Ps {
        out.extend(raw.iter().map(|z| z.re));
    } else {
        for &z in raw {
            encoding.push(z, &mut out);
        }
    }
    out
}

/// Shift applied before sampling: the barycenter when centering, the
/// geometric centre of the raster otherwise.
fn reference_point(f: &Raster, center: bool) -> Result<Barycenter> {
    if center {
        barycenter(f)
    } else {
        let [cx, cy] = f.geometric_center();
        Ok(Barycenter { cx, cy })
    }
}

/// Radians per unit length corresponding to one bin of the padded spectrum
/// of `f` (the larger side sets the bin width so the lattice is isotropic).
pub fn bin_unit(f: &Raster, padding: usize) -> f64 {
    let side = f.width().max(f.height()) * padding.max(1);
    2.0 * std::f64::consts::PI / (side as f64 * f.spacing())
}

/// Grayscale raster → padded shifted FFT → optional spectral centering at
/// the barycenter → `ω` vectors on the grid → invariants in manifest order →
/// encoding.
pub fn extract_features(
    f: &Raster,
    grid: &HexGrid,
    config: &DescriptorConfig,
) -> Result<FeatureVector> {
    config.validate()?;
    let values = if config.kind.is_spectral() {
        if grid.spec() != &config.grid_spec() {
            return Err(Error::InvalidParameter(
                "grid was built from a different configuration".into(),
            ));
        }
        let shift = reference_point(f, config.center)?;
        let spec = center_spectrally(&dft2_shifted_padded(f, config.padding), shift);
        let raw = spectral_invariants(&spec, bin_unit(f, config.padding), grid, config.kind)?;
        encode(config.kind, config.encoding, &raw)
    } else {
        match config.kind {
            DescriptorKind::Hu => hu_features(f)?,
            DescriptorKind::Zernike => zernike_features(f, config.baseline.zernike_order)?,
            _ => {
                let mut out = Vec::new();
                for z in afmt_features(f, &config.baseline)? {
                    config.encoding.push(z, &mut out);
                }
                out
            }
        }
    };
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite feature at index {bad}"
        )));
    }
    Ok(FeatureVector {
        values,
        kind: config.kind,
        manifest_hash: config.manifest_hash(grid),
        label: None,
    })
}

/// Parallel extraction over labelled samples; output order follows input.
pub fn extract_batch(
    samples: &[LabeledSample],
    grid: &HexGrid,
    config: &DescriptorConfig,
) -> Result<Vec<FeatureVector>> {
    samples
        .par_iter()
        .map(|s| {
            let mut fv = extract_features(&s.raster, grid, config)?;
            fv.label = Some(s.class_id);
            Ok(fv)
        })
        .collect()
}

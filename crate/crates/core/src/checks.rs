//! Numerical property suites over the group machinery, the descriptors and
//! the baselines. Every suite returns per-identity residual rows and passes
//! iff each gated residual is within its tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{afmt, hu_moments, zernike_features, zernike_moments, BaselineConfig};
use crate::descriptors::oracle::{
    bs_scalars, lift_tensor_ft, ps_matrix, ps_scalar, rbs_matrix, rps_matrix, rps_scalar,
};
use crate::descriptors::{
    bin_unit, bs_fast, extract_features, ps_fast, rbs_fast, rps_fast, spectral_invariants,
    DescriptorConfig, DescriptorKind,
};
use crate::error::{Error, Result};
use crate::imagecore::{average, barycenter, synth_dataset, Raster};
use crate::se2n::{
    check_genericity, haar_tensor_ft, induction_apply, kron, lift, lift_ft_rank1, matrix_ft,
    rep_matrix, unitarity_residual, CMatrix, CortexFunction, GroupElement, MotherWavelet,
};
use crate::spectral::{
    omega, rotate_freq, ComplexRaster, Dtft, FourierSampler, FrequencyPoint, HexGrid,
};

/// Rotation order used by every suite.
const N: usize = 6;
/// Number of random test functions in the identity suite.
const IDENTITY_FUNCTIONS: usize = 20;
/// Number of random frequency tuples per descriptor in the oracle suite.
const ORACLE_TUPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Invariance,
    Oracle,
    Genericity,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Identities,
        Suite::Invariance,
        Suite::Oracle,
        Suite::Genericity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Invariance => "invariance",
            Suite::Oracle => "oracle",
            Suite::Genericity => "genericity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// One residual measurement. Rows without a tolerance are informational.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub lambda: Option<[f64; 2]>,
    pub identity: String,
    pub residual: f64,
    pub tolerance: Option<f64>,
}

impl CheckRow {
    fn gated(
        lambda: Option<FrequencyPoint>,
        identity: impl Into<String>,
        residual: f64,
        tol: f64,
    ) -> Self {
        CheckRow {
            lambda: lambda.map(|l| [l.x, l.y]),
            identity: identity.into(),
            residual,
            tolerance: Some(tol),
        }
    }

    fn info(lambda: Option<FrequencyPoint>, identity: impl Into<String>, residual: f64) -> Self {
        CheckRow {
            tolerance: None,
            ..CheckRow::gated(lambda, identity, residual, 0.0)
        }
    }

    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|t| self.residual <= t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: Suite,
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    /// Rows whose identity name starts with `prefix`.
    pub fn select<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.identity.starts_with(prefix))
    }

    /// Largest residual among rows starting with `prefix` (NaN if none).
    pub fn worst(&self, prefix: &str) -> f64 {
        self.select(prefix)
            .map(|r| r.residual)
            .fold(f64::NAN, f64::max)
    }

    /// Whether every gated row starting with `prefix` passed; false if no
    /// row matches.
    pub fn passed_for(&self, prefix: &str) -> bool {
        let mut any = false;
        for r in self.select(prefix) {
            any = true;
            if !r.passed() {
                return false;
            }
        }
        any
    }

    pub fn failures(&self) -> Vec<&CheckRow> {
        self.rows.iter().filter(|r| !r.passed()).collect()
    }

    /// CSV with columns `λx,λy,identity,residual,tolerance,pass`; every
    /// header line is written first as a `#` comment.
    pub fn write_csv_to<W: Write>(&self, out: W, header: &str) -> Result<()> {
        let mut out = out;
        for line in header.lines() {
            writeln!(out, "# {line}").map_err(|e| Error::io("<report>", e))?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["λx", "λy", "identity", "residual", "tolerance", "pass"])?;
        for r in &self.rows {
            let (lx, ly) = r.lambda.map_or((String::new(), String::new()), |l| {
                (format!("{:.12e}", l[0]), format!("{:.12e}", l[1]))
            });
            w.write_record([
                lx,
                ly,
                r.identity.clone(),
                format!("{:.6e}", r.residual),
                r.tolerance.map_or(String::new(), |t| format!("{t:.1e}")),
                if r.tolerance.is_none() {
                    "info".to_string()
                } else {
                    r.passed().to_string()
                },
            ])?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))
    }

    pub fn write_csv(&self, path: &Path, header: &str) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(std::io::BufWriter::new(file), header)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<CheckReport> {
    let rows = match suite {
        Suite::Identities => identities(seed)?,
        Suite::Invariance => invariance(seed)?,
        Suite::Oracle => oracle(seed)?,
        Suite::Genericity => genericity(seed)?,
    };
    Ok(CheckReport { suite, rows })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rel_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(f64::MIN_POSITIVE)
}

fn rel_complex(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `‖a - b‖ / ‖b‖`.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn random_freq(rng: &mut ChaCha8Rng, max: f64) -> FrequencyPoint {
    let r = rng.random_range(0.1 * max..max);
    let a = rng.random_range(0.0..2.0 * PI);
    FrequencyPoint::new(r * a.cos(), r * a.sin())
}

/// Sum of a few Gaussian bumps centred near the origin of a raster whose
/// origin sits at its centre.
fn gaussian_image(rng: &mut ChaCha8Rng, size: usize, spread: f64) -> Raster {
    let bumps: Vec<([f64; 2], f64, f64)> = (0..3)
        .map(|_| {
            (
                [
                    rng.random_range(-spread..spread),
                    rng.random_range(-spread..spread),
                ],
                rng.random_range(1.8..3.5),
                rng.random_range(20.0..80.0),
            )
        })
        .collect();
    let half = (size / 2) as f64;
    Raster::from_fn(size, size, |x, y| {
        let (px, py) = (x - half, y - half);
        bumps
            .iter()
            .map(|(c, s, a)| {
                a * (-((px - c[0]).powi(2) + (py - c[1]).powi(2)) / (2.0 * s * s)).exp()
            })
            .sum()
    })
    .expect("finite samples")
    .with_origin([-half, -half])
}

/// Cortex function whose slices are complex Gaussian bumps.
fn gaussian_cortex(rng: &mut ChaCha8Rng, size: usize) -> CortexFunction {
    let half = (size / 2) as f64;
    let slices = (0..N)
        .map(|_| {
            let c = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let s = rng.random_range(1.5..2.5);
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let mut values = Vec::with_capacity(size * size);
            for j in 0..size {
                for i in 0..size {
                    let (x, y) = (i as f64 - half, j as f64 - half);
                    values.push(
                        amp * (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (2.0 * s * s)).exp(),
                    );
                }
            }
            ComplexRaster {
                width: size,
                height: size,
                values,
                origin: [-half, -half],
                spacing: 1.0,
            }
        })
        .collect();
    CortexFunction::new(slices).expect("equal slices")
}

fn identities(seed: u64) -> Result<Vec<CheckRow>> {
    let psi = MotherWavelet::default();
    let per_function: Vec<Vec<CheckRow>> = (0..IDENTITY_FUNCTIONS)
        .into_par_iter()
        .map(|t| -> Result<Vec<CheckRow>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut rows = Vec::new();

            // block-diagonalization of the tensor coefficient
            let phi = gaussian_cortex(&mut rng, 24);
            let (l1, l2) = (random_freq(&mut rng, 1.2), random_freq(&mut rng, 1.2));
            let blocks = induction_apply(&haar_tensor_ft(&phi, l1, l2))?;
            let scale = (0..N)
                .map(|k| max_abs(blocks.block(k, k)))
                .fold(0.0, f64::max);
            let mut off: f64 = 0.0;
            let mut diag: f64 = 0.0;
            let slices = phi.dtfts();
            for k in 0..N {
                for h in 0..N {
                    if k != h {
                        off = off.max(max_abs(blocks.block(k, h)) / scale);
                    }
                }
                let expect = matrix_ft(&slices, l1 + rotate_freq(l2, k as i64, N))?;
                diag = diag.max(max_abs(&(blocks.block(k, k) - &expect)) / scale);
            }
            rows.push(CheckRow::gated(
                Some(l1),
                "induction_reduction_offdiag",
                off,
                1e-8,
            ));
            rows.push(CheckRow::gated(
                Some(l1),
                "induction_reduction_diag",
                diag,
                1e-8,
            ));

            // tensor lemma on random matrices
            let random = |rng: &mut ChaCha8Rng| {
                CMatrix::from_fn(N, N, |_, _| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            };
            let (p, q) = (random(&mut rng), random(&mut rng));
            let b = induction_apply(&kron(&p, &q))?;
            let mut lemma: f64 = 0.0;
            for k in 0..N {
                for h in 0..N {
                    let expect = CMatrix::from_fn(N, N, |i, j| {
                        p[(i, j)] * q[((i + N - k) % N, (j + N - h) % N)]
                    });
                    lemma = lemma.max(max_abs(&(b.block(k, h) - expect)));
                }
            }
            rows.push(CheckRow::gated(None, "tensor_lemma", lemma, 1e-12));

            // rank-one closed form of the lift coefficient
            let f = gaussian_image(&mut rng, 96, 8.0);
            let lifted = lift(&f, &psi, N)?;
            let lifted_src = lifted.dtfts();
            let fsrc = Dtft::from_raster(&f);
            for _ in 0..2 {
                let lam = random_freq(&mut rng, 0.9);
                let numeric = matrix_ft(&lifted_src, lam)?;
                let closed = lift_ft_rank1(&fsrc, &psi, lam, N)?;
                rows.push(CheckRow::gated(
                    Some(lam),
                    "lift_rank1",
                    rel_matrix(&numeric, &closed),
                    1e-6,
                ));
            }

            // representation homomorphism and unitarity
            let element = |rng: &mut ChaCha8Rng| {
                GroupElement::new(
                    [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)],
                    rng.random_range(0..N as i64),
                    N,
                )
            };
            let lam = random_freq(&mut rng, 2.0);
            let (a, bb) = (element(&mut rng), element(&mut rng));
            let ta = rep_matrix(lam, &a).matrix;
            let tb = rep_matrix(lam, &bb).matrix;
            let tab = rep_matrix(lam, &a.mul(&bb)?).matrix;
            rows.push(CheckRow::gated(
                Some(lam),
                "representation_homomorphism",
                max_abs(&(&ta * &tb - tab)),
                1e-12,
            ));
            rows.push(CheckRow::gated(
                Some(lam),
                "representation_unitarity",
                unitarity_residual(&ta),
                1e-12,
            ));

            // rotated tensor identity with the constant intertwiner of a
            // pure rotation (reported, not gated)
            let (l1, l2) = (random_freq(&mut rng, 1.2), random_freq(&mut rng, 1.2));
            rows.push(CheckRow::info(
                Some(l1),
                "tensor_rotation_intertwiner",
                tensor_rotation_residual(&mut rng, l1, l2)?,
            ));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_function.into_iter().flatten().collect())
}

/// Order used for the rotated tensor identity: quarter turns keep a square
/// grid centered on the origin exact.
const QUARTER: usize = 4;

/// Worst relative residual over `k` of
/// `ĝ(T^{R_k λ1} ⊗ T^{R_k λ2}) = φ̂(T^{R_k λ1} ⊗ T^{R_k λ2}) · U(T^{λ1}) ⊗ U(T^{λ2})`
/// for a random cortex function `φ` on `SE(2,4)`, `g = π(0,1) φ` and
/// `U(T^λ) = T^λ((0,1)^{-1})`.
fn tensor_rotation_residual(
    rng: &mut ChaCha8Rng,
    l1: FrequencyPoint,
    l2: FrequencyPoint,
) -> Result<f64> {
    let size = 11;
    let origin = -((size - 1) as f64) / 2.0;
    let slices: Vec<ComplexRaster> = (0..QUARTER)
        .map(|_| ComplexRaster {
            width: size,
            height: size,
            values: (0..size * size)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            origin: [origin, origin],
            spacing: 1.0,
        })
        .collect();
    // g(x, k) = φ(R_{-1} x, k - 1), with R_{-1}(x, y) = (y, -x)
    let rotated: Vec<ComplexRaster> = (0..QUARTER)
        .map(|k| {
            let src = &slices[(k + QUARTER - 1) % QUARTER];
            let mut values = Vec::with_capacity(size * size);
            for j in 0..size {
                for i in 0..size {
                    values.push(src.values[(size - 1 - i) * size + j]);
                }
            }
            ComplexRaster {
                values,
                ..src.clone()
            }
        })
        .collect();
    let (phi, g) = (CortexFunction::new(slices)?, CortexFunction::new(rotated)?);
    let a_inv = GroupElement::new([0.0, 0.0], 1, QUARTER).inverse();
    let u = kron(
        &rep_matrix(l1, &a_inv).matrix,
        &rep_matrix(l2, &a_inv).matrix,
    );
    let mut worst: f64 = 0.0;
    for k in 0..QUARTER as i64 {
        let (r1, r2) = (rotate_freq(l1, k, QUARTER), rotate_freq(l2, k, QUARTER));
        let lhs = haar_tensor_ft(&phi, r1, r2) * &u;
        worst = worst.max(rel_matrix(&lhs, &haar_tensor_ft(&g, r1, r2)));
    }
    Ok(worst)
}

/// Image transform of `inner` rotated by `R_k` about the origin.
struct RotatedSampler<'a> {
    inner: &'a dyn FourierSampler,
    k: i64,
}

impl FourierSampler for RotatedSampler<'_> {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64> {
        self.inner.eval(rotate_freq(freq, -self.k, N))
    }
}

fn flatten(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Synthetic test images: `count` classes, `poses` evenly spaced turns.
fn test_images(count: usize, seed: u64) -> Result<Vec<Raster>> {
    Ok(synth_dataset(count.max(2), 1, 128, seed)?
        .into_iter()
        .take(count)
        .map(|s| s.raster)
        .collect())
}

/// Raster origin moved so that the barycenter sits at `(0, 0)`.
fn centered(f: &Raster) -> Result<Raster> {
    let b = barycenter(f)?;
    let o = f.origin();
    Ok(f.clone().with_origin([o[0] - b.cx, o[1] - b.cy]))
}

const SPECTRAL_KINDS: [DescriptorKind; 4] = [
    DescriptorKind::Ps,
    DescriptorKind::Bs,
    DescriptorKind::Rps,
    DescriptorKind::Rbs,
];

fn invariance(seed: u64) -> Result<Vec<CheckRow>> {
    let images = test_images(3, seed)?;
    let mut rows = Vec::new();
    for kind in SPECTRAL_KINDS {
        let cfg = DescriptorConfig::with_kind(kind);
        let grid = cfg.build_grid()?;
        for (idx, f) in images.iter().enumerate() {
            let name = |what: &str| format!("{what}_{}_{idx}", kind.name().to_lowercase());
            // exact rotations applied in the frequency domain
            let src = Dtft::from_raster(&centered(f)?);
            let unit = bin_unit(f, cfg.padding);
            let base = flatten(&spectral_invariants(&src, unit, &grid, kind)?);
            let mut exact: f64 = 0.0;
            for k in 1..N as i64 {
                let rotated = RotatedSampler { inner: &src, k };
                exact = exact.max(rel_l2(
                    &flatten(&spectral_invariants(&rotated, unit, &grid, kind)?),
                    &base,
                ));
            }
            rows.push(CheckRow::gated(
                None,
                name("spectral_rotation"),
                exact,
                1e-12,
            ));

            // resampled rotation by 60 degrees
            let a = extract_features(f, &grid, &cfg)?.values;
            let g = f.rotate_about(PI / 3.0, f.geometric_center());
            let r = rel_l2(&extract_features(&g, &grid, &cfg)?.values, &a);
            rows.push(CheckRow::gated(None, name("pixel_rotation"), r, 2e-2));

            // integer translation inside a zero margin, with centering
            let big = f.embed(160, 160, 16, 16)?;
            let moved = f.embed(160, 160, 27, 9)?;
            let t = rel_l2(
                &extract_features(&moved, &grid, &cfg)?.values,
                &extract_features(&big, &grid, &cfg)?.values,
            );
            rows.push(CheckRow::gated(None, name("translation"), t, 1e-6));
        }
    }
    rows.extend(reduction_rows(&images[0])?);
    rows.extend(baseline_rows()?);
    Ok(rows)
}

/// `h = 0` entries of the rotational descriptors against the plain ones.
fn reduction_rows(f: &Raster) -> Result<Vec<CheckRow>> {
    let cfg = DescriptorConfig::default();
    let grid = cfg.build_grid()?;
    let src = Dtft::from_raster(&centered(f)?);
    let unit = bin_unit(f, cfg.padding);
    let ps = spectral_invariants(&src, unit, &grid, DescriptorKind::Ps)?;
    let rps = spectral_invariants(&src, unit, &grid, DescriptorKind::Rps)?;
    let bs = spectral_invariants(&src, unit, &grid, DescriptorKind::Bs)?;
    let rbs = spectral_invariants(&src, unit, &grid, DescriptorKind::Rbs)?;
    let at_h0 = |v: &[Complex64]| v.iter().step_by(N).copied().collect::<Vec<_>>();
    let diff = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| rel_complex(*x, *y))
            .fold(0.0, f64::max)
    };
    Ok(vec![
        CheckRow::gated(
            None,
            "reduction_rps_h0_is_ps",
            diff(&at_h0(&rps), &ps),
            1e-14,
        ),
        CheckRow::gated(
            None,
            "reduction_rbs_h0_is_bs",
            diff(&at_h0(&rbs), &bs),
            1e-14,
        ),
    ])
}

/// Smooth asymmetric test shape centred at `(cx, cy)`.
fn smooth_shape(size: usize, cx: f64, cy: f64, scale: f64) -> Raster {
    Raster::from_fn(size, size, |x, y| {
        let (dx, dy) = ((x - cx) / scale, (y - cy) / scale);
        let g = |ox: f64, oy: f64, s: f64| {
            (-((dx - ox).powi(2) + (dy - oy).powi(2)) / (2.0 * s * s)).exp()
        };
        200.0 * g(0.0, 0.0, 6.0) + 120.0 * g(7.0, -3.0, 3.5) + 90.0 * g(-4.0, 6.0, 2.5)
    })
    .expect("finite samples")
}

fn baseline_rows() -> Result<Vec<CheckRow>> {
    let cfg = BaselineConfig::default();
    let f = smooth_shape(128, 64.0, 64.0, 1.0);
    let mut rows = Vec::new();

    let hu = hu_moments(&f)?;
    let mut rot: f64 = 0.0;
    for angle in [0.4, 1.3, 2.9] {
        rot = rot.max(rel_l2(
            &hu_moments(&f.rotate_about(angle, [64.0, 64.0]))?,
            &hu,
        ));
    }
    rows.push(CheckRow::gated(None, "hu_rotation", rot, 1e-2));
    rows.push(CheckRow::gated(
        None,
        "hu_translation",
        rel_l2(&hu_moments(&f.translate(7, -5))?, &hu),
        1e-2,
    ));
    let scaled = smooth_shape(128, 64.0, 64.0, 2.0);
    rows.push(CheckRow::gated(
        None,
        "hu_scale",
        rel_l2(&hu_moments(&scaled)?, &hu),
        1e-2,
    ));

    let z = zernike_features(&f, cfg.zernike_order)?;
    let mut rot: f64 = 0.0;
    for angle in [0.5, 2.0] {
        rot = rot.max(rel_l2(
            &zernike_features(&f.rotate_about(angle, [64.0, 64.0]), cfg.zernike_order)?,
            &z,
        ));
    }
    rows.push(CheckRow::gated(None, "zernike_rotation", rot, 1e-2));
    let disk = Raster::from_fn(201, 201, |x, y| {
        if (x - 100.0).hypot(y - 100.0) <= 100.5 {
            1.0
        } else {
            0.0
        }
    })?;
    let z00 = zernike_moments(&disk, 0)?.get(0, 0).unwrap_or_default();
    rows.push(CheckRow::gated(
        None,
        "zernike_unit_disk_z00",
        (z00 - 1.0).norm(),
        1e-2,
    ));

    let modulus = |g: &Raster| -> Result<Vec<f64>> {
        Ok(afmt(g, &cfg)?.values.iter().map(|z| z.norm()).collect())
    };
    let base = modulus(&f)?;
    let mut rot: f64 = 0.0;
    for angle in [0.7, 2.2] {
        rot = rot.max(rel_l2(
            &modulus(&f.rotate_about(angle, [64.0, 64.0]))?,
            &base,
        ));
    }
    rows.push(CheckRow::gated(None, "afmt_modulus_rotation", rot, 1e-2));
    Ok(rows)
}

/// Random grid frequency in physical units.
fn grid_freq(rng: &mut ChaCha8Rng, grid: &HexGrid, unit: f64) -> FrequencyPoint {
    grid.points()[rng.random_range(0..grid.points().len())] * unit
}

fn oracle(seed: u64) -> Result<Vec<CheckRow>> {
    let cfg = DescriptorConfig::default();
    let grid = cfg.build_grid()?;
    let f = test_images(1, seed)?.remove(0);
    let f = centered(&f)?;
    let src = Dtft::from_raster(&f);
    let unit = bin_unit(&f, cfg.padding);
    let psi = MotherWavelet::default();
    let per_tuple: Vec<Vec<CheckRow>> = (0..ORACLE_TUPLES)
        .into_par_iter()
        .map(|t| -> Result<Vec<CheckRow>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let l1 = grid_freq(&mut rng, &grid, unit);
            let l2 = grid_freq(&mut rng, &grid, unit);
            let h = rng.random_range(0..N as i64);
            let w1 = omega(&src, l1, N)?;
            let phi1 = lift_ft_rank1(&src, &psi, l1, N)?;
            let mut rows = Vec::with_capacity(4);

            let fit = ps_scalar(&ps_matrix(&phi1)?, &psi, l1)?;
            rows.push(CheckRow::gated(
                Some(l1),
                "oracle_ps",
                rel_complex(fit.scalars[0], ps_fast(&w1).into()),
                1e-8,
            ));

            let first = rotate_freq(l1, h, N);
            let phi1h = lift_ft_rank1(&src, &psi, first, N)?;
            let fit = rps_scalar(&rps_matrix(&phi1h, &phi1)?, &psi, l1, h)?;
            let fast = rps_fast(&w1.rotated(h), &w1)?.conj();
            rows.push(CheckRow::gated(
                Some(l1),
                format!("oracle_rps_h{h}"),
                rel_complex(fit.scalars[0], fast),
                1e-8,
            ));

            let w2 = omega(&src, l2, N)?;
            let w12 = omega(&src, l1 + l2, N)?;
            let phi2 = lift_ft_rank1(&src, &psi, l2, N)?;
            let tensor = lift_tensor_ft(&src, &psi, l1, l2, N)?;
            let fit = bs_scalars(&rbs_matrix(&phi1, &phi2, &tensor)?, &psi, l1, l1, l2)?;
            rows.push(CheckRow::gated(
                Some(l1),
                "oracle_bs",
                rel_complex(fit.scalars[0], bs_fast(&w1, &w2, &w12)?),
                1e-8,
            ));

            let fit = bs_scalars(&rbs_matrix(&phi1h, &phi2, &tensor)?, &psi, first, l1, l2)?;
            let fast = rbs_fast(&w1.rotated(h), &w2, &w12)?;
            rows.push(CheckRow::gated(
                Some(l1),
                format!("oracle_rbs_h{h}"),
                rel_complex(fit.scalars[0], fast),
                1e-8,
            ));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<CheckRow> = per_tuple.into_iter().flatten().collect();
    rows.extend(limit_rows(&f)?);
    rows.push(cyclic_count_row(&grid)?);
    Ok(rows)
}

/// Small-frequency limits: `rbs → N·avg³` and `bs / avg → ps`.
fn limit_rows(f: &Raster) -> Result<Vec<CheckRow>> {
    let src = Dtft::from_raster(f);
    let avg = average(f);
    let eps1 = FrequencyPoint::new(1e-3, 0.0);
    let eps2 = FrequencyPoint::new(0.0, 1e-3);
    let mut rows = Vec::new();
    let target = Complex64::new(N as f64 * avg.powi(3), 0.0);
    let mut worst: f64 = 0.0;
    for h in 0..N as i64 {
        let v = rbs_fast(
            &omega(&src, eps1, N)?.rotated(h),
            &omega(&src, eps2, N)?,
            &omega(&src, eps1 + eps2, N)?,
        )?;
        worst = worst.max(rel_complex(v, target));
    }
    rows.push(CheckRow::gated(
        Some(eps1),
        "limit_rbs_n_avg_cubed",
        worst,
        1e-2,
    ));
    // the bispectrum approaches avg·ps at first order in |λ2| times the
    // image extent, so this limit is taken much closer to zero
    let tiny = FrequencyPoint::new(0.0, 1e-5);
    let unit = bin_unit(f, DescriptorConfig::default().padding);
    let mut worst: f64 = 0.0;
    for lam in [
        FrequencyPoint::new(2.0, 1.0),
        FrequencyPoint::new(-1.0, 3.0),
        FrequencyPoint::new(4.0, 0.0),
    ] {
        let lam = lam * unit;
        let w = omega(&src, lam, N)?;
        let bs = bs_fast(&w, &omega(&src, tiny, N)?, &omega(&src, lam + tiny, N)?)?;
        worst = worst.max(rel_complex(bs / avg, ps_fast(&w).into()));
    }
    rows.push(CheckRow::gated(
        Some(tiny),
        "limit_bs_recovers_ps",
        worst,
        1e-2,
    ));
    Ok(rows)
}

/// Per frequency pair the cyclic family has `N·N` quantities against `N`
/// for the rotational bispectrum; the residual is the deviation from `N×`.
fn cyclic_count_row(grid: &HexGrid) -> Result<CheckRow> {
    let count = |kind| {
        DescriptorConfig {
            kind,
            ..DescriptorConfig::default()
        }
        .feature_len(grid)
    };
    let ratio = count(DescriptorKind::CyclicBs) as f64 / count(DescriptorKind::Rbs) as f64;
    Ok(CheckRow::gated(
        None,
        "cyclic_count_ratio",
        (ratio - N as f64).abs(),
        0.0,
    ))
}

fn genericity(seed: u64) -> Result<Vec<CheckRow>> {
    let cfg = DescriptorConfig::default();
    let grid = cfg.build_grid()?;
    let mut rows = Vec::new();

    let f = centered(&test_images(1, seed)?.remove(0))?;
    let unit = bin_unit(&f, cfg.padding);
    let freqs: Vec<FrequencyPoint> = grid.points().iter().map(|&p| p * unit).collect();
    let report = check_genericity(&Dtft::from_raster(&f), &freqs, N)?;
    for r in &report.rows {
        rows.push(CheckRow::info(
            Some(r.freq),
            "circulant_sv_ratio",
            r.sv_ratio,
        ));
    }
    rows.push(CheckRow::info(
        None,
        "generic_fraction_synthetic",
        report.fraction_generic(),
    ));

    let zero = Raster::zeros(64, 64).with_origin([-32.0, -32.0]);
    let z = check_genericity(&Dtft::from_raster(&zero), &freqs, N)?;
    rows.push(CheckRow::gated(
        None,
        "generic_fraction_zero_image",
        z.fraction_generic(),
        0.0,
    ));

    let radial = Raster::from_fn(65, 65, |x, y| {
        100.0 * (-((x - 32.0).powi(2) + (y - 32.0).powi(2)) / 50.0).exp()
    })?
    .with_origin([-32.0, -32.0]);
    let radial_src = RadialSampler(Dtft::from_raster(&radial));
    let r = check_genericity(&radial_src, &freqs, N)?;
    rows.push(CheckRow::gated(
        None,
        "generic_fraction_radial_image",
        r.fraction_generic(),
        0.0,
    ));
    Ok(rows)
}

/// Rotation-averaged transform: makes a raster's spectrum exactly radial, so
/// every orbit vector has equal entries.
struct RadialSampler(Dtft);

impl FourierSampler for RadialSampler {
    fn eval(&self, freq: FrequencyPoint) -> Result<Complex64> {
        let r = freq.norm();
        self.0.eval(FrequencyPoint::new(r, 0.0))
    }
}

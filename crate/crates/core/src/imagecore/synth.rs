use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{barycenter, LabeledSample, Raster};
use crate::error::{Error, Result};

/// Parameters of the synthetic rotated-object dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub poses: usize,
    pub size: usize,
    pub seed: u64,
    /// Constant background intensity outside the shapes.
    pub background: f64,
}

impl SynthConfig {
    pub fn new(num_classes: usize, poses: usize, size: usize, seed: u64) -> Self {
        SynthConfig {
            num_classes,
            poses,
            size,
            seed,
            background: 0.0,
        }
    }
}

/// Random textured blob described in its own coordinates.
#[derive(Debug, Clone)]
struct Shape {
    radius: f64,
    harmonics: Vec<(f64, f64)>,
    base: f64,
    waves: Vec<([f64; 2], f64, f64)>,
    hole: Option<([f64; 2], f64)>,
}

impl Shape {
    fn random(rng: &mut ChaCha8Rng, size: usize) -> Shape {
        let s = size as f64;
        let radius = s * rng.random_range(0.17..0.25);
        let harmonics = (2..=5)
            .map(|_| {
                (
                    rng.random_range(-0.14..0.14),
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let base = rng.random_range(130.0..220.0);
        let waves = (0..3)
            .map(|_| {
                let ang = rng.random_range(0.0..2.0 * PI);
                let freq = rng.random_range(0.05..0.25);
                (
                    [freq * ang.cos(), freq * ang.sin()],
                    rng.random_range(0.0..2.0 * PI),
                    rng.random_range(0.05..0.2),
                )
            })
            .collect();
        let hole = rng.random_bool(0.5).then(|| {
            let a = rng.random_range(0.0..2.0 * PI);
            let d = radius * rng.random_range(0.2..0.45);
            (
                [d * a.cos(), d * a.sin()],
                radius * rng.random_range(0.12..0.25),
            )
        });
        Shape {
            radius,
            harmonics,
            base,
            waves,
            hole,
        }
    }

    /// Intensity at a point of the shape's local frame, 0 outside.
    fn value(&self, q: [f64; 2]) -> f64 {
        let r = q[0].hypot(q[1]);
        let reach = self.radius * (1.0 + self.harmonics.iter().map(|(a, _)| a.abs()).sum::<f64>());
        if r > reach {
            return 0.0;
        }
        let theta = q[1].atan2(q[0]);
        let boundary = self.radius
            * (1.0
                + self
                    .harmonics
                    .iter()
                    .enumerate()
                    .map(|(m, (a, ph))| a * ((m as f64 + 2.0) * theta + ph).cos())
                    .sum::<f64>());
        if r > boundary {
            return 0.0;
        }
        if let Some((c, rad)) = self.hole {
            if (q[0] - c[0]).hypot(q[1] - c[1]) < rad {
                return 0.0;
            }
        }
        let texture: f64 = self
            .waves
            .iter()
            .map(|(k, ph, amp)| amp * (k[0] * q[0] + k[1] * q[1] + ph).sin())
            .sum();
        (self.base * (1.0 + texture)).clamp(0.0, 255.0)
    }
}

const SUB: [f64; 4] = [-0.375, -0.125, 0.125, 0.375];

/// Renders `shape` rotated by `angle` about the raster center, with the
/// local point `anchor` placed at the center. 4x4 supersampling per pixel.
fn render(shape: &Shape, size: usize, angle: f64, anchor: [f64; 2], background: f64) -> Raster {
    let c = 0.5 * (size as f64 - 1.0);
    let (sn, cs) = angle.sin_cos();
    let mut pixels = Vec::with_capacity(size * size);
    for j in 0..size {
        for i in 0..size {
            let mut acc = 0.0;
            for oy in SUB {
                for ox in SUB {
                    let dx = i as f64 + ox - c;
                    let dy = j as f64 + oy - c;
                    // inverse rotation maps the output point into the shape frame
                    let q = [
                        cs * dx + sn * dy + anchor[0],
                        -sn * dx + cs * dy + anchor[1],
                    ];
                    let v = shape.value(q);
                    acc += if v > 0.0 { v } else { background };
                }
            }
            pixels.push(acc / 16.0);
        }
    }
    Raster::new(size, size, pixels).expect("rendered raster is valid")
}

/// Synthetic dataset: one random shape per class, rendered at `poses`
/// in-plane rotations spaced 360/poses degrees about its barycenter.
pub fn synth_dataset(
    num_classes: usize,
    poses: usize,
    size: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    synth_dataset_with(&SynthConfig::new(num_classes, poses, size, seed))
}

pub fn synth_dataset_with(cfg: &SynthConfig) -> Result<Vec<LabeledSample>> {
    if cfg.num_classes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 classes, got {}",
            cfg.num_classes
        )));
    }
    if cfg.poses < 1 {
        return Err(Error::InvalidParameter("need at least one pose".into()));
    }
    if cfg.size < 32 {
        return Err(Error::InvalidParameter(format!(
            "image size {} is below the 32 pixel minimum",
            cfg.size
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shapes: Vec<Shape> = (0..cfg.num_classes)
        .map(|_| Shape::random(&mut rng, cfg.size))
        .collect();
    let c = 0.5 * (cfg.size as f64 - 1.0);
    let anchors: Vec<[f64; 2]> = shapes
        .par_iter()
        .map(|shape| {
            let r0 = render(shape, cfg.size, 0.0, [0.0, 0.0], 0.0);
            let b = barycenter(&r0)?;
            Ok([b.cx - c, b.cy - c])
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.num_classes)
        .flat_map(|k| (0..cfg.poses).map(move |p| (k, p)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(k, p)| {
            let deg = 360.0 * p as f64 / cfg.poses as f64;
            LabeledSample {
                raster: render(
                    &shapes[k],
                    cfg.size,
                    deg.to_radians(),
                    anchors[k],
                    cfg.background,
                ),
                class_id: k,
                pose_tag: Some(format!("{deg}")),
            }
        })
        .collect())
}

use std::f64::consts::PI;

use num_complex::Complex64;

use super::BaselineConfig;
use crate::error::{Error, Result};
use crate::imagecore::{average, barycenter, Raster};

/// Samples `M(u, v)` of the regularized analytical Fourier–Mellin transform.
#[derive(Debug, Clone, PartialEq)]
pub struct AfmtSet {
    pub sigma: f64,
    pub u_max: usize,
    pub v_grid: Vec<f64>,
    /// Row-major over `u = -u_max..=u_max`, then `v_grid`.
    pub values: Vec<Complex64>,
}

impl AfmtSet {
    pub fn get(&self, u: i64, v_index: usize) -> Complex64 {
        let row = (u + self.u_max as i64) as usize;
        self.values[row * self.v_grid.len() + v_index]
    }
}

/// `M(u,v) = (1/2π) ∫∫ r^σ f(r,θ) r^{-iv} e^{-iuθ} dr/r dθ` about the
/// barycenter (the raster centre for a zero-average image), integrated on a
/// log-polar grid over the inscribed disk. The disk of radius `r_min` around
/// the centre is added in closed form with `f` frozen at the centre value.
pub fn afmt(f: &Raster, cfg: &BaselineConfig) -> Result<AfmtSet> {
    if !(cfg.afmt_sigma > 0.0) {
        return Err(Error::InvalidParameter("afmt sigma must be > 0".into()));
    }
    if cfg.polar_angles == 0 || cfg.polar_radii == 0 {
        return Err(Error::InvalidParameter(
            "polar grid must be non-empty".into(),
        ));
    }
    let center = match barycenter(f) {
        Ok(c) => [c.cx, c.cy],
        Err(Error::ZeroAverage { .. }) => f.geometric_center(),
        Err(e) => return Err(e),
    };
    let sigma = cfg.afmt_sigma;
    let s = f.spacing();
    let r_max = 0.5 * f.width().min(f.height()) as f64 * s;
    let r_min = 1e-2 * s;
    let (l0, l1) = (r_min.ln(), r_max.ln());
    let d_rho = (l1 - l0) / cfg.polar_radii as f64;
    let d_theta = 2.0 * PI / cfg.polar_angles as f64;
    let at = |x: f64, y: f64| f.interpolate((x - f.origin()[0]) / s, (y - f.origin()[1]) / s);

    // angular Fourier coefficients of each ring: a[j][u] = Σ_t f(r_j, θ_t) e^{-iuθ_t} Δθ
    let u_max = cfg.afmt_u_max as i64;
    let rings: Vec<(f64, Vec<Complex64>)> = (0..cfg.polar_radii)
        .map(|j| {
            let rho = l0 + (j as f64 + 0.5) * d_rho;
            let r = rho.exp();
            let samples: Vec<f64> = (0..cfg.polar_angles)
                .map(|t| {
                    let th = t as f64 * d_theta;
                    at(center[0] + r * th.cos(), center[1] + r * th.sin())
                })
                .collect();
            let coeffs = (-u_max..=u_max)
                .map(|u| {
                    samples
                        .iter()
                        .enumerate()
                        .map(|(t, &v)| {
                            Complex64::from_polar(v * d_theta, -(u as f64) * t as f64 * d_theta)
                        })
                        .sum()
                })
                .collect();
            (rho, coeffs)
        })
        .collect();
    let f0 = at(center[0], center[1]);
    let mut values = Vec::with_capacity((2 * cfg.afmt_u_max + 1) * cfg.afmt_v.len());
    for (ui, u) in (-u_max..=u_max).enumerate() {
        for &v in &cfg.afmt_v {
            let expo = Complex64::new(sigma, -v);
            let mut m: Complex64 = rings
                .iter()
                .map(|(rho, c)| c[ui] * (expo * *rho).exp() * d_rho)
                .sum();
            m /= 2.0 * PI;
            if u == 0 {
                m += f0 * (expo * l0).exp() / expo;
            }
            values.push(m);
        }
    }
    Ok(AfmtSet {
        sigma,
        u_max: cfg.afmt_u_max,
        v_grid: cfg.afmt_v.clone(),
        values,
    })
}

/// Rotation-compensated, energy-normalized AFMT samples
/// `c(u,v) = M(u,v) · (M(1,0)/|M(1,0)|)^{-u} / |M(0,0)|`, where `M(·,0)`
/// uses the `v` sample closest to zero.
pub fn afmt_features(f: &Raster, cfg: &BaselineConfig) -> Result<Vec<Complex64>> {
    let set = afmt(f, cfg)?;
    let v0 = cfg
        .afmt_v
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidParameter("afmt v grid is empty".into()))?;
    let m00 = set.get(0, v0).norm();
    if m00 == 0.0 {
        return Err(Error::ZeroAverage {
            average: average(f),
        });
    }
    let phase = if cfg.afmt_u_max >= 1 {
        let m10 = set.get(1, v0);
        if m10.norm() > 0.0 {
            m10 / m10.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    let u_max = cfg.afmt_u_max as i64;
    let mut out = Vec::with_capacity(set.values.len());
    for u in -u_max..=u_max {
        let comp = phase.powi(-u as i32);
        for vi in 0..cfg.afmt_v.len() {
            out.push(set.get(u, vi) * comp / m00);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::test_shapes::{rel_l2, shape};

    #[test]
    fn radial_image_has_only_u_zero() {
        let f = Raster::from_fn(128, 128, |x, y| {
            100.0 * (-((x - 64.0).powi(2) + (y - 64.0).powi(2)) / 200.0).exp()
        })
        .unwrap();
        let cfg = BaselineConfig::default();
        let set = afmt(&f, &cfg).unwrap();
        let m00 = set.get(0, 4).norm();
        for u in -4..=4i64 {
            for vi in 0..9 {
                if u != 0 {
                    assert!(set.get(u, vi).norm() <= 1e-3 * m00, "{u},{vi}");
                }
            }
        }
    }

    #[test]
    fn zero_image_gives_zeros() {
        let set = afmt(&Raster::zeros(32, 32), &BaselineConfig::default()).unwrap();
        assert!(set.values.iter().all(|z| z.norm() == 0.0));
        assert!(afmt_features(&Raster::zeros(32, 32), &BaselineConfig::default()).is_err());
    }

    #[test]
    fn modulus_is_rotation_invariant() {
        let cfg = BaselineConfig::default();
        let f = shape(128, 64.0, 64.0, 1.0);
        let base = afmt(&f, &cfg).unwrap();
        let fb = afmt_features(&f, &cfg).unwrap();
        let modulus = |set: &AfmtSet| set.values.iter().map(|z| z.norm()).collect::<Vec<_>>();
        for angle in [0.7, 2.2] {
            let g = f.rotate_about(angle, [64.0, 64.0]);
            let r = rel_l2(&modulus(&afmt(&g, &cfg).unwrap()), &modulus(&base));
            assert!(r <= 1e-2, "{angle}: {r}");
            let flat = |v: &[Complex64]| v.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>();
            let r = rel_l2(&flat(&afmt_features(&g, &cfg).unwrap()), &flat(&fb));
            assert!(r <= 2e-2, "{angle}: {r}");
        }
    }

    #[test]
    fn m00_scales_with_sigma_power() {
        let cfg = BaselineConfig::default();
        let small = afmt(&shape(160, 80.0, 80.0, 1.0), &cfg).unwrap();
        let big = afmt(&shape(160, 80.0, 80.0, 2.0), &cfg).unwrap();
        let ratio = big.get(0, 4).norm() / small.get(0, 4).norm();
        let expect = 2f64.powf(cfg.afmt_sigma);
        assert!((ratio / expect - 1.0).abs() <= 0.03, "{ratio}");
    }
}

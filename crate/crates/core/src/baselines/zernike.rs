use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::imagecore::{barycenter, Raster};

/// Zernike moments `Z_mn`, `|n| ≤ m`, `m - |n|` even, on the disk inscribed
/// in the raster and centred at the barycenter.
#[derive(Debug, Clone, PartialEq)]
pub struct ZernikeSet {
    pub m_max: usize,
    pub center: [f64; 2],
    pub radius: f64,
    /// `(m, n, Z_mn)` ordered by `m`, then `n` ascending.
    pub moments: Vec<(usize, i64, Complex64)>,
}

impl ZernikeSet {
    pub fn get(&self, m: usize, n: i64) -> Option<Complex64> {
        self.moments
            .iter()
            .find(|&&(a, b, _)| a == m && b == n)
            .map(|&(_, _, z)| z)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `R_mn(ρ) = Σ_s (-1)^s (m-s)! ρ^{m-2s} / (s! ((m+|n|)/2-s)! ((m-|n|)/2-s)!)`.
pub fn radial_polynomial(m: usize, n: i64, rho: f64) -> f64 {
    let an = n.unsigned_abs() as usize;
    if an > m || (m - an) % 2 == 1 {
        return 0.0;
    }
    (0..=(m - an) / 2)
        .map(|s| {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(m - s) * rho.powi((m - 2 * s) as i32)
                / (factorial(s) * factorial((m + an) / 2 - s) * factorial((m - an) / 2 - s))
        })
        .sum()
}

/// `V_mn(ρ, θ) = R_mn(ρ) e^{i n θ}`.
pub fn zernike_basis(m: usize, n: i64, rho: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(radial_polynomial(m, n, rho), n as f64 * theta)
}

fn orders(m_max: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for m in 0..=m_max {
        let mut n = -(m as i64);
        while n <= m as i64 {
            out.push((m, n));
            n += 2;
        }
    }
    out
}

/// `Z_mn = (m+1)/π Σ_{pixels in disk} f · conj V_mn · ΔA` with the disk
/// mapped to the unit disk.
pub fn zernike_moments(f: &Raster, m_max: usize) -> Result<ZernikeSet> {
    let c = barycenter(f)?;
    zernike_moments_at(f, m_max, [c.cx, c.cy])
}

pub(crate) fn zernike_moments_at(f: &Raster, m_max: usize, center: [f64; 2]) -> Result<ZernikeSet> {
    let radius = 0.5 * f.width().min(f.height()) as f64 * f.spacing();
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(
            "raster too small for a disk".into(),
        ));
    }
    let da = (f.spacing() / radius).powi(2);
    let ords = orders(m_max);
    let mut acc = vec![Complex64::new(0.0, 0.0); ords.len()];
    for j in 0..f.height() {
        for i in 0..f.width() {
            let v = f.get(i, j);
            if v == 0.0 {
                continue;
            }
            let [x, y] = f.coords(i, j);
            let (dx, dy) = ((x - center[0]) / radius, (y - center[1]) / radius);
            let rho = dx.hypot(dy);
            if rho > 1.0 {
                continue;
            }
            let theta = dy.atan2(dx);
            for (a, &(m, n)) in acc.iter_mut().zip(&ords) {
                *a += zernike_basis(m, n, rho, theta).conj() * (v * da);
            }
        }
    }
    let moments = ords
        .into_iter()
        .zip(acc)
        .map(|((m, n), z)| (m, n, z * ((m as f64 + 1.0) / PI)))
        .collect();
    Ok(ZernikeSet {
        m_max,
        center,
        radius,
        moments,
    })
}

/// `|Z_mn|` for `n ≥ 0` (for real images `|Z_{m,-n}| = |Z_mn|`).
pub fn zernike_features(f: &Raster, m_max: usize) -> Result<Vec<f64>> {
    Ok(zernike_moments(f, m_max)?
        .moments
        .iter()
        .filter(|&&(_, n, _)| n >= 0)
        .map(|&(_, _, z)| z.norm())
        .collect())
}

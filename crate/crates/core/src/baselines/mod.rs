//! Classical comparison descriptors: Hu moment invariants, Zernike moments
//! and the analytical Fourier–Mellin transform.

mod afmt;
mod hu;
mod zernike;

pub use afmt::{afmt, afmt_features, AfmtSet};
pub use hu::{hu_features, hu_moments, moment_set, MomentSet};
pub use zernike::{
    radial_polynomial, zernike_basis, zernike_features, zernike_moments, ZernikeSet,
};

/// Parameters shared by the baseline descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub zernike_order: usize,
    pub afmt_sigma: f64,
    pub afmt_u_max: usize,
    pub afmt_v: Vec<f64>,
    /// Angular samples of the log-polar resampling.
    pub polar_angles: usize,
    /// Radial samples of the log-polar resampling.
    pub polar_radii: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            zernike_order: 8,
            afmt_sigma: 0.5,
            afmt_u_max: 4,
            afmt_v: (0..9).map(|i| -4.0 + i as f64).collect(),
            polar_angles: 256,
            polar_radii: 128,
        }
    }
}

impl BaselineConfig {
    /// Stable text form, hashed into the feature manifest.
    pub fn describe(&self) -> String {
        format!(
            "zernike_order={} afmt_sigma={} afmt_u_max={} afmt_v={:?} polar={}x{}",
            self.zernike_order,
            self.afmt_sigma,
            self.afmt_u_max,
            self.afmt_v,
            self.polar_angles,
            self.polar_radii
        )
    }
}

/// Signed logarithm `sign(h) · ln|h|`, zero at zero.
pub(crate) fn signed_log(h: f64) -> f64 {
    if h == 0.0 {
        0.0
    } else {
        h.signum() * h.abs().ln()
    }
}

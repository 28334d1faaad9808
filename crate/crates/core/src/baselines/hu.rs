use super::signed_log;
use crate::error::{Error, Result};
use crate::imagecore::{average, barycenter, Raster};

/// Raw, central and normalized moments up to order 3 and the seven Hu
/// invariants. Arrays are indexed `[p][q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub raw: [[f64; 4]; 4],
    pub central: [[f64; 4]; 4],
    pub normalized: [[f64; 4]; 4],
    pub hu: [f64; 7],
}

pub fn moment_set(f: &Raster) -> Result<MomentSet> {
    let c = barycenter(f)?;
    let da = f.spacing() * f.spacing();
    let mut raw = [[0.0; 4]; 4];
    let mut central = [[0.0; 4]; 4];
    for j in 0..f.height() {
        for i in 0..f.width() {
            let v = f.get(i, j);
            if v == 0.0 {
                continue;
            }
            let [x, y] = f.coords(i, j);
            let (dx, dy) = (x - c.cx, y - c.cy);
            for p in 0..4 {
                for q in 0..4 - p {
                    raw[p][q] += x.powi(p as i32) * y.powi(q as i32) * v * da;
                    central[p][q] += dx.powi(p as i32) * dy.powi(q as i32) * v * da;
                }
            }
        }
    }
    let u00 = central[0][0];
    if u00 == 0.0 {
        return Err(Error::ZeroAverage {
            average: average(f),
        });
    }
    let mut normalized = [[0.0; 4]; 4];
    for p in 0..4 {
        for q in 0..4 - p {
            normalized[p][q] = central[p][q] / u00.powf(1.0 + (p + q) as f64 / 2.0);
        }
    }
    let n = &normalized;
    let (n20, n02, n11) = (n[2][0], n[0][2], n[1][1]);
    let (n30, n03, n21, n12) = (n[3][0], n[0][3], n[2][1], n[1][2]);
    let a = n30 + n12;
    let b = n21 + n03;
    let hu = [
        n20 + n02,
        (n20 - n02).powi(2) + 4.0 * n11 * n11,
        (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2),
        a * a + b * b,
        (n30 - 3.0 * n12) * a * (a * a - 3.0 * b * b)
            + (3.0 * n21 - n03) * b * (3.0 * a * a - b * b),
        (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b,
        (3.0 * n21 - n03) * a * (a * a - 3.0 * b * b)
            - (n30 - 3.0 * n12) * b * (3.0 * a * a - b * b),
    ];
    Ok(MomentSet {
        raw,
        central,
        normalized,
        hu,
    })
}

/// The seven Hu invariants.
pub fn hu_moments(f: &Raster) -> Result<[f64; 7]> {
    Ok(moment_set(f)?.hu)
}

/// Hu invariants passed through the signed logarithm.
pub fn hu_features(f: &Raster) -> Result<Vec<f64>> {
    Ok(hu_moments(f)?.iter().map(|&h| signed_log(h)).collect())
}

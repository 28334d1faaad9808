use std::f64::consts::PI;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::FrequencyPoint;
use crate::error::{Error, Result};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Parameters of the hexagonal frequency enumeration. Lengths are in units
/// of one bin of the (padded) spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    /// Full side of the square low-frequency window.
    pub window: usize,
    pub lattice_step: f64,
    /// Zero-padding factor of the spectrum the grid is sampled from.
    pub padding: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 6,
            window: 16,
            lattice_step: 1.0,
            padding: 2,
        }
    }
}

/// Point `a·e1 + b·e2` of the hexagonal lattice `e1 = (s, 0)`,
/// `e2 = (s/2, s√3/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
}

impl LatticePoint {
    pub fn position(self, step: f64) -> FrequencyPoint {
        FrequencyPoint::new(
            step * (self.a as f64 + 0.5 * self.b as f64),
            step * SQRT3_2 * self.b as f64,
        )
    }

    /// Squared radius in units of step².
    fn norm2(self) -> i64 {
        self.a * self.a + self.a * self.b + self.b * self.b
    }
}

impl std::ops::Add for LatticePoint {
    type Output = LatticePoint;

    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

/// Hexagonal frequencies inside the slice and the square window, and the
/// pairs whose sum stays in the window.
#[derive(Debug, Clone, PartialEq)]
pub struct HexGrid {
    spec: GridSpec,
    lattice: Vec<LatticePoint>,
    points: Vec<FrequencyPoint>,
    pairs: Vec<(usize, usize)>,
    manifest_hash: String,
}

fn in_window(p: FrequencyPoint, half: f64) -> bool {
    p.x.abs() <= half + 1e-9 && p.y.abs() <= half + 1e-9
}

fn in_slice(p: FrequencyPoint, n: usize) -> bool {
    if p.norm() <= 1e-12 {
        return false;
    }
    let mut ang = p.y.atan2(p.x);
    if ang < -1e-12 {
        ang += 2.0 * PI;
    }
    ang >= -1e-12 && ang < 2.0 * PI / n as f64 - 1e-9
}

impl HexGrid {
    pub fn build(spec: &GridSpec) -> Result<HexGrid> {
        if spec.n == 0 {
            return Err(Error::InvalidParameter(
                "rotation order must be >= 1".into(),
            ));
        }
        if !(spec.lattice_step > 0.0) {
            return Err(Error::InvalidParameter("lattice step must be > 0".into()));
        }
        let half = spec.window as f64 / 2.0;
        let reach = (2.0 * half / spec.lattice_step).ceil() as i64 + 2;
        let mut lattice = Vec::new();
        for b in -reach..=reach {
            for a in -reach..=reach {
                let lp = LatticePoint { a, b };
                let p = lp.position(spec.lattice_step);
                if in_window(p, half) && in_slice(p, spec.n) {
                    lattice.push(lp);
                }
            }
        }
        if lattice.is_empty() {
            return Err(Error::EmptyGrid);
        }
        lattice.sort_by(|p, q| {
            let ap = p.position(1.0);
            let aq = q.position(1.0);
            p.norm2()
                .cmp(&q.norm2())
                .then(ap.y.atan2(ap.x).total_cmp(&aq.y.atan2(aq.x)))
        });
        let points: Vec<FrequencyPoint> = lattice
            .iter()
            .map(|lp| lp.position(spec.lattice_step))
            .collect();
        let mut pairs = Vec::new();
        for i in 0..lattice.len() {
            for j in i..lattice.len() {
                if in_window((lattice[i] + lattice[j]).position(spec.lattice_step), half) {
                    pairs.push((i, j));
                }
            }
        }
        let mut grid = HexGrid {
            spec: spec.clone(),
            lattice,
            points,
            pairs,
            manifest_hash: String::new(),
        };
        grid.manifest_hash = hex::encode(Sha256::digest(grid.canonical_bytes()));
        Ok(grid)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Grid frequencies in bin units, sorted by radius then angle.
    pub fn points(&self) -> &[FrequencyPoint] {
        &self.points
    }

    pub fn lattice(&self) -> &[LatticePoint] {
        &self.lattice
    }

    /// Unordered pairs `(i, j)`, `i <= j`, in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Both orders of every pair, lexicographic; used when the descriptor is
    /// not symmetric in its two frequencies.
    pub fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .flat_map(|&(i, j)| {
                if i == j {
                    vec![(i, j)]
                } else {
                    vec![(i, j), (j, i)]
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn pair_sum(&self, i: usize, j: usize) -> FrequencyPoint {
        (self.lattice[i] + self.lattice[j]).position(self.spec.lattice_step)
    }

    pub fn manifest_hash(&self) -> &str {
        &self.manifest_hash
    }

    /// Largest |coordinate| reached by any grid point or pair sum, bin units.
    pub fn max_extent(&self) -> f64 {
        let pts = self.points.iter().map(|p| p.x.abs().max(p.y.abs()));
        let sums = self.pairs.iter().map(|&(i, j)| {
            let s = self.pair_sum(i, j);
            s.x.abs().max(s.y.abs())
        });
        pts.chain(sums).fold(0.0, f64::max)
    }

    /// `index,lambda_x,lambda_y` rows in bin units.
    pub fn points_csv(&self) -> String {
        let mut s = String::from("index,lambda_x,lambda_y\n");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", p.x, p.y);
        }
        s
    }

    pub fn pairs_csv(&self) -> String {
        let mut s = String::from("i,j\n");
        for (i, j) in &self.pairs {
            let _ = writeln!(s, "{i},{j}");
        }
        s
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        let spec = &self.spec;
        let mut s = format!(
            "hexgrid n={} window={} step={} padding={}\n",
            spec.n, spec.window, spec.lattice_step, spec.padding
        );
        s.push_str(&self.points_csv());
        s.push_str(&self.pairs_csv());
        s.into_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::rotate_freq;

    fn default_grid() -> HexGrid {
        HexGrid::build(&GridSpec::default()).unwrap()
    }

    fn to_lattice(p: FrequencyPoint, step: f64) -> (f64, f64) {
        let b = p.y / (step * SQRT3_2);
        let a = p.x / step - 0.5 * b;
        (a, b)
    }

    #[test]
    fn golden_counts_and_hash() {
        let g = default_grid();
        assert_eq!(g.points().len(), 55);
        assert_eq!(g.pairs().len(), 272);
        assert_eq!(
            g.ordered_pairs().len(),
            2 * 272 - g.pairs().iter().filter(|(i, j)| i == j).count()
        );
        assert_eq!(g.manifest_hash(), default_grid().manifest_hash());
        assert_eq!(
            g.manifest_hash(),
            "19b3bd45c741c724004a567094a3872751473f3514aa3d137a56d9a042ee21ff"
        );
    }

    #[test]
    fn points_in_slice_and_sorted() {
        let g = default_grid();
        let mut last = (0i64, f64::NEG_INFINITY);
        for (lp, p) in g.lattice().iter().zip(g.points()) {
            let ang = p.y.atan2(p.x);
            assert!(p.norm() > 0.0);
            assert!((0.0..PI / 3.0).contains(&ang));
            let key = (lp.norm2(), ang);
            assert!(key.0 > last.0 || (key.0 == last.0 && key.1 > last.1));
            last = key;
        }
    }

    #[test]
    fn lattice_closure_under_rotations() {
        let g = default_grid();
        let step = g.spec().lattice_step;
        for p in g.points() {
            for k in 0..6 {
                let (a, b) = to_lattice(rotate_freq(*p, -k, 6), step);
                assert!((a - a.round()).abs() < 1e-12 && (b - b.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_two_points_share_an_orbit() {
        let g = default_grid();
        for (i, p) in g.points().iter().enumerate() {
            for q in &g.points()[i + 1..] {
                for k in 0..6 {
                    assert!((rotate_freq(*p, k, 6) - *q).norm() > 1e-9);
                }
            }
        }
    }

    #[test]
    fn pair_sums_stay_in_window() {
        let g = default_grid();
        assert!(g.max_extent() <= 8.0 + 1e-9);
        let mut sorted = g.pairs().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, g.pairs());
    }

    #[test]
    fn tiny_window_is_empty() {
        let spec = GridSpec {
            window: 1,
            lattice_step: 1.0,
            ..GridSpec::default()
        };
        assert!(matches!(HexGrid::build(&spec), Err(Error::EmptyGrid)));
    }

    #[test]
    fn manifest_depends_on_config() {
        let a = default_grid();
        let b = HexGrid::build(&GridSpec {
            window: 12,
            ..GridSpec::default()
        })
        .unwrap();
        assert_ne!(a.manifest_hash(), b.manifest_hash());
        assert!(a
            .points_csv()
            .starts_with("index,lambda_x,lambda_y\n0,1,0\n"));
    }
}

//! Forward operators: the great-circle Funk transform, its hemispherical
//! halves, half-section volumes, the reduced transform on the section
//! manifold, and dataset simulation.

mod simulate;
mod transforms;

pub use simulate::{fibonacci_frames, simulate_dataset, simulate_transform};
pub use transforms::{
    funk_transform, half_section_volume, hemi_funk, reduced_hemi_funk, HalfCircleRule,
    MIN_QUADRATURE_POINTS,
};

use crate::error::{Error, Result};
use crate::sphere::Direction;
use std::collections::HashMap;

/// Frames with |u . e_n| at or above this are treated as equatorial.
pub const EQUATORIAL_TOL: f64 = 1e-9;

/// Which open half-space {± x_n > 0} a half-section lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Hyperplane sections xi = u^perp (k = n - 1).
    Full,
    /// Sections from the reduced manifold, labelled by (v, w).
    Reduced,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Reduced => "reduced",
        }
    }
}

/// The subspace part of a half-section label, without the sign.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameGeometry {
    Full { u: Direction },
    Reduced { v: Direction, w: Direction },
}

impl FrameGeometry {
    /// Hyperplane u^perp; rejected when it is (nearly) orthogonal to e_n.
    pub fn full(u: Direction) -> Result<Self> {
        if u.dim() < 3 {
            return Err(Error::invalid("full frames need n >= 3"));
        }
        if u.last().abs() >= 1.0 - EQUATORIAL_TOL {
            return Err(Error::EquatorialFrame(format!(
                "normal {:?} makes u^perp the equatorial plane",
                u.coords()
            )));
        }
        Ok(FrameGeometry::Full { u })
    }

    /// Reduced-manifold label: v in S^{n-k-1}, w in S^k.
    pub fn reduced(v: Direction, w: Direction) -> Result<Self> {
        let k = w.dim() - 1;
        let n = v.dim() + k;
        if k < 2 || k + 1 >= n {
            return Err(Error::invalid(format!(
                "reduced frames need 2 <= k < n-1, got n={n}, k={k}"
            )));
        }
        if w.last().abs() >= 1.0 - EQUATORIAL_TOL {
            return Err(Error::EquatorialFrame(format!(
                "w = {:?} splits S^k along its equator",
                w.coords()
            )));
        }
        Ok(FrameGeometry::Reduced { v, w })
    }

    pub fn n(&self) -> usize {
        match self {
            FrameGeometry::Full { u } => u.dim(),
            FrameGeometry::Reduced { v, w } => v.dim() + w.dim() - 1,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            FrameGeometry::Full { u } => u.dim() - 1,
            FrameGeometry::Reduced { w, .. } => w.dim() - 1,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            FrameGeometry::Full { .. } => Mode::Full,
            FrameGeometry::Reduced { .. } => Mode::Reduced,
        }
    }

    fn key(&self) -> Vec<u64> {
        match self {
            FrameGeometry::Full { u } => u.coords().iter().map(|c| c.to_bits()).collect(),
            FrameGeometry::Reduced { v, w } => v
                .coords()
                .iter()
                .chain(w.coords())
                .map(|c| c.to_bits())
                .collect(),
        }
    }
}

/// A half-section label: subspace geometry plus hemisphere sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionFrame {
    pub geometry: FrameGeometry,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HemiRecord {
    pub frame: SectionFrame,
    pub value: f64,
}

/// Hemispherical transform values (or half-section volumes) per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HemiDataset {
    n: usize,
    k: usize,
    mode: Mode,
    records: Vec<HemiRecord>,
}

impl HemiDataset {
    /// Checks that all records share (n, k, mode) and carry finite values.
    pub fn new(n: usize, k: usize, mode: Mode, records: Vec<HemiRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            let g = &r.frame.geometry;
            if g.n() != n || g.k() != k || g.mode() != mode {
                return Err(Error::invalid(format!(
                    "record {i} has (n={}, k={}, mode={}) but dataset is (n={n}, k={k}, mode={})",
                    g.n(),
                    g.k(),
                    g.mode().name(),
                    mode.name()
                )));
            }
            if !r.value.is_finite() {
                return Err(Error::invalid(format!("record {i} has a non-finite value")));
            }
        }
        Ok(HemiDataset {
            n,
            k,
            mode,
            records,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn records(&self) -> &[HemiRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Copy with every value multiplied by `a`.
    pub fn scaled(&self, a: f64) -> HemiDataset {
        let mut out = self.clone();
        for r in &mut out.records {
            r.value *= a;
        }
        out
    }

    /// Applies `f(sign, value)` to every record.
    pub fn map_values(&self, f: impl Fn(Sign, f64) -> f64) -> HemiDataset {
        let mut out = self.clone();
        for r in &mut out.records {
            r.value = f(r.frame.sign, r.value);
        }
        out
    }

    /// Values grouped by geometry in first-seen order: (geometry, plus, minus).
    pub fn paired(&self) -> Result<Vec<(FrameGeometry, f64, f64)>> {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut out: Vec<(FrameGeometry, Option<f64>, Option<f64>)> = Vec::new();
        for r in &self.records {
            let key = r.frame.geometry.key();
            let slot = *index.entry(key).or_insert_with(|| {
                out.push((r.frame.geometry.clone(), None, None));
                out.len() - 1
            });
            let cell = match r.frame.sign {
                Sign::Plus => &mut out[slot].1,
                Sign::Minus => &mut out[slot].2,
            };
            if cell.is_some() {
                return Err(Error::invalid(format!(
                    "duplicate {} record for frame {:?}",
                    r.frame.sign.symbol(),
                    r.frame.geometry
                )));
            }
            *cell = Some(r.value);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, (g, p, m))| match (p, m) {
                (Some(p), Some(m)) => Ok((g, p, m)),
                _ => Err(Error::invalid(format!(
                    "frame geometry {i} lacks its {} record",
                    if p.is_none() { "+" } else { "-" }
                ))),
            })
            .collect()
    }

    /// (geometry, value) for the records of one sign.
    pub fn one_sign(&self, sign: Sign) -> Vec<(FrameGeometry, f64)> {
        self.records
            .iter()
            .filter(|r| r.frame.sign == sign)
            .map(|r| (r.frame.geometry.clone(), r.value))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Direction {
        Direction::normalize(v.to_vec()).unwrap()
    }

    #[test]
    fn frame_validation() {
        assert!(matches!(
            FrameGeometry::full(d(&[0.0, 0.0, 1.0])),
            Err(Error::EquatorialFrame(_))
        ));
        let g = FrameGeometry::full(d(&[1.0, 0.0, 0.2])).unwrap();
        assert_eq!((g.n(), g.k(), g.mode()), (3, 2, Mode::Full));
        let r = FrameGeometry::reduced(d(&[1.0, 0.0]), d(&[0.0, 1.0, 0.3])).unwrap();
        assert_eq!((r.n(), r.k()), (4, 2));
        assert!(FrameGeometry::reduced(d(&[1.0, 0.0]), d(&[0.0, 0.0, 1.0])).is_err());
        assert!(FrameGeometry::reduced(d(&[1.0, 0.0]), d(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn pairing() {
        let g = FrameGeometry::full(d(&[1.0, 0.0, 0.2])).unwrap();
        let rec = |s| HemiRecord {
            frame: SectionFrame { geometry: g.clone(), sign: s },
            value: 1.0,
        };
        let ok = HemiDataset::new(3, 2, Mode::Full, vec![rec(Sign::Plus), rec(Sign::Minus)]).unwrap();
        assert_eq!(ok.paired().unwrap().len(), 1);
        let half = HemiDataset::new(3, 2, Mode::Full, vec![rec(Sign::Plus)]).unwrap();
        assert!(half.paired().is_err());
        assert!(HemiDataset::new(4, 3, Mode::Full, vec![rec(Sign::Plus)]).is_err());
        let mut bad = rec(Sign::Plus);
        bad.value = f64::NAN;
        assert!(HemiDataset::new(3, 2, Mode::Full, vec![bad]).is_err());
    }
}

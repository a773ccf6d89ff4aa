//! Spherical geometry substrate: unit directions, quadrature grids on
//! S^1, S^2 and S^3, and the block rotations that carry the reference
//! sphere S^k onto the spheres of the reduced section manifold.

mod grid;
pub mod quadrature;
mod rotation;

pub use grid::{build_grid, point_from_angles, GridLayout, LatLon, SphericalGrid};
pub use rotation::{rotate_point, rotation_to, Rotation};

use crate::error::{Error, Result};

/// Tolerance within which a vector counts as unit length.
pub const UNIT_TOL: f64 = 1e-12;
/// Inputs within this distance of unit length are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// A unit vector in R^n, n >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Validates `coords`, renormalizing small drift off the unit sphere.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid(format!(
                "direction needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("direction has non-finite coordinates"));
        }
        let norm = norm(&coords);
        if (norm - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::invalid(format!(
                "direction is not unit length (|x| = {norm})"
            )));
        }
        if (norm - 1.0).abs() <= UNIT_TOL {
            return Ok(Direction(coords));
        }
        Ok(Direction(coords.into_iter().map(|c| c / norm).collect()))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalize(coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Direction::new(coords.into_iter().map(|c| c / n).collect())
    }

    /// The standard basis vector e_i (0-based index) of R^n.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Direction(c)
    }

    pub(crate) fn from_unit_unchecked(coords: Vec<f64>) -> Self {
        Direction(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// The last coordinate, whose sign picks the hemisphere.
    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn neg(&self) -> Direction {
        Direction(self.0.iter().map(|c| -c).collect())
    }
}

impl AsRef<[f64]> for Direction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Surface area of S^d.
pub fn sphere_area(d: usize) -> f64 {
    use statrs::function::gamma::gamma;
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![1.0]).is_err());
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        let d = Direction::new(vec![1.0 + 1e-10, 0.0]).unwrap();
        assert!((norm(d.coords()) - 1.0).abs() < 1e-15);
        assert!(Direction::new(vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
    }
}

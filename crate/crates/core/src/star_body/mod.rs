//! Star bodies described by their radial functions.

mod function;

pub use function::SphericalFunction;

use crate::error::{check_dim, Error, Result};
use crate::inverse::spectrum::real_sh;
use crate::sphere::{build_grid, dot, Direction, SphericalGrid};
use std::sync::Arc;

/// One term `coef * Y_{degree, order}` of a harmonic perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    pub degree: usize,
    pub order: i64,
    pub coef: f64,
}

#[derive(Debug, Clone)]
pub enum BodyModel {
    Ball { radius: f64 },
    /// Ball of radius `radius` centred at `center`, |center| < radius.
    ShiftedBall { center: Vec<f64>, radius: f64 },
    Ellipsoid { semiaxes: Vec<f64> },
    /// `base + sum coef * Y_{l,m}` on S^2 (n = 3 only).
    HarmonicPerturbed { base: f64, terms: Vec<HarmonicTerm> },
    Tabulated(SphericalFunction),
}

/// A star body in R^n, origin in its interior.
#[derive(Debug, Clone)]
pub struct StarBody {
    n: usize,
    model: BodyModel,
}

impl StarBody {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        check_n(n)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(StarBody {
            n,
            model: BodyModel::Ball { radius },
        })
    }

    pub fn shifted_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        check_n(n)?;
        if !(radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("shifted ball needs finite center and positive radius"));
        }
        let c = dot(&center, &center).sqrt();
        if c >= radius {
            return Err(Error::invalid(format!(
                "origin must be interior: |center| = {c} >= radius = {radius}"
            )));
        }
        Ok(StarBody {
            n,
            model: BodyModel::ShiftedBall { center, radius },
        })
    }

    pub fn ellipsoid(semiaxes: Vec<f64>) -> Result<Self> {
        let n = semiaxes.len();
        check_n(n)?;
        if semiaxes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::invalid("ellipsoid semiaxes must be positive"));
        }
        Ok(StarBody {
            n,
            model: BodyModel::Ellipsoid { semiaxes },
        })
    }

    /// Harmonic perturbation of a ball on S^2; rejected if the radial
    /// function is not positive on a sampling grid.
    pub fn harmonic_perturbed(base: f64, terms: Vec<HarmonicTerm>) -> Result<Self> {
        for t in &terms {
            if t.order.unsigned_abs() as usize > t.degree {
                return Err(Error::invalid(format!(
                    "harmonic order {} exceeds degree {}",
                    t.order, t.degree
                )));
            }
            if !t.coef.is_finite() {
                return Err(Error::invalid("harmonic coefficient is not finite"));
            }
        }
        let body = StarBody {
            n: 3,
            model: BodyModel::HarmonicPerturbed { base, terms },
        };
        let l_max = body.harmonic_degree();
        let grid = build_grid(2, (2 * l_max + 2).max(32))?;
        let min = grid
            .nodes()
            .iter()
            .map(|x| body.radial_raw(x.coords()))
            .fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::invalid(format!(
                "harmonic body is not star-shaped about the origin (sampled minimum radius {min})"
            )));
        }
        Ok(body)
    }

    /// Body given by positive radial values on `grid`.
    pub fn tabulated(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(*v > 0.0)) {
            let angles = grid.node_angles(i);
            return Err(Error::invalid(format!(
                "non-positive radial value {} at node {i} (angles {angles:?})",
                values[i]
            )));
        }
        let n = grid.ambient_dim();
        let f = SphericalFunction::tabulated(grid, values)?;
        Ok(StarBody {
            n,
            model: BodyModel::Tabulated(f),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &BodyModel {
        &self.model
    }

    fn harmonic_degree(&self) -> usize {
        match &self.model {
            BodyModel::HarmonicPerturbed { terms, .. } => {
                terms.iter().map(|t| t.degree).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// The radial function at a direction.
    pub fn radial(&self, theta: &Direction) -> Result<f64> {
        check_dim(self.n, theta.dim())?;
        let r = self.radial_raw(theta.coords());
        if !(r > 0.0) {
            return Err(Error::numerical(format!(
                "radial function is not positive at {:?}",
                theta.coords()
            )));
        }
        Ok(r)
    }

    /// Radial function on raw unit coordinates (no validation).
    pub(crate) fn radial_raw(&self, x: &[f64]) -> f64 {
        match &self.model {
            BodyModel::Ball { radius } => *radius,
            BodyModel::ShiftedBall { center, radius } => {
                let ct = dot(center, x);
                let cc = dot(center, center);
                ct + (radius * radius - cc + ct * ct).sqrt()
            }
            BodyModel::Ellipsoid { semiaxes } => {
                let q: f64 = x.iter().zip(semiaxes).map(|(t, a)| (t / a).powi(2)).sum();
                q.powf(-0.5)
            }
            BodyModel::HarmonicPerturbed { base, terms } => {
                base + terms
                    .iter()
                    .map(|t| t.coef * real_sh(t.degree, t.order, x))
                    .sum::<f64>()
            }
            BodyModel::Tabulated(f) => f.eval(x),
        }
    }

    /// The radial function as a spherical function.
    pub fn radial_function(&self) -> SphericalFunction {
        self.power_function(1).expect("k = 1 is always valid")
    }

    /// theta -> rho(theta)^k, the integrand of the k-dimensional section volume.
    pub fn power_function(&self, k: usize) -> Result<SphericalFunction> {
        if k < 1 || k > self.n - 1 {
            return Err(Error::invalid(format!(
                "power k must satisfy 1 <= k <= n-1 = {}, got {k}",
                self.n - 1
            )));
        }
        let body = self.clone();
        Ok(SphericalFunction::from_fn(self.n, move |x| {
            body.radial_raw(x).powi(k as i32)
        }))
    }

    /// Tabulated copy of this body on `grid`.
    pub fn tabulate(&self, grid: Arc<SphericalGrid>) -> Result<StarBody> {
        check_dim(self.n, grid.ambient_dim())?;
        let values = self.radial_function().sample(&grid);
        StarBody::tabulated(grid, values)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("bodies live in R^n with n >= 2, got {n}")));
    }
    Ok(())
}

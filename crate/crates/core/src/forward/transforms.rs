use super::{FrameGeometry, SectionFrame, Sign, EQUATORIAL_TOL};
use crate::error::{check_dim, Error, Result};
use crate::sphere::quadrature::gauss_legendre;
use crate::sphere::{cross, normalize3, rotation_to, Direction, Rotation};
use crate::star_body::{SphericalFunction, StarBody};
use std::f64::consts::{FRAC_PI_2, TAU};

pub const MIN_QUADRATURE_POINTS: usize = 16;

/// Gauss-Legendre rule on the open half circle t in (-pi/2, pi/2).
///
/// Nodes never touch the endpoints, so integrands that jump across the
/// equator x_n = 0 are integrated piecewise-smoothly.
#[derive(Debug, Clone)]
pub struct HalfCircleRule {
    cos: Vec<f64>,
    sin: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfCircleRule {
    pub fn new(m: usize) -> Result<Self> {
        if m < MIN_QUADRATURE_POINTS {
            return Err(Error::invalid(format!(
                "need at least {MIN_QUADRATURE_POINTS} quadrature points, got {m}"
            )));
        }
        let rule = gauss_legendre(m).mapped(-FRAC_PI_2, FRAC_PI_2);
        Ok(HalfCircleRule {
            cos: rule.nodes.iter().map(|t| t.cos()).collect(),
            sin: rule.nodes.iter().map(|t| t.sin()).collect(),
            weights: rule.weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integral of `g` over the half of the great circle u^perp in R^3
    /// on which `sign * x_3 > 0`.
    pub(crate) fn hemi(&self, g: &dyn Fn(&[f64]) -> f64, u: [f64; 3], sign: Sign) -> Result<f64> {
        let (p, b) = split_basis(u)?;
        let s = sign.factor();
        let mut acc = 0.0;
        for i in 0..self.len() {
            let (c, sn) = (self.cos[i], self.sin[i]);
            let x = [
                s * p[0] * c + b[0] * sn,
                s * p[1] * c + b[1] * sn,
                s * p[2] * c + b[2] * sn,
            ];
            acc += self.weights[i] * g(&x);
        }
        Ok(acc)
    }
}

/// For a great circle u^perp in R^3: the unit direction p of the
/// projection of e_3 onto u^perp, and b = normalize(e_3 x u). On the
/// circle x = p cos t + b sin t, x_3 = a cos t with a = |P e_3|.
fn split_basis(u: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let a = (u[0] * u[0] + u[1] * u[1]).sqrt();
    if u[2].abs() >= 1.0 - EQUATORIAL_TOL || a < EQUATORIAL_TOL {
        return Err(Error::EquatorialFrame(format!(
            "great circle with normal {u:?} does not split across x_n = 0"
        )));
    }
    let b = [-u[1] / a, u[0] / a, 0.0];
    let p = [-u[2] * u[0] / a, -u[2] * u[1] / a, a];
    Ok((p, b))
}

fn as3(u: &Direction) -> Result<[f64; 3]> {
    check_dim(3, u.dim())?;
    let c = u.coords();
    Ok([c[0], c[1], c[2]])
}

/// Integral of `f` over the great circle u^perp of S^2.
///
/// With `m` Gauss nodes on each half circle; when u^perp is (nearly) the
/// equator a uniform `2m`-point rule is used instead.
pub fn funk_transform(f: &SphericalFunction, u: &Direction, m: usize) -> Result<f64> {
    check_dim(3, f.ambient_dim())?;
    let u3 = as3(u)?;
    let rule = HalfCircleRule::new(m)?;
    funk_with(&rule, &|x| f.eval(x), u3)
}

pub(crate) fn funk_with(rule: &HalfCircleRule, g: &dyn Fn(&[f64]) -> f64, u: [f64; 3]) -> Result<f64> {
    match split_basis(u) {
        Ok(_) => Ok(rule.hemi(g, u, Sign::Plus)? + rule.hemi(g, u, Sign::Minus)?),
        Err(_) => {
            let b1 = normalize3([1.0 - u[0] * u[0], -u[0] * u[1], -u[0] * u[2]]);
            let b2 = cross(u, b1);
            let count = 2 * rule.len();
            let h = TAU / count as f64;
            Ok((0..count)
                .map(|j| {
                    let (s, c) = (h * (j as f64 + 0.5)).sin_cos();
                    let x = [
                        b1[0] * c + b2[0] * s,
                        b1[1] * c + b2[1] * s,
                        b1[2] * c + b2[2] * s,
                    ];
                    h * g(&x)
                })
                .sum())
        }
    }
}

/// Integral of `f` over the open half great circle {x in u^perp : sign x_3 > 0}.
pub fn hemi_funk(f: &SphericalFunction, u: &Direction, sign: Sign, m: usize) -> Result<f64> {
    check_dim(3, f.ambient_dim())?;
    let u3 = as3(u)?;
    let rule = HalfCircleRule::new(m)?;
    rule.hemi(&|x| f.eval(x), u3, sign)
}

/// Hemispherical integral over the sphere S^k of the reduced frame (v, w).
///
/// S^k sits in span{e_{n-k}, ..., e_n}; the integrand is f(gamma_v eta)
/// over {eta in S^k : eta . w = 0, sign eta_n > 0}. Only k = 2 is supported.
pub fn reduced_hemi_funk(
    f: &SphericalFunction,
    v: &Direction,
    w: &Direction,
    sign: Sign,
    m: usize,
) -> Result<f64> {
    let rule = HalfCircleRule::new(m)?;
    let n = v.dim() + w.dim() - 1;
    check_dim(n, f.ambient_dim())?;
    let rot = rotation_to(v, n, w.dim() - 1)?;
    reduced_with(&rule, &|x| f.eval(x), &rot, w, sign)
}

pub(crate) fn reduced_with(
    rule: &HalfCircleRule,
    g: &dyn Fn(&[f64]) -> f64,
    rot: &Rotation,
    w: &Direction,
    sign: Sign,
) -> Result<f64> {
    if w.dim() != 3 {
        return Err(Error::invalid(format!(
            "reduced transforms are implemented for k = 2 only (got k = {})",
            w.dim() - 1
        )));
    }
    let n = rot.dim();
    let lifted = |x: &[f64]| {
        let mut eta = vec![0.0; n];
        eta[n - 3..].copy_from_slice(x);
        g(&rot.apply(&eta))
    };
    rule.hemi(&lifted, as3(w)?, sign)
}

/// Volume (1/k) * integral of rho^k over the half-section of `frame`.
pub fn half_section_volume(body: &StarBody, frame: &SectionFrame, m: usize) -> Result<f64> {
    let rule = HalfCircleRule::new(m)?;
    volume_with(&rule, body, frame)
}

pub(crate) fn volume_with(rule: &HalfCircleRule, body: &StarBody, frame: &SectionFrame) -> Result<f64> {
    let k = frame.geometry.k();
    check_dim(body.dim(), frame.geometry.n())?;
    let g = |x: &[f64]| body.radial_raw(x).powi(k as i32);
    Ok(transform_with(rule, &g, frame)? / k as f64)
}

pub(crate) fn transform_with(
    rule: &HalfCircleRule,
    g: &dyn Fn(&[f64]) -> f64,
    frame: &SectionFrame,
) -> Result<f64> {
    match &frame.geometry {
        FrameGeometry::Full { u } => {
            if u.dim() != 3 {
                return Err(Error::invalid(format!(
                    "full-mode transforms are implemented for n = 3 only (got n = {})",
                    u.dim()
                )));
            }
            rule.hemi(g, as3(u)?, frame.sign)
        }
        FrameGeometry::Reduced { v, w } => {
            let rot = rotation_to(v, frame.geometry.n(), frame.geometry.k())?;
            reduced_with(rule, g, &rot, w, frame.sign)
        }
    }
}

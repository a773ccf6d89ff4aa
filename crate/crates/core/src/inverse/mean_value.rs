//! Mean-value inversion of the Funk transform through the shifted dual
//! transform (orbit averages of section data at fixed geodesic distance).
//!
//! With `t = s^2`, the operator `(1/(2s)) d/ds` is `d/dt`, and the dual
//! profile of a band-limited input is a polynomial in `t`. The `s -> 1`
//! limit of each formula is evaluated by fitting that polynomial on an
//! interior `s` grid and differentiating the resulting closed form at
//! `t = 1`.

use super::spectrum::{analyze_values, HarmonicSpectrum};
use crate::error::{Error, Result};
use crate::forward::{funk_transform, MIN_QUADRATURE_POINTS};
use crate::sphere::quadrature::gauss_jacobi_unit;
use crate::sphere::{build_grid, cross, normalize3, Direction};
use crate::star_body::SphericalFunction;
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

/// Normalization of the orbit measure in the shifted dual transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convention {
    /// Rotation-invariant probability measure on each orbit.
    Probability,
    /// Probability measure scaled by a constant.
    Calibrated(f64),
}

impl Convention {
    pub fn kappa(self) -> f64 {
        match self {
            Convention::Probability => 1.0,
            Convention::Calibrated(k) => k,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Probability => write!(f, "probability"),
            Convention::Calibrated(k) => write!(f, "calibrated({k})"),
        }
    }
}

impl FromStr for Convention {
    type Err = Error;

    /// Accepts `probability`, `calibrated:K` and `calibrated(K)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "probability" {
            return Ok(Convention::Probability);
        }
        let body = s
            .strip_prefix("calibrated:")
            .or_else(|| s.strip_prefix("calibrated(").and_then(|r| r.strip_suffix(')')));
        match body.map(|b| b.trim().parse::<f64>()) {
            Some(Ok(k)) if k.is_finite() && k != 0.0 => Ok(Convention::Calibrated(k)),
            _ => Err(Error::invalid(format!(
                "unknown convention '{s}' (expected probability or calibrated:K)"
            ))),
        }
    }
}

/// Which of the mean-value formulas to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// k even: `(1/(2 pi^{k/2})) (d/dt)^{k/2} [s^{k-1} F*(s)]`.
    EvenK,
    /// Any k: `(d/dt)^k` of the Abel-type integral with kernel
    /// `(s^2 - r^2)^{k/2-1} r^k`.
    Abel,
    /// Any k: `(d/ds)^k` of the Abel-type integral with kernel
    /// `(s^2 - r^2)^{k/2-1}` and constant `2^{-k} pi^{-k/2} / Gamma(k/2)`.
    AbelDerivative,
}

/// Samples of the shifted dual transform at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProfile {
    pub theta: Direction,
    /// Increasing s nodes in (0, 1).
    pub s_nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub convention: Convention,
}

/// `count` Chebyshev points in `t = s^2` on `[t_lo, t_hi]`, returned as
/// increasing `s` values.
pub fn chebyshev_s_grid(count: usize, t_lo: f64, t_hi: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..count)
        .map(|j| {
            let x = ((2 * j + 1) as f64 * PI / (2 * count) as f64).cos();
            (0.5 * (t_lo + t_hi) + 0.5 * (t_hi - t_lo) * x).sqrt()
        })
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueOptions {
    pub s_nodes: Vec<f64>,
    pub fit_degree: usize,
    /// Orbit quadrature points.
    pub orbit_points: usize,
    pub formula: Formula,
    /// Gauss-Jacobi points for the Abel-type integrals.
    pub abel_points: usize,
    /// Relative RMS fit residual above which the profile is rejected.
    pub residual_tol: f64,
}

impl Default for MeanValueOptions {
    fn default() -> Self {
        MeanValueOptions {
            s_nodes: chebyshev_s_grid(12, 0.5, 0.9999),
            fit_degree: 8,
            orbit_points: 64,
            formula: Formula::EvenK,
            abel_points: 16,
            residual_tol: 1e-6,
        }
    }
}

impl MeanValueOptions {
    fn validate(&self) -> Result<()> {
        let s = &self.s_nodes;
        if s.is_empty()
            || s.iter().any(|&x| !(x > 0.0 && x < 1.0))
            || s.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::invalid("s grid must be strictly increasing inside (0, 1)"));
        }
        if *s.last().unwrap() < 0.95 {
            return Err(Error::invalid("s grid must reach at least 0.95"));
        }
        if s.len() <= self.fit_degree {
            return Err(Error::invalid(format!(
                "{} s samples cannot support a degree-{} fit",
                s.len(),
                self.fit_degree
            )));
        }
        Ok(())
    }
}

/// Orthonormal pair spanning theta^perp.
fn perp_basis(theta: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if theta[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let b1 = normalize3(cross(theta, pick));
    let b2 = cross(theta, b1);
    (b1, b2)
}

fn dual_raw(phi: &dyn Fn(&[f64]) -> f64, theta: [f64; 3], r: f64, m: usize) -> f64 {
    let (b1, b2) = perp_basis(theta);
    let sin_psi = (1.0 - r * r).sqrt();
    let h = TAU / m as f64;
    let mut acc = 0.0;
    for j in 0..m {
        let (sa, ca) = (h * (j as f64 + 0.5)).sin_cos();
        let u = [
            sin_psi * theta[0] + r * (ca * b1[0] + sa * b2[0]),
            sin_psi * theta[1] + r * (ca * b1[1] + sa * b2[1]),
            sin_psi * theta[2] + r * (ca * b1[2] + sa * b2[2]),
        ];
        acc += phi(&u);
    }
    acc / m as f64
}

fn theta3(theta: &Direction) -> Result<[f64; 3]> {
    if theta.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: theta.dim(),
        });
    }
    let c = theta.coords();
    Ok([c[0], c[1], c[2]])
}

/// Average of the section data phi(u^perp) over the sections at geodesic
/// distance arccos(r) from theta, i.e. over the normals with
/// |theta . u| = sqrt(1 - r^2), scaled by the convention constant.
pub fn shifted_dual_transform(
    phi: &SphericalFunction,
    theta: &Direction,
    r: f64,
    m: usize,
    convention: Convention,
) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("r must lie in (0, 1), got {r}")));
    }
    if m < MIN_QUADRATURE_POINTS {
        return Err(Error::invalid(format!(
            "need at least {MIN_QUADRATURE_POINTS} orbit points, got {m}"
        )));
    }
    let t = theta3(theta)?;
    Ok(convention.kappa() * dual_raw(&|x| phi.eval(x), t, r, m))
}

/// The dual transform sampled on the option's s grid.
pub fn dual_profile(
    phi: &SphericalFunction,
    theta: &Direction,
    opts: &MeanValueOptions,
    convention: Convention,
) -> Result<DualProfile> {
    opts.validate()?;
    let values = opts
        .s_nodes
        .iter()
        .map(|&s| shifted_dual_transform(phi, theta, s, opts.orbit_points, convention))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualProfile {
        theta: theta.clone(),
        s_nodes: opts.s_nodes.clone(),
        values,
        convention,
    })
}

/// Least-squares polynomial in t, stored as monomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub coeffs: Vec<f64>,
    /// Max absolute residual at the samples.
    pub max_residual: f64,
    /// RMS residual relative to the largest |sample|.
    pub relative_residual: f64,
}

impl PolyFit {
    pub fn fit(t: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
        let (lo, hi) = t
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let c = 0.5 * (lo + hi);
        let h = (0.5 * (hi - lo)).max(1e-12);
        let a = DMatrix::from_fn(t.len(), degree + 1, |i, j| ((t[i] - c) / h).powi(j as i32));
        let b = DVector::from_column_slice(y);
        let svd = a.clone().svd(true, true);
        let x = svd
            .solve(&b, 1e-14)
            .map_err(|e| Error::numerical(format!("polynomial fit failed: {e}")))?;
        let resid = &a * &x - &b;
        let max_residual = resid.amax();
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let relative_residual = resid.norm() / (t.len() as f64).sqrt() / scale;
        // expand sum x_i ((t - c)/h)^i into monomials of t
        let mut coeffs = vec![0.0; degree + 1];
        for (i, xi) in x.iter().enumerate() {
            let scale = xi / h.powi(i as i32);
            let mut binom = 1.0;
            for j in 0..=i {
                coeffs[j] += scale * binom * (-c).powi((i - j) as i32);
                binom = binom * (i - j) as f64 / (j + 1) as f64;
            }
        }
        Ok(PolyFit {
            coeffs,
            max_residual,
            relative_residual,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// a (a - 1) ... (a - p + 1).
fn falling(a: f64, p: usize) -> f64 {
    (0..p).map(|i| a - i as f64).product()
}

fn check_fit(fit: &PolyFit, tol: f64) -> Result<()> {
    if fit.relative_residual > tol {
        return Err(Error::numerical(format!(
            "profile not polynomial-resolvable (relative residual {:.3e}); increase samples/degree",
            fit.relative_residual
        )));
    }
    Ok(())
}

/// Applies a mean-value formula to a dual profile `r -> (F* phi)(r)`.
pub fn invert_profile(profile: &dyn Fn(f64) -> f64, k: usize, opts: &MeanValueOptions) -> Result<f64> {
    opts.validate()?;
    if k < 1 {
        return Err(Error::invalid("k must be positive"));
    }
    let kf = k as f64;
    let t: Vec<f64> = opts.s_nodes.iter().map(|s| s * s).collect();
    match opts.formula {
        Formula::EvenK => {
            if k % 2 == 1 {
                return Err(Error::invalid("the even-k formula needs even k"));
            }
            let y: Vec<f64> = opts.s_nodes.iter().map(|&s| profile(s)).collect();
            let fit = PolyFit::fit(&t, &y, opts.fit_degree)?;
            check_fit(&fit, opts.residual_tol)?;
            // (d/dt)^{k/2} [t^{(k-1)/2} P(t)] at t = 1
            let d: f64 = fit
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| p * falling(j as f64 + (kf - 1.0) / 2.0, k / 2))
                .sum();
            Ok(d / (2.0 * PI.powf(kf / 2.0)))
        }
        Formula::Abel => {
            // B(t) = c/2 t^{k-1/2} int_0^1 (1-x)^{k/2-1} x^{(k-1)/2} F*(sqrt(t x)) dx
            let rule = gauss_jacobi_unit(opts.abel_points, kf / 2.0 - 1.0, (kf - 1.0) / 2.0);
            let c = PI.powf(-kf / 2.0) / gamma(kf / 2.0);
            let q: Vec<f64> = t
                .iter()
                .map(|&tt| 0.5 * c * rule.integrate(|x| profile((tt * x).sqrt())))
                .collect();
            let fit = PolyFit::fit(&t, &q, opts.fit_degree)?;
            check_fit(&fit, opts.residual_tol)?;
            Ok(fit
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| p * falling(j as f64 + kf - 0.5, k))
                .sum())
        }
        Formula::AbelDerivative => {
            // B(s) = c/2 s^{k-1} int_0^1 (1-x)^{k/2-1} x^{-1/2} F*(s sqrt(x)) dx
            let rule = gauss_jacobi_unit(opts.abel_points, kf / 2.0 - 1.0, -0.5);
            let c = 2f64.powf(-kf) * PI.powf(-kf / 2.0) / gamma(kf / 2.0);
            let q: Vec<f64> = opts
                .s_nodes
                .iter()
                .map(|&s| 0.5 * c * rule.integrate(|x| profile(s * x.sqrt())))
                .collect();
            let fit = PolyFit::fit(&t, &q, opts.fit_degree)?;
            check_fit(&fit, opts.residual_tol)?;
            // (d/ds)^k sum_j r_j s^{2j+k-1} at s = 1
            Ok(fit
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, p)| p * falling((2 * j) as f64 + kf - 1.0, k))
                .sum())
        }
    }
}

/// Mean-value reconstruction of f(theta) from phi = F f (k = 2 on S^2).
pub fn mean_value_inverse(
    phi: &SphericalFunction,
    theta: &Direction,
    k: usize,
    opts: &MeanValueOptions,
    convention: Convention,
) -> Result<f64> {
    if k != 2 || phi.ambient_dim() != 3 {
        return Err(Error::invalid(
            "the shifted dual transform is implemented for great circles of S^2 (n = 3, k = 2)",
        ));
    }
    if opts.orbit_points < MIN_QUADRATURE_POINTS {
        return Err(Error::invalid(format!(
            "need at least {MIN_QUADRATURE_POINTS} orbit points"
        )));
    }
    let t = theta3(theta)?;
    let kappa = convention.kappa();
    let m = opts.orbit_points;
    let profile = |r: f64| kappa * dual_raw(&|x| phi.eval(x), t, r, m);
    invert_profile(&profile, k, opts)
}

/// Outcome of pushing a degree-l harmonic through the mean-value pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub degree: usize,
    /// Output / input ratio on the probed harmonic.
    pub mu: f64,
    /// RMS amplitude of the output outside the input direction, relative
    /// to the output.
    pub cross_talk: f64,
    pub flagged: bool,
}

/// Deterministic unit-norm combination of the degree-l harmonics.
fn probe_spectrum(l: usize) -> HarmonicSpectrum {
    let mut s = HarmonicSpectrum::zeros(l);
    let mut norm = 0.0;
    for m in -(l as i64)..=(l as i64) {
        let a = (1.3 * m as f64 + 0.7).cos() + 0.1;
        s.set(l, m, a);
        norm += a * a;
    }
    s.map_degrees(|_| 1.0 / norm.sqrt())
}

/// Runs the whole mean-value pipeline on phi = F(Y) for a degree-`l`
/// harmonic Y and measures the output's scale and leakage.
pub fn multiplier_probe(l: usize, convention: Convention, opts: &MeanValueOptions) -> Result<ProbeResult> {
    if l % 2 == 1 {
        return Err(Error::invalid(format!("probe degree {l} must be even")));
    }
    let input = probe_spectrum(l);
    let y = SphericalFunction::harmonic(input.clone());
    // Funk image by quadrature, re-expanded for evaluation on the orbits
    let analysis = l + 4;
    let grid = build_grid(2, 2 * analysis)?;
    let image: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|u| funk_transform(&y, u, 64))
        .collect::<Result<_>>()?;
    let phi = SphericalFunction::harmonic(analyze_values(&grid, &image, l)?);
    let out: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|x| mean_value_inverse(&phi, x, 2, opts, convention))
        .collect::<Result<_>>()?;
    let spec = analyze_values(&grid, &out, analysis)?;
    let mu: f64 = (0..input.coeffs().len())
        .map(|i| input.coeffs()[i] * spec.coeffs()[i])
        .sum();
    let total = spec.total_energy();
    let resid = total - mu * mu;
    let cross_talk = if total > 0.0 { (resid.max(0.0) / total).sqrt() } else { 0.0 };
    Ok(ProbeResult {
        degree: l,
        mu,
        cross_talk,
        flagged: cross_talk > 1e-3,
    })
}

//! Real spherical harmonics on S^2 and quadrature-based analysis and
//! synthesis on latitude-longitude grids.
//!
//! Basis: `Y_{l,0} = N P_l(cos t)`, `Y_{l,m} = sqrt(2) N P_l^m(cos t) cos(m p)`
//! and `Y_{l,-m} = sqrt(2) N P_l^m(cos t) sin(m p)` for m > 0, with the
//! Condon-Shortley phase omitted and each function of unit L^2 norm over
//! the full sphere. Coefficients are stored flat at index `l*l + l + m`.

use crate::error::{Error, Result};
use crate::sphere::{GridLayout, LatLon, SphericalGrid};
use crate::star_body::SphericalFunction;
use std::f64::consts::{PI, SQRT_2, TAU};

/// Flat index of (l, m), -l <= m <= l.
pub fn sh_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

fn plm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values `N_lm P_l^m(x)` for all
/// 0 <= m <= l <= l_max, where `s = sqrt(1 - x^2)` is passed separately
/// to keep precision near the poles.
pub(crate) fn legendre_table(l_max: usize, x: f64, s: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize((l_max + 1) * (l_max + 2) / 2, 0.0);
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            pmm *= s * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        out[plm_index(m, m)] = pmm;
        if m < l_max {
            out[plm_index(m + 1, m)] = x * ((2 * m + 3) as f64).sqrt() * pmm;
        }
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            out[plm_index(l, m)] = a * (x * out[plm_index(l - 1, m)] - b * out[plm_index(l - 2, m)]);
        }
    }
}

/// Writes every real harmonic up to `l_max` at the unit vector `x` into `out`.
pub fn eval_basis(l_max: usize, x: &[f64], out: &mut Vec<f64>) {
    let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let phi = x[1].atan2(x[0]);
    let mut plm = Vec::new();
    legendre_table(l_max, x[2], s, &mut plm);
    out.clear();
    out.resize((l_max + 1) * (l_max + 1), 0.0);
    for m in 0..=l_max {
        let (sm, cm) = (m as f64 * phi).sin_cos();
        for l in m..=l_max {
            let p = plm[plm_index(l, m)];
            if m == 0 {
                out[l * l + l] = p;
            } else {
                out[l * l + l + m] = SQRT_2 * p * cm;
                out[l * l + l - m] = SQRT_2 * p * sm;
            }
        }
    }
}

/// A single real harmonic `Y_{l,m}` at `x`.
pub fn real_sh(l: usize, m: i64, x: &[f64]) -> f64 {
    let mut out = Vec::new();
    eval_basis(l, x, &mut out);
    out[sh_index(l, m)]
}

/// Coefficients of a real spherical function up to degree `l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    l_max: usize,
    coeffs: Vec<f64>,
}

impl HarmonicSpectrum {
    pub fn zeros(l_max: usize) -> Self {
        HarmonicSpectrum {
            l_max,
            coeffs: vec![0.0; (l_max + 1) * (l_max + 1)],
        }
    }

    pub fn from_coeffs(l_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != (l_max + 1) * (l_max + 1) {
            return Err(Error::invalid(format!(
                "spectrum of degree {l_max} needs {} coefficients, got {}",
                (l_max + 1) * (l_max + 1),
                coeffs.len()
            )));
        }
        Ok(HarmonicSpectrum { l_max, coeffs })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.coeffs[sh_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        let i = sh_index(l, m);
        self.coeffs[i] = value;
    }

    /// Sum of squared coefficients of degree `l`.
    pub fn degree_energy(&self, l: usize) -> f64 {
        self.coeffs[l * l..(l + 1) * (l + 1)].iter().map(|c| c * c).sum()
    }

    pub fn total_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Multiplies each degree-l block by `f(l)`.
    pub fn map_degrees(&self, f: impl Fn(usize) -> f64) -> HarmonicSpectrum {
        let mut out = self.clone();
        for l in 0..=self.l_max {
            let g = f(l);
            for c in &mut out.coeffs[l * l..(l + 1) * (l + 1)] {
                *c *= g;
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let phi = x[1].atan2(x[0]);
        let mut plm = Vec::new();
        legendre_table(self.l_max, x[2], s, &mut plm);
        let mut acc = 0.0;
        let (s1, c1) = phi.sin_cos();
        let (mut sm, mut cm) = (0.0, 1.0);
        for m in 0..=self.l_max {
            let mut cs = 0.0;
            let mut ss = 0.0;
            for l in m..=self.l_max {
                let p = plm[plm_index(l, m)];
                cs += self.coeffs[l * l + l + m] * p;
                if m > 0 {
                    ss += self.coeffs[l * l + l - m] * p;
                }
            }
            if m == 0 {
                acc += cs;
            } else {
                acc += SQRT_2 * (cs * cm + ss * sm);
            }
            let next_c = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = next_c;
        }
        acc
    }
}

fn latlon(grid: &SphericalGrid) -> Result<&LatLon> {
    match grid.layout() {
        GridLayout::LatLon(ll) => Ok(ll),
        _ => Err(Error::invalid("harmonic transforms need an S^2 grid")),
    }
}

/// Quadrature analysis of node values on an S^2 grid. The grid must carry
/// at least `2 * l_max` rings.
pub fn analyze_values(grid: &SphericalGrid, values: &[f64], l_max: usize) -> Result<HarmonicSpectrum> {
    let ll = latlon(grid)?;
    if grid.resolution() < 2 * l_max {
        return Err(Error::invalid(format!(
            "grid resolution {} too low for degree {l_max} (need >= {})",
            grid.resolution(),
            2 * l_max
        )));
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let na = ll.n_azimuth;
    let trig = azimuth_table(na, l_max);
    let mut spec = HarmonicSpectrum::zeros(l_max);
    let mut plm = Vec::new();
    let dphi = TAU / na as f64;
    for i in 0..ll.n_rings() {
        let row = &values[i * na..(i + 1) * na];
        let w = ll.ring_weights[i] * dphi;
        let c = ll.cos_polar[i];
        legendre_table(l_max, c, (1.0 - c * c).sqrt(), &mut plm);
        for m in 0..=l_max {
            let (mut a, mut b) = (0.0, 0.0);
            let tc = &trig.0[m * na..(m + 1) * na];
            let ts = &trig.1[m * na..(m + 1) * na];
            for j in 0..na {
                a += row[j] * tc[j];
                b += row[j] * ts[j];
            }
            for l in m..=l_max {
                let p = w * plm[plm_index(l, m)];
                if m == 0 {
                    spec.coeffs[l * l + l] += p * a;
                } else {
                    spec.coeffs[l * l + l + m] += SQRT_2 * p * a;
                    spec.coeffs[l * l + l - m] += SQRT_2 * p * b;
                }
            }
        }
    }
    Ok(spec)
}

/// Samples `f` on `grid` and analyzes it.
pub fn analyze(f: &SphericalFunction, grid: &SphericalGrid, l_max: usize) -> Result<HarmonicSpectrum> {
    if f.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: f.ambient_dim(),
        });
    }
    let values = f.sample(grid);
    analyze_values(grid, &values, l_max)
}

/// Node values of the spectrum on an S^2 grid (separable fast synthesis).
pub fn synthesize_values(spec: &HarmonicSpectrum, grid: &SphericalGrid) -> Result<Vec<f64>> {
    let ll = latlon(grid)?;
    let l_max = spec.l_max;
    let na = ll.n_azimuth;
    let trig = azimuth_table(na, l_max);
    let mut out = vec![0.0; grid.len()];
    let mut plm = Vec::new();
    let mut cs = vec![0.0; l_max + 1];
    let mut ss = vec![0.0; l_max + 1];
    for i in 0..ll.n_rings() {
        let c = ll.cos_polar[i];
        legendre_table(l_max, c, (1.0 - c * c).sqrt(), &mut plm);
        for m in 0..=l_max {
            cs[m] = 0.0;
            ss[m] = 0.0;
            for l in m..=l_max {
                let p = plm[plm_index(l, m)];
                cs[m] += spec.coeffs[l * l + l + m] * p;
                if m > 0 {
                    ss[m] += spec.coeffs[l * l + l - m] * p;
                }
            }
        }
        let row = &mut out[i * na..(i + 1) * na];
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = cs[0];
            for m in 1..=l_max {
                acc += SQRT_2 * (cs[m] * trig.0[m * na + j] + ss[m] * trig.1[m * na + j]);
            }
            *v = acc;
        }
    }
    Ok(out)
}

/// The band-limited function with this spectrum.
pub fn synthesize(spec: &HarmonicSpectrum) -> SphericalFunction {
    SphericalFunction::harmonic(spec.clone())
}

fn azimuth_table(na: usize, l_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = vec![0.0; na * (l_max + 1)];
    let mut s = vec![0.0; na * (l_max + 1)];
    for m in 0..=l_max {
        for j in 0..na {
            let a = (m * j % na) as f64 * TAU / na as f64;
            let (sa, ca) = a.sin_cos();
            c[m * na + j] = ca;
            s[m * na + j] = sa;
        }
    }
    (c, s)
}

use super::{clamp_warning, PointIndex, kth_root, plus_weight, Backend, Diagnostics, ReconOptions, ReconstructionResult};
use crate::error::{Error, Result};
use crate::forward::{FrameGeometry, HemiDataset, Mode, Sign};
use crate::inverse::spectrum::analyze_values;
use crate::inverse::{invert_spectrum, mean_value_inverse, HarmonicSpectrum};
use crate::sphere::{build_grid, Direction, SphericalGrid};
use crate::star_body::{SphericalFunction, StarBody};
use rayon::prelude::*;
use std::sync::Arc;

/// Inversion of one hemisphere's data.
#[derive(Debug, Clone)]
pub struct SideInversion {
    pub sign: Sign,
    /// The data as a band-limited function of the normal u.
    pub data_spectrum: HarmonicSpectrum,
    /// 2 F^{-1} of the data (harmonic backend).
    pub spectrum: HarmonicSpectrum,
    pub fit_residual: f64,
    pub odd_energy_fraction: f64,
    pub warnings: Vec<String>,
}

/// Hemispherical inversion on S^2: f = 2 F^{-1} phi^+ on the upper
/// hemisphere and 2 F^{-1} phi^- on the lower one.
#[derive(Debug, Clone)]
pub struct HemiInversion {
    pub plus: Option<SideInversion>,
    pub minus: Option<SideInversion>,
    pub band: f64,
    pub backend: Backend,
}

impl HemiInversion {
    fn side_value(&self, side: &SideInversion, x: &[f64]) -> Result<f64> {
        match &self.backend {
            Backend::Harmonic => Ok(side.spectrum.evaluate(x)),
            Backend::MeanValue { convention, options } => {
                let phi = SphericalFunction::harmonic(side.data_spectrum.clone());
                let theta = Direction::from_unit_unchecked(x.to_vec());
                Ok(2.0 * mean_value_inverse(&phi, &theta, 2, options, *convention)?)
            }
        }
    }

    /// f at a unit vector of R^3. With one side present its reconstruction
    /// is returned everywhere; with both, the band blend applies.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match (&self.plus, &self.minus) {
            (Some(p), Some(m)) => {
                let w = plus_weight(x[2], self.band);
                let a = if w > 0.0 { w * self.side_value(p, x)? } else { 0.0 };
                let b = if w < 1.0 { (1.0 - w) * self.side_value(m, x)? } else { 0.0 };
                Ok(a + b)
            }
            (Some(s), None) | (None, Some(s)) => self.side_value(s, x),
            (None, None) => Err(Error::invalid("inversion has no hemisphere data")),
        }
    }

    /// Values at the nodes of `grid`.
    pub fn tabulate(&self, grid: &SphericalGrid) -> Result<Vec<f64>> {
        grid.nodes()
            .par_iter()
            .map(|x| self.eval(x.coords()))
            .collect()
    }

    /// Closed-form view of the harmonic reconstruction.
    pub fn function(&self) -> Option<SphericalFunction> {
        if self.backend != Backend::Harmonic {
            return None;
        }
        let this = self.clone();
        Some(SphericalFunction::from_fn(3, move |x| {
            this.eval(x).expect("harmonic evaluation cannot fail")
        }))
    }

    fn diagnostics(&self, l_max: usize) -> Diagnostics {
        let mut d = Diagnostics {
            backend: self.backend.tag(),
            l_max,
            band: self.band,
            ..Default::default()
        };
        for (i, s) in [&self.plus, &self.minus].into_iter().enumerate() {
            if let Some(s) = s {
                d.fit_residual[i] = s.fit_residual;
                d.odd_energy[i] = s.odd_energy_fraction;
                d.warnings.extend(s.warnings.iter().cloned());
            }
        }
        d
    }
}

fn check_full(data: &HemiDataset) -> Result<()> {
    if data.mode() != Mode::Full || data.n() != 3 || data.k() != 2 {
        return Err(Error::invalid(format!(
            "hemispherical inversion needs full-mode data with n = 3, k = 2 (got {} mode, n = {}, k = {})",
            data.mode().name(),
            data.n(),
            data.k()
        )));
    }
    Ok(())
}

fn check_count(count: usize, l_max: usize) -> Result<Vec<String>> {
    let need = (l_max + 1) * (l_max + 2) / 2;
    if count < need {
        return Err(Error::invalid(format!(
            "{count} frame geometries cannot resolve l_max = {l_max} (need at least {need})"
        )));
    }
    let recommended = 2 * (l_max + 1) * (l_max + 1);
    if count < recommended {
        return Ok(vec![format!(
            "{count} frame geometries is below the recommended {recommended} for l_max = {l_max}"
        )]);
    }
    Ok(Vec::new())
}

/// Inverse-distance fit of scattered values phi(u) = phi(-u) onto `grid`.
fn fit_to_grid(points: &[[f64; 3]], values: &[f64], grid: &SphericalGrid, neighbors: usize) -> Vec<f64> {
    let mirrored: Vec<[f64; 3]> = points
        .iter()
        .flat_map(|p| [*p, [-p[0], -p[1], -p[2]]])
        .collect();
    let index = PointIndex::new(&mirrored);
    let k = neighbors.min(2 * points.len());
    grid.nodes()
        .par_iter()
        .map(|x| {
            let c = x.coords();
            let q = [c[0], c[1], c[2]];
            let near = index.nearest(&q, k);
            if near[0].1 < 1e-24 {
                return values[near[0].0 / 2];
            }
            let (mut num, mut den) = (0.0, 0.0);
            for &(item, d2) in &near {
                let w = 1.0 / d2;
                num += w * values[item / 2];
                den += w;
            }
            num / den
        })
        .collect()
}

fn invert_side(records: &[(FrameGeometry, f64)], sign: Sign, opts: &ReconOptions) -> Result<SideInversion> {
    let mut points = Vec::with_capacity(records.len());
    let mut values = Vec::with_capacity(records.len());
    for (g, v) in records {
        match g {
            FrameGeometry::Full { u } => {
                let c = u.coords();
                points.push([c[0], c[1], c[2]]);
                values.push(*v);
            }
            FrameGeometry::Reduced { .. } => return Err(Error::invalid("unexpected reduced frame")),
        }
    }
    let mut warnings = check_count(points.len(), opts.l_max)?;
    let grid = build_grid(2, opts.fit_res())?;
    let fitted = fit_to_grid(&points, &values, &grid, opts.neighbors);
    let data_spectrum = analyze_values(&grid, &fitted, opts.l_max)?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let sq: f64 = points
        .par_iter()
        .zip(&values)
        .map(|(p, v)| (data_spectrum.evaluate(p) - v).powi(2))
        .sum();
    let fit_residual = (sq / points.len() as f64).sqrt() / scale;
    if fit_residual > opts.fit_tol {
        return Err(Error::numerical(format!(
            "{} data misfit {fit_residual:.3e} exceeds tolerance {:.1e}; add frames or lower l_max",
            sign.symbol(),
            opts.fit_tol
        )));
    }
    let inv = invert_spectrum(&data_spectrum);
    warnings.extend(inv.warnings.into_iter().map(|w| format!("{}: {w}", sign.symbol())));
    Ok(SideInversion {
        sign,
        data_spectrum,
        spectrum: inv.spectrum.map_degrees(|_| 2.0),
        fit_residual,
        odd_energy_fraction: inv.odd_energy_fraction,
        warnings,
    })
}

/// Recovers f on S^2 from hemispherical transform values phi^+- of
/// full-mode frames, including its odd part.
pub fn invert_from_hemispherical(data: &HemiDataset, opts: &ReconOptions) -> Result<HemiInversion> {
    opts.validate()?;
    check_full(data)?;
    let pairs = data.paired()?;
    let plus: Vec<_> = pairs.iter().map(|(g, p, _)| (g.clone(), *p)).collect();
    let minus: Vec<_> = pairs.into_iter().map(|(g, _, m)| (g, m)).collect();
    let (p, m) = rayon::join(
        || invert_side(&plus, Sign::Plus, opts),
        || invert_side(&minus, Sign::Minus, opts),
    );
    Ok(HemiInversion {
        plus: Some(p?),
        minus: Some(m?),
        band: opts.band,
        backend: opts.backend.clone(),
    })
}

/// Reconstruction on one hemisphere from that hemisphere's records only.
pub fn reconstruct_hemisphere(data: &HemiDataset, sign: Sign, opts: &ReconOptions) -> Result<HemiInversion> {
    opts.validate()?;
    check_full(data)?;
    let records = data.one_sign(sign);
    let side = invert_side(&records, sign, opts)?;
    let (plus, minus) = match sign {
        Sign::Plus => (Some(side), None),
        Sign::Minus => (None, Some(side)),
    };
    Ok(HemiInversion {
        plus,
        minus,
        band: opts.band,
        backend: opts.backend.clone(),
    })
}

/// Radial function from half-section volumes: rho^k = 2k F^{-1} v^+- per
/// hemisphere, then the k-th root. Reduced-mode data is dispatched to
/// [`super::reconstruct_from_reduced`].
pub fn reconstruct_radial(data: &HemiDataset, opts: &ReconOptions) -> Result<ReconstructionResult> {
    if data.mode() == Mode::Reduced {
        return super::reconstruct_from_reduced(data, opts);
    }
    let k = data.k();
    let inv = invert_from_hemispherical(&data.scaled(k as f64), opts)?;
    let grid = Arc::new(build_grid(2, opts.resolution)?);
    let power = inv.tabulate(&grid)?;
    let (radii, clamped) = kth_root(&power, k, &grid)?;
    let mut diagnostics = inv.diagnostics(opts.l_max);
    diagnostics.warnings.extend(clamp_warning(&clamped));
    diagnostics.clamped = clamped;
    Ok(ReconstructionResult {
        radial: StarBody::tabulated(grid.clone(), radii)?,
        grid,
        diagnostics,
    })
}

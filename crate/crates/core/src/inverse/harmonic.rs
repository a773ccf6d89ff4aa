use super::spectrum::{analyze, HarmonicSpectrum};
use crate::error::{Error, Result};
use crate::sphere::SphericalGrid;
use crate::star_body::SphericalFunction;
use std::f64::consts::TAU;

/// Odd-degree energy fraction above which input is flagged as not being a
/// Funk image.
pub const ODD_ENERGY_WARN: f64 = 0.01;

/// Eigenvalue 2 pi P_l(0) of the great-circle Funk transform on degree-l
/// harmonics. Odd degrees are in the kernel and rejected.
pub fn funk_multiplier(l: usize) -> Result<f64> {
    if l % 2 == 1 {
        return Err(Error::invalid(format!(
            "degree {l} is odd: the Funk transform annihilates it"
        )));
    }
    // P_l(0) = (-1)^{l/2} (l-1)!! / l!!
    let mut p = 1.0;
    let mut j = 2;
    while j <= l {
        p *= -((j - 1) as f64) / j as f64;
        j += 2;
    }
    Ok(TAU * p)
}

/// Result of the harmonic Funk inversion.
#[derive(Debug, Clone)]
pub struct FunkInversion {
    /// Even part of the preimage, band-limited to `l_max`.
    pub spectrum: HarmonicSpectrum,
    /// Fraction of the input energy found in odd degrees.
    pub odd_energy_fraction: f64,
    pub warnings: Vec<String>,
}

impl FunkInversion {
    pub fn function(&self) -> SphericalFunction {
        SphericalFunction::harmonic(self.spectrum.clone())
    }
}

/// Inverts phi = F f for the even f, given phi as a function of the
/// section normal u. Even degrees are divided by their multiplier; odd
/// degrees are dropped and their energy reported.
pub fn funk_inverse_harmonic(phi: &SphericalFunction, grid: &SphericalGrid, l_max: usize) -> Result<FunkInversion> {
    let spec = analyze(phi, grid, l_max)?;
    Ok(invert_spectrum(&spec))
}

pub(crate) fn invert_spectrum(spec: &HarmonicSpectrum) -> FunkInversion {
    let total = spec.total_energy();
    let odd: f64 = (1..=spec.l_max()).step_by(2).map(|l| spec.degree_energy(l)).sum();
    let odd_energy_fraction = if total > 0.0 { odd / total } else { 0.0 };
    let mut warnings = Vec::new();
    if odd_energy_fraction > ODD_ENERGY_WARN {
        warnings.push(format!(
            "odd-degree energy is {:.2}% of the input: data is not consistent with a Funk image",
            100.0 * odd_energy_fraction
        ));
    }
    let spectrum = spec.map_degrees(|l| {
        if l % 2 == 1 {
            0.0
        } else {
            1.0 / funk_multiplier(l).expect("even degree")
        }
    });
    FunkInversion {
        spectrum,
        odd_energy_fraction,
        warnings,
    }
}

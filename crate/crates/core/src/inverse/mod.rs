//! Inversion of the great-circle Funk transform on S^2.
//!
//! Two routes: division by the Funk multipliers in a real spherical-harmonic
//! basis (the production path), and a transcription of the mean-value
//! (shifted dual transform) inversion formulas whose measure normalization
//! is exposed as an explicit [`Convention`].

mod harmonic;
mod mean_value;
pub mod spectrum;

pub use harmonic::{funk_inverse_harmonic, funk_multiplier, FunkInversion, ODD_ENERGY_WARN};
pub(crate) use harmonic::invert_spectrum;
pub use mean_value::{
    chebyshev_s_grid, dual_profile, invert_profile, mean_value_inverse, multiplier_probe,
    shifted_dual_transform, Convention, DualProfile, Formula, MeanValueOptions, PolyFit,
    ProbeResult,
};
pub use spectrum::{analyze, analyze_values, real_sh, synthesize, synthesize_values, HarmonicSpectrum};

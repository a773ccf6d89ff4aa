//! Reconstruction of star bodies from half-section volumes via the
//! hemispherical Funk transform.
//!
//! The crate covers spherical grids and quadrature, star bodies, the
//! forward hemispherical transforms, Funk inversion (harmonic and
//! mean-value backends), the reconstruction pipelines and file formats.

pub mod error;
pub mod forward;
pub mod io;
pub mod inverse;
pub mod recon;
pub mod sphere;
pub mod star_body;

pub use error::{Error, Result};
pub use forward::{
    fibonacci_frames, funk_transform, half_section_volume, hemi_funk, reduced_hemi_funk,
    simulate_dataset, simulate_transform, FrameGeometry, HemiDataset, HemiRecord, Mode,
    SectionFrame, Sign,
};
pub use inverse::{
    funk_inverse_harmonic, funk_multiplier, mean_value_inverse, multiplier_probe,
    shifted_dual_transform, Convention, HarmonicSpectrum,
};
pub use sphere::{build_grid, rotation_to, Direction, Rotation, SphericalGrid};
pub use star_body::{BodyModel, HarmonicTerm, SphericalFunction, StarBody};

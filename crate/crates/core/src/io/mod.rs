//! File formats, error metrics and plot-slice emission.
//!
//! JSON (UTF-8, finite numbers only) carries body specs, datasets and
//! reports; CSV carries node tables and plot slices. Angles are radians.

mod body_spec;
mod dataset_file;
mod metrics;
mod plot;
mod radial_csv;
mod report;

pub use body_spec::{read_body_spec, BodySpec, HarmonicTermSpec, Shape};
pub use dataset_file::{dataset_from_json, dataset_to_json, read_dataset, write_dataset, DATASET_VERSION};
pub use metrics::{compare_radial, ErrorSummary};
pub use plot::{plot_slice, write_slice_csv, SliceSample};
pub use radial_csv::{radial_from_csv, radial_to_csv, read_radial, write_radial};
pub use report::{ProbeSummary, Report};

use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Writes `bytes` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Decodes JSON with the failing field path in the error.
pub(crate) fn from_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: if e.path().to_string() == "." {
            origin.to_string()
        } else {
            format!("{origin}: {}", e.path())
        },
        message: e.into_inner().to_string(),
    })
}

use super::write_atomic;
use crate::error::{Error, Result};
use crate::sphere::{cross, normalize3, Direction};
use crate::star_body::StarBody;
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSample {
    pub angle: f64,
    pub rho: f64,
}

/// rho along the great circle normal to `normal` (n = 3), starting from
/// the in-plane direction closest to the coordinate axis least aligned
/// with the normal.
pub fn plot_slice(body: &StarBody, normal: &[f64], samples: usize) -> Result<Vec<SliceSample>> {
    if body.dim() != 3 || normal.len() != 3 {
        return Err(Error::invalid("polar slices are defined for bodies in R^3"));
    }
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let nrm = Direction::normalize(normal.to_vec()).map_err(|_| Error::invalid("plane normal must be non-zero"))?;
    let n = [nrm.coords()[0], nrm.coords()[1], nrm.coords()[2]];
    let axis = (0..3)
        .min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
        .unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let b1 = normalize3([e[0] - n[axis] * n[0], e[1] - n[axis] * n[1], e[2] - n[axis] * n[2]]);
    let b2 = cross(n, b1);
    (0..samples)
        .map(|j| {
            let angle = TAU * j as f64 / samples as f64;
            let (s, c) = angle.sin_cos();
            let x = Direction::normalize((0..3).map(|i| c * b1[i] + s * b2[i]).collect())?;
            Ok(SliceSample {
                angle,
                rho: body.radial(&x)?,
            })
        })
        .collect()
}

pub fn write_slice_csv(path: &Path, samples: &[SliceSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(["angle", "rho"]).map_err(io)?;
    for s in samples {
        w.write_record([s.angle.to_string(), s.rho.to_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

//! Reconstruction pipelines: hemispherical inversion of hyperplane data on
//! S^2, radial recovery from half-section volumes, and reconstruction on
//! S^3 from data on the reduced section manifold.

mod full;
mod reduced;

pub use full::{
    invert_from_hemispherical, reconstruct_hemisphere, reconstruct_radial, HemiInversion,
    SideInversion,
};
pub use reduced::{
    build_reduced_frames, invert_from_reduced, reassembly_frame, reconstruct_from_reduced,
    ReducedFrameSet, ReducedInversion,
};

use crate::error::{Error, Result};
use crate::inverse::{Convention, MeanValueOptions};
use crate::sphere::SphericalGrid;
use crate::star_body::StarBody;
use rstar::primitives::GeomWithData;
use rstar::{Point, RTree};
use std::sync::Arc;

/// Default half-width of the equator band.
pub const DEFAULT_BAND: f64 = 0.15;
/// Default |theta'| below which reassembly on S^3 is replaced by a fill.
pub const DEFAULT_THETA_FLOOR: f64 = 0.05;
/// Share of clamped nodes beyond which positivity repair is refused.
pub const MAX_CLAMP_FRACTION: f64 = 0.05;

/// Inversion engine used on each hemisphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Harmonic,
    MeanValue {
        convention: Convention,
        options: MeanValueOptions,
    },
}

impl Backend {
    pub fn tag(&self) -> String {
        match self {
            Backend::Harmonic => "harmonic".to_string(),
            Backend::MeanValue { convention, .. } => format!("meanvalue[{convention}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconOptions {
    pub l_max: usize,
    /// Resolution of the output grid (S^2: rings; S^3: shells).
    pub resolution: usize,
    /// Resolution of the normal grid the scattered data is fitted to;
    /// `None` selects `2 * l_max`.
    pub fit_resolution: Option<usize>,
    pub band: f64,
    pub theta_floor: f64,
    /// Neighbours used by the inverse-distance fit.
    pub neighbors: usize,
    /// Relative RMS misfit of the fitted data above which the fit fails.
    pub fit_tol: f64,
    pub backend: Backend,
}

impl Default for ReconOptions {
    fn default() -> Self {
        ReconOptions {
            l_max: 16,
            resolution: 64,
            fit_resolution: None,
            band: DEFAULT_BAND,
            theta_floor: DEFAULT_THETA_FLOOR,
            neighbors: 4,
            fit_tol: 0.05,
            backend: Backend::Harmonic,
        }
    }
}

impl ReconOptions {
    pub(crate) fn fit_res(&self) -> usize {
        self.fit_resolution.unwrap_or(2 * self.l_max).max(2 * self.l_max).max(4)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.l_max == 0 {
            return Err(Error::invalid("l_max must be positive"));
        }
        if !(0.0..=0.5).contains(&self.band) {
            return Err(Error::invalid(format!("band {} must lie in [0, 0.5]", self.band)));
        }
        if !(0.0..1.0).contains(&self.theta_floor) {
            return Err(Error::invalid("theta floor must lie in [0, 1)"));
        }
        if self.neighbors == 0 {
            return Err(Error::invalid("at least one neighbour is required"));
        }
        Ok(())
    }
}

/// Per-run diagnostics attached to a reconstruction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub backend: String,
    pub l_max: usize,
    pub band: f64,
    /// Relative RMS misfit of the fitted data, (+) then (-).
    pub fit_residual: [f64; 2],
    /// Odd-degree energy fraction of the fitted data, (+) then (-).
    pub odd_energy: [f64; 2],
    /// Output nodes whose rho^k was clamped to a small positive value.
    pub clamped: Vec<usize>,
    /// Largest |gamma_v eta - theta| over reassembled nodes (reduced mode).
    pub reassembly_error: f64,
    /// Output nodes filled from neighbours (reduced mode).
    pub filled: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Tabulated reconstruction on the output grid.
    pub radial: StarBody,
    pub grid: Arc<SphericalGrid>,
    pub diagnostics: Diagnostics,
}

/// Nearest-neighbour lookup over a fixed point set.
pub(crate) struct PointIndex<const K: usize>
where
    [f64; K]: Point<Scalar = f64>,
{
    tree: RTree<GeomWithData<[f64; K], usize>>,
}

impl<const K: usize> PointIndex<K>
where
    [f64; K]: Point<Scalar = f64>,
{
    pub(crate) fn new(points: &[[f64; K]]) -> Self {
        let items = points
            .iter()
            .enumerate()
            .map(|(i, p)| GeomWithData::new(*p, i))
            .collect();
        PointIndex {
            tree: RTree::bulk_load(items),
        }
    }

    /// Up to `count` (index, squared distance) pairs, nearest first.
    pub(crate) fn nearest(&self, q: &[f64; K], count: usize) -> Vec<(usize, f64)> {
        self.tree
            .nearest_neighbor_iter_with_distance_2(q)
            .take(count)
            .map(|(g, d)| (g.data, d))
            .collect()
    }
}

/// Weight of the (+) reconstruction at height `x_n`: 1 above the band,
/// 0 below it, linear in between.
pub(crate) fn plus_weight(xn: f64, band: f64) -> f64 {
    if band == 0.0 {
        return if xn >= 0.0 { 1.0 } else { 0.0 };
    }
    ((xn + band) / (2.0 * band)).clamp(0.0, 1.0)
}

/// rho^k -> rho with the positivity clamp. Returns the radii and the
/// indices of clamped nodes.
pub(crate) fn kth_root(power: &[f64], k: usize, grid: &SphericalGrid) -> Result<(Vec<f64>, Vec<usize>)> {
    let max = power.iter().fold(0.0f64, |m, v| m.max(*v));
    if !(max > 0.0) {
        return Err(Error::numerical("reconstructed rho^k is nowhere positive"));
    }
    let eps = 1e-6 * max;
    let mut clamped = Vec::new();
    let mut out = Vec::with_capacity(power.len());
    for (i, &p) in power.iter().enumerate() {
        let p = if p > 0.0 {
            p
        } else if p > -eps {
            clamped.push(i);
            eps
        } else {
            return Err(Error::numerical(format!(
                "reconstructed rho^k = {p:.3e} at node {i} (angles {:?}) is negative beyond the clamp tolerance",
                grid.node_angles(i)
            )));
        };
        out.push(p.powf(1.0 / k as f64));
    }
    if clamped.len() as f64 > MAX_CLAMP_FRACTION * power.len() as f64 {
        return Err(Error::numerical(format!(
            "{} of {} nodes needed the positivity clamp",
            clamped.len(),
            power.len()
        )));
    }
    Ok((out, clamped))
}

pub(crate) fn clamp_warning(clamped: &[usize]) -> Option<String> {
    if clamped.is_empty() {
        return None;
    }
    let shown: Vec<String> = clamped.iter().take(20).map(|i| i.to_string()).collect();
    let more = if clamped.len() > 20 { ", ..." } else { "" };
    Some(format!(
        "clamped {} node(s) to a small positive rho^k: [{}{more}]",
        clamped.len(),
        shown.join(", ")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_grid;

    #[test]
    fn blend_weights() {
        assert_eq!(plus_weight(0.2, 0.15), 1.0);
        assert_eq!(plus_weight(-0.2, 0.15), 0.0);
        assert!((plus_weight(0.0, 0.15) - 0.5).abs() < 1e-15);
        assert_eq!(plus_weight(0.0, 0.0), 1.0);
    }

    #[test]
    fn clamp_rules() {
        let g = build_grid(2, 4).unwrap();
        let mut p = vec![4.0; g.len()];
        p[3] = -1e-9;
        let (r, c) = kth_root(&p, 2, &g).unwrap();
        assert_eq!(c, vec![3]);
        assert!((r[0] - 2.0).abs() < 1e-15 && r[3] > 0.0);
        p[3] = -1.0;
        assert!(matches!(kth_root(&p, 2, &g), Err(Error::Numerical(_))));
        let many: Vec<f64> = (0..g.len()).map(|i| if i < 4 { 0.0 } else { 1.0 }).collect();
        assert!(kth_root(&many, 2, &g).is_err());
    }
}

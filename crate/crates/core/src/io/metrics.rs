use crate::error::{check_dim, Error, Result};
use crate::sphere::SphericalGrid;
use crate::star_body::StarBody;
use serde::{Deserialize, Serialize};

/// Relative radial error over the nodes that survive the exclusions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    pub evaluated_nodes: usize,
    pub excluded_nodes: usize,
}

/// |rho / rho_truth - 1| at the nodes of `grid`, skipping |theta_n| < band
/// and, when `theta_floor` is given, |(theta_1, theta_2)| <= theta_floor.
pub fn compare_radial(
    radial: &StarBody,
    grid: &SphericalGrid,
    truth: &StarBody,
    band: f64,
    theta_floor: Option<f64>,
) -> Result<ErrorSummary> {
    check_dim(truth.dim(), radial.dim())?;
    check_dim(radial.dim(), grid.ambient_dim())?;
    if !(0.0..=0.5).contains(&band) {
        return Err(Error::invalid(format!("band {band} must lie in [0, 0.5]")));
    }
    let (mut max, mut sum, mut count, mut excluded) = (0.0f64, 0.0, 0, 0);
    for x in grid.nodes() {
        let c = x.coords();
        let skip_floor = theta_floor.is_some_and(|f| c[0].hypot(c[1]) <= f);
        if x.last().abs() < band || skip_floor {
            excluded += 1;
            continue;
        }
        let e = (radial.radial(x)? / truth.radial(x)? - 1.0).abs();
        max = max.max(e);
        sum += e;
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("every node is excluded from the comparison"));
    }
    Ok(ErrorSummary {
        max_rel_error: max,
        mean_rel_error: sum / count as f64,
        evaluated_nodes: count,
        excluded_nodes: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_grid;
    use std::sync::Arc;

    #[test]
    fn scaled_radial_has_tenth_error() {
        let grid = Arc::new(build_grid(2, 16).unwrap());
        let truth = StarBody::shifted_ball(vec![0.2, 0.0, 0.1], 1.0).unwrap();
        let vals: Vec<f64> = grid.nodes().iter().map(|x| 1.1 * truth.radial(x).unwrap()).collect();
        let scaled = StarBody::tabulated(grid.clone(), vals).unwrap();
        let s = compare_radial(&scaled, &grid, &truth, 0.15, None).unwrap();
        assert!((s.mean_rel_error - 0.1).abs() < 1e-6);
        assert!((s.max_rel_error - 0.1).abs() < 1e-6);
        assert!(s.excluded_nodes > 0);
        let own = truth.tabulate(grid.clone()).unwrap();
        assert_eq!(compare_radial(&own, &grid, &truth, 0.15, None).unwrap().max_rel_error, 0.0);
        assert!(compare_radial(&own, &grid, &truth, 0.6, None).is_err());
    }
}

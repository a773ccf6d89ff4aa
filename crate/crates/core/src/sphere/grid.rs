use super::quadrature::{gauss_chebyshev_u, gauss_legendre};
use super::Direction;
use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Latitude-longitude product structure of an S^2 grid: Gauss-Legendre
/// rings in cos(polar) and uniform azimuths, ring-major node order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatLon {
    /// Polar angles of the rings, increasing (north to south).
    pub polar: Vec<f64>,
    /// cos(polar) of each ring.
    pub cos_polar: Vec<f64>,
    /// Gauss-Legendre weight of each ring (sums to 2).
    pub ring_weights: Vec<f64>,
    pub n_azimuth: usize,
}

impl LatLon {
    fn new(resolution: usize) -> Self {
        let rule = gauss_legendre(resolution);
        // descending cosine = increasing polar angle
        let cos_polar: Vec<f64> = rule.nodes.iter().rev().copied().collect();
        let ring_weights: Vec<f64> = rule.weights.iter().rev().copied().collect();
        let polar = cos_polar.iter().map(|c| c.acos()).collect();
        LatLon {
            polar,
            cos_polar,
            ring_weights,
            n_azimuth: 2 * resolution,
        }
    }

    pub fn n_rings(&self) -> usize {
        self.polar.len()
    }

    pub fn len(&self) -> usize {
        self.polar.len() * self.n_azimuth
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn azimuth(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_azimuth as f64
    }

    fn node(&self, i: usize, j: usize) -> [f64; 3] {
        let c = self.cos_polar[i];
        let s = (1.0 - c * c).sqrt();
        let (sp, cp) = self.azimuth(j).sin_cos();
        [s * cp, s * sp, c]
    }

    /// Bilinear interpolation in (polar, azimuth) with azimuthal
    /// wraparound; beyond the outer rings the pole value is the ring mean.
    fn interpolate(&self, values: &[f64], x: [f64; 3]) -> f64 {
        let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let theta = rho.atan2(x[2]);
        let mut phi = x[1].atan2(x[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        let nr = self.n_rings();
        let ring = |i: usize| self.ring_value(values, i, phi);
        let ring_mean = |i: usize| {
            let row = &values[i * self.n_azimuth..(i + 1) * self.n_azimuth];
            row.iter().sum::<f64>() / self.n_azimuth as f64
        };
        if theta <= self.polar[0] {
            let t = snap(theta / self.polar[0]);
            return (1.0 - t) * ring_mean(0) + t * ring(0);
        }
        if theta >= self.polar[nr - 1] {
            let t = snap((theta - self.polar[nr - 1]) / (PI - self.polar[nr - 1]));
            return (1.0 - t) * ring(nr - 1) + t * ring_mean(nr - 1);
        }
        let i = self.polar.partition_point(|&p| p <= theta) - 1;
        let t = snap((theta - self.polar[i]) / (self.polar[i + 1] - self.polar[i]));
        if t == 0.0 {
            return ring(i);
        }
        if t == 1.0 {
            return ring(i + 1);
        }
        (1.0 - t) * ring(i) + t * ring(i + 1)
    }

    fn ring_value(&self, values: &[f64], i: usize, phi: f64) -> f64 {
        let na = self.n_azimuth;
        let pos = phi / TAU * na as f64;
        let j = (pos.floor() as usize).min(na - 1);
        let t = snap(pos - j as f64);
        let a = values[i * na + j];
        if t == 0.0 {
            return a;
        }
        let b = values[i * na + (j + 1) % na];
        if t == 1.0 {
            return b;
        }
        (1.0 - t) * a + t * b
    }
}

fn snap(t: f64) -> f64 {
    if t.abs() < 1e-9 {
        0.0
    } else if (1.0 - t).abs() < 1e-9 {
        1.0
    } else {
        t.clamp(0.0, 1.0)
    }
}

/// How a grid's nodes are arranged; drives interpolation and the fast
/// harmonic transforms.
#[derive(Debug, Clone, PartialEq)]
pub enum GridLayout {
    /// Uniform nodes at angles 2 pi j / count.
    Circle { count: usize },
    LatLon(LatLon),
    /// S^3 as shells: x = (sin chi * omega, cos chi), chi-major node order.
    Shells {
        chi: Vec<f64>,
        cos_chi: Vec<f64>,
        chi_weights: Vec<f64>,
        inner: LatLon,
    },
}

/// Quadrature nodes and positive weights on S^d.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    dim: usize,
    resolution: usize,
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    layout: GridLayout,
}

/// Builds the deterministic product grid on S^d for d in {1, 2, 3}.
///
/// * d = 1: `resolution` uniform nodes, weights 2 pi / resolution.
/// * d = 2: `resolution` Gauss-Legendre rings times `2 * resolution` azimuths.
/// * d = 3: `resolution` shells of a sin^2-weighted Gauss rule in the
///   polar angle, each carrying the S^2 grid of the same resolution.
pub fn build_grid(d: usize, resolution: usize) -> Result<SphericalGrid> {
    if resolution < 4 {
        return Err(Error::invalid(format!(
            "grid resolution must be at least 4, got {resolution}"
        )));
    }
    match d {
        1 => {
            let w = TAU / resolution as f64;
            let nodes = (0..resolution)
                .map(|j| {
                    let (s, c) = (TAU * j as f64 / resolution as f64).sin_cos();
                    Direction::from_unit_unchecked(vec![c, s])
                })
                .collect();
            Ok(SphericalGrid {
                dim: 1,
                resolution,
                nodes,
                weights: vec![w; resolution],
                layout: GridLayout::Circle { count: resolution },
            })
        }
        2 => {
            let ll = LatLon::new(resolution);
            let dphi = TAU / ll.n_azimuth as f64;
            let mut nodes = Vec::with_capacity(ll.len());
            let mut weights = Vec::with_capacity(ll.len());
            for i in 0..ll.n_rings() {
                for j in 0..ll.n_azimuth {
                    nodes.push(Direction::from_unit_unchecked(ll.node(i, j).to_vec()));
                    weights.push(ll.ring_weights[i] * dphi);
                }
            }
            Ok(SphericalGrid {
                dim: 2,
                resolution,
                nodes,
                weights,
                layout: GridLayout::LatLon(ll),
            })
        }
        3 => {
            let inner = LatLon::new(resolution);
            let rule = gauss_chebyshev_u(resolution);
            let cos_chi: Vec<f64> = rule.nodes.iter().rev().copied().collect();
            let chi_weights: Vec<f64> = rule.weights.iter().rev().copied().collect();
            let chi: Vec<f64> = cos_chi.iter().map(|c| c.acos()).collect();
            let dphi = TAU / inner.n_azimuth as f64;
            let mut nodes = Vec::with_capacity(chi.len() * inner.len());
            let mut weights = Vec::with_capacity(chi.len() * inner.len());
            for (s, &cc) in cos_chi.iter().enumerate() {
                let sc = (1.0 - cc * cc).sqrt();
                for i in 0..inner.n_rings() {
                    for j in 0..inner.n_azimuth {
                        let w = inner.node(i, j);
                        nodes.push(Direction::from_unit_unchecked(vec![
                            sc * w[0],
                            sc * w[1],
                            sc * w[2],
                            cc,
                        ]));
                        weights.push(chi_weights[s] * inner.ring_weights[i] * dphi);
                    }
                }
            }
            Ok(SphericalGrid {
                dim: 3,
                resolution,
                nodes,
                weights,
                layout: GridLayout::Shells {
                    chi,
                    cos_chi,
                    chi_weights,
                    inner,
                },
            })
        }
        _ => Err(Error::invalid(format!(
            "grids are available on S^1, S^2 and S^3 only (got S^{d})"
        ))),
    }
}

impl SphericalGrid {
    /// Dimension d of the sphere S^d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension d + 1.
    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    /// Quadrature sum of `f` over the grid.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x.coords()))
            .sum()
    }

    /// Interpolates node `values` at an arbitrary point of the sphere.
    ///
    /// Linear on S^1, bilinear in (polar, azimuth) on S^2 and trilinear in
    /// the (chi, polar, azimuth) chart on S^3. Node values are reproduced
    /// exactly.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        match &self.layout {
            GridLayout::Circle { count } => {
                let mut a = x[1].atan2(x[0]);
                if a < 0.0 {
                    a += TAU;
                }
                let pos = a / TAU * *count as f64;
                let j = (pos.floor() as usize).min(count - 1);
                let t = snap(pos - j as f64);
                (1.0 - t) * values[j] + t * values[(j + 1) % count]
            }
            GridLayout::LatLon(ll) => ll.interpolate(values, [x[0], x[1], x[2]]),
            GridLayout::Shells { chi, inner, .. } => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let c = r.atan2(x[3]);
                let omega = if r > 0.0 {
                    [x[0] / r, x[1] / r, x[2] / r]
                } else {
                    [0.0, 0.0, 1.0]
                };
                let per = inner.len();
                let shell = |s: usize| inner.interpolate(&values[s * per..(s + 1) * per], omega);
                let shell_mean = |s: usize| {
                    let sl = &values[s * per..(s + 1) * per];
                    // pole value: quadrature mean over the shell
                    let mut acc = 0.0;
                    for i in 0..inner.n_rings() {
                        let row = &sl[i * inner.n_azimuth..(i + 1) * inner.n_azimuth];
                        acc += inner.ring_weights[i] * row.iter().sum::<f64>();
                    }
                    acc / (2.0 * inner.n_azimuth as f64)
                };
                let ns = chi.len();
                if c <= chi[0] {
                    let t = snap(c / chi[0]);
                    return (1.0 - t) * shell_mean(0) + t * shell(0);
                }
                if c >= chi[ns - 1] {
                    let t = snap((c - chi[ns - 1]) / (PI - chi[ns - 1]));
                    return (1.0 - t) * shell(ns - 1) + t * shell_mean(ns - 1);
                }
                let s = chi.partition_point(|&p| p <= c) - 1;
                let t = snap((c - chi[s]) / (chi[s + 1] - chi[s]));
                if t == 0.0 {
                    return shell(s);
                }
                if t == 1.0 {
                    return shell(s + 1);
                }
                (1.0 - t) * shell(s) + t * shell(s + 1)
            }
        }
    }

    /// Spherical coordinates of node `i`: [azimuth] on S^1,
    /// [polar, azimuth] on S^2, [chi, polar, azimuth] on S^3.
    pub fn node_angles(&self, i: usize) -> Vec<f64> {
        match &self.layout {
            GridLayout::Circle { count } => vec![TAU * i as f64 / *count as f64],
            GridLayout::LatLon(ll) => {
                let (r, j) = (i / ll.n_azimuth, i % ll.n_azimuth);
                vec![ll.polar[r], ll.azimuth(j)]
            }
            GridLayout::Shells { chi, inner, .. } => {
                let per = inner.len();
                let (s, rest) = (i / per, i % per);
                let (r, j) = (rest / inner.n_azimuth, rest % inner.n_azimuth);
                vec![chi[s], inner.polar[r], inner.azimuth(j)]
            }
        }
    }
}

/// Cartesian point from the angles returned by [`SphericalGrid::node_angles`].
pub fn point_from_angles(angles: &[f64]) -> Vec<f64> {
    match angles.len() {
        1 => vec![angles[0].cos(), angles[0].sin()],
        2 => {
            let (st, ct) = angles[0].sin_cos();
            let (sp, cp) = angles[1].sin_cos();
            vec![st * cp, st * sp, ct]
        }
        _ => {
            let (sc, cc) = angles[0].sin_cos();
            let (st, ct) = angles[1].sin_cos();
            let (sp, cp) = angles[2].sin_cos();
            vec![sc * st * cp, sc * st * sp, sc * ct, cc]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sphere_area;

    #[test]
    fn circle_rule() {
        let g = build_grid(1, 8).unwrap();
        assert_eq!(g.len(), 8);
        for w in g.weights() {
            assert!((w - PI / 4.0).abs() < 1e-15);
        }
        assert!((g.weights().iter().sum::<f64>() - TAU).abs() < 1e-12);
    }

    #[test]
    fn weight_sums_match_areas() {
        for d in 1..=3 {
            for res in [4, 9, 32] {
                let g = build_grid(d, res).unwrap();
                let s: f64 = g.weights().iter().sum();
                let area = sphere_area(d);
                assert!(((s - area) / area).abs() < 1e-10, "d={d} res={res}");
                assert!(g.weights().iter().all(|&w| w > 0.0));
                assert_eq!(g.weights().len(), g.nodes().len());
            }
        }
    }

    #[test]
    fn second_moment_on_s2() {
        let g = build_grid(2, 32).unwrap();
        let m = g.integrate(|x| x[2] * x[2]);
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-10);
        assert!((g.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(build_grid(4, 8).is_err());
        assert!(build_grid(2, 3).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(build_grid(3, 6).unwrap(), build_grid(3, 6).unwrap());
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        for d in 1..=3 {
            let g = build_grid(d, 6).unwrap();
            let vals: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
            for (i, x) in g.nodes().iter().enumerate() {
                assert_eq!(g.interpolate(&vals, x.coords()), vals[i], "d={d} node {i}");
            }
        }
    }

    #[test]
    fn angles_roundtrip() {
        for d in 1..=3 {
            let g = build_grid(d, 5).unwrap();
            for (i, x) in g.nodes().iter().enumerate() {
                let p = point_from_angles(&g.node_angles(i));
                for (a, b) in p.iter().zip(x.coords()) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }
}

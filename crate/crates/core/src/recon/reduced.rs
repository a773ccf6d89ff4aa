use super::{clamp_warning, PointIndex, kth_root, plus_weight, Diagnostics, ReconOptions, ReconstructionResult};
use crate::error::{Error, Result};
use crate::forward::{FrameGeometry, HemiDataset, Mode, EQUATORIAL_TOL};
use crate::inverse::spectrum::{analyze_values, synthesize_values};
use crate::inverse::{invert_spectrum, HarmonicSpectrum};
use crate::sphere::{build_grid, rotation_to, Direction, SphericalGrid};
use crate::star_body::StarBody;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Product of a grid on S^{n-k-1} (the v labels) and a grid on S^k (the
/// w labels) enumerating the reduced section manifold.
#[derive(Debug, Clone)]
pub struct ReducedFrameSet {
    pub n: usize,
    pub k: usize,
    pub v_grid: Arc<SphericalGrid>,
    pub w_grid: Arc<SphericalGrid>,
    /// w-nodes whose great circle is the equator of S^k; never emitted.
    pub degenerate: Vec<usize>,
}

impl ReducedFrameSet {
    /// |v_grid| * |w_grid|, degenerate nodes included.
    pub fn frame_count(&self) -> usize {
        self.v_grid.len() * self.w_grid.len()
    }

    /// (n - k - 1) + (k - 1) + 1: dimension of the section manifold.
    pub fn manifold_dim(&self) -> usize {
        (self.n - self.k - 1) + (self.k - 1) + 1
    }

    /// Non-degenerate frame geometries, v-major.
    pub fn geometries(&self) -> Vec<FrameGeometry> {
        let mut out = Vec::with_capacity(self.frame_count());
        for v in self.v_grid.nodes() {
            for (j, w) in self.w_grid.nodes().iter().enumerate() {
                if self.degenerate.binary_search(&j).is_ok() {
                    continue;
                }
                out.push(FrameGeometry::reduced(v.clone(), w.clone()).expect("checked when built"));
            }
        }
        out
    }
}

/// Frames (v, w) with v on a resolution-`v_res` grid of S^{n-k-1} and w on
/// a resolution-`w_res` grid of S^k. Only k = 2 is supported.
pub fn build_reduced_frames(n: usize, k: usize, v_res: usize, w_res: usize) -> Result<ReducedFrameSet> {
    if k + 1 == n {
        return Err(Error::invalid("k = n-1 is the hyperplane case; use full mode"));
    }
    if k != 2 || n < 4 || n > 6 {
        return Err(Error::invalid(format!(
            "reduced frames are available for k = 2 and 4 <= n <= 6 (got n={n}, k={k})"
        )));
    }
    if v_res < 8 || w_res < 8 {
        return Err(Error::invalid(format!(
            "reduced frame resolutions must be at least 8 (got {v_res}, {w_res})"
        )));
    }
    let v_grid = Arc::new(build_grid(n - k - 1, v_res)?);
    let w_grid = Arc::new(build_grid(k, w_res)?);
    let degenerate = w_grid
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, w)| w.last().abs() >= 1.0 - EQUATORIAL_TOL)
        .map(|(j, _)| j)
        .collect();
    Ok(ReducedFrameSet {
        n,
        k,
        v_grid,
        w_grid,
        degenerate,
    })
}

/// Per-v hemispherical inversions on S^2 = S^k_v.
#[derive(Debug, Clone)]
pub struct ReducedInversion {
    pub v_grid: Arc<SphericalGrid>,
    pub w_grid: Arc<SphericalGrid>,
    /// (plus, minus) reconstructions 2 F^{-1} phi_v^{+-}, one per v-node.
    pub per_v: Vec<(HarmonicSpectrum, HarmonicSpectrum)>,
    pub band: f64,
    pub fit_residual: [f64; 2],
    pub odd_energy: [f64; 2],
    pub warnings: Vec<String>,
}

/// Nearest node of `grid` to each point, required within 1e-9.
fn locate(grid: &SphericalGrid, points: &[Vec<f64>], what: &str) -> Result<Vec<usize>> {
    let dim = grid.ambient_dim();
    let pad = |x: &[f64]| {
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(x);
        p
    };
    let padded: Vec<[f64; 3]> = grid.nodes().iter().map(|x| pad(x.coords())).collect();
    let index = PointIndex::new(&padded);
    points
        .iter()
        .map(|x| {
            let (item, d2) = index.nearest(&pad(x), 1)[0];
            if d2 > 1e-18 {
                return Err(Error::invalid(format!(
                    "{what} label {x:?} is not a node of a structured grid"
                )));
            }
            Ok(item)
        })
        .collect()
}

/// Recovers the structured (v, w) grids behind a reduced dataset.
fn recover_grids(data: &HemiDataset) -> Result<(Arc<SphericalGrid>, Arc<SphericalGrid>, Vec<[usize; 2]>, Vec<(f64, f64)>)> {
    let pairs = data.paired()?;
    let mut vs: Vec<Vec<f64>> = Vec::new();
    let mut ws: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::with_capacity(pairs.len());
    for (g, p, m) in &pairs {
        if let FrameGeometry::Reduced { v, w } = g {
            vs.push(v.coords().to_vec());
            ws.push(w.coords().to_vec());
            values.push((*p, *m));
        }
    }
    let distinct = |pts: &[Vec<f64>]| {
        let mut keys: Vec<Vec<u64>> = pts
            .iter()
            .map(|p| p.iter().map(|c| (c * 1e9).round() as i64 as u64).collect())
            .collect();
        keys.sort();
        keys.dedup();
        keys.len()
    };
    let nv = distinct(&vs);
    let nw = distinct(&ws);
    let w_res = ((nw / 2) as f64).sqrt().round() as usize;
    if 2 * w_res * w_res != nw {
        return Err(Error::invalid(format!(
            "{nw} distinct w labels do not form a structured S^2 grid"
        )));
    }
    let v_grid = Arc::new(build_grid(1, nv)?);
    let w_grid = Arc::new(build_grid(2, w_res)?);
    let vi = locate(&v_grid, &vs, "v")?;
    let wi = locate(&w_grid, &ws, "w")?;
    let idx: Vec<[usize; 2]> = vi.into_iter().zip(wi).map(|(a, b)| [a, b]).collect();
    Ok((v_grid, w_grid, idx, values))
}

/// Inverts reduced-mode hemispherical data (n = 4, k = 2) on every
/// sphere S^k_v of the v-grid.
pub fn invert_from_reduced(data: &HemiDataset, opts: &ReconOptions) -> Result<ReducedInversion> {
    opts.validate()?;
    if data.mode() != Mode::Reduced || data.n() != 4 || data.k() != 2 {
        return Err(Error::invalid(format!(
            "reduced reconstruction needs reduced-mode data with n = 4, k = 2 (got {} mode, n = {}, k = {})",
            data.mode().name(),
            data.n(),
            data.k()
        )));
    }
    let (v_grid, w_grid, idx, values) = recover_grids(data)?;
    let (nv, nw) = (v_grid.len(), w_grid.len());
    let mut table = vec![[f64::NAN; 2]; nv * nw];
    for ([a, b], (p, m)) in idx.iter().zip(&values) {
        table[a * nw + b] = [*p, *m];
    }
    if let Some(i) = table.iter().position(|c| c[0].is_nan()) {
        return Err(Error::invalid(format!(
            "no data for v-node {} at w-node {}",
            i / nw,
            i % nw
        )));
    }
    if nv < opts.resolution {
        return Err(Error::invalid(format!(
            "{nv} v-nodes are too coarse for output resolution {}",
            opts.resolution
        )));
    }
    let per: Vec<Result<_>> = (0..nv)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::with_capacity(2);
            for s in 0..2 {
                let vals: Vec<f64> = (0..nw).map(|b| table[a * nw + b][s]).collect();
                let spec = analyze_values(&w_grid, &vals, opts.l_max)?;
                let back = synthesize_values(&spec, &w_grid)?;
                let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
                let sq: f64 = back.iter().zip(&vals).map(|(x, y)| (x - y).powi(2)).sum();
                let inv = invert_spectrum(&spec);
                out.push((
                    inv.spectrum.map_degrees(|_| 2.0),
                    (sq / nw as f64).sqrt() / scale,
                    inv.odd_energy_fraction,
                ));
            }
            let m = out.pop().unwrap();
            let p = out.pop().unwrap();
            Ok((p, m))
        })
        .collect();
    let mut per_v = Vec::with_capacity(nv);
    let mut fit_residual = [0.0f64; 2];
    let mut odd_energy = [0.0f64; 2];
    for r in per {
        let (p, m) = r?;
        fit_residual = [fit_residual[0].max(p.1), fit_residual[1].max(m.1)];
        odd_energy = [odd_energy[0].max(p.2), odd_energy[1].max(m.2)];
        per_v.push((p.0, m.0));
    }
    let mut warnings = Vec::new();
    for (s, e) in ["+", "-"].iter().zip(odd_energy) {
        if e > crate::inverse::ODD_ENERGY_WARN {
            warnings.push(format!(
                "{s}: odd-degree energy up to {:.2}% on some S^k_v: data is not consistent with Funk images",
                100.0 * e
            ));
        }
    }
    if fit_residual.iter().any(|r| *r > opts.fit_tol) {
        return Err(Error::numerical(format!(
            "band-limited fit misfit {:.3e} exceeds tolerance {:.1e}; raise l_max",
            fit_residual[0].max(fit_residual[1]),
            opts.fit_tol
        )));
    }
    Ok(ReducedInversion {
        v_grid,
        w_grid,
        per_v,
        band: opts.band,
        fit_residual,
        odd_energy,
        warnings,
    })
}

/// The point eta = (0, |theta'|, theta'') of S^k_v and v = theta'/|theta'|
/// for a point theta of S^3 split as (theta', theta'') in R^2 x R^2.
pub fn reassembly_frame(theta: &[f64]) -> Option<(Direction, [f64; 4])> {
    let r = theta[0].hypot(theta[1]);
    if r == 0.0 {
        return None;
    }
    let v = Direction::from_unit_unchecked(vec![theta[0] / r, theta[1] / r]);
    Some((v, [0.0, r, theta[2], theta[3]]))
}

impl ReducedInversion {
    fn side(&self, a: usize, y: &[f64; 3]) -> f64 {
        let w = plus_weight(y[2], self.band);
        let (p, m) = &self.per_v[a];
        let mut acc = 0.0;
        if w > 0.0 {
            acc += w * p.evaluate(y);
        }
        if w < 1.0 {
            acc += (1.0 - w) * m.evaluate(y);
        }
        acc
    }

    /// f(theta) for |theta'| > 0, linear in the v angle between the two
    /// neighbouring v-nodes. Also returns |gamma_v eta - theta|.
    pub fn eval(&self, theta: &[f64]) -> Result<(f64, f64)> {
        let (v, eta) = reassembly_frame(theta)
            .ok_or_else(|| Error::invalid("theta' = 0: no sphere S^k_v contains theta"))?;
        let rot = rotation_to(&v, 4, 2)?;
        let back = rot.apply(&eta);
        let err = back
            .iter()
            .zip(theta)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let nv = self.v_grid.len();
        let mut ang = theta[1].atan2(theta[0]);
        if ang < 0.0 {
            ang += TAU;
        }
        let pos = ang / TAU * nv as f64;
        let j = (pos.floor() as usize).min(nv - 1);
        let t = pos - j as f64;
        let y = [eta[1], eta[2], eta[3]];
        let a = self.side(j, &y);
        let value = if t < 1e-12 {
            a
        } else {
            (1.0 - t) * a + t * self.side((j + 1) % nv, &y)
        };
        Ok((value, err))
    }

    /// Values on an S^3 grid. Nodes with |theta'| <= `floor` take the mean
    /// of the nearest reassembled nodes. Returns (values, filled nodes,
    /// max reassembly error).
    pub fn tabulate(&self, grid: &SphericalGrid, floor: f64) -> Result<(Vec<f64>, Vec<usize>, f64)> {
        if grid.ambient_dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: grid.ambient_dim(),
            });
        }
        let evals: Vec<Option<(f64, f64)>> = grid
            .nodes()
            .par_iter()
            .map(|x| {
                let c = x.coords();
                if c[0].hypot(c[1]) <= floor {
                    Ok(None)
                } else {
                    self.eval(c).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let mut valid: Vec<[f64; 4]> = Vec::new();
        let mut valid_index: Vec<usize> = Vec::new();
        let mut max_err = 0.0f64;
        let mut values = vec![0.0; grid.len()];
        let mut filled = Vec::new();
        for (i, e) in evals.iter().enumerate() {
            match e {
                Some((v, err)) => {
                    let c = grid.nodes()[i].coords();
                    valid.push([c[0], c[1], c[2], c[3]]);
                    valid_index.push(i);
                    values[i] = *v;
                    max_err = max_err.max(*err);
                }
                None => filled.push(i),
            }
        }
        if filled.len() == grid.len() {
            return Err(Error::invalid("every output node lies below the theta' floor"));
        }
        let index = PointIndex::new(&valid);
        for &i in &filled {
            let c = grid.nodes()[i].coords();
            let near = index.nearest(&[c[0], c[1], c[2], c[3]], 16);
            let reach = 2.25 * near[0].1;
            let ring: Vec<f64> = near
                .iter()
                .filter(|nb| nb.1 <= reach)
                .map(|nb| values[valid_index[nb.0]])
                .collect();
            values[i] = ring.iter().sum::<f64>() / ring.len() as f64;
        }
        Ok((values, filled, max_err))
    }
}

/// Radial function on S^3 from reduced-manifold half-section volumes.
pub fn reconstruct_from_reduced(data: &HemiDataset, opts: &ReconOptions) -> Result<ReconstructionResult> {
    let k = data.k();
    let inv = invert_from_reduced(&data.scaled(k as f64), opts)?;
    let grid = Arc::new(build_grid(3, opts.resolution)?);
    let (power, filled, reassembly_error) = inv.tabulate(&grid, opts.theta_floor)?;
    let (radii, clamped) = kth_root(&power, k, &grid)?;
    let mut warnings = inv.warnings.clone();
    warnings.extend(clamp_warning(&clamped));
    let diagnostics = Diagnostics {
        backend: opts.backend.tag(),
        l_max: opts.l_max,
        band: opts.band,
        fit_residual: inv.fit_residual,
        odd_energy: inv.odd_energy,
        clamped,
        reassembly_error,
        filled,
        warnings,
    };
    Ok(ReconstructionResult {
        radial: StarBody::tabulated(grid.clone(), radii)?,
        grid,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::simulate_dataset;

    #[test]
    fn frame_set_shape() {
        let fs = build_reduced_frames(4, 2, 16, 16).unwrap();
        assert_eq!(fs.frame_count(), 16 * 512);
        assert_eq!(fs.geometries().len(), 16 * 512);
        assert_eq!(fs.manifold_dim(), 3);
        assert!(fs.degenerate.is_empty());
        assert!(build_reduced_frames(3, 2, 16, 16).is_err());
        assert!(build_reduced_frames(4, 2, 4, 16).is_err());
        assert!(build_reduced_frames(4, 3, 16, 16).is_err());
    }

    #[test]
    fn reassembly_identity() {
        let th = [0.3, -0.5, 0.4, (1.0f64 - 0.5).sqrt()];
        let (v, eta) = reassembly_frame(&th).unwrap();
        let back = rotation_to(&v, 4, 2).unwrap().apply(&eta);
        for (a, b) in back.iter().zip(th) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(reassembly_frame(&[0.0, 0.0, 0.6, 0.8]).is_none());
    }

    #[test]
    fn unit_ball_s3() {
        let fs = build_reduced_frames(4, 2, 8, 8).unwrap();
        let ball = StarBody::ball(4, 1.0).unwrap();
        let ds = simulate_dataset(&ball, &fs.geometries(), 32).unwrap();
        let opts = ReconOptions {
            l_max: 4,
            resolution: 8,
            theta_floor: 0.3,
            ..Default::default()
        };
        let res = reconstruct_from_reduced(&ds, &opts).unwrap();
        for x in res.grid.nodes() {
            assert!((res.radial.radial(x).unwrap() - 1.0).abs() < 1e-3);
        }
        assert!(res.diagnostics.reassembly_error <= 1e-12);
        assert!(!res.diagnostics.filled.is_empty());
    }

    #[test]
    fn incomplete_data_rejected() {
        let fs = build_reduced_frames(4, 2, 8, 8).unwrap();
        let ball = StarBody::ball(4, 1.0).unwrap();
        let mut g = fs.geometries();
        g.pop();
        let ds = simulate_dataset(&ball, &g, 16).unwrap();
        let opts = ReconOptions { l_max: 4, resolution: 8, ..Default::default() };
        assert!(reconstruct_from_reduced(&ds, &opts).is_err());
    }
}

use super::transforms::{transform_with, volume_with, HalfCircleRule};
use super::{FrameGeometry, HemiDataset, HemiRecord, SectionFrame, Sign};
use crate::error::{Error, Result};
use crate::sphere::Direction;
use crate::star_body::{SphericalFunction, StarBody};
use rayon::prelude::*;
use std::f64::consts::PI;

/// `count` hyperplane normals from a Fibonacci spiral on the open upper
/// hemisphere of S^2, so that each plane u^perp appears once.
pub fn fibonacci_frames(count: usize) -> Vec<FrameGeometry> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            let u = Direction::from_unit_unchecked(vec![r * c, r * s, z]);
            FrameGeometry::full(u).expect("spiral normals stay off the pole")
        })
        .collect()
}

fn common_shape(geometries: &[FrameGeometry]) -> Result<(usize, usize, super::Mode)> {
    let first = geometries
        .first()
        .ok_or_else(|| Error::invalid("no frames to simulate"))?;
    let shape = (first.n(), first.k(), first.mode());
    for (i, g) in geometries.iter().enumerate() {
        if (g.n(), g.k(), g.mode()) != shape {
            return Err(Error::Frame {
                index: i,
                source: Box::new(Error::invalid("frames must share n, k and mode")),
            });
        }
    }
    Ok(shape)
}

fn simulate_with(
    geometries: &[FrameGeometry],
    m: usize,
    eval: impl Fn(&HalfCircleRule, &SectionFrame) -> Result<f64> + Sync,
) -> Result<HemiDataset> {
    let (n, k, mode) = common_shape(geometries)?;
    let rule = HalfCircleRule::new(m)?;
    let pairs: Vec<Result<[HemiRecord; 2]>> = geometries
        .par_iter()
        .enumerate()
        .map(|(index, g)| {
            let rec = |sign| {
                let frame = SectionFrame {
                    geometry: g.clone(),
                    sign,
                };
                eval(&rule, &frame).map(|value| HemiRecord { frame, value })
            };
            let wrap = |e| Error::Frame {
                index,
                source: Box::new(e),
            };
            Ok([rec(Sign::Plus).map_err(wrap)?, rec(Sign::Minus).map_err(wrap)?])
        })
        .collect();
    let mut records = Vec::with_capacity(2 * geometries.len());
    for p in pairs {
        records.extend(p?);
    }
    HemiDataset::new(n, k, mode, records)
}

/// Hemispherical transform values of `f` on both halves of every frame.
pub fn simulate_transform(f: &SphericalFunction, geometries: &[FrameGeometry], m: usize) -> Result<HemiDataset> {
    simulate_with(geometries, m, |rule, frame| {
        if frame.geometry.n() != f.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: f.ambient_dim(),
                got: frame.geometry.n(),
            });
        }
        transform_with(rule, &|x| f.eval(x), frame)
    })
}

/// Half-section volumes of `body` on both halves of every frame, in
/// input order with the `+` record first.
pub fn simulate_dataset(body: &StarBody, geometries: &[FrameGeometry], m: usize) -> Result<HemiDataset> {
    simulate_with(geometries, m, |rule, frame| volume_with(rule, body, frame))
}

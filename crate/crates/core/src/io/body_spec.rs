use super::{from_json, read_text};
use crate::error::{Error, Result};
use crate::star_body::{HarmonicTerm, StarBody};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTermSpec {
    pub degree: usize,
    pub order: i64,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Ball {
        #[serde(default = "one")]
        radius: f64,
    },
    ShiftedBall {
        center: Vec<f64>,
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipsoid {
        semiaxes: Vec<f64>,
    },
    Harmonic {
        #[serde(default = "one")]
        base: f64,
        terms: Vec<HarmonicTermSpec>,
    },
}

fn one() -> f64 {
    1.0
}

/// JSON description of an analytic star body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub n: usize,
    #[serde(flatten)]
    pub shape: Shape,
}

fn field_error(origin: &str, field: &str, message: String) -> Error {
    Error::Parse {
        path: format!("{origin}: {field}"),
        message,
    }
}

impl BodySpec {
    pub fn from_json(text: &str, origin: &str) -> Result<BodySpec> {
        from_json(text, origin)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body specs serialize")
    }

    /// Builds the body, naming the offending field on failure.
    pub fn build(&self, origin: &str) -> Result<StarBody> {
        let n = self.n;
        let wrap = |field: &'static str| move |e: Error| field_error(origin, field, e.to_string());
        match &self.shape {
            Shape::Ball { radius } => StarBody::ball(n, *radius).map_err(wrap("radius")),
            Shape::ShiftedBall { center, radius } => {
                if center.len() != n {
                    return Err(field_error(
                        origin,
                        "center",
                        format!("expected {n} coordinates, got {}", center.len()),
                    ));
                }
                StarBody::shifted_ball(center.clone(), *radius).map_err(wrap("center"))
            }
            Shape::Ellipsoid { semiaxes } => {
                if semiaxes.len() != n {
                    return Err(field_error(
                        origin,
                        "semiaxes",
                        format!("expected {n} semiaxes, got {}", semiaxes.len()),
                    ));
                }
                StarBody::ellipsoid(semiaxes.clone()).map_err(wrap("semiaxes"))
            }
            Shape::Harmonic { base, terms } => {
                if n != 3 {
                    return Err(field_error(origin, "n", format!("harmonic bodies need n = 3, got {n}")));
                }
                let terms = terms
                    .iter()
                    .map(|t| HarmonicTerm {
                        degree: t.degree,
                        order: t.order,
                        coef: t.coef,
                    })
                    .collect();
                StarBody::harmonic_perturbed(*base, terms).map_err(wrap("terms"))
            }
        }
    }
}

/// Reads and builds a body spec file.
pub fn read_body_spec(path: &Path) -> Result<StarBody> {
    let origin = path.display().to_string();
    BodySpec::from_json(&read_text(path)?, &origin)?.build(&origin)
}

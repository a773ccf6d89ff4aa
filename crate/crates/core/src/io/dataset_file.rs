use super::{from_json, read_text, write_atomic};
use crate::error::{Error, Result};
use crate::forward::{FrameGeometry, HemiDataset, HemiRecord, Mode, SectionFrame, Sign};
use crate::sphere::Direction;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DATASET_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FrameJson {
    Full { u: Vec<f64> },
    Reduced { v: Vec<f64>, w: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordJson {
    frame: FrameJson,
    sign: String,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetJson {
    version: u32,
    n: usize,
    k: usize,
    mode: String,
    records: Vec<RecordJson>,
}

/// Serializes a dataset; deterministic for a given dataset.
pub fn dataset_to_json(data: &HemiDataset) -> String {
    let records = data
        .records()
        .iter()
        .map(|r| RecordJson {
            frame: match &r.frame.geometry {
                FrameGeometry::Full { u } => FrameJson::Full { u: u.coords().to_vec() },
                FrameGeometry::Reduced { v, w } => FrameJson::Reduced {
                    v: v.coords().to_vec(),
                    w: w.coords().to_vec(),
                },
            },
            sign: r.frame.sign.symbol().to_string(),
            value: r.value,
        })
        .collect();
    let doc = DatasetJson {
        version: DATASET_VERSION,
        n: data.n(),
        k: data.k(),
        mode: data.mode().name().to_string(),
        records,
    };
    let mut s = serde_json::to_string(&doc).expect("datasets hold finite values");
    s.push('\n');
    s
}

fn record_error(origin: &str, i: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: format!("{origin}: records[{i}]"),
        message: e.to_string(),
    }
}

/// Parses and validates a dataset document.
pub fn dataset_from_json(text: &str, origin: &str) -> Result<HemiDataset> {
    let doc: DatasetJson = from_json(text, origin)?;
    if doc.version != DATASET_VERSION {
        return Err(Error::Parse {
            path: format!("{origin}: version"),
            message: format!("unsupported dataset version {} (expected {DATASET_VERSION})", doc.version),
        });
    }
    let mode = match doc.mode.as_str() {
        "full" => Mode::Full,
        "reduced" => Mode::Reduced,
        m => {
            return Err(Error::Parse {
                path: format!("{origin}: mode"),
                message: format!("unknown mode '{m}'"),
            })
        }
    };
    let mut records = Vec::with_capacity(doc.records.len());
    for (i, r) in doc.records.into_iter().enumerate() {
        let sign = match r.sign.as_str() {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            s => return Err(record_error(origin, i, format!("sign must be \"+\" or \"-\", got {s:?}"))),
        };
        let geometry = match r.frame {
            FrameJson::Full { u } => Direction::new(u).and_then(FrameGeometry::full),
            FrameJson::Reduced { v, w } => {
                Direction::new(v).and_then(|v| Direction::new(w).and_then(|w| FrameGeometry::reduced(v, w)))
            }
        }
        .map_err(|e| record_error(origin, i, e))?;
        records.push(HemiRecord {
            frame: SectionFrame { geometry, sign },
            value: r.value,
        });
    }
    HemiDataset::new(doc.n, doc.k, mode, records).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })
}

pub fn read_dataset(path: &Path) -> Result<HemiDataset> {
    dataset_from_json(&read_text(path)?, &path.display().to_string())
}

pub fn write_dataset(path: &Path, data: &HemiDataset) -> Result<()> {
    write_atomic(path, dataset_to_json(data).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{fibonacci_frames, simulate_dataset};
    use crate::recon::build_reduced_frames;
    use crate::star_body::StarBody;

    #[test]
    fn round_trip_is_byte_identical() {
        let body = StarBody::shifted_ball(vec![0.2, 0.0, 0.1], 1.0).unwrap();
        let ds = simulate_dataset(&body, &fibonacci_frames(50), 32).unwrap();
        let a = dataset_to_json(&ds);
        let back = dataset_from_json(&a, "mem").unwrap();
        assert_eq!(back, ds);
        assert_eq!(dataset_to_json(&back), a);

        let fs = build_reduced_frames(4, 2, 8, 8).unwrap();
        let ds = simulate_dataset(&StarBody::ball(4, 1.0).unwrap(), &fs.geometries()[..40], 16).unwrap();
        let a = dataset_to_json(&ds);
        assert_eq!(dataset_to_json(&dataset_from_json(&a, "mem").unwrap()), a);
    }

    #[test]
    fn rejects_bad_documents() {
        let v2 = r#"{"version":2,"n":3,"k":2,"mode":"full","records":[]}"#;
        assert!(dataset_from_json(v2, "d").unwrap_err().to_string().contains("version"));
        let sign = r#"{"version":1,"n":3,"k":2,"mode":"full","records":[{"frame":{"u":[1,0,0]},"sign":"?","value":1}]}"#;
        assert!(dataset_from_json(sign, "d").unwrap_err().to_string().contains("records[0]"));
        let mixed = r#"{"version":1,"n":3,"k":2,"mode":"full","records":[{"frame":{"v":[1,0],"w":[0,1,0]},"sign":"+","value":1}]}"#;
        assert!(dataset_from_json(mixed, "d").is_err());
        let pole = r#"{"version":1,"n":3,"k":2,"mode":"full","records":[{"frame":{"u":[0,0,1]},"sign":"+","value":1}]}"#;
        assert!(dataset_from_json(pole, "d").is_err());
        let not_unit = r#"{"version":1,"n":3,"k":2,"mode":"full","records":[{"frame":{"u":[2,0,0]},"sign":"+","value":1}]}"#;
        assert!(dataset_from_json(not_unit, "d").is_err());
    }
}

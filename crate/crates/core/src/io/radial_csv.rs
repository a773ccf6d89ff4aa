use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::sphere::{build_grid, SphericalGrid};
use crate::star_body::StarBody;
use std::path::Path;
use std::sync::Arc;

const MAGIC: &str = "# hemifunk radial v1";

fn angle_names(d: usize) -> &'static [&'static str] {
    match d {
        1 => &["azimuth"],
        2 => &["polar", "azimuth"],
        _ => &["chi", "polar", "azimuth"],
    }
}

/// Node table of `body` on `grid`: a header comment naming the grid,
/// then one row of node angles and rho per node, in grid order.
pub fn radial_to_csv(body: &StarBody, grid: &SphericalGrid) -> Result<String> {
    if body.dim() != grid.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: grid.ambient_dim(),
        });
    }
    let mut out = format!("{MAGIC} n={} resolution={}\n", body.dim(), grid.resolution());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = angle_names(grid.dim()).to_vec();
    header.push("rho");
    w.write_record(&header).map_err(csv_err)?;
    for (i, x) in grid.nodes().iter().enumerate() {
        let mut row: Vec<String> = grid.node_angles(i).iter().map(|a| a.to_string()).collect();
        row.push(body.radial(x)?.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

fn parse_header(line: &str, origin: &str) -> Result<(usize, usize)> {
    let bad = |m: &str| Error::Parse {
        path: format!("{origin}: line 1"),
        message: m.to_string(),
    };
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad("missing '# hemifunk radial v1' header"))?;
    let (mut n, mut res) = (None, None);
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("resolution=") {
            res = v.parse().ok();
        }
    }
    match (n, res) {
        (Some(n), Some(r)) => Ok((n, r)),
        _ => Err(bad("header must carry n=<int> and resolution=<int>")),
    }
}

/// Parses a node table back into a tabulated body on its grid.
pub fn radial_from_csv(text: &str, origin: &str) -> Result<(StarBody, Arc<SphericalGrid>)> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    let (n, res) = parse_header(first.trim_end(), origin)?;
    if n < 2 {
        return Err(Error::Parse {
            path: format!("{origin}: line 1"),
            message: format!("n = {n} is not a sphere dimension"),
        });
    }
    let grid = Arc::new(build_grid(n - 1, res).map_err(|e| Error::Parse {
        path: format!("{origin}: line 1"),
        message: e.to_string(),
    })?);
    let names = angle_names(grid.dim());
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let mut values = Vec::with_capacity(grid.len());
    for (i, rec) in rd.records().enumerate() {
        let line = i + 3;
        let here = |m: String| Error::Parse {
            path: format!("{origin}: line {line}"),
            message: m,
        };
        let rec = rec.map_err(|e| here(e.to_string()))?;
        if rec.len() != names.len() + 1 {
            return Err(here(format!("expected {} columns, got {}", names.len() + 1, rec.len())));
        }
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| here(format!("'{f}': {e}"))))
            .collect::<Result<_>>()?;
        if i >= grid.len() {
            return Err(here(format!("more rows than the {} grid nodes", grid.len())));
        }
        let want = grid.node_angles(i);
        if want.iter().zip(&nums).any(|(a, b)| (a - b).abs() > 1e-9) {
            return Err(here(format!("angles {:?} do not match grid node {i}", &nums[..names.len()])));
        }
        values.push(nums[names.len()]);
    }
    if values.len() != grid.len() {
        return Err(Error::Parse {
            path: origin.to_string(),
            message: format!("{} rows for a {}-node grid", values.len(), grid.len()),
        });
    }
    let body = StarBody::tabulated(grid.clone(), values).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    Ok((body, grid))
}

pub fn read_radial(path: &Path) -> Result<(StarBody, Arc<SphericalGrid>)> {
    radial_from_csv(&read_text(path)?, &path.display().to_string())
}

pub fn write_radial(path: &Path, body: &StarBody, grid: &SphericalGrid) -> Result<()> {
    write_atomic(path, radial_to_csv(body, grid)?.as_bytes())
}

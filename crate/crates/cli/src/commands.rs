use crate::{BackendArg, Command, ModeArg};
use anyhow::{bail, Context, Result};
use hemifunk::inverse::{multiplier_probe, Convention, MeanValueOptions};
use hemifunk::io::{
    compare_radial, plot_slice, read_body_spec, read_dataset, read_radial, write_dataset,
    write_radial, write_slice_csv, ProbeSummary, Report,
};
use hemifunk::recon::{
    build_reduced_frames, reconstruct_radial, Backend, ReconOptions, ReconstructionResult,
};
use hemifunk::{fibonacci_frames, simulate_dataset, Direction, Error, FrameGeometry, Mode, StarBody};
use std::path::Path;
use std::time::Instant;

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "HEMIFUNK_THREADS";
/// Share of skipped frames at which simulation gives up.
const DEGENERATE_LIMIT: f64 = 0.10;

pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    e.chain()
        .find_map(|c| c.downcast_ref::<Error>())
        .map(|e| e.exit_code() as u8)
        .unwrap_or(2)
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate {
            body,
            mode,
            k,
            frames,
            normals,
            v_res,
            w_res,
            quadrature,
            out,
        } => simulate(&body, mode, k, frames, normals.as_deref(), v_res, w_res, quadrature, &out),
        Command::Reconstruct {
            data,
            backend,
            convention,
            l_max,
            resolution,
            fit_resolution,
            band,
            theta_floor,
            fit_tol,
            out,
            report,
            truth,
        } => {
            let backend = match (backend, convention) {
                (BackendArg::Harmonic, _) => Backend::Harmonic,
                (BackendArg::Meanvalue, None) => {
                    bail!(Error::InvalidInput(
                        "the meanvalue backend requires --convention probability|calibrated:K".into()
                    ))
                }
                (BackendArg::Meanvalue, Some(c)) => Backend::MeanValue {
                    convention: c.parse::<Convention>()?,
                    options: MeanValueOptions::default(),
                },
            };
            let opts = ReconOptions {
                l_max,
                resolution,
                fit_resolution,
                band,
                theta_floor,
                fit_tol,
                backend,
                ..Default::default()
            };
            reconstruct(&data, &opts, &out, &report, truth.as_deref())
        }
        Command::Compare {
            radial,
            truth,
            band,
            theta_floor,
            report,
        } => compare(&radial, &truth, band, theta_floor, &report),
        Command::Probe { degrees, convention } => probe(&degrees, &convention),
        Command::PlotData {
            radial,
            normal,
            samples,
            out,
        } => {
            let (body, _) = read_radial(&radial)?;
            let s = plot_slice(&body, &normal, samples)?;
            write_slice_csv(&out, &s)?;
            Ok(())
        }
    }
}

fn read_normals(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    body_path: &Path,
    mode: ModeArg,
    k: usize,
    frames: usize,
    normals: Option<&Path>,
    v_res: usize,
    w_res: usize,
    m: usize,
    out: &Path,
) -> Result<()> {
    let body = read_body_spec(body_path)?;
    let n = body.dim();
    let (geometries, skipped, total) = match mode {
        ModeArg::Full => match normals {
            None => {
                if frames == 0 {
                    bail!(Error::InvalidInput("--frames must be positive".into()));
                }
                (fibonacci_frames(frames), Vec::new(), frames)
            }
            Some(p) => {
                let raw = read_normals(p)?;
                let total = raw.len();
                let mut good = Vec::new();
                let mut skipped = Vec::new();
                for (i, u) in raw.into_iter().enumerate() {
                    match Direction::normalize(u).and_then(FrameGeometry::full) {
                        Ok(g) if g.n() == n => good.push(g),
                        Ok(g) => bail!(Error::DimensionMismatch { expected: n, got: g.n() }),
                        Err(Error::EquatorialFrame(_)) | Err(Error::InvalidInput(_)) => skipped.push(i),
                        Err(e) => return Err(e.into()),
                    }
                }
                (good, skipped, total)
            }
        },
        ModeArg::Reduced => {
            let fs = build_reduced_frames(n, k, v_res, w_res)?;
            let (nv, nw) = (fs.v_grid.len(), fs.w_grid.len());
            let skipped: Vec<usize> = fs
                .degenerate
                .iter()
                .flat_map(|&j| (0..nv).map(move |a| a * nw + j))
                .collect();
            (fs.geometries(), skipped, fs.frame_count())
        }
    };
    if !skipped.is_empty() {
        let shown: Vec<String> = skipped.iter().take(20).map(|i| i.to_string()).collect();
        eprintln!(
            "skipped {} degenerate frame(s) of {total}: [{}{}]",
            skipped.len(),
            shown.join(", "),
            if skipped.len() > 20 { ", ..." } else { "" }
        );
    }
    if total > 0 && skipped.len() as f64 > DEGENERATE_LIMIT * total as f64 {
        bail!(Error::DegenerateSaturation {
            skipped: skipped.len(),
            total
        });
    }
    if geometries.is_empty() {
        bail!(Error::InvalidInput("no usable frames".into()));
    }
    let data = simulate_dataset(&body, &geometries, m)?;
    write_dataset(out, &data)?;
    Ok(())
}

fn read_truth(path: &Path) -> Result<StarBody> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.starts_with('#') {
        Ok(read_radial(path)?.0)
    } else {
        Ok(read_body_spec(path)?)
    }
}

const MEANVALUE_BANNER: &str = "mean-value backend: transcription of the mean-value inversion formulas \
under an explicit orbit-measure convention; its normalization is diagnostic, see probes";

fn reconstruct(data_path: &Path, opts: &ReconOptions, out: &Path, report_path: &Path, truth: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let data = read_dataset(data_path)?;
    let result: ReconstructionResult = reconstruct_radial(&data, opts)
        .with_context(|| format!("reconstructing from {}", data_path.display()))?;
    write_radial(out, &result.radial, &result.grid)?;
    let mut report = Report {
        command: "reconstruct".into(),
        grid_resolution: Some(opts.resolution),
        grid_nodes: Some(result.grid.len()),
        ..Default::default()
    };
    report.absorb(&result.diagnostics);
    let reduced = data.mode() == Mode::Reduced;
    if reduced {
        report.theta_floor = Some(opts.theta_floor);
    } else {
        report.fit_resolution = Some(opts.fit_resolution.unwrap_or(2 * opts.l_max).max(2 * opts.l_max));
    }
    if let Backend::MeanValue { convention, options } = &opts.backend {
        report.convention = Some(convention.to_string());
        report.banner = Some(MEANVALUE_BANNER.into());
        for l in [0usize, 2] {
            let p = multiplier_probe(l, *convention, options)?;
            if (p.mu - 1.0).abs() > 1e-3 {
                report.warnings.push(format!(
                    "normalization: mu_{l} = {:.3} under convention {convention} (1 is exact recovery)",
                    p.mu
                ));
            }
            report.probes.push(ProbeSummary {
                degree: l,
                mu: p.mu,
                cross_talk: p.cross_talk,
                flagged: p.flagged,
            });
        }
    }
    if let Some(t) = truth {
        let truth = read_truth(t)?;
        let floor = reduced.then_some(opts.theta_floor);
        report.errors = Some(compare_radial(&result.radial, &result.grid, &truth, opts.band, floor)?);
    }
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    report.write(report_path)?;
    Ok(())
}

fn compare(radial: &Path, truth: &Path, band: f64, theta_floor: f64, report_path: &Path) -> Result<()> {
    let start = Instant::now();
    let (body, grid) = read_radial(radial)?;
    let truth_body = read_truth(truth)?;
    if truth_body.dim() != body.dim() {
        bail!(Error::DimensionMismatch {
            expected: body.dim(),
            got: truth_body.dim()
        });
    }
    let floor = (body.dim() == 4).then_some(theta_floor);
    let errors = compare_radial(&body, &grid, &truth_body, band, floor)?;
    let report = Report {
        command: "compare".into(),
        grid_resolution: Some(grid.resolution()),
        grid_nodes: Some(grid.len()),
        band,
        theta_floor: floor,
        errors: Some(errors),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        ..Default::default()
    };
    report.write(report_path)?;
    println!(
        "max_rel_error {:.6e} mean_rel_error {:.6e} nodes {}",
        errors.max_rel_error, errors.mean_rel_error, errors.evaluated_nodes
    );
    Ok(())
}

fn probe(degrees: &[usize], convention: &str) -> Result<()> {
    let conv: Convention = convention.parse()?;
    if let Some(l) = degrees.iter().find(|l| **l % 2 == 1 || **l > 8) {
        bail!(Error::InvalidInput(format!("probe degrees must be even and at most 8, got {l}")));
    }
    let opts = MeanValueOptions::default();
    println!("# convention {conv}");
    println!("{:>3} {:>12} {:>12} {:>7}", "l", "mu", "cross_talk", "flag");
    for &l in degrees {
        let p = multiplier_probe(l, conv, &opts)?;
        println!(
            "{:>3} {:>12.6} {:>12.3e} {:>7}",
            l,
            p.mu,
            p.cross_talk,
            if p.flagged { "yes" } else { "no" }
        );
    }
    Ok(())
}

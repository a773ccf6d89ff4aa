//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero when any criterion fails.

use hemifunk::inverse::{analyze_values, dual_profile, MeanValueOptions, PolyFit};
use hemifunk::recon::{build_reduced_frames, invert_from_hemispherical, invert_from_reduced, reconstruct_radial, ReconOptions};
use hemifunk::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

const C1_ABS_TOL: f64 = 1e-3;
const C1_SECONDS: f64 = 10.0;
const C2_REL_TOL: f64 = 0.02;
const C2_SECONDS: f64 = 60.0;
const C3_ODD_TOL: f64 = 0.05;
const C4_TOL: f64 = 1e-6;
const C5_TOL: f64 = 1e-6;
const C5_EXPECTED: f64 = 2.527408;
const C6_TOL: f64 = 1e-8;
const C7_REL_TOL: f64 = 0.05;
const C7_REASSEMBLY_TOL: f64 = 1e-12;
const C7_SECONDS: f64 = 300.0;
const C8_CROSS_TALK: f64 = 1e-3;
const C8_MU_TOL: f64 = 1e-3;
const C8_FIT_TOL: f64 = 1e-8;
const C8_LINEAR_TOL: f64 = 1e-10;
const C9_TOL: f64 = 1e-10;

const BAND: f64 = 0.15;
const RANDOM_FRAMES: usize = 1000;
const QUAD: usize = 64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_normals(seed: u64, count: usize) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let a: f64 = rng.gen_range(0.0..2.0 * PI);
        if z.abs() > 0.999 {
            continue;
        }
        let r = (1.0 - z * z).sqrt();
        out.push(Direction::normalize(vec![r * a.cos(), r * a.sin(), z]).unwrap());
    }
    out
}

fn random_spectrum(seed: u64, l_max: usize) -> HarmonicSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..(l_max + 1) * (l_max + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    HarmonicSpectrum::from_coeffs(l_max, coeffs).unwrap()
}

fn shifted_ball() -> StarBody {
    StarBody::shifted_ball(vec![0.2, 0.0, 0.1], 1.0).unwrap()
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let ball = StarBody::ball(3, 1.0).unwrap();
    let data = simulate_dataset(&ball, &fibonacci_frames(500), QUAD)
        .unwrap()
        .map_values(|_, _| FRAC_PI_2);
    let opts = ReconOptions { l_max: 16, resolution: 64, ..Default::default() };
    let rec = reconstruct_radial(&data, &opts).unwrap();
    let err = rec
        .grid
        .nodes()
        .iter()
        .map(|x| (rec.radial.radial(x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err <= C1_ABS_TOL && secs <= C1_SECONDS && rec.grid.len() == 64 * 128,
        format!("unit ball, {} records: max |rho - 1| = {err:.2e} (tol {C1_ABS_TOL:e}), {secs:.2}s", data.len()),
    )
}

/// Shared by criteria 2 and 3.
struct ShiftedRun {
    data: HemiDataset,
    opts: ReconOptions,
    seconds: f64,
    rho_err: f64,
}

fn shifted_run() -> ShiftedRun {
    let start = Instant::now();
    let body = shifted_ball();
    let data = simulate_dataset(&body, &fibonacci_frames(40_000), QUAD).unwrap();
    let opts = ReconOptions {
        l_max: 96,
        resolution: 64,
        fit_resolution: Some(192),
        ..Default::default()
    };
    let rec = reconstruct_radial(&data, &opts).unwrap();
    let rho_err = rec
        .grid
        .nodes()
        .iter()
        .filter(|x| x.last().abs() >= BAND)
        .map(|x| (rec.radial.radial(x).unwrap() / body.radial(x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    ShiftedRun { data, opts, seconds: start.elapsed().as_secs_f64(), rho_err }
}

fn criterion2(run: &ShiftedRun) -> Outcome {
    outcome(
        run.rho_err <= C2_REL_TOL && run.seconds <= C2_SECONDS,
        format!(
            "shifted ball, {} records, L={}: max rel rho error {:.4} off the band (tol {C2_REL_TOL}), {:.2}s",
            run.data.len(),
            run.opts.l_max,
            run.rho_err,
            run.seconds
        ),
    )
}

fn criterion3(run: &ShiftedRun) -> Outcome {
    let body = shifted_ball();
    let c = [0.2, 0.0, 0.1];
    let c2: f64 = c.iter().map(|x| x * x).sum();
    let odd = move |x: &[f64]| {
        let ct: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
        2.0 * ct * (1.0 - c2 + ct * ct).sqrt()
    };
    let rho2 = |x: &Direction| body.radial(x).unwrap().powi(2);

    // plain Funk inversion of k (v+ + v-) recovers only the even part
    let l = 32;
    let ugrid = build_grid(2, 2 * l).unwrap();
    let geoms: Vec<FrameGeometry> = ugrid.nodes().iter().map(|u| FrameGeometry::full(u.clone()).unwrap()).collect();
    let sums: Vec<f64> = simulate_dataset(&body, &geoms, QUAD)
        .unwrap()
        .paired()
        .unwrap()
        .iter()
        .map(|(_, p, m)| 2.0 * (p + m))
        .collect();
    let even = funk_inverse_harmonic(&SphericalFunction::harmonic(analyze_values(&ugrid, &sums, l).unwrap()), &ugrid, l)
        .unwrap()
        .function();
    let grid = build_grid(2, 64).unwrap();
    let (mut resid, mut scale, mut even_err) = (0.0f64, 0.0f64, 0.0f64);
    for x in grid.nodes() {
        let e = even.eval(x.coords());
        let r2 = rho2(x);
        let r2m = rho2(&Direction::normalize(x.coords().iter().map(|v| -v).collect()).unwrap());
        even_err = even_err.max((e - 0.5 * (r2 + r2m)).abs());
        resid = resid.max((r2 - e - odd(x.coords())).abs());
        scale = scale.max(odd(x.coords()).abs());
    }
    let odd_rel = resid / scale;

    // the hemispherical pipeline keeps the odd part
    let inv = invert_from_hemispherical(&run.data.scaled(2.0), &run.opts).unwrap();
    let vals = inv.tabulate(&grid).unwrap();
    let full_err = grid
        .nodes()
        .iter()
        .zip(&vals)
        .filter(|(x, _)| x.last().abs() >= BAND)
        .map(|(x, v)| (v / rho2(x) - 1.0).abs())
        .fold(0.0, f64::max);
    outcome(
        odd_rel <= C3_ODD_TOL && full_err <= C2_REL_TOL,
        format!(
            "summed-data inversion misses the odd part: residual vs odd part {odd_rel:.2e} (tol {C3_ODD_TOL}), even-part error {even_err:.1e}; hemispherical rho^2 max rel {full_err:.4} (tol {C2_REL_TOL})"
        ),
    )
}

fn criterion4() -> Outcome {
    let f = SphericalFunction::from_fn(3, |x| 1.0 + 0.5 * x[2]);
    let mut err = 0.0f64;
    for u in random_normals(4, RANDOM_FRAMES) {
        let a = (1.0 - u.last().powi(2)).sqrt();
        err = err.max((hemi_funk(&f, &u, Sign::Plus, QUAD).unwrap() - (PI + a)).abs());
        err = err.max((hemi_funk(&f, &u, Sign::Minus, QUAD).unwrap() - (PI - a)).abs());
    }
    outcome(
        err <= C4_TOL,
        format!("f = 1 + x3/2 over {RANDOM_FRAMES} frames: max |phi - (pi +- sqrt(1-u3^2))| = {err:.2e} (tol {C4_TOL:e})"),
    )
}

fn criterion5() -> Outcome {
    let t: f64 = 0.5;
    let oracle = PI - (t.acos() - t * (1.0 - t * t).sqrt());
    let body = StarBody::shifted_ball(vec![0.0, 0.0, t], 1.0).unwrap();
    let frame = SectionFrame {
        geometry: FrameGeometry::full(Direction::basis(3, 0)).unwrap(),
        sign: Sign::Plus,
    };
    let v = half_section_volume(&body, &frame, QUAD).unwrap();
    let err = (v - oracle).abs().max((v - C5_EXPECTED).abs());
    outcome(
        err <= C5_TOL,
        format!("near-side half-disk area {v:.7} vs segment oracle {oracle:.7} (tol {C5_TOL:e})"),
    )
}

fn criterion6() -> Outcome {
    let grid = build_grid(2, 16).unwrap();
    let mut err = 0.0f64;
    let mut shown = Vec::new();
    for (l, exact) in [(2usize, -PI), (4, 0.75 * PI)] {
        let mut probe = HarmonicSpectrum::zeros(l);
        for m in -(l as i64)..=(l as i64) {
            probe.set(l, m, 1.0 + 0.1 * m as f64);
        }
        let norm = probe.degree_energy(l);
        let y = SphericalFunction::harmonic(probe.clone());
        let image: Vec<f64> = grid.nodes().iter().map(|u| funk_transform(&y, u, QUAD).unwrap()).collect();
        let spec = analyze_values(&grid, &image, l).unwrap();
        let lambda: f64 = probe.coeffs().iter().zip(spec.coeffs()).map(|(a, b)| a * b).sum::<f64>() / norm;
        err = err.max((lambda - exact).abs()).max((lambda - funk_multiplier(l).unwrap()).abs());
        shown.push(format!("lambda_{l} = {lambda:.10}"));
    }
    outcome(err <= C6_TOL, format!("{} (max dev {err:.1e}, tol {C6_TOL:e})", shown.join(", ")))
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let f = |x: &[f64]| 1.0 + 0.3 * x[3] + 0.25 * x[0] + 0.2 * x[0] * x[2] - 0.15 * x[1] * x[3] + 0.1 * x[2] * x[2];
    let frames = build_reduced_frames(4, 2, 24, 96).unwrap();
    let data = simulate_transform(&SphericalFunction::from_fn(4, f), &frames.geometries(), 48).unwrap();
    let opts = ReconOptions { l_max: 48, resolution: 24, ..Default::default() };
    let inv = invert_from_reduced(&data, &opts).unwrap();
    let grid = build_grid(3, 24).unwrap();
    let (vals, _, reassembly) = inv.tabulate(&grid, opts.theta_floor).unwrap();
    let mut err = 0.0f64;
    let mut nodes = 0;
    for (x, v) in grid.nodes().iter().zip(&vals) {
        let c = x.coords();
        if c[0].hypot(c[1]) <= 0.2 || c[3].abs() <= BAND {
            continue;
        }
        nodes += 1;
        err = err.max((v / f(c) - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err <= C7_REL_TOL && reassembly <= C7_REASSEMBLY_TOL && secs <= C7_SECONDS,
        format!(
            "S^3 from {} reduced records: max rel error {err:.4} over {nodes} nodes (tol {C7_REL_TOL}), reassembly {reassembly:.1e} (tol {C7_REASSEMBLY_TOL:e}), {secs:.1}s",
            data.len()
        ),
    )
}

fn criterion8() -> Outcome {
    let opts = MeanValueOptions::default();
    let conv = Convention::Probability;
    let mut worst = 0.0f64;
    let mut mu = [0.0; 2];
    for l in (0..=8).step_by(2) {
        let p = multiplier_probe(l, conv, &opts).unwrap();
        worst = worst.max(p.cross_talk);
        if l <= 2 {
            mu[l / 2] = p.mu;
        }
    }
    let mu_ok = (mu[0] - 0.5).abs() <= C8_MU_TOL && (mu[1] - 0.875).abs() <= C8_MU_TOL;

    // linearity on a pair of images
    let grid = build_grid(2, 24).unwrap();
    let images: Vec<SphericalFunction> = [7u64, 8]
        .iter()
        .map(|&s| {
            let f = SphericalFunction::harmonic(random_spectrum(s, 8));
            let vals: Vec<f64> = grid.nodes().iter().map(|u| funk_transform(&f, u, QUAD).unwrap()).collect();
            SphericalFunction::harmonic(analyze_values(&grid, &vals, 8).unwrap())
        })
        .collect();
    let (a, b) = (1.7, -0.6);
    let mix = images[0].combine(a, &images[1], b).unwrap();
    let mut lin = 0.0f64;
    for x in random_normals(9, 20) {
        let out = |g: &SphericalFunction| mean_value_inverse(g, &x, 2, &opts, conv).unwrap();
        lin = lin.max((out(&mix) - a * out(&images[0]) - b * out(&images[1])).abs());
    }

    // dual profiles of band-limited data are polynomials in s^2
    let mut fit = 0.0f64;
    for x in random_normals(10, 5) {
        let prof = dual_profile(&images[0], &x, &opts, conv).unwrap();
        let t: Vec<f64> = prof.s_nodes.iter().map(|s| s * s).collect();
        fit = fit.max(PolyFit::fit(&t, &prof.values, 6).unwrap().relative_residual);
    }
    outcome(
        worst <= C8_CROSS_TALK && mu_ok && lin <= C8_LINEAR_TOL && fit <= C8_FIT_TOL,
        format!(
            "mean-value backend: cross-talk {worst:.1e} for l <= 8 (tol {C8_CROSS_TALK:e}), mu0 = {:.6}, mu2 = {:.6} (tol {C8_MU_TOL:e}), linearity {lin:.1e}, profile fit {fit:.1e} (tol {C8_FIT_TOL:e})",
            mu[0], mu[1]
        ),
    )
}

fn criterion9() -> Outcome {
    let f = SphericalFunction::harmonic(random_spectrum(11, 6));
    let reflected = f.reflected();
    let even = f.evenized(Sign::Plus);
    let (mut part, mut refl, mut evn) = (0.0f64, 0.0f64, 0.0f64);
    for u in random_normals(12, RANDOM_FRAMES) {
        let p = hemi_funk(&f, &u, Sign::Plus, QUAD).unwrap();
        let m = hemi_funk(&f, &u, Sign::Minus, QUAD).unwrap();
        part = part.max((p + m - funk_transform(&f, &u, QUAD).unwrap()).abs());
        refl = refl
            .max((p - hemi_funk(&reflected, &u, Sign::Minus, QUAD).unwrap()).abs())
            .max((m - hemi_funk(&reflected, &u, Sign::Plus, QUAD).unwrap()).abs());
        evn = evn.max((p - 0.5 * funk_transform(&even, &u, QUAD).unwrap()).abs());
    }
    outcome(
        part.max(refl).max(evn) <= C9_TOL,
        format!("over {RANDOM_FRAMES} frames: partition {part:.1e}, reflection {refl:.1e}, evenization {evn:.1e} (tol {C9_TOL:e})"),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, o: Outcome| {
        println!("{} criterion {n}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    report(1, criterion1());
    let run = shifted_run();
    report(2, criterion2(&run));
    report(3, criterion3(&run));
    report(4, criterion4());
    report(5, criterion5());
    report(6, criterion6());
    report(7, criterion7());
    report(8, criterion8());
    report(9, criterion9());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

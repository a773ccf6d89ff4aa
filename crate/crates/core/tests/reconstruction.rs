use hemifunk::recon::{
    build_reduced_frames, invert_from_reduced, reconstruct_hemisphere, reconstruct_radial, ReconOptions,
};
use hemifunk::*;

fn max_rel(rec: &hemifunk::recon::ReconstructionResult, body: &StarBody, band: f64) -> f64 {
    rec.grid
        .nodes()
        .iter()
        .filter(|x| x.last().abs() >= band)
        .map(|x| (rec.radial.radial(x).unwrap() / body.radial(x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn opts(l_max: usize) -> ReconOptions {
    ReconOptions { l_max, resolution: 32, fit_resolution: Some(2 * l_max), ..Default::default() }
}

#[test]
fn ellipsoid_round_trip() {
    let body = StarBody::ellipsoid(vec![1.0, 0.8, 0.6]).unwrap();
    let data = simulate_dataset(&body, &fibonacci_frames(3000), 48).unwrap();
    let rec = reconstruct_radial(&data, &opts(24)).unwrap();
    let e = max_rel(&rec, &body, 0.15);
    assert!(e < 0.01, "{e}");
}

#[test]
fn harmonic_perturbed_round_trip() {
    let terms = vec![
        HarmonicTerm { degree: 1, order: 0, coef: 0.08 },
        HarmonicTerm { degree: 2, order: 1, coef: 0.05 },
        HarmonicTerm { degree: 3, order: -2, coef: 0.04 },
    ];
    let body = StarBody::harmonic_perturbed(1.0, terms).unwrap();
    let data = simulate_dataset(&body, &fibonacci_frames(6000), 48).unwrap();
    let rec = reconstruct_radial(&data, &opts(32)).unwrap();
    let e = max_rel(&rec, &body, 0.15);
    assert!(e < 0.03, "{e}");
}

#[test]
fn upper_hemisphere_ignores_lower_data() {
    let body = StarBody::shifted_ball(vec![0.1, 0.1, 0.2], 1.0).unwrap();
    let data = simulate_dataset(&body, &fibonacci_frames(1500), 32).unwrap();
    let tampered = data.map_values(|s, v| if s == Sign::Minus { 3.0 * v + 1.0 } else { v });
    let o = opts(16);
    let a = reconstruct_hemisphere(&data, Sign::Plus, &o).unwrap();
    let b = reconstruct_hemisphere(&tampered, Sign::Plus, &o).unwrap();
    for x in build_grid(2, 16).unwrap().nodes().iter().filter(|x| x.last() > 0.2) {
        assert_eq!(a.eval(x.coords()).unwrap(), b.eval(x.coords()).unwrap());
    }
}

#[test]
fn symmetric_body_gives_matching_hemispheres() {
    let body = StarBody::ellipsoid(vec![1.0, 0.9, 0.7]).unwrap();
    let data = simulate_dataset(&body, &fibonacci_frames(2000), 32).unwrap();
    let o = opts(16);
    let plus = reconstruct_hemisphere(&data, Sign::Plus, &o).unwrap();
    let minus = reconstruct_hemisphere(&data, Sign::Minus, &o).unwrap();
    for x in build_grid(2, 16).unwrap().nodes().iter().filter(|x| x.last() > 0.2) {
        let y: Vec<f64> = x.coords().iter().map(|c| -c).collect();
        let (p, m) = (plus.eval(x.coords()).unwrap(), minus.eval(&y).unwrap());
        assert!((p - m).abs() < 1e-2 * p.abs(), "{p} {m}");
    }
}

#[test]
fn scaled_volumes_scale_rho_squared() {
    let body = StarBody::shifted_ball(vec![0.0, 0.15, 0.1], 1.0).unwrap();
    let data = simulate_dataset(&body, &fibonacci_frames(1500), 32).unwrap();
    let o = opts(16);
    let a = reconstruct_radial(&data, &o).unwrap();
    let b = reconstruct_radial(&data.scaled(4.0), &o).unwrap();
    for x in a.grid.nodes().iter().step_by(37) {
        let (ra, rb) = (a.radial.radial(x).unwrap(), b.radial.radial(x).unwrap());
        assert!((rb - 2.0 * ra).abs() < 1e-9 * rb, "{ra} {rb}");
    }
}

#[test]
fn reduced_inversion_commutes_with_inner_rotations() {
    let v_res = 16;
    let f = |x: &[f64]| 1.0 + 0.2 * x[0] + 0.1 * x[1] * x[3] + 0.15 * x[3];
    let rot = Rotation::plane(4, 0, 1, std::f64::consts::TAU / v_res as f64);
    let back = rot.transpose();
    let g = move |x: &[f64]| f(&back.apply(x));
    let frames = build_reduced_frames(4, 2, v_res, 16).unwrap();
    let o = ReconOptions { l_max: 8, resolution: 16, ..Default::default() };
    let sim = |h: SphericalFunction| simulate_transform(&h, &frames.geometries(), 32).unwrap();
    let a = invert_from_reduced(&sim(SphericalFunction::from_fn(4, f)), &o).unwrap();
    let b = invert_from_reduced(&sim(SphericalFunction::from_fn(4, g)), &o).unwrap();
    for x in build_grid(3, 8).unwrap().nodes() {
        let c = x.coords();
        if c[0].hypot(c[1]) < 0.2 {
            continue;
        }
        let (va, _) = a.eval(c).unwrap();
        let (vb, _) = b.eval(&rot.apply(c)).unwrap();
        assert!((va - vb).abs() < 1e-8, "{va} {vb} at {c:?}");
    }
}

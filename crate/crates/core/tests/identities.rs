use hemifunk::inverse::{analyze_values, MeanValueOptions};
use hemifunk::*;
use proptest::prelude::*;

const QUAD: usize = 48;

fn spectrum(coeffs: Vec<f64>) -> HarmonicSpectrum {
    HarmonicSpectrum::from_coeffs(4, coeffs).unwrap()
}

fn normal() -> impl Strategy<Value = Direction> {
    (-0.99f64..0.99, 0.0f64..std::f64::consts::TAU).prop_map(|(z, a)| {
        let r = (1.0 - z * z).sqrt();
        Direction::normalize(vec![r * a.cos(), r * a.sin(), z]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halves_partition_the_circle(c in prop::collection::vec(-1.0f64..1.0, 25), u in normal()) {
        let f = SphericalFunction::harmonic(spectrum(c));
        let p = hemi_funk(&f, &u, Sign::Plus, QUAD).unwrap();
        let m = hemi_funk(&f, &u, Sign::Minus, QUAD).unwrap();
        prop_assert!((p + m - funk_transform(&f, &u, QUAD).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn reflection_swaps_halves(c in prop::collection::vec(-1.0f64..1.0, 25), u in normal()) {
        let f = SphericalFunction::harmonic(spectrum(c));
        let r = f.reflected();
        for s in [Sign::Plus, Sign::Minus] {
            let a = hemi_funk(&f, &u, s, QUAD).unwrap();
            let b = hemi_funk(&r, &u, s.flip(), QUAD).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn evenized_function_carries_twice_the_half(c in prop::collection::vec(-1.0f64..1.0, 25), u in normal()) {
        let f = SphericalFunction::harmonic(spectrum(c));
        for s in [Sign::Plus, Sign::Minus] {
            let half = hemi_funk(&f, &u, s, QUAD).unwrap();
            let full = funk_transform(&f.evenized(s), &u, QUAD).unwrap();
            prop_assert!((2.0 * half - full).abs() < 1e-6);
        }
    }

    #[test]
    fn odd_functions_have_no_funk_image(c in prop::collection::vec(-1.0f64..1.0, 25), u in normal()) {
        let f = SphericalFunction::harmonic(spectrum(c)).odd_part();
        prop_assert!(funk_transform(&f, &u, QUAD).unwrap().abs() < 1e-10);
    }

    #[test]
    fn dual_transform_is_rotation_invariant(angle in 0.0f64..std::f64::consts::TAU, r in 0.1f64..0.95, th in normal()) {
        let phi = SphericalFunction::harmonic(spectrum((0..25).map(|i| (i as f64 * 0.37).sin()).collect()));
        let rot = Rotation::plane(3, 0, 1, angle);
        let back = rot.transpose();
        let rotated = {
            let phi = phi.clone();
            SphericalFunction::from_fn(3, move |x| phi.eval(&back.apply(x)))
        };
        let rth = Direction::normalize(rot.apply(th.coords())).unwrap();
        let a = shifted_dual_transform(&phi, &th, r, 64, Convention::Probability).unwrap();
        let b = shifted_dual_transform(&rotated, &rth, r, 64, Convention::Probability).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn funk_inverse_undoes_funk_on_even_harmonics() {
    let l = 8;
    let mut s = HarmonicSpectrum::zeros(l);
    for d in (0..=l).step_by(2) {
        for m in -(d as i64)..=(d as i64) {
            s.set(d, m, (0.3 * (d as f64) + 0.7 * m as f64).cos());
        }
    }
    let f = SphericalFunction::harmonic(s.clone());
    let grid = build_grid(2, 64).unwrap();
    let image: Vec<f64> = grid.nodes().iter().map(|u| funk_transform(&f, u, QUAD).unwrap()).collect();
    let phi = SphericalFunction::harmonic(analyze_values(&grid, &image, l).unwrap());
    let inv = funk_inverse_harmonic(&phi, &grid, l).unwrap();
    let err = s
        .coeffs()
        .iter()
        .zip(inv.spectrum.coeffs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
    assert!(inv.odd_energy_fraction < 1e-20);
}

#[test]
fn calibrated_convention_rescales_mean_value_output() {
    let l = 4;
    let mut s = HarmonicSpectrum::zeros(l);
    s.set(0, 0, 1.0);
    s.set(2, 1, 0.4);
    let f = SphericalFunction::harmonic(s);
    let grid = build_grid(2, 16).unwrap();
    let image: Vec<f64> = grid.nodes().iter().map(|u| funk_transform(&f, u, QUAD).unwrap()).collect();
    let phi = SphericalFunction::harmonic(analyze_values(&grid, &image, l).unwrap());
    let opts = MeanValueOptions::default();
    for x in &grid.nodes()[..10] {
        let got = mean_value_inverse(&phi, x, 2, &opts, Convention::Probability).unwrap();
        assert!(got.is_finite());
        let calibrated = mean_value_inverse(&phi, x, 2, &opts, Convention::Calibrated(2.0)).unwrap();
        assert!((calibrated - 2.0 * got).abs() < 1e-9);
    }
}

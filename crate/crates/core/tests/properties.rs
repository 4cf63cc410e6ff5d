use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex;
use proptest::prelude::*;

use sectoral::criterion::schatten_threshold;
use sectoral::discretize::{assemble_p, hermitian_defect, make_grid, read_secm, write_secm};
use sectoral::model::{growth_signature, Family, OperatorSpec};
use sectoral::rational::Rational;
use sectoral::spectra::{decay_fit, eigenvalues, resolvent_singular_values};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oscillator_threshold_is_exact_for_rational_growth(a in 1i64..13, b in 1i64..5) {
        let alpha = a as f64 / b as f64;
        let s = OperatorSpec::<f64>::from_family(Family::oscillator(0.3, alpha)).unwrap();
        let p = schatten_threshold(&growth_signature(&s), 1, s.domain()).unwrap();
        prop_assert_eq!(p, Rational::new(1, 2) + Rational::new(b, a));
    }

    #[test]
    fn spec_json_round_trip_keeps_the_hash(theta in -1.5f64..1.5, alpha in 0.5f64..6.0, c in 0.1f64..3.0) {
        let s = OperatorSpec::<f64>::from_family(Family::Oscillator1d {
            theta,
            alpha,
            c,
            sign_changing: false,
            beta1: Complex::new(0.0, 0.0),
            beta2: Complex::new(0.0, 0.0),
        })
        .unwrap();
        let back = OperatorSpec::<f64>::from_json_str(&s.to_json_string()).unwrap();
        prop_assert_eq!(back.spec_hash(), s.spec_hash());
        let custom = OperatorSpec::<f64>::from_json_str(&s.without_family().to_json_string()).unwrap();
        prop_assert!(custom.family().is_none());
    }

    #[test]
    fn synthetic_power_law_is_recovered(p in 0.6f64..4.0) {
        let v: Vec<f64> = (1..=800).map(|k| 3.0 * (k as f64).powf(-1.0 / p)).collect();
        let fit = decay_fit(&v, Some(&v)).unwrap();
        prop_assert!((fit.p_estimate - p).abs() < 1e-9 * p);
        prop_assert!(fit.grid_converged);
    }
}

#[test]
fn single_precision_tracks_double() {
    let s64 = OperatorSpec::<f64>::from_family(Family::harmonic()).unwrap();
    let s32: OperatorSpec<f32> = s64.cast();
    let e64 = eigenvalues(&assemble_p(&s64, &make_grid(&s64, 8.0, 300).unwrap()).unwrap()).unwrap();
    let e32 = eigenvalues(&assemble_p(&s32, &make_grid(&s32, 8.0, 300).unwrap()).unwrap()).unwrap();
    for k in 0..5 {
        // f32 rounding is amplified by ||M|| ~ 4/h^2
        assert_relative_eq!(
            f64::from(e32.eigenvalues[k].re),
            e64.eigenvalues[k].re,
            max_relative = 1e-3
        );
        assert_relative_eq!(e64.eigenvalues[k].re, (2 * k + 1) as f64, max_relative = 2e-3);
    }
}

#[test]
fn real_potential_gives_hermitian_matrix() {
    for f in [Family::harmonic(), Family::oscillator(0.0, 4.0)] {
        let s = OperatorSpec::<f64>::from_family(f).unwrap();
        let op = assemble_p(&s, &make_grid(&s, 6.0, 120).unwrap()).unwrap();
        assert_eq!(hermitian_defect(&op.matrix), 0.0);
    }
    let s = OperatorSpec::<f64>::from_family(Family::dilated(2, 1)).unwrap();
    let op = assemble_p(&s, &make_grid(&s, 4.0, 10).unwrap()).unwrap();
    assert_eq!(op.dim(), 100);
    assert!(hermitian_defect(&op.matrix) > 0.0);
}

#[test]
fn exported_matrix_reads_back_bit_for_bit() {
    let s = OperatorSpec::<f64>::from_family(Family::complex_cubic()).unwrap();
    let op = assemble_p(&s, &make_grid(&s, 5.0, 40).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.secm");
    write_secm(&op, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_secm(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.matrix, op.matrix);
    assert_eq!(back.kind, op.kind);
}

#[test]
fn rotating_the_potential_rotates_the_top_of_the_field_of_values() {
    // for a Hermitian part with V >= 0 the oscillator range lies in [0, theta]
    for theta in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let s = OperatorSpec::<f64>::from_family(Family::oscillator(theta, 2.0)).unwrap();
        let op = assemble_p(&s, &make_grid(&s, 6.0, 200).unwrap()).unwrap();
        let f = sectoral::spectra::field_of_values_boundary(&op, 96, Complex::new(0.0, 0.0)).unwrap();
        let sector = f.sector.unwrap();
        assert!(sector.theta_min > -1e-6);
        assert!(sector.theta_max < theta + 1e-6, "{} vs {theta}", sector.theta_max);
    }
}

#[test]
fn resolvent_of_the_oscillator_decays_at_the_weyl_rate() {
    let s = OperatorSpec::<f64>::from_family(Family::harmonic()).unwrap();
    let mu = resolvent_singular_values(
        &assemble_p(&s, &make_grid(&s, 20.0, 1200).unwrap()).unwrap(),
        Complex::new(-1.0, 0.0),
    )
    .unwrap();
    let fit = decay_fit(&mu, None).unwrap();
    assert!((fit.p_estimate - 1.0).abs() < 0.05, "{}", fit.p_estimate);
}

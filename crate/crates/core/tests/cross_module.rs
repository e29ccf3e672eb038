//! Checks that tie independent computations together.

use std::f64::consts::TAU;

use approx::assert_relative_eq;
use gapscale_core::asym::{one_arc_toeplitz_asymptotic, transition_asymptotic, TransitionVariant};
use gapscale_core::fredholm::log_gap_probability;
use gapscale_core::toeplitz::{fredholm_limit_gap, log_toeplitz_det_chol, log_toeplitz_det_szego};
use gapscale_core::{ArcSet, IntervalSet};

#[test]
fn toeplitz_determinants_approach_the_fredholm_value() {
    let set = IntervalSet::symmetric_cut(-1.0, 1.0, 0.1).unwrap();
    let gaps: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| fredholm_limit_gap(2.0, &set, n).unwrap())
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-3);
}

#[test]
fn szego_and_cholesky_agree_on_one_arc() {
    let arcs = ArcSet::new(vec![(0.8, TAU - 0.8)]).unwrap();
    let szego = log_toeplitz_det_szego(&arcs, 16).unwrap().log_det();
    let chol = log_toeplitz_det_chol(&arcs, 16).unwrap();
    assert_relative_eq!(szego, chol, max_relative = 1e-10);
}

#[test]
fn one_arc_formula_tracks_the_szego_determinant() {
    let arcs = ArcSet::new(vec![(0.5, TAU - 0.5)]).unwrap();
    let exact = log_toeplitz_det_szego(&arcs, 64).unwrap().log_det();
    let formula = one_arc_toeplitz_asymptotic(64, 0.5, -0.5).unwrap().total;
    assert!((exact - formula).abs() < 1e-3);
}

#[test]
fn transition_formula_is_close_to_the_fredholm_value() {
    let set = IntervalSet::symmetric_cut(-1.0, 1.0, 1e-3).unwrap();
    let exact = log_gap_probability(8.0, &set, None).unwrap();
    let formula = transition_asymptotic(8.0, -1.0, 1.0, 1e-3, TransitionVariant::BoundedK)
        .unwrap()
        .total;
    assert!((exact - formula).abs() < 0.05);
}

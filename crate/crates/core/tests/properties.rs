use std::f64::consts::{PI, TAU};

use catspin_core::analytic::{
    cat_sensitivity, classical_prob, coherent_return_prob, global_phase_phi, interference_prob, linearized_phase,
    wrap_phase,
};
use catspin_core::dynamics::{cat_phase, return_amplitude, sweep_curve, Drift, SweepVariable, SystemState};
use catspin_core::estimate::{differential_phase, fit_sine, phase_vs_tau, sensitivity_report, SensitivityInputs};
use catspin_core::spin::{coherent_amplitudes, Spin};
use catspin_core::{
    CatGeometry, FieldCal, HamiltonianParams, LadderSimulator, LadderState, NoiseModel, RamseyTemplate, Sequence,
    SphereDirection, SpinParams,
};
use proptest::prelude::*;

const J49: SpinParams = SpinParams::from_twice_j(49);
const J: f64 = 24.5;
const RABI: f64 = TAU * 1.6e6;

fn spin() -> &'static Spin {
    static SPIN: std::sync::OnceLock<Spin> = std::sync::OnceLock::new();
    SPIN.get_or_init(|| Spin::new(J49))
}

fn sim() -> &'static LadderSimulator {
    static SIM: std::sync::OnceLock<LadderSimulator> = std::sync::OnceLock::new();
    SIM.get_or_init(LadderSimulator::circular_n50)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_are_unitary(theta in 0.0..PI, phi in -PI..PI) {
        prop_assert!(spin().rotation(theta, phi).unitarity_deviation() < 1e-10);
    }

    #[test]
    fn sequences_conserve_norm(
        phi_rf in -PI..PI,
        tau in 0.0..400e-9,
        detuning in -TAU * 200e3..TAU * 200e3,
        eta in -TAU * 20e3..TAU * 20e3,
    ) {
        let h = HamiltonianParams::new(detuning, eta, FieldCal::n50()).unwrap();
        let seq = Sequence::quantum_ramsey(RABI, 184e-9, tau, phi_rf, 0.3).unwrap();
        let out = sim().run_sequence(&SystemState::circular(J49), &seq, &h);
        prop_assert!((out.norm_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn overlap_has_closed_form(t1 in 0.0..PI, p1 in -PI..PI, t2 in 0.0..PI, p2 in -PI..PI) {
        let (a, b) = (SphereDirection::new(t1, p1), SphereDirection::new(t2, p2));
        let got = spin().coherent_overlap(a, b).norm_sqr();
        let (u, v) = (a.unit_vector(), b.unit_vector());
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let expected = ((1.0 + dot) / 2.0).powi(49);
        prop_assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn coherent_state_amplitudes_match_rotation(theta in 0.0..PI, phi in -PI..PI) {
        let d = SphereDirection::new(theta, phi);
        let rotated = spin().coherent_state(d);
        let closed = coherent_amplitudes(J49, d);
        for (x, y) in rotated.amplitudes().iter().zip(&closed) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn gaussian_is_small_angle_limit(theta in 0.3..(PI - 0.3), u in -1.0..1.0f64) {
        let delta = u * 0.2 / (J.sqrt() * theta.sin());
        let exact = coherent_return_prob(delta, 0.0, theta, J);
        let gauss = classical_prob(delta, 0.0, theta, J);
        prop_assert!((gauss - exact).abs() / exact < 0.02);
    }

    #[test]
    fn global_phase_is_odd(theta in 0.05..(PI - 0.05), delta in -3.0..3.0f64) {
        let plus = global_phase_phi(delta, 0.0, theta, J);
        let minus = global_phase_phi(-delta, 0.0, theta, J);
        prop_assert!((plus + minus).abs() < 1e-9);
    }

    #[test]
    fn global_phase_slope_is_cat_size(theta in 0.05..(PI - 0.05)) {
        let h = 1e-6;
        let slope = (global_phase_phi(h, 0.0, theta, J) - global_phase_phi(-h, 0.0, theta, J)) / (2.0 * h);
        prop_assert!((slope - J * (1.0 - theta.cos())).abs() < 1e-6);
    }

    #[test]
    fn interference_is_a_probability(
        phi_rf in -PI..PI, phi_mw in -PI..PI, phi in -PI..PI, theta in 0.0..PI,
    ) {
        let p = interference_prob(phi_rf, phi_mw, phi, theta, J);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn report_reduces_to_cat_sensitivity(theta in 0.1..PI, tau in 10e-9..2e-6, two_j in 2u32..200) {
        let j = f64::from(two_j) / 2.0;
        let cal = FieldCal::n50();
        let g = CatGeometry::new(j, theta, tau).unwrap();
        let df = 566e-6;
        let report = sensitivity_report(&SensitivityInputs {
            contrast: 1.0,
            dphi_tau: linearized_phase(&g, &cal, df),
            df,
            tau,
            j,
            domega_df: cal.domega_df,
            rep_rate: 3e3,
        }).unwrap();
        let expected = cat_sensitivity(&g, cal.domega_df).unwrap();
        prop_assert!((report.sigma1 - expected).abs() / expected < 1e-12);
        prop_assert!(report.sigma1 >= report.hl * (1.0 - 1e-12));
    }

    #[test]
    fn differential_phase_is_antisymmetric(pa in -PI..PI, pb in -PI..PI, ca in 0.1..1.0f64, cb in 0.1..1.0f64) {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * TAU / 12.0).collect();
        let y = |c: f64, p: f64| xs.iter().map(|x| 0.5 + 0.5 * c * (x - p).cos()).collect::<Vec<_>>();
        let a = fit_sine(&xs, &y(ca, pa), None).unwrap();
        let b = fit_sine(&xs, &y(cb, pb), None).unwrap();
        let ab = differential_phase(&a, &b).unwrap();
        let ba = differential_phase(&b, &a).unwrap();
        prop_assert!(wrap_phase(ab + ba).abs() < 1e-9);
        prop_assert!(wrap_phase(ab - (pa - pb)).abs() < 1e-9);
    }
}

#[test]
fn wrong_normalization_rejected() {
    let amps = vec![num_complex::Complex64::new(0.5, 0.0); 50];
    assert!(LadderState::new(J49, amps).is_err());
}

fn fringe_contrast(noise: &NoiseModel) -> f64 {
    let t = RamseyTemplate::quantum(RABI, 184e-9, 56e-9).with_phi_rf(0.715);
    let grid: Vec<f64> = (0..16).map(|i| i as f64 * TAU / 16.0).collect();
    let h = HamiltonianParams::new(0.0, catspin_core::dynamics::CALIBRATED_ANHARMONICITY, FieldCal::n50()).unwrap();
    let curve = sweep_curve(sim(), &t, SweepVariable::PhiMw, &grid, &h, Some(noise)).unwrap();
    fit_sine(&grid, &curve, None).unwrap().contrast
}

#[test]
fn contrast_decreases_with_inhomogeneity() {
    let contrasts: Vec<f64> = [0.0, 100e-6, 200e-6, 400e-6, 800e-6]
        .iter()
        .map(|&s| fringe_contrast(&NoiseModel::new(0.0, s, Drift::None).unwrap()))
        .collect();
    for w in contrasts.windows(2) {
        assert!(w[1] < w[0], "{contrasts:?}");
    }
}

#[test]
fn cat_phase_is_linear_in_field_step() {
    let t = RamseyTemplate::classical(RABI, 184e-9, 56e-9).with_phi_rf(0.715);
    let h = HamiltonianParams::new(0.0, catspin_core::dynamics::CALIBRATED_ANHARMONICITY, FieldCal::n50()).unwrap();
    // Return-amplitude phase unwrapped along the field axis, -1..1 mV/cm in 50 uV/cm steps.
    let step = 50e-6;
    let n = 20;
    let mut phases = Vec::with_capacity(2 * n + 1);
    let mut previous = None;
    for i in -(n as i32)..=(n as i32) {
        let a = return_amplitude(sim(), &t, &h.offset_field(f64::from(i) * step));
        let next = match previous {
            None => a.arg(),
            Some((p, last)) => last + wrap_phase((a * num_complex::Complex64::conj(&p)).arg()),
        };
        phases.push(next);
        previous = Some((a, next));
    }
    let dphi = |m: usize| phases[n + m] - phases[n - m];
    let slope = dphi(1) / (2.0 * step);
    assert!((cat_phase(sim(), &t, &h, 2.0 * step) - dphi(1)).abs() < 1e-12);
    for m in 1..=n {
        let linear = slope * 2.0 * m as f64 * step;
        assert!(
            (dphi(m) - linear).abs() <= 0.01 * linear.abs(),
            "{m}: {} vs {linear}",
            dphi(m)
        );
    }
}

#[test]
fn finite_pulses_give_a_tau_intercept() {
    let taus = [20e-9, 56e-9, 100e-9, 140e-9];
    let fit_for = |h: HamiltonianParams| {
        let d: Vec<f64> = taus
            .iter()
            .map(|&tau| cat_phase(sim(), &RamseyTemplate::classical(RABI, 184e-9, tau), &h, 566e-6))
            .collect();
        phase_vs_tau(&taus, &d).unwrap()
    };
    let ideal = HamiltonianParams::ideal(FieldCal::n50());
    let finite = fit_for(ideal);
    let instantaneous = fit_for(ideal.with_instantaneous_pulses(true));
    assert!(instantaneous.intercept.abs() < 1e-3, "{}", instantaneous.intercept);
    assert!(finite.intercept > 1.0, "{}", finite.intercept);
    assert!((instantaneous.slope - finite.slope).abs() / instantaneous.slope < 0.05);
}

//! Values frozen from an independent dense-matrix implementation (numpy/scipy
//! `eigh` and `expm`) and hand arithmetic, plus quoted figures of merit.

use std::f64::consts::{PI, TAU};

use catspin_core::analytic::{
    cat_sensitivity, electron_field_at_distance, field_to_frequency, hl_sensitivity, interference_prob,
    linear_stark_slope, sql_sensitivity,
};
use catspin_core::dynamics::{
    cat_phase, find_phi_rf0, optimize_pulse_duration, return_amplitude, PreparedRamsey, SweepVariable,
    CALIBRATED_ANHARMONICITY, CALIBRATION_TARGET_PHI_RF0,
};
use catspin_core::{CatGeometry, FieldCal, HamiltonianParams, LadderSimulator, RamseyTemplate};

const J: f64 = 24.5;
const RABI: f64 = TAU * 1.6e6;
/// Anharmonicity used by the reference, the unrounded calibration result.
const ORACLE_ETA: f64 = TAU * -9923.968274;

fn classical_template() -> RamseyTemplate {
    RamseyTemplate::classical(RABI, 184e-9, 56e-9)
}

#[test]
fn finite_pulse_return_amplitude_matches_dense_reference() {
    let sim = LadderSimulator::circular_n50();
    let cal = FieldCal::n50();
    let t = classical_template().with_phi_rf(0.6);
    let cases = [
        (ORACLE_ETA, 0.710_939_930_380_745_9, -2.902_432_051_123_990_5),
        (0.0, 0.033_558_716_775_530_78, 1.063_611_090_428_323_1),
    ];
    for (eta, prob, arg) in cases {
        let h = HamiltonianParams::new(TAU * 27.4e3, eta, cal).unwrap();
        let a = return_amplitude(&sim, &t, &h);
        assert!((a.norm_sqr() - prob).abs() < 1e-9, "{eta}: {}", a.norm_sqr());
        assert!((a.arg() - arg).abs() < 1e-7, "{eta}: {}", a.arg());
    }
}

#[test]
fn finite_pulse_cat_phase_matches_dense_reference() {
    let sim = LadderSimulator::circular_n50();
    let cal = FieldCal::n50();
    let t = classical_template().with_phi_rf(0.715);
    for (eta, expected) in [(0.0, 2.169_793_188_630_173_6), (ORACLE_ETA, 2.069_300_183_175_970_5)] {
        let h = HamiltonianParams::new(0.0, eta, cal).unwrap();
        let d = cat_phase(&sim, &t, &h, 566e-6);
        assert!((d - expected).abs() < 1e-9, "{eta}: {d}");
    }
}

#[test]
fn instantaneous_quantum_sequence_matches_dense_reference() {
    let sim = LadderSimulator::circular_n50();
    let cal = FieldCal::n50();
    let tau = 100e-9;
    let cases = [
        (0.1, 0.7, 0.05, 1.86, 0.174_089_229_147_200_1),
        (0.0, -2.0, 0.3, 0.92, 0.431_905_202_254_097_3),
        (1.0, 2.5, 1.2, 1.3, 0.594_365_802_557_917_5),
    ];
    for (phi_rf, phi_mw, phi, theta, expected) in cases {
        let h = HamiltonianParams::ideal(cal)
            .with_instantaneous_pulses(true)
            .with_detuning(phi / tau);
        let t = RamseyTemplate::quantum(RABI, theta / RABI, tau).with_phi_rf(phi_rf);
        let p = PreparedRamsey::new(&sim, t, h).probability(SweepVariable::PhiMw, phi_mw);
        assert!((p - expected).abs() < 1e-10, "{p}");
        assert!((interference_prob(phi_rf, phi_mw, phi, theta, J) - expected).abs() < 1e-10);
    }
}

#[test]
fn reference_spin_optimum_matches_dense_reference() {
    let cases = [
        (1, 89.962_403_571_319_24e-9, 0.904_400_723_708_597_4),
        (2, 179.924_807_142_638_48e-9, 1.808_801_447_417_194_7),
    ];
    for (n, duration, theta) in cases {
        let opt = optimize_pulse_duration(RABI, TAU * 11e6, n).unwrap();
        assert!((opt.duration - duration).abs() < 1e-13, "{}", opt.duration);
        assert!((opt.theta - theta).abs() < 1e-6);
        assert!(opt.return_probability > 1.0 - 1e-12);
    }
}

#[test]
fn sensitivity_limits() {
    let slope = FieldCal::n50().domega_df;
    let sql = sql_sensitivity(200e-9, J, slope).unwrap();
    assert!((sql - 1.184_19e-3).abs() < 1e-8, "{sql}");
    let hl = hl_sensitivity(200e-9, J, slope).unwrap();
    assert!((hl - 169.17e-6).abs() < 0.01e-6, "{hl}");
    assert!((hl_sensitivity(100e-9, J, slope).unwrap() - 2.0 * hl).abs() < 1e-15);
    let g = CatGeometry::new(J, 1.86, 200e-9).unwrap();
    let cat = cat_sensitivity(&g, slope).unwrap();
    assert!((cat - 263.3e-6).abs() < 0.1e-6, "{cat}");
    // A pi cat reaches the Heisenberg limit.
    let g = CatGeometry::new(J, PI, 200e-9).unwrap();
    assert!((cat_sensitivity(&g, slope).unwrap() - hl).abs() / hl < 1e-12);
}

#[test]
fn figures_of_merit() {
    let hl = hl_sensitivity(200e-9, J, TAU * 96e6).unwrap();
    assert!((hl - 170e-6).abs() / 170e-6 < 0.02);
    let khz = field_to_frequency(&FieldCal::n50(), 566e-6) / 1e3;
    assert!((khz - 54.8).abs() < 1.2, "{khz}");
    // A single electron at 700 um gives a field of the order of the 1 s sensitivity, 30 uV/cm.
    let e = electron_field_at_distance(700e-6).unwrap();
    assert!((e - 29.39e-6).abs() < 0.01e-6, "{e}");
    assert!((linear_stark_slope(50) / TAU / 1e6 - 95.96).abs() < 0.01);
}

#[test]
fn calibrated_anharmonicity_sets_reference_phase() {
    let sim = LadderSimulator::circular_n50();
    for eta in [ORACLE_ETA, CALIBRATED_ANHARMONICITY] {
        let h = HamiltonianParams::new(0.0, eta, FieldCal::n50()).unwrap();
        let p0 = find_phi_rf0(&sim, &classical_template(), &h).unwrap();
        assert!((p0 - CALIBRATION_TARGET_PHI_RF0).abs() < 1e-4, "{p0}");
    }
}

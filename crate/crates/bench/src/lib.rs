//! Fixtures shared by the benchmarks: the n = 50 ladder at the working point.

use std::f64::consts::TAU;

use catspin_core::dynamics::CALIBRATED_ANHARMONICITY;
use catspin_core::{FieldCal, HamiltonianParams, LadderSimulator, RamseyTemplate};

pub const RABI: f64 = TAU * 1.6e6;
pub const PULSE: f64 = 184e-9;
pub const TAU56: f64 = 56e-9;

pub fn simulator() -> LadderSimulator {
    LadderSimulator::circular_n50()
}

/// Calibrated Hamiltonian at `F0`.
pub fn working_point() -> HamiltonianParams {
    HamiltonianParams::new(0.0, CALIBRATED_ANHARMONICITY, FieldCal::n50()).expect("valid parameters")
}

pub fn quantum_template(phi_rf: f64) -> RamseyTemplate {
    RamseyTemplate::quantum(RABI, PULSE, TAU56).with_phi_rf(phi_rf)
}

/// `n` points over one turn.
pub fn turn(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

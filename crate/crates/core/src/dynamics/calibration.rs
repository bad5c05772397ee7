//! Optimal second-pulse phase and the anharmonicity calibration.

use std::f64::consts::{PI, TAU};

use super::sweep::{PreparedRamsey, RamseyTemplate, Scheme, SweepVariable};
use super::{HamiltonianParams, LadderSimulator};
use crate::analytic::FieldCal;
use crate::error::{Error, Result};
use crate::optimize::{bisect, golden_section_max};

/// Working-point return phase `phi_rf0` the anharmonicity is tuned to (rad).
pub const CALIBRATION_TARGET_PHI_RF0: f64 = 0.715;

/// `eta` (rad/s) for which the finite-pulse sequence (`Omega_rf/2pi = 1.6 MHz`,
/// 184 ns pulses, `tau` = 56 ns) returns best at `phi_rf0 = 0.715` rad.
/// Reproduced by [`calibrate_anharmonicity`].
pub const CALIBRATED_ANHARMONICITY: f64 = TAU * -9.924e3;

const COARSE_STEPS: usize = 720;

/// `phi_rf` maximizing the classical return probability, in `(-pi, pi]`.
pub fn find_phi_rf0(sim: &LadderSimulator, template: &RamseyTemplate, h: &HamiltonianParams) -> Result<f64> {
    let prepared = PreparedRamsey::new(sim, template.with_scheme(Scheme::Classical), *h);
    let f = |x: f64| prepared.probability(SweepVariable::PhiRf, x);
    let step = TAU / COARSE_STEPS as f64;
    let (best, _) = (0..COARSE_STEPS)
        .map(|i| -PI + step * (i as f64 + 1.0))
        .map(|x| (x, f(x)))
        .fold(
            (0.0, f64::NEG_INFINITY),
            |acc, (x, v)| if v > acc.1 { (x, v) } else { acc },
        );
    let peak = golden_section_max(f, best - 2.0 * step, best + 2.0 * step, 1e-10)?;
    Ok(crate::analytic::wrap_phase(peak.x))
}

/// Bisects `eta` in `[lo, hi]` until the working-point `phi_rf0` equals `target`.
pub fn calibrate_anharmonicity(
    sim: &LadderSimulator,
    template: &RamseyTemplate,
    field_cal: FieldCal,
    target: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let residual = |eta: f64| -> f64 {
        let h = HamiltonianParams {
            detuning: 0.0,
            anharmonicity: eta,
            field_cal,
            instantaneous_pulses: false,
        };
        find_phi_rf0(sim, template, &h).map_or(f64::NAN, |p| p - target)
    };
    let r = bisect(residual, lo, hi, 1e-3)?;
    if residual(r).is_nan() {
        return Err(Error::NotBracketed("phi_rf0 search failed inside the bracket".into()));
    }
    Ok(r)
}

//! Closed-form Ramsey and sensitivity formulas, plus field/frequency conversions.
//!
//! Frequencies are angular (rad/s) and fields are in V/cm throughout.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Bohr radius (m).
pub const BOHR_RADIUS: f64 = 5.291_772_105_44e-11;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_818_8e-12;

/// Linear Stark calibration of the `n` manifold around the working point `f0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCal {
    /// Working-point field (V/cm).
    pub f0: f64,
    /// `d omega / dF` (rad/s per V/cm).
    pub domega_df: f64,
    /// Drive angular frequency (rad/s).
    pub omega_rf: f64,
    pub n: u32,
}

impl FieldCal {
    pub fn new(f0: f64, domega_df: f64, omega_rf: f64, n: u32) -> Result<Self> {
        require_positive("F0", f0)?;
        require_positive("dOmega/dF", domega_df)?;
        if !omega_rf.is_finite() {
            return Err(Error::InvalidArgument("omega_rf must be finite".into()));
        }
        Ok(Self {
            f0,
            domega_df,
            omega_rf,
            n,
        })
    }

    /// n = 50 working point: F0 = 5.50527 V/cm, 96 MHz/(V/cm), drive at 530.019 MHz.
    pub fn n50() -> Self {
        Self {
            f0: 5.50527,
            domega_df: TAU * 96e6,
            omega_rf: TAU * 530.019e6,
            n: 50,
        }
    }

    /// Rotating-frame detuning `omega(F) - omega_rf` at field `f`, with the drive resonant at `F0`.
    pub fn detuning(&self, f: f64) -> f64 {
        self.domega_df * (f - self.f0)
    }

    /// Detuning of the settings `F0 +- dF/2`.
    pub fn split_detunings(&self, df: f64) -> (f64, f64) {
        (self.detuning(self.f0 + df / 2.0), self.detuning(self.f0 - df / 2.0))
    }
}

/// First-order Stark slope `2 pi 3 n e a0 / (2 h)`, in rad/s per V/cm.
pub fn linear_stark_slope(n: u32) -> f64 {
    let hz_per_v_per_m = 3.0 * f64::from(n) * ELEMENTARY_CHARGE * BOHR_RADIUS / (2.0 * PLANCK);
    TAU * hz_per_v_per_m * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatGeometry {
    pub j: f64,
    pub theta: f64,
    /// Interrogation time (s).
    pub tau: f64,
}

impl CatGeometry {
    pub fn new(j: f64, theta: f64, tau: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, pi]")));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be non-negative")));
        }
        require_positive("J", j)?;
        Ok(Self { j, theta, tau })
    }

    /// `J (1 - cos theta)`.
    pub fn cat_size(&self) -> f64 {
        self.j * (1.0 - self.theta.cos())
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalPhase {
    pub value: f64,
    /// `|phi - phi_rf| = pi` with `cos theta != 0`: the value is the limit from `Delta -> pi^-`.
    pub branch_point: bool,
}

/// Global phase `J (Delta - 2 atan(cos theta tan(Delta / 2)))`, `Delta = phi - phi_rf` on the principal branch.
pub fn global_phase_phi(phi: f64, phi_rf: f64, theta: f64, j: f64) -> f64 {
    global_phase(phi, phi_rf, theta, j).value
}

pub fn global_phase(phi: f64, phi_rf: f64, theta: f64, j: f64) -> GlobalPhase {
    let delta = wrap_phase(phi - phi_rf);
    let (sh, ch) = (delta / 2.0).sin_cos();
    let ct = theta.cos();
    let branch_point = (delta.abs() - PI).abs() < 1e-12 && ct.abs() > 1e-15;
    // At the branch point cos(Delta/2) is ~0 and atan2 returns the left-hand limit.
    let ch = if branch_point { 0.0 } else { ch };
    let value = j * (delta - 2.0 * (ct * sh).atan2(ch));
    GlobalPhase { value, branch_point }
}

/// Gaussian small-angle return probability `exp(-J sin^2 theta Delta^2 / 2)`.
pub fn classical_prob(phi: f64, phi_rf: f64, theta: f64, j: f64) -> f64 {
    let delta = wrap_phase(phi - phi_rf);
    (-j * theta.sin().powi(2) * delta * delta / 2.0).exp()
}

/// Exact coherent-state return probability `[1 - sin^2 theta sin^2(Delta / 2)]^(2J)`.
pub fn coherent_return_prob(phi: f64, phi_rf: f64, theta: f64, j: f64) -> f64 {
    let s = ((phi - phi_rf) / 2.0).sin();
    (1.0 - theta.sin().powi(2) * s * s).max(0.0).powf(2.0 * j)
}

/// Return amplitude `<theta, phi_rf|theta, phi> = (cos^2(theta/2) + sin^2(theta/2) e^(i Delta))^(2J)`.
///
/// Its modulus squared is [`coherent_return_prob`] and its argument is [`global_phase_phi`] mod 2 pi.
pub fn return_amplitude(phi: f64, phi_rf: f64, theta: f64, two_j: u32) -> Complex64 {
    let (s, c) = (theta / 2.0).sin_cos();
    let base = Complex64::new(c * c, 0.0) + Complex64::from_polar(s * s, phi - phi_rf);
    base.powu(two_j)
}

/// Detection probability `1/4 + P/4 + sqrt(P)/2 cos(Phi - phi_mw)` from its ingredients.
pub fn interference_from(p: f64, global_phase: f64, phi_mw: f64) -> f64 {
    0.25 + 0.25 * p + 0.5 * p.sqrt() * (global_phase - phi_mw).cos()
}

/// Quantum-enabled detection probability with the exact return probability and phase.
pub fn interference_prob(phi_rf: f64, phi_mw: f64, phi: f64, theta: f64, j: f64) -> f64 {
    let p = coherent_return_prob(phi, phi_rf, theta, j);
    interference_from(p, global_phase_phi(phi, phi_rf, theta, j), phi_mw)
}

/// Same, with the Gaussian return probability.
pub fn interference_prob_gaussian(phi_rf: f64, phi_mw: f64, phi: f64, theta: f64, j: f64) -> f64 {
    let p = classical_prob(phi, phi_rf, theta, j);
    interference_from(p, global_phase_phi(phi, phi_rf, theta, j), phi_mw)
}

/// Gaussian width `1 / (sqrt(J) sin theta)` of the classical return curve.
pub fn classical_width(theta: f64, j: f64) -> f64 {
    1.0 / (j.sqrt() * theta.sin())
}

/// First-order phase `J (1 - cos theta) (d omega / dF) dF tau`.
pub fn linearized_phase(g: &CatGeometry, cal: &FieldCal, df: f64) -> f64 {
    g.cat_size() * cal.domega_df * df * g.tau
}

/// `1 / (tau sqrt(2J) d omega / dF)`.
pub fn sql_sensitivity(tau: f64, j: f64, domega_df: f64) -> Result<f64> {
    require_positive("tau", tau)?;
    require_positive("J", j)?;
    require_positive("dOmega/dF", domega_df)?;
    Ok(1.0 / (tau * (2.0 * j).sqrt() * domega_df))
}

/// `1 / (2 J tau d omega / dF)`.
pub fn hl_sensitivity(tau: f64, j: f64, domega_df: f64) -> Result<f64> {
    require_positive("tau", tau)?;
    require_positive("J", j)?;
    require_positive("dOmega/dF", domega_df)?;
    Ok(1.0 / (2.0 * j * tau * domega_df))
}

/// `1 / (tau J (1 - cos theta) d omega / dF)`.
pub fn cat_sensitivity(g: &CatGeometry, domega_df: f64) -> Result<f64> {
    require_positive("tau", g.tau)?;
    require_positive("dOmega/dF", domega_df)?;
    let size = g.cat_size();
    if size <= 0.0 {
        return Err(Error::ZeroCatSize);
    }
    Ok(1.0 / (g.tau * size * domega_df))
}

/// Frequency shift in Hz produced by `df` (V/cm).
pub fn field_to_frequency(cal: &FieldCal, df: f64) -> f64 {
    cal.domega_df * df / TAU
}

/// Field change (V/cm) producing a frequency shift `hz`.
pub fn frequency_to_field(cal: &FieldCal, hz: f64) -> f64 {
    TAU * hz / cal.domega_df
}

/// Coulomb field of one electron at `r` metres, in V/cm.
pub fn electron_field_at_distance(r: f64) -> Result<f64> {
    require_positive("distance", r)?;
    let v_per_m = ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY * r * r);
    Ok(v_per_m / 100.0)
}

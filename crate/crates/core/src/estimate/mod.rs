//! Fits and derived figures of merit: fringes, Gaussian centers, phase slopes,
//! drift correction and single-shot sensitivity.

mod drift;
mod fringe;
mod gaussian;

pub use drift::{drift_corrected_contrast, DriftCorrection, SplitRule};
pub use fringe::{binomial_weights, differential_phase, differential_phase_std, fit_sine, FringeFit, MIN_CONTRAST};
pub use gaussian::{fit_gaussian, GaussianFit};

use crate::analytic::{hl_sensitivity, sql_sensitivity};
use crate::error::{require_positive, Error, Result};

/// Straight-line fit `dPhi = intercept + slope tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSlopeFit {
    /// rad/s.
    pub slope: f64,
    /// `dPhi0` (rad).
    pub intercept: f64,
    pub slope_std: f64,
    pub intercept_std: f64,
    pub residuals: Vec<f64>,
}

impl PhaseSlopeFit {
    /// Interrogation-time part `slope * tau` of the phase.
    pub fn dphi_tau(&self, tau: f64) -> f64 {
        self.slope * tau
    }
}

/// Ordinary least squares of `dphis` against `taus`.
pub fn phase_vs_tau(taus: &[f64], dphis: &[f64]) -> Result<PhaseSlopeFit> {
    if taus.len() != dphis.len() {
        return Err(Error::DimensionMismatch {
            expected: taus.len(),
            found: dphis.len(),
        });
    }
    let n = taus.len() as f64;
    if taus.len() < 2 {
        return Err(Error::InsufficientData("need at least two interrogation times".into()));
    }
    let mt = taus.iter().sum::<f64>() / n;
    let mp = dphis.iter().sum::<f64>() / n;
    let sxx: f64 = taus.iter().map(|t| (t - mt).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all interrogation times are equal".into()));
    }
    let sxy: f64 = taus.iter().zip(dphis).map(|(t, p)| (t - mt) * (p - mp)).sum();
    let slope = sxy / sxx;
    let intercept = mp - slope * mt;
    let residuals: Vec<f64> = taus.iter().zip(dphis).map(|(t, p)| p - intercept - slope * t).collect();
    let (slope_std, intercept_std) = if taus.len() > 2 {
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / n + mt * mt / sxx)).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(PhaseSlopeFit {
        slope,
        intercept,
        slope_std,
        intercept_std,
        residuals,
    })
}

/// Inputs of the single-shot sensitivity `dF / (C dPhi_tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityInputs {
    pub contrast: f64,
    /// Interrogation-time phase `dPhi_tau` (rad).
    pub dphi_tau: f64,
    /// Field step `dF` (V/cm).
    pub df: f64,
    pub tau: f64,
    pub j: f64,
    /// rad/s per V/cm.
    pub domega_df: f64,
    /// Repetition rate (Hz).
    pub rep_rate: f64,
}

impl SensitivityInputs {
    pub fn from_fits(
        fit: &FringeFit,
        slope: &PhaseSlopeFit,
        df: f64,
        tau: f64,
        j: f64,
        domega_df: f64,
        rep_rate: f64,
    ) -> Self {
        Self {
            contrast: fit.contrast,
            dphi_tau: slope.dphi_tau(tau),
            df,
            tau,
            j,
            domega_df,
            rep_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityReport {
    /// Single-shot sensitivity (V/cm).
    pub sigma1: f64,
    pub sql: f64,
    pub hl: f64,
    pub tau: f64,
    /// V/cm/sqrt(Hz).
    pub per_root_hz: f64,
    /// `sigma1 < hl`, which no physical model allows.
    pub below_hl: bool,
}

/// One-sided amplitude spectral density `sigma1 sqrt(2 / rep_rate)` of a single-shot noise `sigma1`.
pub fn per_root_hz(sigma1: f64, rep_rate: f64) -> f64 {
    sigma1 * (2.0 / rep_rate).sqrt()
}

pub fn sensitivity_report(inp: &SensitivityInputs) -> Result<SensitivityReport> {
    if !(inp.contrast > 0.0) {
        return Err(Error::ZeroContrast(inp.contrast));
    }
    if inp.dphi_tau == 0.0 || !inp.dphi_tau.is_finite() {
        return Err(Error::InvalidArgument("dPhi_tau must be non-zero".into()));
    }
    require_positive("repetition rate", inp.rep_rate)?;
    let sigma1 = (inp.df / (inp.contrast * inp.dphi_tau)).abs();
    let sql = sql_sensitivity(inp.tau, inp.j, inp.domega_df)?;
    let hl = hl_sensitivity(inp.tau, inp.j, inp.domega_df)?;
    Ok(SensitivityReport {
        sigma1,
        sql,
        hl,
        tau: inp.tau,
        per_root_hz: per_root_hz(sigma1, inp.rep_rate),
        below_hl: sigma1 < hl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{cat_sensitivity, linearized_phase, CatGeometry, FieldCal};

    #[test]
    fn two_points_give_exact_line() {
        let f = phase_vs_tau(&[1.0, 3.0], &[2.0, 6.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!(f.intercept.abs() < 1e-15);
        assert!(phase_vs_tau(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(phase_vs_tau(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn ideal_inputs_reproduce_cat_sensitivity() {
        let cal = FieldCal::n50();
        let g = CatGeometry::new(24.5, 1.86, 200e-9).unwrap();
        let df = 566e-6;
        let r = sensitivity_report(&SensitivityInputs {
            contrast: 1.0,
            dphi_tau: linearized_phase(&g, &cal, df),
            df,
            tau: g.tau,
            j: g.j,
            domega_df: cal.domega_df,
            rep_rate: 1.0 / 311e-6,
        })
        .unwrap();
        let expected = cat_sensitivity(&g, cal.domega_df).unwrap();
        assert!((r.sigma1 - expected).abs() / expected < 1e-12);
        assert!(!r.below_hl);
    }

    #[test]
    fn spectral_density_conversions() {
        let at_311us = per_root_hz(1.2e-3, 1.0 / 311e-6);
        assert!((at_311us - 29.93e-6).abs() < 0.01e-6, "{at_311us}");
        let fast = per_root_hz(1.2e-3, 1.0 / 3e-6);
        assert!((fast - 2.94e-6).abs() < 0.01e-6, "{fast}");
    }

    #[test]
    fn zero_contrast_rejected() {
        let inp = SensitivityInputs {
            contrast: 0.0,
            dphi_tau: 1.0,
            df: 1e-3,
            tau: 1e-7,
            j: 24.5,
            domega_df: 1.0,
            rep_rate: 1.0,
        };
        assert!(matches!(sensitivity_report(&inp), Err(Error::ZeroContrast(_))));
    }
}

//! Slow fringe-phase drift estimated on one field setting and removed from the other.

use std::collections::BTreeMap;

use super::fringe::{fit_sine, FringeFit};
use crate::dynamics::{FieldSetting, ShotRecord};
use crate::error::{Error, Result};

/// Which records estimate the drift, which are corrected, and the window length in sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRule {
    pub drift_from: FieldSetting,
    pub contrast_from: FieldSetting,
    pub window: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftCorrection {
    pub corrected: FringeFit,
    pub uncorrected: FringeFit,
    /// `(window center sequence index, unwrapped drift phase)`, relative to the run mean.
    pub drift_track: Vec<(f64, f64)>,
}

impl DriftCorrection {
    /// Drift phase at `sequence_index`, linear between window centers and extrapolated past the ends.
    pub fn drift_at(&self, sequence_index: f64) -> f64 {
        interpolate(&self.drift_track, sequence_index)
    }
}

fn interpolate(track: &[(f64, f64)], t: f64) -> f64 {
    match track {
        [] => 0.0,
        [only] => only.1,
        _ => {
            let last = track.len() - 2;
            let i = track.windows(2).position(|w| t <= w[1].0).unwrap_or(last);
            let (a, b) = (track[i], track[i + 1]);
            a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1)
        }
    }
}

/// Fringe fit of a set of shots pooled by grid point.
fn pooled_fit(records: &[&ShotRecord]) -> Result<FringeFit> {
    let mut acc: BTreeMap<usize, (f64, usize, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry(r.point_index).or_insert((r.sweep_value, 0, 0));
        e.1 += 1;
        e.2 += usize::from(r.outcome);
    }
    let xs: Vec<f64> = acc.values().map(|v| v.0).collect();
    let ys: Vec<f64> = acc.values().map(|v| v.2 as f64 / v.1 as f64).collect();
    fit_sine(&xs, &ys, None)
}

/// Contrast of the `contrast_from` shots after subtracting the drift seen by the `drift_from` shots.
///
/// The drift half is cut into windows of `window` consecutive sequences, each
/// fitted for its fringe phase. The phases are unwrapped, referenced to their
/// mean and linearly interpolated (or extrapolated) in sequence index; every contrast-half shot
/// then has its sweep phase shifted by the drift at its own index before one
/// global sine fit.
pub fn drift_corrected_contrast(records: &[ShotRecord], rule: SplitRule) -> Result<DriftCorrection> {
    if rule.drift_from == rule.contrast_from {
        return Err(Error::SplitNotIndependent);
    }
    if rule.window == 0 {
        return Err(Error::InvalidArgument("drift window must be positive".into()));
    }
    let drift_half: Vec<&ShotRecord> = records.iter().filter(|r| r.setting == rule.drift_from).collect();
    let contrast_half: Vec<&ShotRecord> = records.iter().filter(|r| r.setting == rule.contrast_from).collect();
    if drift_half.is_empty() || contrast_half.is_empty() {
        return Err(Error::InsufficientData("both field settings need shots".into()));
    }

    let mut windows: BTreeMap<u64, Vec<&ShotRecord>> = BTreeMap::new();
    for r in &drift_half {
        windows.entry(r.sequence_index / rule.window).or_default().push(r);
    }
    let mut track = Vec::with_capacity(windows.len());
    let mut previous: Option<f64> = None;
    for (w, shots) in &windows {
        let fit = pooled_fit(shots).map_err(|e| {
            Error::InsufficientData(format!("drift window {w} cannot be fitted ({e}); use a longer window"))
        })?;
        let mut phase = fit.phase;
        if let Some(p) = previous {
            phase = p + crate::analytic::wrap_phase(phase - p);
        }
        previous = Some(phase);
        let center = shots.iter().map(|r| r.sequence_index as f64).sum::<f64>() / shots.len() as f64;
        track.push((center, phase));
    }
    let mean = track.iter().map(|t| t.1).sum::<f64>() / track.len() as f64;
    for t in &mut track {
        t.1 -= mean;
    }

    let uncorrected = pooled_fit(&contrast_half)?;
    let xs: Vec<f64> = contrast_half
        .iter()
        .map(|r| r.sweep_value - interpolate(&track, r.sequence_index as f64))
        .collect();
    let ys: Vec<f64> = contrast_half.iter().map(|r| f64::from(u8::from(r.outcome))).collect();
    let corrected = fit_sine(&xs, &ys, None)?;
    Ok(DriftCorrection {
        corrected,
        uncorrected,
        drift_track: track,
    })
}

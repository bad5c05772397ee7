//! Bernoulli shot sampling and interleaved two-field runs.

use rand::Rng;
use rayon::prelude::*;

use super::sweep::{sweep_curve, NoiseModel, RamseyTemplate, SweepVariable};
use super::{HamiltonianParams, LadderSimulator};
use crate::error::{Error, Result};
use crate::seed::point_rng;

/// Which field value a shot was taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSetting {
    Center,
    /// `F0 - dF/2`.
    Minus,
    /// `F0 + dF/2`.
    Plus,
}

impl FieldSetting {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Center => "F0",
            Self::Minus => "F0-dF/2",
            Self::Plus => "F0+dF/2",
        }
    }
}

/// One detection event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    /// Position of the shot in the acquisition order.
    pub sequence_index: u64,
    pub point_index: usize,
    pub sweep_value: f64,
    pub setting: FieldSetting,
    /// Field applied for this shot (V/cm), drift included.
    pub applied_field: f64,
    /// `true` when the atom is found in `|J, J>`.
    pub outcome: bool,
    /// Shots taken per visit of this point.
    pub k: usize,
}

/// Labels attached to shots drawn from a single curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotContext {
    pub setting: FieldSetting,
    pub applied_field: f64,
    /// Global index of the first point; offsets both sequence indices and random streams.
    pub first_point: u64,
}

impl ShotContext {
    pub fn at_field(setting: FieldSetting, applied_field: f64) -> Self {
        Self {
            setting,
            applied_field,
            first_point: 0,
        }
    }
}

/// Draws `k` Bernoulli outcomes per point. Point `i` uses the stream derived from `(seed, first_point + i)`.
pub fn sample_shots(
    probs: &[f64],
    sweep_values: &[f64],
    k: usize,
    seed: u64,
    ctx: &ShotContext,
) -> Result<Vec<ShotRecord>> {
    if probs.len() != sweep_values.len() {
        return Err(Error::DimensionMismatch {
            expected: sweep_values.len(),
            found: probs.len(),
        });
    }
    if let Some(&p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability(p));
    }
    let per_point: Vec<Vec<ShotRecord>> = probs
        .par_iter()
        .zip(sweep_values.par_iter())
        .enumerate()
        .map(|(i, (&p, &x))| {
            let stream = ctx.first_point + i as u64;
            let mut rng = point_rng(seed, stream);
            (0..k)
                .map(|s| ShotRecord {
                    sequence_index: stream * k as u64 + s as u64,
                    point_index: i,
                    sweep_value: x,
                    setting: ctx.setting,
                    applied_field: ctx.applied_field,
                    outcome: rng.random::<f64>() < p,
                    k,
                })
                .collect()
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

/// Alternating `F0 +- dF/2` acquisition, repeated over the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavedRun {
    pub template: RamseyTemplate,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    /// Field step `dF` (V/cm).
    pub df: f64,
    /// Number of passes over the grid.
    pub repetitions: usize,
    /// Shots per field setting and grid point in one pass.
    pub shots_per_visit: usize,
}

/// Simulates an interleaved run.
///
/// Acquisition order is pass, grid point, then `Plus` before `Minus`. The drift
/// field is evaluated at the first sequence of each pass and held for that pass.
pub fn simulate_interleaved_run(
    sim: &LadderSimulator,
    run: &InterleavedRun,
    h: &HamiltonianParams,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Vec<ShotRecord>> {
    if run.grid.is_empty() || run.repetitions == 0 || run.shots_per_visit == 0 {
        return Err(Error::InsufficientData(
            "interleaved run needs a grid, passes and shots".into(),
        ));
    }
    let k = run.shots_per_visit;
    let per_pass = (run.grid.len() * 2 * k) as u64;
    let f0 = h.field_cal.f0;
    let mut cached: Option<[Vec<f64>; 2]> = None;
    let mut records = Vec::with_capacity(run.repetitions * per_pass as usize);
    for rep in 0..run.repetitions {
        let first = rep as u64 * per_pass;
        let drift = noise.drift.offset(first);
        let curves = match (&cached, noise.drift) {
            (Some(c), super::sweep::Drift::None) => c.clone(),
            _ => {
                let mut pair = [Vec::new(), Vec::new()];
                for (slot, sign) in [(0, 1.0), (1, -1.0)] {
                    let hs = h.offset_field(sign * run.df / 2.0 + drift);
                    pair[slot] = sweep_curve(sim, &run.template, run.variable, &run.grid, &hs, Some(noise))?;
                }
                cached = Some(pair.clone());
                pair
            }
        };
        for (i, &x) in run.grid.iter().enumerate() {
            for (slot, setting, sign) in [(0, FieldSetting::Plus, 1.0), (1, FieldSetting::Minus, -1.0)] {
                let visit = (rep * run.grid.len() + i) * 2 + slot;
                let mut rng = point_rng(seed, visit as u64);
                let p = curves[slot][i].clamp(0.0, 1.0);
                let field = f0 + sign * run.df / 2.0 + drift;
                for s in 0..k {
                    records.push(ShotRecord {
                        sequence_index: (visit * k + s) as u64,
                        point_index: i,
                        sweep_value: x,
                        setting,
                        applied_field: field,
                        outcome: rng.random::<f64>() < p,
                        k,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Empirical mean per grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub point_index: usize,
    pub sweep_value: f64,
    pub shots: usize,
    pub mean: f64,
    /// Binomial standard error `sqrt(m (1 - m) / n)`.
    pub stderr: f64,
}

/// Groups the records of one setting by grid point, in ascending sweep value.
pub fn summarize(records: &[ShotRecord], setting: FieldSetting) -> Vec<PointSummary> {
    let mut acc: std::collections::BTreeMap<usize, (f64, usize, usize)> = Default::default();
    for r in records.iter().filter(|r| r.setting == setting) {
        let e = acc.entry(r.point_index).or_insert((r.sweep_value, 0, 0));
        e.1 += 1;
        e.2 += usize::from(r.outcome);
    }
    let mut out: Vec<PointSummary> = acc
        .into_iter()
        .map(|(point_index, (sweep_value, shots, hits))| {
            let mean = hits as f64 / shots as f64;
            PointSummary {
                point_index,
                sweep_value,
                shots,
                mean,
                stderr: (mean * (1.0 - mean) / shots as f64).sqrt(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
    out
}

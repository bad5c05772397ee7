use std::f64::consts::{PI, TAU};

use catspin_core::dynamics::{sample_shots, summarize, sweep_curve, FieldSetting, ShotContext, SweepVariable};
use catspin_core::estimate::{binomial_weights, fit_gaussian, fit_sine};
use catspin_core::{FieldCal, HamiltonianParams, LadderSimulator, RamseyTemplate};

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 * TAU / n as f64).collect()
}

fn fringe(xs: &[f64], c: f64, phase: f64) -> Vec<f64> {
    xs.iter().map(|x| 0.5 + 0.5 * c * (x - phase).cos()).collect()
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

#[test]
fn sine_fit_errors_match_scatter() {
    let xs = grid(16);
    let probs = fringe(&xs, 0.6, 1.1);
    let k = 400;
    let mut phases = Vec::new();
    let mut reported = Vec::new();
    for rep in 0..400u64 {
        let recs = sample_shots(
            &probs,
            &xs,
            k,
            1000 + rep,
            &ShotContext::at_field(FieldSetting::Center, 0.0),
        )
        .unwrap();
        let summary = summarize(&recs, FieldSetting::Center);
        let means: Vec<f64> = summary.iter().map(|s| s.mean).collect();
        let w = binomial_weights(&means, k);
        let fit = fit_sine(&xs, &means, Some(&w)).unwrap();
        phases.push(fit.phase);
        reported.push(fit.phase_std());
    }
    let (m, scatter) = mean_std(&phases);
    let (typical, _) = mean_std(&reported);
    assert!((m - 1.1).abs() < 3.0 * scatter / 20.0, "{m}");
    assert!((scatter / typical - 1.0).abs() < 0.15, "{scatter} vs {typical}");
}

#[test]
fn point_scatter_is_binomial() {
    // At P = 1/2 the single-point standard deviation is 1 / (2 sqrt(k)).
    let k = 3100;
    let n = 400;
    let probs = vec![0.5; n];
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let recs = sample_shots(&probs, &xs, k, 42, &ShotContext::at_field(FieldSetting::Center, 0.0)).unwrap();
    let means: Vec<f64> = summarize(&recs, FieldSetting::Center).iter().map(|s| s.mean).collect();
    let (_, sd) = mean_std(&means);
    let expected = 1.0 / (2.0 * (k as f64).sqrt());
    assert!((sd / expected - 1.0).abs() < 0.05, "{sd} vs {expected}");
}

#[test]
fn gaussian_centers_follow_precession() {
    let sim = LadderSimulator::circular_n50();
    let cal = FieldCal::n50();
    let rabi = TAU * 1.6e6;
    let tau = 56e-9;
    let df = 566e-6;
    let t = RamseyTemplate::classical(rabi, 1.86 / rabi, tau);
    let h = HamiltonianParams::ideal(cal).with_instantaneous_pulses(true);
    let xs: Vec<f64> = (0..161).map(|i| -0.8 + 0.01 * i as f64).collect();
    let centers: Vec<f64> = [0.5, -0.5]
        .iter()
        .map(|s| {
            let curve = sweep_curve(&sim, &t, SweepVariable::PhiRf, &xs, &h.offset_field(s * df), None).unwrap();
            fit_gaussian(&xs, &curve).unwrap().center
        })
        .collect();
    let expected = cal.domega_df * df * tau;
    assert!((centers[0] - centers[1] - expected).abs() < 1e-6, "{centers:?}");
}

#[test]
fn seeded_sampling_is_reproducible() {
    let xs = grid(8);
    let probs = fringe(&xs, 0.5, PI / 3.0);
    let ctx = ShotContext::at_field(FieldSetting::Plus, 5.5);
    let a = sample_shots(&probs, &xs, 50, 9, &ctx).unwrap();
    let b = sample_shots(&probs, &xs, 50, 9, &ctx).unwrap();
    let c = sample_shots(&probs, &xs, 50, 10, &ctx).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

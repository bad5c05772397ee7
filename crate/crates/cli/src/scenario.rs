//! The seven scenarios.

use std::f64::consts::TAU;

use catspin_core::analytic::{cat_sensitivity, hl_sensitivity, sql_sensitivity, wrap_phase};
use catspin_core::dynamics::{
    calibrate_anharmonicity, cat_phase, find_phi_rf0, optimize_pulse_duration, reference_spin_return,
    simulate_interleaved_run, summarize, sweep_curve, Drift, FieldSetting, InterleavedRun, PointSummary, ReferenceSpin,
    CALIBRATION_TARGET_PHI_RF0,
};
use catspin_core::estimate::{
    binomial_weights, differential_phase, differential_phase_std, fit_gaussian, fit_sine, phase_vs_tau,
    sensitivity_report, FringeFit, SensitivityInputs,
};
use catspin_core::husimi::{husimi_q, DEFAULT_Q_TOLERANCE};
use catspin_core::seed::derive_seed;
use catspin_core::{
    CatGeometry, FieldCal, HamiltonianParams, LadderSimulator, NoiseModel, PulseSegment, QGrid, RamseyTemplate,
    Sequence, SpinParams, SweepVariable, SystemState,
};

use crate::config::{AutoOr, ScenarioConfig, ScenarioId};
use crate::output::{Cell, DataTable, PlotHint};

/// Bracket of the `anharmonicity = "auto"` search (rad/s).
const CALIBRATION_BRACKET: (f64, f64) = (TAU * -20e3, TAU * -1e3);
/// Half width of the automatic `phi_rf` window around `phi_rf0` (rad).
const PHI_RF_HALF_WINDOW: f64 = 1.2;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: catspin_core::Error,
    },
}

trait Context<T> {
    fn context(self, what: &str) -> Result<T, ScenarioError>;
}

impl<T> Context<T> for catspin_core::Result<T> {
    fn context(self, what: &str) -> Result<T, ScenarioError> {
        self.map_err(|source| ScenarioError::Core {
            context: what.to_string(),
            source,
        })
    }
}

/// Named scalar results of a run, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl Report {
    fn add(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|e| e.1)
    }

    fn table(&self) -> DataTable {
        let mut t = DataTable::new("report", "fitted quantities", &["quantity", "value"], PlotHint::None);
        for (name, v) in &self.entries {
            t.push(vec![Cell::T(name.clone()), Cell::F(*v)]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub tables: Vec<DataTable>,
    pub report: Report,
}

/// Quantities resolved from the config before a scenario runs.
struct Setup {
    sim: LadderSimulator,
    h0: HamiltonianParams,
    rabi: f64,
    df: f64,
    noise: NoiseModel,
    seed: u64,
}

impl Setup {
    fn new(cfg: &ScenarioConfig, report: &mut Report) -> Result<Self, ScenarioError> {
        let p = &cfg.physics;
        let spin = SpinParams::from_twice_j(p.two_j);
        let sim = LadderSimulator::new(spin);
        let cal = FieldCal {
            f0: p.f0,
            domega_df: TAU * p.stark_slope,
            ..FieldCal::n50()
        };
        let rabi = TAU * p.omega_rf;
        let eta = match p.anharmonicity {
            AutoOr::Value(hz) => TAU * hz,
            AutoOr::Auto => {
                let t = RamseyTemplate::classical(rabi, p.pulse_duration, p.tau);
                let (lo, hi) = CALIBRATION_BRACKET;
                calibrate_anharmonicity(&sim, &t, cal, CALIBRATION_TARGET_PHI_RF0, lo, hi)
                    .context("calibrating the anharmonicity")?
            }
        };
        report.add("anharmonicity_hz", eta / TAU);
        let h0 = HamiltonianParams::new(0.0, eta, cal)
            .context("physics")?
            .with_instantaneous_pulses(p.instantaneous_pulses);
        let n = &cfg.noise;
        let drift = if n.drift_start == 0.0 && n.drift_per_sequence == 0.0 {
            Drift::None
        } else {
            Drift::Linear {
                start: n.drift_start,
                per_sequence: n.drift_per_sequence,
            }
        };
        let noise = NoiseModel::new(n.shot_sigma, n.inhomogeneity_sigma, drift).context("noise")?;
        Ok(Self {
            sim,
            h0,
            rabi,
            df: cfg.field_step(),
            noise,
            seed: cfg.sampling.seed,
        })
    }

    fn j(&self) -> f64 {
        self.sim.params().j()
    }

    fn phi_rf0(&self, cfg: &ScenarioConfig, pulse: f64, tau: f64) -> Result<f64, ScenarioError> {
        match cfg.physics.phi_rf {
            AutoOr::Value(x) => Ok(x),
            AutoOr::Auto => {
                let t = RamseyTemplate::classical(self.rabi, pulse, tau);
                find_phi_rf0(&self.sim, &t, &self.h0).context("locating phi_rf0")
            }
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Grid of angle sweeps; the automatic full-turn grid leaves out the end point.
fn angle_grid(cfg: &ScenarioConfig, auto: (f64, f64), full_turn: bool) -> Vec<f64> {
    let n = cfg.sweep.points;
    match (cfg.sweep.start, cfg.sweep.stop) {
        (AutoOr::Auto, AutoOr::Auto) if full_turn => (0..n)
            .map(|i| auto.0 + (auto.1 - auto.0) * i as f64 / n as f64)
            .collect(),
        (start, stop) => {
            let a = if let AutoOr::Value(a) = start { a } else { auto.0 };
            let b = if let AutoOr::Value(b) = stop { b } else { auto.1 };
            linspace(a, b, n)
        }
    }
}

/// One interleaved acquisition at `F0 +- dF/2`: model curves, shot summaries and fits.
struct Acquisition {
    grid: Vec<f64>,
    model: [Vec<f64>; 2],
    data: [Vec<PointSummary>; 2],
}

const SETTINGS: [(FieldSetting, f64); 2] = [(FieldSetting::Plus, 0.5), (FieldSetting::Minus, -0.5)];

fn tag(setting: FieldSetting) -> &'static str {
    match setting {
        FieldSetting::Plus => "plus",
        FieldSetting::Minus => "minus",
        FieldSetting::Center => "center",
    }
}

fn acquire(
    setup: &Setup,
    cfg: &ScenarioConfig,
    template: RamseyTemplate,
    variable: SweepVariable,
    grid: Vec<f64>,
    stream: u64,
) -> Result<Acquisition, ScenarioError> {
    let mut model = [Vec::new(), Vec::new()];
    for (slot, (_, sign)) in SETTINGS.iter().enumerate() {
        let h = setup.h0.offset_field(sign * setup.df);
        let no_drift = NoiseModel {
            drift: Drift::None,
            ..setup.noise
        };
        model[slot] =
            sweep_curve(&setup.sim, &template, variable, &grid, &h, Some(&no_drift)).context("model curve")?;
    }
    let run = InterleavedRun {
        template,
        variable,
        grid: grid.clone(),
        df: setup.df,
        repetitions: cfg.sampling.repetitions,
        shots_per_visit: cfg.sampling.shots,
    };
    let records = simulate_interleaved_run(
        &setup.sim,
        &run,
        &setup.h0,
        &setup.noise,
        derive_seed(setup.seed, stream),
    )
    .context("shot sampling")?;
    let data = [
        summarize(&records, FieldSetting::Plus),
        summarize(&records, FieldSetting::Minus),
    ];
    Ok(Acquisition { grid, model, data })
}

impl Acquisition {
    fn curve_tables(&self, stem: &str, title: &str, x_name: &str) -> Vec<DataTable> {
        SETTINGS
            .iter()
            .enumerate()
            .map(|(slot, (setting, _))| {
                let sign = if slot == 0 { "+" } else { "-" };
                let mut t = DataTable::new(
                    format!("{stem}{}", tag(*setting)),
                    format!("{title} F0{sign}dF/2"),
                    &[x_name, "probability", "shots", "mean", "stderr"],
                    PlotHint::Paired(stem.trim_end_matches('_').to_string()),
                );
                for (x, (p, s)) in self.grid.iter().zip(self.model[slot].iter().zip(&self.data[slot])) {
                    t.push(vec![
                        Cell::F(*x),
                        Cell::F(*p),
                        Cell::I(s.shots as u64),
                        Cell::F(s.mean),
                        Cell::F(s.stderr),
                    ]);
                }
                t.sort_by_first();
                t
            })
            .collect()
    }

    fn sine_fits(&self, k: usize) -> Result<[FringeFit; 2], ScenarioError> {
        let fit = |slot: usize| -> Result<FringeFit, ScenarioError> {
            let means: Vec<f64> = self.data[slot].iter().map(|s| s.mean).collect();
            let xs: Vec<f64> = self.data[slot].iter().map(|s| s.sweep_value).collect();
            let n = self.data[slot].first().map_or(k, |s| s.shots);
            let w = binomial_weights(&means, n);
            fit_sine(&xs, &means, Some(&w)).context("sine fit")
        };
        Ok([fit(0)?, fit(1)?])
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput, ScenarioError> {
    let mut report = Report::default();
    let setup = Setup::new(cfg, &mut report)?;
    let mut tables = match cfg.scenario {
        ScenarioId::RamseyClassical => ramsey_classical(cfg, &setup, &mut report)?,
        ScenarioId::FringesVsPhiRf => fringes_vs_phirf(cfg, &setup, &mut report)?,
        ScenarioId::FringesVsPhiMw => fringes_vs_phimw(cfg, &setup, &mut report)?,
        ScenarioId::PhaseVsTau => phase_vs_tau_scan(cfg, &setup, &mut report)?,
        ScenarioId::SensitivityVsTau => sensitivity_vs_tau(cfg, &setup, &mut report)?,
        ScenarioId::QfuncSnapshots => qfunc_snapshots(cfg, &setup, &mut report)?,
        ScenarioId::PulseOptimize => pulse_optimize(cfg, &setup, &mut report)?,
    };
    tables.push(report.table());
    Ok(ScenarioOutput { tables, report })
}

fn ramsey_classical(cfg: &ScenarioConfig, setup: &Setup, report: &mut Report) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let phi0 = setup.phi_rf0(cfg, p.pulse_duration, p.tau)?;
    report.add("phi_rf0_rad", phi0);
    let template = RamseyTemplate::classical(setup.rabi, p.pulse_duration, p.tau).with_phi_mw(p.phi_mw);
    let grid = angle_grid(cfg, (phi0 - PHI_RF_HALF_WINDOW, phi0 + PHI_RF_HALF_WINDOW), false);
    let acq = acquire(setup, cfg, template, SweepVariable::PhiRf, grid, 0)?;
    let mut centers = [[0.0; 2]; 2];
    for slot in 0..2 {
        let model = fit_gaussian(&acq.grid, &acq.model[slot]).context("Gaussian fit of the model curve")?;
        let means: Vec<f64> = acq.data[slot].iter().map(|s| s.mean).collect();
        let data = fit_gaussian(&acq.grid, &means).context("Gaussian fit of the shot data")?;
        centers[slot] = [model.center, data.center];
        let tag = tag(SETTINGS[slot].0);
        report.add(format!("center_{tag}_model_rad"), model.center);
        report.add(format!("center_{tag}_data_rad"), data.center);
        report.add(format!("sigma_{tag}_model_rad"), model.width);
        report.add(format!("fwhm_{tag}_model_rad"), model.fwhm());
        report.add(format!("half_width_1e_{tag}_model_rad"), model.half_width_1e());
        report.add(format!("peak_{tag}_model"), model.amplitude + model.offset);
        if !model.converged {
            report
                .warnings
                .push(format!("Gaussian fit of the {tag} model curve did not converge"));
        }
    }
    report.add("dphi_model_rad", centers[0][0] - centers[1][0]);
    report.add("dphi_data_rad", centers[0][1] - centers[1][1]);
    Ok(acq.curve_tables("curve_", "classical Ramsey vs phi_rf", "phi_rf_rad"))
}

fn fringes_vs_phirf(cfg: &ScenarioConfig, setup: &Setup, report: &mut Report) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let phi0 = setup.phi_rf0(cfg, p.pulse_duration, p.tau)?;
    report.add("phi_rf0_rad", phi0);
    report.add("phi_mw_rad", p.phi_mw);
    let template = RamseyTemplate::quantum(setup.rabi, p.pulse_duration, p.tau).with_phi_mw(p.phi_mw);
    let grid = angle_grid(cfg, (phi0 - PHI_RF_HALF_WINDOW, phi0 + PHI_RF_HALF_WINDOW), false);
    let acq = acquire(setup, cfg, template, SweepVariable::PhiRf, grid, 0)?;
    Ok(acq.curve_tables("curve_", "quantum-enabled Ramsey vs phi_rf", "phi_rf_rad"))
}

struct FringePair {
    acq: Acquisition,
    fits: [FringeFit; 2],
    dphi: f64,
    dphi_std: f64,
    dphi_model: f64,
    phi0: f64,
}

fn fringe_pair(
    cfg: &ScenarioConfig,
    setup: &Setup,
    pulse: f64,
    tau: f64,
    stream: u64,
) -> Result<FringePair, ScenarioError> {
    let phi0 = setup.phi_rf0(cfg, pulse, tau)?;
    let template = RamseyTemplate::quantum(setup.rabi, pulse, tau).with_phi_rf(phi0);
    let grid = angle_grid(cfg, (0.0, TAU), true);
    let acq = acquire(setup, cfg, template, SweepVariable::PhiMw, grid, stream)?;
    let fits = acq.sine_fits(cfg.sampling.shots)?;
    let dphi = differential_phase(&fits[0], &fits[1]).context("differential phase")?;
    let dphi_model = cat_phase(&setup.sim, &template, &setup.h0, setup.df);
    Ok(FringePair {
        dphi_std: differential_phase_std(&fits[0], &fits[1]),
        acq,
        fits,
        dphi,
        dphi_model,
        phi0,
    })
}

fn fringes_vs_phimw(cfg: &ScenarioConfig, setup: &Setup, report: &mut Report) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let pair = fringe_pair(cfg, setup, p.pulse_duration, p.tau, 0)?;
    report.add("phi_rf0_rad", pair.phi0);
    for (slot, (setting, _)) in SETTINGS.iter().enumerate() {
        let f = &pair.fits[slot];
        report.add(format!("contrast_{}", tag(*setting)), f.contrast);
        report.add(format!("contrast_std_{}", tag(*setting)), f.contrast_std());
        report.add(format!("phase_{}_rad", tag(*setting)), f.phase);
        report.add(format!("phase_std_{}_rad", tag(*setting)), f.phase_std());
        if f.contrast_clamped {
            report.warnings.push(format!(
                "fitted contrast of the {} fringe was clamped to [0, 1]",
                tag(*setting)
            ));
        }
    }
    report.add("dPhi_rad", pair.dphi);
    report.add("dPhi_std_rad", pair.dphi_std);
    report.add("dPhi_model_rad", pair.dphi_model);
    Ok(pair.acq.curve_tables("fringe_", "fringe vs phi_mw", "phi_mw_rad"))
}

/// Unwraps a sequence of phases so that consecutive values differ by less than pi.
fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for &p in phases {
        let next = match out.last() {
            Some(&last) => last + wrap_phase(p - last),
            None => p,
        };
        out.push(next);
    }
    out
}

struct TauScan {
    taus: Vec<f64>,
    pairs: Vec<FringePair>,
    dphi: Vec<f64>,
    dphi_model: Vec<f64>,
}

fn tau_scan(cfg: &ScenarioConfig, setup: &Setup, pulse: f64, stream_base: u64) -> Result<TauScan, ScenarioError> {
    let mut taus = cfg.physics.taus.clone();
    taus.sort_by(f64::total_cmp);
    let pairs: Vec<FringePair> = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| fringe_pair(cfg, setup, pulse, tau, stream_base + i as u64))
        .collect::<Result<_, _>>()?;
    let dphi = unwrap(&pairs.iter().map(|p| p.dphi).collect::<Vec<_>>());
    let dphi_model = unwrap(&pairs.iter().map(|p| p.dphi_model).collect::<Vec<_>>());
    Ok(TauScan {
        taus,
        pairs,
        dphi,
        dphi_model,
    })
}

fn duration_label(t: f64) -> String {
    format!("t{}ns", (t * 1e9).round())
}

fn phase_vs_tau_scan(
    cfg: &ScenarioConfig,
    setup: &Setup,
    report: &mut Report,
) -> Result<Vec<DataTable>, ScenarioError> {
    let mut tables = Vec::new();
    for (d, &pulse) in cfg.physics.pulse_durations.iter().enumerate() {
        let label = duration_label(pulse);
        let scan = tau_scan(cfg, setup, pulse, (d as u64) << 32)?;
        let fit = phase_vs_tau(&scan.taus, &scan.dphi).context("phase vs tau fit")?;
        let model = phase_vs_tau(&scan.taus, &scan.dphi_model).context("phase vs tau fit")?;
        report.add(format!("theta_{label}_rad"), setup.rabi * pulse);
        report.add(format!("slope_{label}_rad_per_s"), fit.slope);
        report.add(format!("slope_std_{label}_rad_per_s"), fit.slope_std);
        report.add(format!("intercept_{label}_rad"), fit.intercept);
        report.add(format!("intercept_std_{label}_rad"), fit.intercept_std);
        report.add(format!("slope_model_{label}_rad_per_s"), model.slope);
        report.add(format!("intercept_model_{label}_rad"), model.intercept);
        let ideal = CatGeometry::new(setup.j(), setup.rabi * pulse, 1.0).context("cat geometry")?;
        report.add(
            format!("slope_ideal_{label}_rad_per_s"),
            ideal.cat_size() * setup.h0.field_cal.domega_df * setup.df,
        );
        let mut t = DataTable::new(
            label.clone(),
            format!("dPhi vs tau, rf pulses {}", label),
            &[
                "tau_s",
                "dphi_rad",
                "dphi_std_rad",
                "dphi_model_rad",
                "contrast_plus",
                "contrast_minus",
                "phi_rf0_rad",
            ],
            PlotHint::Paired("dphi".into()),
        );
        for (i, pair) in scan.pairs.iter().enumerate() {
            t.push(vec![
                Cell::F(scan.taus[i]),
                Cell::F(scan.dphi[i]),
                Cell::F(pair.dphi_std),
                Cell::F(scan.dphi_model[i]),
                Cell::F(pair.fits[0].contrast),
                Cell::F(pair.fits[1].contrast),
                Cell::F(pair.phi0),
            ]);
        }
        t.sort_by_first();
        tables.push(t);
    }
    Ok(tables)
}

fn sensitivity_vs_tau(
    cfg: &ScenarioConfig,
    setup: &Setup,
    report: &mut Report,
) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let scan = tau_scan(cfg, setup, p.pulse_duration, 0)?;
    let fit = phase_vs_tau(&scan.taus, &scan.dphi).context("phase vs tau fit")?;
    report.add("slope_rad_per_s", fit.slope);
    report.add("intercept_rad", fit.intercept);
    let cal = setup.h0.field_cal;
    let theta = setup.rabi * p.pulse_duration;
    let mut t = DataTable::new(
        "sigma",
        "single-shot sensitivity vs tau",
        &[
            "tau_s",
            "contrast",
            "dphi_tau_rad",
            "sigma1_v_cm",
            "sql_v_cm",
            "hl_v_cm",
            "cat_v_cm",
            "per_root_hz_v_cm",
        ],
        PlotHint::Sensitivity,
    );
    let mut best = (f64::INFINITY, 0.0);
    for (i, pair) in scan.pairs.iter().enumerate() {
        let tau = scan.taus[i];
        let contrast = 0.5 * (pair.fits[0].contrast + pair.fits[1].contrast);
        let inputs = SensitivityInputs::from_fits(
            &pair.fits[0],
            &fit,
            setup.df,
            tau,
            setup.j(),
            cal.domega_df,
            cfg.sampling.rep_rate,
        );
        let r = sensitivity_report(&SensitivityInputs { contrast, ..inputs }).context("sensitivity")?;
        if r.below_hl {
            report.warnings.push(format!(
                "tau = {tau:e} s: sensitivity below the Heisenberg limit, check the fits"
            ));
        }
        let cat = cat_sensitivity(
            &CatGeometry::new(setup.j(), theta, tau).context("cat geometry")?,
            cal.domega_df,
        )
        .context("cat sensitivity")?;
        if r.sigma1 < best.0 {
            best = (r.sigma1, tau);
        }
        t.push(vec![
            Cell::F(tau),
            Cell::F(contrast),
            Cell::F(fit.dphi_tau(tau)),
            Cell::F(r.sigma1),
            Cell::F(sql_sensitivity(tau, setup.j(), cal.domega_df).context("SQL")?),
            Cell::F(hl_sensitivity(tau, setup.j(), cal.domega_df).context("HL")?),
            Cell::F(cat),
            Cell::F(r.per_root_hz),
        ]);
    }
    report.add("best_sigma1_v_cm", best.0);
    report.add("best_tau_s", best.1);
    t.sort_by_first();
    Ok(vec![t])
}

fn qfunc_snapshots(cfg: &ScenarioConfig, setup: &Setup, report: &mut Report) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let phi0 = setup.phi_rf0(cfg, p.pulse_duration, p.tau)?;
    report.add("phi_rf0_rad", phi0);
    let h = setup.h0.offset_field(cfg.qfunc.field_offset);
    let seq = Sequence::classical_ramsey(setup.rabi, p.pulse_duration, p.tau, phi0).context("sequence")?;
    let grid = QGrid::new(cfg.qfunc.n_theta, cfg.qfunc.n_phi).context("Q grid")?;
    let mut state = SystemState::circular(setup.sim.params());
    let mut stages = vec![("1_pole", state.clone())];
    let names = ["2_tilted", "3_precessed", "4_return"];
    for (seg, name) in seq.segments.iter().zip(names) {
        state = setup.sim.evolve_segment(&state, seg, &h);
        stages.push((name, state.clone()));
    }
    debug_assert!(seq.segments.iter().all(|s| !matches!(s, PulseSegment::Mw(_))));
    let mut tables = Vec::new();
    for (name, s) in stages {
        let ladder = s.ladder_state().expect("the rf sequence keeps the ladder populated");
        let map = husimi_q(&ladder, grid, DEFAULT_Q_TOLERANCE);
        let peak = map.argmax();
        report.add(format!("peak_theta_{name}_rad"), peak.theta());
        report.add(format!("peak_phi_{name}_rad"), peak.phi());
        report.add(format!("normalization_{name}"), map.normalization);
        if let Some(w) = &map.warning {
            report.warnings.push(format!("{name}: {w}"));
        }
        let mut t = DataTable::new(
            format!("q{name}"),
            format!("Q function, stage {name}"),
            &["theta_rad", "phi_rad", "q"],
            PlotHint::Map,
        );
        for i in 0..grid.n_theta {
            for j in 0..grid.n_phi {
                t.push(vec![
                    Cell::F(grid.theta(i)),
                    Cell::F(grid.phi(j)),
                    Cell::F(map.value(i, j)),
                ]);
            }
        }
        tables.push(t);
    }
    Ok(tables)
}

fn pulse_optimize(cfg: &ScenarioConfig, setup: &Setup, report: &mut Report) -> Result<Vec<DataTable>, ScenarioError> {
    let p = &cfg.physics;
    let rabi = setup.rabi;
    let detuning = TAU * p.reference_detuning;
    let period = ReferenceSpin::new(rabi, detuning).context("reference spin")?.period();
    let mut optima = DataTable::new(
        "optima",
        "optimal pulse durations",
        &["rotations", "duration_s", "theta_rad", "return_probability"],
        PlotHint::None,
    );
    for &n in &p.rotations {
        let opt = optimize_pulse_duration(rabi, detuning, n).context("pulse optimization")?;
        report.add(format!("duration_n{n}_s"), opt.duration);
        report.add(format!("theta_n{n}_rad"), opt.theta);
        report.add(format!("return_probability_n{n}"), opt.return_probability);
        optima.push(vec![
            Cell::I(u64::from(n)),
            Cell::F(opt.duration),
            Cell::F(opt.theta),
            Cell::F(opt.return_probability),
        ]);
    }
    optima.sort_by_first();
    let n_max = p.rotations.iter().copied().max().unwrap_or(1);
    let stop_auto = (f64::from(n_max) + 0.5) * period;
    let start = if let AutoOr::Value(a) = cfg.sweep.start { a } else { 0.0 };
    let stop = if let AutoOr::Value(b) = cfg.sweep.stop {
        b
    } else {
        stop_auto
    };
    let mut curve = DataTable::new(
        "return",
        "reference ladder return probability",
        &["t_s", "probability"],
        PlotHint::Curve,
    );
    for t in linspace(start, stop, cfg.sweep.points) {
        curve.push(vec![
            Cell::F(t),
            Cell::F(reference_spin_return(rabi, detuning, t).context("reference spin")?),
        ]);
    }
    Ok(vec![curve, optima])
}

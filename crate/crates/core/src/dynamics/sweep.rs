//! Ramsey templates, parameter sweeps and ensemble averaging.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{mw_rotate, HamiltonianParams, LadderSimulator, MwPulse, Sequence, SystemState};
use crate::analytic::wrap_phase;
use crate::error::{Error, Result};
use crate::quadrature::GaussHermite;
use crate::spin::{CMatrix, CVector};

/// Gauss-Hermite order used for field-offset averages.
pub const NOISE_QUADRATURE_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// rf pulses only; detection reads the spin return probability.
    Classical,
    /// rf sequence enclosed by the two mw beam splitters.
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    PhiRf,
    PhiMw,
    Tau,
}

/// Parameters of one Ramsey sequence; any of `phi_rf`, `phi_mw`, `tau` can be swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyTemplate {
    pub scheme: Scheme,
    pub rabi: f64,
    pub pulse_duration: f64,
    pub tau: f64,
    pub phi_rf: f64,
    pub phi_mw: f64,
    pub mw_area: f64,
}

impl RamseyTemplate {
    pub fn classical(rabi: f64, pulse_duration: f64, tau: f64) -> Self {
        Self {
            scheme: Scheme::Classical,
            rabi,
            pulse_duration,
            tau,
            phi_rf: 0.0,
            phi_mw: 0.0,
            mw_area: FRAC_PI_2,
        }
    }

    pub fn quantum(rabi: f64, pulse_duration: f64, tau: f64) -> Self {
        Self {
            scheme: Scheme::Quantum,
            ..Self::classical(rabi, pulse_duration, tau)
        }
    }

    pub fn with_phi_rf(mut self, phi_rf: f64) -> Self {
        self.phi_rf = phi_rf;
        self
    }

    pub fn with_phi_mw(mut self, phi_mw: f64) -> Self {
        self.phi_mw = phi_mw;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_value(mut self, variable: SweepVariable, value: f64) -> Self {
        match variable {
            SweepVariable::PhiRf => self.phi_rf = value,
            SweepVariable::PhiMw => self.phi_mw = value,
            SweepVariable::Tau => self.tau = value,
        }
        self
    }

    /// Nominal rotation angle `Omega_rf t`.
    pub fn theta(&self) -> f64 {
        self.rabi * self.pulse_duration
    }

    pub fn sequence(&self) -> Result<Sequence> {
        let mut seq = Sequence::classical_ramsey(self.rabi, self.pulse_duration, self.tau, self.phi_rf)?;
        if self.scheme == Scheme::Quantum {
            seq.segments.insert(0, super::PulseSegment::mw(0.0, self.mw_area));
            seq.segments
                .push(super::PulseSegment::mw(PI + self.phi_mw, self.mw_area));
        }
        Ok(seq)
    }
}

/// A template with its rf propagator computed once for a given Hamiltonian.
#[derive(Debug, Clone)]
pub struct PreparedRamsey<'a> {
    sim: &'a LadderSimulator,
    template: RamseyTemplate,
    h: HamiltonianParams,
    u0: CMatrix,
}

impl<'a> PreparedRamsey<'a> {
    pub fn new(sim: &'a LadderSimulator, template: RamseyTemplate, h: HamiltonianParams) -> Self {
        let u0 = sim.rf_propagator(&h, template.rabi, template.pulse_duration);
        Self { sim, template, h, u0 }
    }

    /// State just before the closing mw pulse, for the given `phi_rf` and `tau`.
    fn before_readout(&self, phi_rf: f64, tau: f64) -> SystemState {
        let p = self.sim.params();
        let mut start = SystemState::circular(p);
        if self.template.scheme == Scheme::Quantum {
            let (a, r) = mw_rotate(
                &MwPulse {
                    phase: 0.0,
                    area: self.template.mw_area,
                },
                start.top_amp(),
                start.ref_amp,
            );
            start.ladder[p.top()] = a;
            start.ref_amp = r;
        }
        let mut v: CVector = self.sim.apply_rf(&self.u0, 0.0, &start.ladder);
        self.sim.apply_free(&self.h, tau, &mut v);
        start.ladder = self.sim.apply_rf(&self.u0, PI + phi_rf, &v);
        start
    }

    pub fn final_state(&self, phi_rf: f64, phi_mw: f64, tau: f64) -> SystemState {
        let mut s = self.before_readout(phi_rf, tau);
        if self.template.scheme == Scheme::Quantum {
            let p = MwPulse {
                phase: PI + phi_mw,
                area: self.template.mw_area,
            };
            let (a, r) = mw_rotate(&p, s.top_amp(), s.ref_amp);
            let top = self.sim.params().top();
            s.ladder[top] = a;
            s.ref_amp = r;
        }
        s
    }

    pub fn probability(&self, variable: SweepVariable, value: f64) -> f64 {
        let t = self.template.with_value(variable, value);
        super::detection_probability(&self.final_state(t.phi_rf, t.phi_mw, t.tau))
    }

    /// Probabilities over a grid, reusing the pre-readout state for `phi_mw` sweeps.
    pub fn curve(&self, variable: SweepVariable, grid: &[f64]) -> Vec<f64> {
        if variable == SweepVariable::PhiMw {
            let s = self.before_readout(self.template.phi_rf, self.template.tau);
            return grid
                .iter()
                .map(|&phi_mw| {
                    if self.template.scheme == Scheme::Classical {
                        return s.top_amp().norm_sqr();
                    }
                    let p = MwPulse {
                        phase: PI + phi_mw,
                        area: self.template.mw_area,
                    };
                    mw_rotate(&p, s.top_amp(), s.ref_amp).0.norm_sqr()
                })
                .collect();
        }
        grid.iter().map(|&x| self.probability(variable, x)).collect()
    }

    /// `<J, J|psi>` after the rf part of the sequence, without the mw pulses.
    pub fn return_amplitude(&self) -> Complex64 {
        let classical = PreparedRamsey {
            template: self.template.with_scheme(Scheme::Classical),
            ..self.clone()
        };
        classical
            .before_readout(self.template.phi_rf, self.template.tau)
            .top_amp()
    }
}

/// Deterministic field drift as a function of the sequence index (V/cm).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Drift {
    #[default]
    None,
    /// `start + per_sequence * index`.
    Linear { start: f64, per_sequence: f64 },
}

impl Drift {
    pub fn offset(&self, sequence_index: u64) -> f64 {
        match *self {
            Drift::None => 0.0,
            Drift::Linear { start, per_sequence } => start + per_sequence * sequence_index as f64,
        }
    }
}

/// Field noise. Static offsets are Gaussian; both widths add in quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    /// Per-shot static field offset standard deviation (V/cm).
    pub shot_sigma: f64,
    /// Per-atom field spread (V/cm).
    pub inhomogeneity_sigma: f64,
    pub drift: Drift,
}

impl NoiseModel {
    pub fn new(shot_sigma: f64, inhomogeneity_sigma: f64, drift: Drift) -> Result<Self> {
        for (name, v) in [("shot_sigma", shot_sigma), ("inhomogeneity_sigma", inhomogeneity_sigma)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be >= 0 (got {v})")));
            }
        }
        Ok(Self {
            shot_sigma,
            inhomogeneity_sigma,
            drift,
        })
    }

    pub fn total_sigma(&self) -> f64 {
        self.shot_sigma.hypot(self.inhomogeneity_sigma)
    }

    /// Field offsets and probability weights of the ensemble average.
    pub fn field_nodes(&self) -> Vec<(f64, f64)> {
        let sigma = self.total_sigma();
        if sigma == 0.0 {
            return vec![(0.0, 1.0)];
        }
        GaussHermite::new(NOISE_QUADRATURE_POINTS).normal_points(sigma)
    }
}

/// Detection probability at each grid point; with noise, the mean over static field offsets.
pub fn sweep_curve(
    sim: &LadderSimulator,
    template: &RamseyTemplate,
    variable: SweepVariable,
    grid: &[f64],
    h: &HamiltonianParams,
    noise: Option<&NoiseModel>,
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InsufficientData("sweep grid is empty".into()));
    }
    let nodes = noise.map_or_else(|| vec![(0.0, 1.0)], NoiseModel::field_nodes);
    let curves: Vec<(f64, Vec<f64>)> = nodes
        .par_iter()
        .map(|&(df, w)| {
            let prepared = PreparedRamsey::new(sim, *template, h.offset_field(df));
            (w, prepared.curve(variable, grid))
        })
        .collect();
    let mut out = vec![0.0; grid.len()];
    for (w, c) in &curves {
        for (o, p) in out.iter_mut().zip(c) {
            *o += w * p;
        }
    }
    Ok(out)
}

/// Spin return amplitude `<J, J|psi>` at the end of the rf sequence.
pub fn return_amplitude(sim: &LadderSimulator, template: &RamseyTemplate, h: &HamiltonianParams) -> Complex64 {
    PreparedRamsey::new(sim, *template, *h).return_amplitude()
}

/// Phase difference of the return amplitudes at `F0 + dF/2` and `F0 - dF/2`, wrapped to `(-pi, pi]`.
pub fn cat_phase(sim: &LadderSimulator, template: &RamseyTemplate, h: &HamiltonianParams, df: f64) -> f64 {
    let plus = return_amplitude(sim, template, &h.offset_field(df / 2.0));
    let minus = return_amplitude(sim, template, &h.offset_field(-df / 2.0));
    wrap_phase((plus * minus.conj()).arg())
}

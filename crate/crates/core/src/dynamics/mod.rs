//! Piecewise-constant evolution of the ladder plus the reference level `|R>`.
//!
//! Energies are measured from `|J, J>`: with `K = Jz - J` the rotating-frame
//! Hamiltonian is
//! `H = dw K + eta K (K + 1) + (Omega/2)(J+ e^(-i phi) + J- e^(i phi))`,
//! so the `|J, J> <-> |J, J-1>` transition stays at `dw` whatever `eta`, and a
//! free precession of a coherent state carries no global phase. `|R>` is not
//! coupled by the rf drive and has zero energy in its frame.

mod calibration;
mod reference;
mod shots;
mod sweep;

pub use calibration::{calibrate_anharmonicity, find_phi_rf0, CALIBRATED_ANHARMONICITY, CALIBRATION_TARGET_PHI_RF0};
pub use reference::{optimize_pulse_duration, reference_spin_return, PulseOptimum, ReferenceSpin, REFERENCE_TWO_J};
pub use shots::{
    sample_shots, simulate_interleaved_run, summarize, FieldSetting, InterleavedRun, PointSummary, ShotContext,
    ShotRecord,
};
pub use sweep::{
    cat_phase, return_amplitude, sweep_curve, Drift, NoiseModel, PreparedRamsey, RamseyTemplate, Scheme, SweepVariable,
    NOISE_QUADRATURE_POINTS,
};

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::analytic::FieldCal;
use crate::error::{Error, Result};
use crate::spin::{CMatrix, CVector, LadderState, OperatorMatrix, Spin, SpinParams};

const STATE_NORM_TOLERANCE: f64 = 1e-10;

/// Rotating-frame parameters of the ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    /// `dw = omega(F) - omega_rf` (rad/s).
    pub detuning: f64,
    /// Coefficient of `K (K + 1)` (rad/s).
    pub anharmonicity: f64,
    pub field_cal: FieldCal,
    /// Replace finite rf pulses by exact rotations of angle `rabi * duration`.
    pub instantaneous_pulses: bool,
}

impl HamiltonianParams {
    pub fn new(detuning: f64, anharmonicity: f64, field_cal: FieldCal) -> Result<Self> {
        if !detuning.is_finite() || !anharmonicity.is_finite() {
            return Err(Error::InvalidArgument(
                "detuning and anharmonicity must be finite".into(),
            ));
        }
        Ok(Self {
            detuning,
            anharmonicity,
            field_cal,
            instantaneous_pulses: false,
        })
    }

    /// Harmonic ladder at the working point.
    pub fn ideal(field_cal: FieldCal) -> Self {
        Self {
            detuning: 0.0,
            anharmonicity: 0.0,
            field_cal,
            instantaneous_pulses: false,
        }
    }

    pub fn with_instantaneous_pulses(mut self, on: bool) -> Self {
        self.instantaneous_pulses = on;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    /// Detuning set by the applied field `f` (V/cm).
    pub fn at_field(self, f: f64) -> Self {
        let detuning = self.field_cal.detuning(f);
        self.with_detuning(detuning)
    }

    /// Adds a field offset `df` (V/cm) to the current detuning.
    pub fn offset_field(self, df: f64) -> Self {
        let detuning = self.detuning + self.field_cal.domega_df * df;
        self.with_detuning(detuning)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfPulse {
    /// `Omega_rf` (rad/s).
    pub rabi: f64,
    pub phase: f64,
    pub duration: f64,
}

impl RfPulse {
    pub fn theta(&self) -> f64 {
        self.rabi * self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwPulse {
    pub phase: f64,
    pub area: f64,
}

impl MwPulse {
    pub fn half_pi(phase: f64) -> Self {
        Self { phase, area: FRAC_PI_2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSegment {
    Rf(RfPulse),
    Free { duration: f64 },
    Mw(MwPulse),
}

impl PulseSegment {
    pub fn rf(rabi: f64, phase: f64, duration: f64) -> Result<Self> {
        if !(rabi >= 0.0) || !(duration >= 0.0) || !phase.is_finite() || !rabi.is_finite() || !duration.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rf pulse needs rabi >= 0 and duration >= 0 (got {rabi}, {duration})"
            )));
        }
        Ok(Self::Rf(RfPulse { rabi, phase, duration }))
    }

    pub fn free(duration: f64) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "free evolution needs duration >= 0 (got {duration})"
            )));
        }
        Ok(Self::Free { duration })
    }

    pub fn mw(phase: f64, area: f64) -> Self {
        Self::Mw(MwPulse { phase, area })
    }

    /// Wall-clock length (mw pulses are treated as instantaneous).
    pub fn duration(&self) -> f64 {
        match self {
            Self::Rf(p) => p.duration,
            Self::Free { duration } => *duration,
            Self::Mw(_) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sequence {
    pub segments: Vec<PulseSegment>,
}

impl Sequence {
    pub fn new(segments: Vec<PulseSegment>) -> Self {
        Self { segments }
    }

    /// rf pulse at phase 0, wait `tau`, rf pulse at phase `pi + phi_rf`.
    pub fn classical_ramsey(rabi: f64, pulse: f64, tau: f64, phi_rf: f64) -> Result<Self> {
        Ok(Self::new(vec![
            PulseSegment::rf(rabi, 0.0, pulse)?,
            PulseSegment::free(tau)?,
            PulseSegment::rf(rabi, PI + phi_rf, pulse)?,
        ]))
    }

    /// The classical sequence enclosed by two mw `pi/2` pulses at phases 0 and `pi + phi_mw`.
    pub fn quantum_ramsey(rabi: f64, pulse: f64, tau: f64, phi_rf: f64, phi_mw: f64) -> Result<Self> {
        let mut segments = vec![PulseSegment::Mw(MwPulse::half_pi(0.0))];
        segments.extend(Self::classical_ramsey(rabi, pulse, tau, phi_rf)?.segments);
        segments.push(PulseSegment::Mw(MwPulse::half_pi(PI + phi_mw)));
        Ok(Self::new(segments))
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(PulseSegment::duration).sum()
    }
}

/// Ladder amplitudes together with the reference amplitude; jointly normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    spin: SpinParams,
    ladder: CVector,
    ref_amp: Complex64,
}

impl SystemState {
    pub fn new(spin: SpinParams, ladder: Vec<Complex64>, ref_amp: Complex64) -> Result<Self> {
        if ladder.len() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: ladder.len(),
            });
        }
        let state = Self {
            spin,
            ladder: CVector::from_vec(ladder),
            ref_amp,
        };
        let norm = state.norm_squared();
        if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// `|J, J>` with an empty reference level.
    pub fn circular(spin: SpinParams) -> Self {
        Self::from_ladder(&LadderState::top(spin))
    }

    /// Population entirely in `|R>`.
    pub fn reference(spin: SpinParams) -> Self {
        Self {
            spin,
            ladder: CVector::zeros(spin.dim()),
            ref_amp: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_ladder(state: &LadderState) -> Self {
        Self {
            spin: state.spin(),
            ladder: state.vector().clone(),
            ref_amp: Complex64::new(0.0, 0.0),
        }
    }

    pub fn spin(&self) -> SpinParams {
        self.spin
    }

    pub fn ladder(&self) -> &[Complex64] {
        self.ladder.as_slice()
    }

    pub fn ref_amp(&self) -> Complex64 {
        self.ref_amp
    }

    /// Amplitude on `|J, J>`.
    pub fn top_amp(&self) -> Complex64 {
        self.ladder[self.spin.top()]
    }

    pub fn norm_squared(&self) -> f64 {
        self.ladder.norm_squared() + self.ref_amp.norm_sqr()
    }

    /// Ladder part renormalized, if it carries any weight.
    pub fn ladder_state(&self) -> Option<LadderState> {
        LadderState::normalized(self.spin, self.ladder.iter().copied().collect()).ok()
    }
}

/// `|<J, J|psi>|^2`, read after the final mw pulse has mixed in the reference pathway.
pub fn detection_probability(s: &SystemState) -> f64 {
    s.top_amp().norm_sqr()
}

/// Spin operators and rotation cache for one ladder.
#[derive(Debug, Clone)]
pub struct LadderSimulator {
    spin: Spin,
}

impl LadderSimulator {
    pub fn new(params: SpinParams) -> Self {
        Self {
            spin: Spin::new(params),
        }
    }

    /// The `n = 50` ladder, `J = 49/2`.
    pub fn circular_n50() -> Self {
        Self::new(SpinParams::from_twice_j(49))
    }

    pub fn params(&self) -> SpinParams {
        self.spin.params()
    }

    pub fn spin(&self) -> &Spin {
        &self.spin
    }

    /// Diagonal energy of ladder index `i`.
    pub fn level_energy(&self, h: &HamiltonianParams, i: usize) -> f64 {
        let k = self.params().m_of(i) - self.params().j();
        h.detuning * k + h.anharmonicity * k * (k + 1.0)
    }

    pub fn build_hamiltonian(&self, h: &HamiltonianParams, drive: Option<&RfPulse>) -> OperatorMatrix {
        let n = self.params().dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(self.level_energy(h, i), 0.0);
        }
        if let Some(p) = drive {
            let ops = self.spin.ops();
            let half = p.rabi / 2.0;
            m += ops.jplus.entries() * Complex64::from_polar(half, -p.phase);
            m += ops.jminus.entries() * Complex64::from_polar(half, p.phase);
        }
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        OperatorMatrix::hermitian(m).expect("symmetrized Hamiltonian is hermitian")
    }

    /// Propagator of an rf pulse with drive phase 0; other phases follow by [`phase_conjugate`].
    pub fn rf_propagator(&self, h: &HamiltonianParams, rabi: f64, duration: f64) -> CMatrix {
        if h.instantaneous_pulses {
            return self.spin.rotation(rabi * duration, -FRAC_PI_2).into_entries();
        }
        let drive = RfPulse {
            rabi,
            phase: 0.0,
            duration,
        };
        let hm = self.build_hamiltonian(h, Some(&drive));
        crate::spin::HermitianEigen::new(&hm)
            .expect("Hamiltonian is hermitian")
            .propagator(duration)
            .into_entries()
    }

    /// `exp(-i phase Jz) U0 exp(i phase Jz) v`.
    pub fn apply_rf(&self, u0: &CMatrix, phase: f64, v: &CVector) -> CVector {
        let p = self.params();
        let n = p.dim();
        let rotated = CVector::from_iterator(n, (0..n).map(|b| v[b] * Complex64::from_polar(1.0, phase * p.m_of(b))));
        let mut out = u0 * rotated;
        for (a, x) in out.iter_mut().enumerate() {
            *x *= Complex64::from_polar(1.0, -phase * p.m_of(a));
        }
        out
    }

    pub fn apply_free(&self, h: &HamiltonianParams, duration: f64, v: &mut CVector) {
        for (i, x) in v.iter_mut().enumerate() {
            *x *= Complex64::from_polar(1.0, -self.level_energy(h, i) * duration);
        }
    }

    pub fn evolve_segment(&self, s: &SystemState, seg: &PulseSegment, h: &HamiltonianParams) -> SystemState {
        let mut cache = PropagatorCache::default();
        self.evolve_cached(s, seg, h, &mut cache)
    }

    fn evolve_cached(
        &self,
        s: &SystemState,
        seg: &PulseSegment,
        h: &HamiltonianParams,
        cache: &mut PropagatorCache,
    ) -> SystemState {
        let mut out = s.clone();
        match seg {
            PulseSegment::Rf(p) => {
                if p.duration == 0.0 || (p.rabi == 0.0 && h.instantaneous_pulses) {
                    return out;
                }
                let u0 = cache.get(self, h, p.rabi, p.duration);
                out.ladder = self.apply_rf(u0, p.phase, &s.ladder);
            }
            PulseSegment::Free { duration } => self.apply_free(h, *duration, &mut out.ladder),
            PulseSegment::Mw(p) => {
                let top = self.params().top();
                let (a, r) = mw_rotate(p, s.ladder[top], s.ref_amp);
                out.ladder[top] = a;
                out.ref_amp = r;
            }
        }
        out
    }

    /// Left fold of [`Self::evolve_segment`], sharing propagators between identical pulses.
    pub fn run_sequence(&self, initial: &SystemState, seq: &Sequence, h: &HamiltonianParams) -> SystemState {
        let mut cache = PropagatorCache::default();
        seq.segments
            .iter()
            .fold(initial.clone(), |s, seg| self.evolve_cached(&s, seg, h, &mut cache))
    }
}

/// Two-level rotation on `(|J, J>, |R>)`: `[[c, -e^(i phi) s], [e^(-i phi) s, c]]`.
pub fn mw_rotate(p: &MwPulse, top: Complex64, reference: Complex64) -> (Complex64, Complex64) {
    let (s, c) = (p.area / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, p.phase);
    (top * c - e * s * reference, e.conj() * s * top + reference * c)
}

#[derive(Default)]
struct PropagatorCache {
    entries: Vec<((u64, u64), CMatrix)>,
}

impl PropagatorCache {
    fn get(&mut self, sim: &LadderSimulator, h: &HamiltonianParams, rabi: f64, duration: f64) -> &CMatrix {
        let key = (rabi.to_bits(), duration.to_bits());
        if let Some(i) = self.entries.iter().position(|(k, _)| *k == key) {
            return &self.entries[i].1;
        }
        self.entries.push((key, sim.rf_propagator(h, rabi, duration)));
        &self.entries.last().expect("just pushed").1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, wrap_phase};
    use crate::spin::{max_abs, propagator, SphereDirection};
    use std::f64::consts::TAU;

    fn sim() -> LadderSimulator {
        LadderSimulator::circular_n50()
    }

    fn ideal() -> HamiltonianParams {
        HamiltonianParams::ideal(FieldCal::n50()).with_instantaneous_pulses(true)
    }

    #[test]
    fn undriven_harmonic_hamiltonian_is_detuning_times_m() {
        let s = sim();
        let h = ideal().with_detuning(TAU * 54.8e3);
        let hm = s.build_hamiltonian(&h, None);
        for i in 1..50 {
            let step = hm.entries()[(i, i)].re - hm.entries()[(i - 1, i - 1)].re;
            assert!((step - h.detuning).abs() < 1e-12 * 50.0 * h.detuning);
        }
        assert_eq!(hm.entries()[(49, 49)].re, 0.0);
        assert_eq!(hm.entries()[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn resonant_drive_at_phase_zero_is_rabi_jx() {
        let s = sim();
        let omega = TAU * 1.6e6;
        let drive = RfPulse {
            rabi: omega,
            phase: 0.0,
            duration: 1e-7,
        };
        let hm = s.build_hamiltonian(&ideal(), Some(&drive));
        let jx = s.spin().ops().jx.entries() * Complex64::new(omega, 0.0);
        assert!(max_abs(&(hm.entries() - jx)) < 1e-6);
    }

    #[test]
    fn anharmonic_transition_shift() {
        let s = sim();
        let mut h = ideal();
        h.anharmonicity = TAU * 10e3;
        let hm = s.build_hamiltonian(&h, None);
        for i in 0..49 {
            let m = s.params().m_of(i);
            let step = hm.entries()[(i + 1, i + 1)].re - hm.entries()[(i, i)].re;
            let expected = 2.0 * h.anharmonicity * (m - 24.5 + 1.0);
            assert!((step - expected).abs() < 1e-6, "M={m}");
        }
    }

    #[test]
    fn zero_duration_segments_are_identity() {
        let s = sim();
        let st = SystemState::from_ladder(&s.spin().coherent_state(SphereDirection::new(1.0, 0.3)));
        let h = ideal().with_detuning(1e5);
        for seg in [
            PulseSegment::free(0.0).unwrap(),
            PulseSegment::rf(1e7, 0.4, 0.0).unwrap(),
        ] {
            assert_eq!(s.evolve_segment(&st, &seg, &h), st);
        }
        assert_eq!(s.run_sequence(&st, &Sequence::default(), &h), st);
    }

    #[test]
    fn mw_half_pi_splits_evenly() {
        let s = sim();
        let out = s.evolve_segment(
            &SystemState::circular(s.params()),
            &PulseSegment::Mw(MwPulse::half_pi(0.0)),
            &ideal(),
        );
        assert!((out.top_amp() - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((out.ref_amp() - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn free_precession_moves_azimuth() {
        let s = sim();
        let dw = TAU * 54.8e3;
        let tau = 56e-9;
        let start = s.spin().coherent_state(SphereDirection::new(1.86, 0.2));
        let out = s.evolve_segment(
            &SystemState::from_ladder(&start),
            &PulseSegment::free(tau).unwrap(),
            &ideal().with_detuning(dw),
        );
        let expected = s.spin().coherent_state(SphereDirection::new(1.86, 0.2 + dw * tau));
        for (a, b) in out.ladder().iter().zip(expected.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn finite_pulse_matches_direct_exponential() {
        let s = sim();
        let h = HamiltonianParams::new(TAU * 27e3, TAU * -9e3, FieldCal::n50()).unwrap();
        let p = RfPulse {
            rabi: TAU * 1.6e6,
            phase: 2.3,
            duration: 184e-9,
        };
        let direct = propagator(&s.build_hamiltonian(&h, Some(&p)), p.duration).unwrap();
        let start = SystemState::circular(s.params());
        let out = s.evolve_segment(&start, &PulseSegment::Rf(p), &h);
        let expected = direct.entries().column(49).into_owned();
        for (a, b) in out.ladder().iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn instantaneous_classical_ramsey_matches_closed_form() {
        let s = sim();
        let theta = 1.86;
        let rabi = TAU * 1.6e6;
        for (dw, phi_rf) in [(TAU * 27.4e3, 0.0), (TAU * -100e3, 0.5), (TAU * 300e3, -1.2)] {
            let tau = 100e-9;
            let seq = Sequence::classical_ramsey(rabi, theta / rabi, tau, phi_rf).unwrap();
            let out = s.run_sequence(&SystemState::circular(s.params()), &seq, &ideal().with_detuning(dw));
            let phi = dw * tau;
            let p = analytic::coherent_return_prob(phi, phi_rf, theta, 24.5);
            assert!((detection_probability(&out) - p).abs() < 1e-9);
            let phase = wrap_phase(out.top_amp().arg() - analytic::global_phase_phi(phi, phi_rf, theta, 24.5));
            assert!(phase.abs() < 1e-8);
        }
    }

    #[test]
    fn instantaneous_quantum_ramsey_matches_closed_form() {
        let s = sim();
        let theta = 1.86;
        let rabi = TAU * 1.6e6;
        let tau = 56e-9;
        let dw = TAU * 27.4e3;
        for (phi_rf, phi_mw) in [(0.0, 0.0), (0.1, 1.0), (-0.3, 4.0)] {
            let seq = Sequence::quantum_ramsey(rabi, theta / rabi, tau, phi_rf, phi_mw).unwrap();
            let out = s.run_sequence(&SystemState::circular(s.params()), &seq, &ideal().with_detuning(dw));
            let expected = analytic::interference_prob(phi_rf, phi_mw, dw * tau, theta, 24.5);
            assert!((detection_probability(&out) - expected).abs() < 1e-9);
            assert!((out.norm_squared() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn detection_of_pure_states() {
        let p = SpinParams::from_twice_j(49);
        assert_eq!(detection_probability(&SystemState::circular(p)), 1.0);
        assert_eq!(detection_probability(&SystemState::reference(p)), 0.0);
    }

    #[test]
    fn far_from_return_detection_is_one_quarter() {
        let s = sim();
        let seq = Sequence::quantum_ramsey(TAU * 1.6e6, 184e-9, 56e-9, 2.5, 0.3).unwrap();
        let h = HamiltonianParams::ideal(FieldCal::n50());
        let out = s.run_sequence(&SystemState::circular(s.params()), &seq, &h);
        assert!((detection_probability(&out) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn rejects_unnormalized_state() {
        let p = SpinParams::from_twice_j(1);
        let z = Complex64::new(0.0, 0.0);
        assert!(SystemState::new(p, vec![z, z], z).is_err());
    }
}

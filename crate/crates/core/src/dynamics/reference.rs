//! The off-resonant reference ladder and rf pulse-length optimization.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::spin::{angular_momentum_operators, CVector, HermitianEigen, OperatorMatrix, SpinParams};

/// `2J'` of the reference ladder (`J' = 25`).
pub const REFERENCE_TWO_J: u32 = 50;

/// The `J' = 25` ladder driven at `rabi` with detuning `detuning`, starting in `|J', J'>`.
#[derive(Debug, Clone)]
pub struct ReferenceSpin {
    params: SpinParams,
    eigen: HermitianEigen,
    rabi: f64,
    detuning: f64,
}

impl ReferenceSpin {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        if rabi == 0.0 && detuning == 0.0 {
            return Err(Error::InvalidArgument(
                "reference spin needs a drive or a detuning".into(),
            ));
        }
        let params = SpinParams::from_twice_j(REFERENCE_TWO_J);
        let ops = angular_momentum_operators(params);
        let n = params.dim();
        let mut h: DMatrix<Complex64> = ops.jx.entries() * Complex64::new(rabi, 0.0);
        for i in 0..n {
            h[(i, i)] += Complex64::new(detuning * (params.m_of(i) - params.j()), 0.0);
        }
        let eigen = HermitianEigen::new(&OperatorMatrix::hermitian(h)?)?;
        Ok(Self {
            params,
            eigen,
            rabi,
            detuning,
        })
    }

    /// Generalized Rabi frequency `sqrt(Omega^2 + Delta^2)` (rad/s).
    pub fn generalized_rabi(&self) -> f64 {
        self.rabi.hypot(self.detuning)
    }

    pub fn period(&self) -> f64 {
        TAU / self.generalized_rabi()
    }

    /// `|<J', J'|psi(t)>|^2`.
    pub fn return_probability(&self, t: f64) -> f64 {
        let mut top = CVector::zeros(self.params.dim());
        top[self.params.top()] = Complex64::new(1.0, 0.0);
        self.eigen.evolve(&top, t)[self.params.top()].norm_sqr()
    }
}

pub fn reference_spin_return(rabi: f64, detuning: f64, t: f64) -> Result<f64> {
    Ok(ReferenceSpin::new(rabi, detuning)?.return_probability(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOptimum {
    pub duration: f64,
    /// `Omega_rf * duration` on the measurement ladder.
    pub theta: f64,
    pub return_probability: f64,
}

/// Pulse length that returns the reference ladder to `|J', J'>` after `n_rotations` precession turns.
///
/// The search runs over `[(n - 1/2) T, (n + 1/2) T]` with `T` the generalized Rabi period.
pub fn optimize_pulse_duration(rabi: f64, detuning: f64, n_rotations: u32) -> Result<PulseOptimum> {
    if n_rotations == 0 {
        return Err(Error::InvalidArgument("n_rotations must be >= 1".into()));
    }
    let spin = ReferenceSpin::new(rabi, detuning)?;
    let period = spin.period();
    let n = f64::from(n_rotations);
    let lo = (n - 0.5) * period;
    let hi = (n + 0.5) * period;
    let best = golden_section_max(|t| spin.return_probability(t), lo, hi, 1e-6 * period)?;
    Ok(PulseOptimum {
        duration: best.x,
        theta: rabi * best.x,
        return_probability: best.value,
    })
}

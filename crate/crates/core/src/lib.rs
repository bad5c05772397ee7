//! Spin-J Schrödinger-cat electrometry: ladder dynamics, closed-form Ramsey
//! signals, and the fits that turn fringes into field sensitivities.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod estimate;
pub mod husimi;
pub mod optimize;
pub mod quadrature;
pub mod seed;
pub mod spin;

pub use analytic::{CatGeometry, FieldCal};
pub use dynamics::{
    HamiltonianParams, LadderSimulator, MwPulse, NoiseModel, PulseSegment, RamseyTemplate, RfPulse, Scheme, Sequence,
    ShotRecord, SweepVariable, SystemState,
};
pub use error::{Error, Result};
pub use estimate::{FringeFit, GaussianFit, PhaseSlopeFit, SensitivityReport};
pub use husimi::{husimi_q, HusimiMap, QGrid};
pub use spin::{LadderState, OperatorMatrix, SphereDirection, Spin, SpinParams};

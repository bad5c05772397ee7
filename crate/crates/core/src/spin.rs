//! Angular-momentum algebra on a single spin-J ladder.
//!
//! Amplitudes are stored in ascending `M`: index `i` holds `|J, M = i - J>`,
//! so the stretched state `|J, J>` is the last entry. Rotations use the gauge
//! `R(theta, phi) = exp(-i theta (Jy cos phi - Jx sin phi))`, for which the
//! coherent state `|theta, phi> = R(theta, phi)|J, J>` has its Bloch vector
//! along `(sin theta cos phi, sin theta sin phi, cos theta)` and
//! `<J, M|theta, phi> = sqrt(C(2J, J - M)) cos^(J+M)(theta/2) sin^(J-M)(theta/2) e^(i (J - M) phi)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const NORM_TOLERANCE: f64 = 1e-10;
const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Spin quantum number, stored as the integer `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinParams {
    two_j: u32,
}

impl SpinParams {
    pub const fn from_twice_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Parses a spin value such as `24.5`. Fails unless `2J` is a non-negative integer.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Self {
            two_j: twice.round() as u32,
        })
    }

    /// Ladder of the circular Rydberg manifold `n`: `J = (n - 1) / 2`.
    pub fn from_principal_quantum_number(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpin(-0.5));
        }
        Ok(Self::from_twice_j(n - 1))
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Index of `|J, J>`.
    pub fn top(&self) -> usize {
        self.two_j as usize
    }

    /// Magnetic quantum number `M` of ladder index `i`.
    pub fn m_of(&self, index: usize) -> f64 {
        index as f64 - self.j()
    }

    /// Ladder index of `M`, if `M` belongs to the ladder.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let shifted = m + self.j();
        let rounded = shifted.round();
        if (shifted - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > f64::from(self.two_j) {
            return None;
        }
        Some(rounded as usize)
    }
}

/// Normalized pure state of the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    spin: SpinParams,
    amps: CVector,
}

impl LadderState {
    /// Wraps amplitudes that are already normalized to within `1e-10`.
    pub fn new(spin: SpinParams, amplitudes: Vec<Complex64>) -> Result<Self> {
        let amps = CVector::from_vec(amplitudes);
        check_dim(spin, amps.len())?;
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { spin, amps })
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(spin: SpinParams, amplitudes: Vec<Complex64>) -> Result<Self> {
        let amps = CVector::from_vec(amplitudes);
        check_dim(spin, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            spin,
            amps: amps.unscale(norm),
        })
    }

    pub(crate) fn from_vector_unchecked(spin: SpinParams, amps: CVector) -> Self {
        Self { spin, amps }
    }

    /// Basis state `|J, M>`.
    pub fn basis(spin: SpinParams, m: f64) -> Result<Self> {
        let index = spin
            .index_of(m)
            .ok_or_else(|| Error::InvalidArgument(format!("M = {m} is not on the J = {} ladder", spin.j())))?;
        let mut amps = CVector::zeros(spin.dim());
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { spin, amps })
    }

    /// The circular state `|J, J>`.
    pub fn top(spin: SpinParams) -> Self {
        let mut amps = CVector::zeros(spin.dim());
        amps[spin.top()] = Complex64::new(1.0, 0.0);
        Self { spin, amps }
    }

    pub fn spin(&self) -> SpinParams {
        self.spin
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn vector(&self) -> &CVector {
        &self.amps
    }

    pub fn amplitude(&self, m: f64) -> Option<Complex64> {
        self.spin.index_of(m).map(|i| self.amps[i])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &LadderState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> Complex64 {
        self.amps.dotc(&(&op.entries * &self.amps))
    }

    /// Applies an operator; the result is renormalized only if `op` is unitary
    /// to the state tolerance, otherwise an error is returned.
    pub fn evolve(&self, op: &OperatorMatrix) -> Result<Self> {
        check_dim(self.spin, op.dim())?;
        let amps = &op.entries * &self.amps;
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { spin: self.spin, amps })
    }
}

fn check_dim(spin: SpinParams, found: usize) -> Result<()> {
    if found != spin.dim() {
        return Err(Error::DimensionMismatch {
            expected: spin.dim(),
            found,
        });
    }
    Ok(())
}

/// Square complex matrix with an optional hermiticity assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(Self {
            entries,
            hermitian: false,
        })
    }

    /// Checks `max |A - A^dagger| < 1e-12` and records the assertion.
    pub fn hermitian(entries: CMatrix) -> Result<Self> {
        let op = Self::new(entries)?;
        let deviation = op.hermitian_deviation();
        if deviation >= HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self { hermitian: true, ..op })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// `max |U^dagger U - 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.entries.adjoint() * &self.entries - CMatrix::identity(n, n)))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.entries * v
    }

    pub fn mul(&self, rhs: &OperatorMatrix) -> Self {
        Self {
            entries: &self.entries * &rhs.entries,
            hermitian: false,
        }
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Standard angular-momentum matrices (Condon-Shortley phases).
#[derive(Debug, Clone)]
pub struct AngularMomentum {
    pub jx: OperatorMatrix,
    pub jy: OperatorMatrix,
    pub jz: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
}

pub fn angular_momentum_operators(p: SpinParams) -> AngularMomentum {
    let n = p.dim();
    let j = p.j();
    let mut jz = CMatrix::zeros(n, n);
    let mut jplus = CMatrix::zeros(n, n);
    for i in 0..n {
        let m = p.m_of(i);
        jz[(i, i)] = Complex64::new(m, 0.0);
        if i + 1 < n {
            jplus[(i + 1, i)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jminus = jplus.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let jx = (&jplus + &jminus) * half;
    let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);
    AngularMomentum {
        jx: OperatorMatrix {
            entries: jx,
            hermitian: true,
        },
        jy: OperatorMatrix {
            entries: jy,
            hermitian: true,
        },
        jz: OperatorMatrix {
            entries: jz,
            hermitian: true,
        },
        jplus: OperatorMatrix {
            entries: jplus,
            hermitian: false,
        },
        jminus: OperatorMatrix {
            entries: jminus,
            hermitian: false,
        },
    }
}

/// Direction on the generalized Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDirection {
    theta: f64,
    phi: f64,
}

impl SphereDirection {
    /// `theta` is clamped to `[0, pi]`, `phi` reduced to `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        Self {
            theta: theta.clamp(0.0, PI),
            phi: phi.rem_euclid(2.0 * PI),
        }
    }

    pub fn north() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn antipode(&self) -> Self {
        Self::new(PI - self.theta, self.phi + PI)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Hermitian eigendecomposition reused for propagating at many times.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        if !h.is_hermitian() {
            let deviation = h.hermitian_deviation();
            if deviation >= HERMITIAN_TOLERANCE {
                return Err(Error::NotHermitian(deviation));
            }
        }
        Ok(Self::from_matrix(h.entries()))
    }

    fn from_matrix(m: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> OperatorMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            for r in 0..n {
                scaled[(r, k)] *= phase;
            }
        }
        OperatorMatrix {
            entries: scaled * self.vectors.adjoint(),
            hermitian: false,
        }
    }

    /// `exp(-i H t) v` without forming the full propagator.
    pub fn evolve(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }
}

/// `U = exp(-i H t)` by hermitian eigendecomposition.
pub fn propagator(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    Ok(HermitianEigen::new(h)?.propagator(t))
}

/// Spin-J ladder with cached operators and the `Jy` eigenbasis used for rotations.
#[derive(Debug, Clone)]
pub struct Spin {
    params: SpinParams,
    ops: AngularMomentum,
    jy_eigen: HermitianEigen,
}

impl Spin {
    pub fn new(params: SpinParams) -> Self {
        let ops = angular_momentum_operators(params);
        let jy_eigen = HermitianEigen::from_matrix(ops.jy.entries());
        Self { params, ops, jy_eigen }
    }

    pub fn params(&self) -> SpinParams {
        self.params
    }

    pub fn ops(&self) -> &AngularMomentum {
        &self.ops
    }

    /// `R(theta, phi) = Rz(phi) exp(-i theta Jy) Rz(-phi)` with `Rz(a) = exp(-i a Jz)`.
    pub fn rotation(&self, theta: f64, phi: f64) -> OperatorMatrix {
        let mut r = self.jy_eigen.propagator(theta).into_entries();
        let n = self.params.dim();
        for a in 0..n {
            for b in 0..n {
                let dm = self.params.m_of(b) - self.params.m_of(a);
                r[(a, b)] *= Complex64::from_polar(1.0, phi * dm);
            }
        }
        OperatorMatrix {
            entries: r,
            hermitian: false,
        }
    }

    /// `|theta, phi> = R(theta, phi)|J, J>`, built from the rotation matrix.
    pub fn coherent_state(&self, d: SphereDirection) -> LadderState {
        let r = self.rotation(d.theta(), d.phi());
        let column = r.entries().column(self.params.top()).into_owned();
        LadderState::from_vector_unchecked(self.params, column)
    }

    /// `<d1|d2>`; equals 1 when the directions coincide.
    pub fn coherent_overlap(&self, d1: SphereDirection, d2: SphereDirection) -> Complex64 {
        let a = coherent_amplitudes(self.params, d1);
        let b = coherent_amplitudes(self.params, d2);
        a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Closed-form coherent-state amplitudes in ascending `M`.
pub fn coherent_amplitudes(p: SpinParams, d: SphereDirection) -> Vec<Complex64> {
    let magnitudes = coherent_magnitudes(p, d.theta());
    magnitudes
        .iter()
        .enumerate()
        .map(|(i, &mag)| {
            let k = (p.top() - i) as f64;
            Complex64::from_polar(mag, k * d.phi())
        })
        .collect()
}

/// `sqrt(C(2J, k)) cos^(2J - k)(theta/2) sin^k(theta/2)` indexed by ascending `M` (`k = J - M`).
pub(crate) fn coherent_magnitudes(p: SpinParams, theta: f64) -> Vec<f64> {
    let two_j = p.two_j() as usize;
    let (s, c) = (theta / 2.0).sin_cos();
    let (s, c) = (s.abs(), c.abs());
    let ln_binom = ln_binomials(two_j);
    (0..=two_j)
        .map(|i| {
            let k = two_j - i;
            let cos_pow = (two_j - k) as i32;
            let sin_pow = k as i32;
            if (c == 0.0 && cos_pow > 0) || (s == 0.0 && sin_pow > 0) {
                return 0.0;
            }
            let mut ln = 0.5 * ln_binom[k];
            if cos_pow > 0 {
                ln += f64::from(cos_pow) * c.ln();
            }
            if sin_pow > 0 {
                ln += f64::from(sin_pow) * s.ln();
            }
            ln.exp()
        })
        .collect()
}

fn ln_binomials(n: usize) -> Vec<f64> {
    let mut ln_fact = vec![0.0; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    (0..=n).map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k]).collect()
}

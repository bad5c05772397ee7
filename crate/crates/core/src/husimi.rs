//! Husimi Q-function of a ladder state on the sphere.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{coherent_magnitudes, LadderState, SphereDirection};

/// Default normalization tolerance.
pub const DEFAULT_Q_TOLERANCE: f64 = 1e-4;

/// Equiangular `theta x phi` grid with midpoint nodes in `theta`.
///
/// The `theta` weights are Fejer's first rule in `cos theta` (they tend to
/// `sin theta * pi / n_theta`), exact for polynomials in `cos theta` of degree
/// below `n_theta`; the `phi` rule is exact for harmonics below `n_phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QGrid {
    fn default() -> Self {
        Self {
            n_theta: 200,
            n_phi: 400,
        }
    }
}

impl QGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument("Q grid needs at least one node per axis".into()));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn theta(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * PI / self.n_theta as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * 2.0 * PI / self.n_phi as f64
    }

    /// Solid-angle weight of a node in row `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let n = self.n_theta;
        let theta = self.theta(i);
        let series: f64 = (1..=n / 2)
            .map(|k| {
                let k = k as f64;
                (2.0 * k * theta).cos() / (4.0 * k * k - 1.0)
            })
            .sum();
        (2.0 / n as f64) * (1.0 - 2.0 * series) * (2.0 * PI / self.n_phi as f64)
    }

    pub fn direction(&self, i: usize, j: usize) -> SphereDirection {
        SphereDirection::new(self.theta(i), self.phi(j))
    }
}

/// Q-function sampled on a [`QGrid`], stored row-major (`theta` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiMap {
    pub grid: QGrid,
    pub values: Vec<f64>,
    /// Sphere quadrature of Q; 1 for an exact grid.
    pub normalization: f64,
    pub warning: Option<String>,
}

impl HusimiMap {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_phi + j]
    }

    pub fn argmax(&self) -> SphereDirection {
        let (best, _) =
            self.values.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
            );
        self.grid.direction(best / self.grid.n_phi, best % self.grid.n_phi)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Q over the whole grid. A `warning` is attached when the quadrature misses 1 by more than `tolerance`.
pub fn husimi_q(state: &LadderState, grid: QGrid, tolerance: f64) -> HusimiMap {
    let p = state.spin();
    let amps = state.amplitudes();
    let prefactor = p.dim() as f64 / (4.0 * PI);
    let phases: Vec<Complex64> = (0..grid.n_phi)
        .map(|j| Complex64::from_polar(1.0, -grid.phi(j)))
        .collect();
    let mut values = Vec::with_capacity(grid.n_theta * grid.n_phi);
    let mut normalization = 0.0;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); p.dim()];
    for i in 0..grid.n_theta {
        let mags = coherent_magnitudes(p, grid.theta(i));
        // Coefficient of z^k with k = J - M, so index k reads amplitude top - k.
        for (k, c) in coeffs.iter_mut().enumerate() {
            let idx = p.top() - k;
            *c = amps[idx] * mags[idx];
        }
        let w = grid.weight(i);
        for z in &phases {
            let overlap = horner(&coeffs, *z);
            let q = prefactor * overlap.norm_sqr();
            normalization += q * w;
            values.push(q);
        }
    }
    let warning = ((normalization - 1.0).abs() > tolerance).then(|| {
        format!(
            "Q normalization {normalization:.6} deviates from 1 by more than {tolerance:e} on a {}x{} grid",
            grid.n_theta, grid.n_phi
        )
    });
    HusimiMap {
        grid,
        values,
        normalization,
        warning,
    }
}

/// Q at arbitrary directions.
pub fn husimi_at(state: &LadderState, dirs: &[SphereDirection]) -> Vec<f64> {
    let p = state.spin();
    let amps = state.amplitudes();
    let prefactor = p.dim() as f64 / (4.0 * PI);
    dirs.iter()
        .map(|d| {
            let mags = coherent_magnitudes(p, d.theta());
            let coeffs: Vec<Complex64> = (0..p.dim()).map(|k| amps[p.top() - k] * mags[p.top() - k]).collect();
            prefactor * horner(&coeffs, Complex64::from_polar(1.0, -d.phi())).norm_sqr()
        })
        .collect()
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{Spin, SpinParams};

    const J49: SpinParams = SpinParams::from_twice_j(49);

    #[test]
    fn circular_state_peaks_at_north_pole() {
        let map = husimi_q(&LadderState::top(J49), QGrid::default(), DEFAULT_Q_TOLERANCE);
        assert!(map.argmax().theta() < 0.02);
        assert!((map.normalization - 1.0).abs() < 1e-4);
        assert!(map.warning.is_none());
        let total: f64 = (0..200).map(|i| QGrid::default().weight(i) * 400.0).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_peaks_at_its_direction() {
        let d = SphereDirection::new(1.86, 2.0);
        let s = Spin::new(J49).coherent_state(d);
        let map = husimi_q(&s, QGrid::default(), DEFAULT_Q_TOLERANCE);
        let peak = map.argmax();
        assert!((peak.theta() - 1.86).abs() < 0.02);
        assert!((peak.phi() - 2.0).abs() < 0.02);
        assert!((map.normalization - 1.0).abs() < 1e-4);
        let direct = husimi_at(&s, &[d])[0];
        assert!((direct - 50.0 / (4.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn cat_of_poles_has_two_equal_lobes() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 50];
        amps[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        amps[49] = Complex64::new(0.5f64.sqrt(), 0.0);
        let s = LadderState::new(J49, amps).unwrap();
        let q = husimi_at(&s, &[SphereDirection::north(), SphereDirection::new(PI, 0.0)]);
        assert!((q[0] - q[1]).abs() < 1e-12);
        assert!((q[0] - 25.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_flags_warning() {
        let s = Spin::new(J49).coherent_state(SphereDirection::new(1.0, 0.5));
        let map = husimi_q(&s, QGrid::new(4, 4).unwrap(), DEFAULT_Q_TOLERANCE);
        assert!(map.warning.is_some());
    }
}

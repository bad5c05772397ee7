//! Linear least-squares sine fits.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::analytic::wrap_phase;
use crate::error::{Error, Result};

/// Contrast below which a fringe phase is treated as undefined.
pub const MIN_CONTRAST: f64 = 1e-6;

/// Fit of `y = offset + (C/2) cos(x - phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    /// Contrast clamped to `[0, 1]`.
    pub contrast: f64,
    pub raw_contrast: f64,
    pub contrast_clamped: bool,
    pub phase: f64,
    pub offset: f64,
    /// Covariance of `(offset, contrast, phase)`.
    pub covariance: [[f64; 3]; 3],
    pub residual_norm: f64,
    pub points: usize,
}

impl FringeFit {
    pub fn offset_std(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }

    pub fn contrast_std(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn phase_std(&self) -> f64 {
        self.covariance[2][2].sqrt()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.offset + 0.5 * self.raw_contrast * (x - self.phase).cos()
    }
}

/// Inverse binomial variances `k / (p (1 - p))` with `p` clamped to `[1/k, 1 - 1/k]`.
pub fn binomial_weights(means: &[f64], k: usize) -> Vec<f64> {
    let kf = k as f64;
    let lo = 1.0 / kf;
    means
        .iter()
        .map(|&p| {
            let p = p.clamp(lo, 1.0 - lo);
            kf / (p * (1.0 - p))
        })
        .collect()
}

/// Fits `a + p cos x + q sin x`; `phase = atan2(q, p)` and `C = 2 sqrt(p^2 + q^2)`.
///
/// With `weights` (inverse variances) the covariance is absolute; without, it is
/// scaled by the residual variance.
pub fn fit_sine(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<FringeFit> {
    if xs.len() != ys.len() || weights.is_some_and(|w| w.len() != xs.len()) {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "sine fit needs at least 4 points, got {}",
            xs.len()
        )));
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if hi - lo == 0.0 {
        return Err(Error::DegenerateFit("all phases are equal".into()));
    }
    if hi - lo <= PI {
        return Err(Error::InsufficientData(format!(
            "phases span {:.3} rad, need more than pi",
            hi - lo
        )));
    }
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        let row = Vector3::new(1.0, x.cos(), x.sin());
        normal += row * row.transpose() * w;
        rhs += row * (w * y);
    }
    let inv = normal
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::DegenerateFit("singular normal equations".into()))?;
    let beta = inv * rhs;
    let (a, p, q) = (beta[0], beta[1], beta[2]);
    let mut rss = 0.0;
    let mut wrss = 0.0;
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let r = y - (a + p * x.cos() + q * x.sin());
        rss += r * r;
        wrss += weights.map_or(1.0, |w| w[i]) * r * r;
    }
    let n = xs.len();
    let param_cov = match weights {
        Some(_) => inv,
        None if n > 3 => inv * (wrss / (n - 3) as f64),
        None => inv * 0.0,
    };
    let r = p.hypot(q);
    let raw_contrast = 2.0 * r;
    let phase = q.atan2(p);
    // Jacobian of (offset, contrast, phase) with respect to (a, p, q).
    let jac = if r > 0.0 {
        Matrix3::new(
            1.0,
            0.0,
            0.0,
            0.0,
            2.0 * p / r,
            2.0 * q / r,
            0.0,
            -q / (r * r),
            p / (r * r),
        )
    } else {
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    };
    let cov = jac * param_cov * jac.transpose();
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = cov[(i, j)];
        }
    }
    let contrast = raw_contrast.clamp(0.0, 1.0);
    Ok(FringeFit {
        contrast,
        raw_contrast,
        contrast_clamped: contrast != raw_contrast,
        phase,
        offset: a,
        covariance,
        residual_norm: rss.sqrt(),
        points: n,
    })
}

/// Phase of `a` relative to `b`, wrapped to `(-pi, pi]`.
pub fn differential_phase(a: &FringeFit, b: &FringeFit) -> Result<f64> {
    for f in [a, b] {
        if f.raw_contrast < MIN_CONTRAST {
            return Err(Error::ZeroContrast(f.raw_contrast));
        }
    }
    Ok(wrap_phase(a.phase - b.phase))
}

/// Standard error of [`differential_phase`] for independent fits.
pub fn differential_phase_std(a: &FringeFit, b: &FringeFit) -> f64 {
    a.phase_std().hypot(b.phase_std())
}

//! Gaussian peak fits for the classical Ramsey curves.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-9;

/// Fit of `y = offset + amplitude exp(-(x - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub center: f64,
    /// Standard deviation `sigma` (rad).
    pub width: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl GaussianFit {
    /// Full width at half maximum, `2 sqrt(2 ln 2) sigma`.
    pub fn fwhm(&self) -> f64 {
        2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * self.width
    }

    /// Half width at which the peak falls to `1/e` of its height, `sqrt(2) sigma`.
    pub fn half_width_1e(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.width
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        gaussian(x, self.center, self.width, self.amplitude, self.offset)
    }
}

fn gaussian(x: f64, c: f64, s: f64, a: f64, b: f64) -> f64 {
    b + a * (-(x - c).powi(2) / (2.0 * s * s)).exp()
}

fn rss(xs: &[f64], ys: &[f64], p: &Vector4<f64>) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (y - gaussian(x, p[0], p[1], p[2], p[3])).powi(2))
        .sum()
}

/// Best `(amplitude, offset)` for fixed center and width, with its residual.
fn linear_part(xs: &[f64], ys: &[f64], c: f64, s: f64) -> Option<(f64, f64, f64)> {
    let mut m = Matrix2::<f64>::zeros();
    let mut r = Vector2::<f64>::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let g = (-(x - c).powi(2) / (2.0 * s * s)).exp();
        let row = Vector2::new(g, 1.0);
        m += row * row.transpose();
        r += row * y;
    }
    let sol = m.try_inverse()? * r;
    let p = Vector4::new(c, s, sol[0], sol[1]);
    Some((sol[0], sol[1], rss(xs, ys, &p)))
}

/// Coarse grid over center and width followed by damped Gauss-Newton refinement.
///
/// Iteration stops once the relative step falls below `1e-9`; after 200 iterations
/// the best estimate so far is returned with `converged = false`.
pub fn fit_gaussian(xs: &[f64], ys: &[f64]) -> Result<GaussianFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "Gaussian fit needs at least 5 points, got {}",
            xs.len()
        )));
    }
    let (ymin, ymax) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &y| (l.min(y), h.max(y)));
    if !(ymax - ymin > 1e-12 * ymax.abs().max(1.0)) {
        return Err(Error::NoPeak);
    }
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let span = xmax - xmin;
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(span, f64::min);

    let mut best: Option<Vector4<f64>> = None;
    let mut best_rss = f64::INFINITY;
    let n_centers = 101;
    let n_widths = 40;
    for i in 0..n_centers {
        let c = xmin + span * i as f64 / (n_centers - 1) as f64;
        for k in 0..n_widths {
            let s = min_gap * (span / min_gap).powf(k as f64 / (n_widths - 1) as f64);
            if let Some((a, b, r)) = linear_part(xs, ys, c, s) {
                if a > 0.0 && r < best_rss {
                    best_rss = r;
                    best = Some(Vector4::new(c, s, a, b));
                }
            }
        }
    }
    let mut p = best.ok_or(Error::NoPeak)?;
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (&x, &y) in xs.iter().zip(ys) {
            let (c, s, a, b) = (p[0], p[1], p[2], p[3]);
            let u = (x - c) / s;
            let g = (-0.5 * u * u).exp();
            let row = Vector4::new(a * g * u / s, a * g * u * u / s, g, 1.0);
            let r = y - (b + a * g);
            jtj += row * row.transpose();
            jtr += row * r;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut damped = jtj;
            for d in 0..4 {
                damped[(d, d)] *= 1.0 + lambda;
            }
            let Some(step) = damped.try_inverse().map(|m| m * jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_rss = if trial[1] > 0.0 {
                rss(xs, ys, &trial)
            } else {
                f64::INFINITY
            };
            if trial_rss <= best_rss {
                let rel = step.norm() / p.norm().max(1e-300);
                p = trial;
                best_rss = trial_rss;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel < STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // No downhill step at any damping: the current point is a minimum to working precision.
            converged = true;
            break;
        }
    }
    Ok(GaussianFit {
        center: p[0],
        width: p[1].abs(),
        amplitude: p[2],
        offset: p[3],
        residual_norm: best_rss.sqrt(),
        iterations,
        converged,
    })
}

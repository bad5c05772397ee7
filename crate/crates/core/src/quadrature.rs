//! Gauss-Hermite quadrature for averaging over Gaussian field offsets.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights for `integral exp(-x^2) f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch construction from the Jacobi matrix of the Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let b = (i as f64 / 2.0).sqrt();
            jacobi[(i, i - 1)] = b;
            jacobi[(i - 1, i)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `E[f(X)]` for `X ~ N(0, sigma^2)`, as `(value offset, probability weight)` pairs.
    pub fn normal_points(&self, sigma: f64) -> Vec<(f64, f64)> {
        let norm = 1.0 / std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (std::f64::consts::SQRT_2 * sigma * x, w * norm))
            .collect()
    }

    pub fn expect_normal(&self, sigma: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.normal_points(sigma).into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        let gh = GaussHermite::new(32);
        let s: f64 = gh.weights.iter().sum();
        assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normal_moments() {
        let gh = GaussHermite::new(32);
        let sigma = 0.7;
        assert!((gh.expect_normal(sigma, |x| x * x) - sigma * sigma).abs() < 1e-12);
        assert!((gh.expect_normal(sigma, |x| x.powi(4)) - 3.0 * sigma.powi(4)).abs() < 1e-12);
        assert!(gh.expect_normal(sigma, |x| x.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn characteristic_function() {
        let gh = GaussHermite::new(32);
        let sigma = 1.3;
        let got = gh.expect_normal(sigma, f64::cos);
        assert!((got - (-sigma * sigma / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn two_point_rule() {
        let gh = GaussHermite::new(2);
        assert!((gh.nodes[1] - 0.5f64.sqrt()).abs() < 1e-14);
    }
}

//! Gaussian quadrature rules for the supported marginal laws, built with
//! Golub-Welsch from the analytic Jacobi-matrix recurrences. An n-point
//! rule integrates polynomials up to degree 2n-1 exactly, which is what
//! lets moment tables of high order be computed without touching the
//! ill-conditioned monomial-to-Chebyshev map.

use crate::linalg::tridiag_eigen;

/// Nodes and probability weights (weights sum to one).
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Expectation of `f` under the discrete rule.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Map nodes through `x -> center + half * x`.
    pub fn mapped(mut self, center: f64, half: f64) -> GaussRule {
        for x in &mut self.nodes {
            *x = center + half * *x;
        }
        self
    }

    /// Points needed for exactness up to `degree`.
    pub fn points_for_degree(degree: usize) -> usize {
        degree / 2 + 1
    }
}

/// Gauss rule for the normalized weight `(1-x)^a (1+x)^b` on [-1, 1].
/// `a = b = 0` gives Gauss-Legendre.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> GaussRule {
    assert!(n >= 1);
    assert!(a > -1.0 && b > -1.0);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let s = a + b;
    for k in 0..n {
        let kf = k as f64;
        let d = if k == 0 {
            (b - a) / (s + 2.0)
        } else {
            let den = (2.0 * kf + s) * (2.0 * kf + s + 2.0);
            (b * b - a * a) / den
        };
        diag.push(d);
        if k + 1 < n {
            let j = kf + 1.0; // off-diagonal coupling rows k and k+1
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((s + 2.0) * (s + 2.0) * (s + 3.0))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + s)
                    / ((2.0 * j + s) * (2.0 * j + s) * (2.0 * j + s + 1.0) * (2.0 * j + s - 1.0))
            };
            off.push(beta.sqrt());
        }
    }
    let (nodes, vecs) = tridiag_eigen(&diag, &off);
    let weights: Vec<f64> = (0..n).map(|i| vecs.at(0, i) * vecs.at(0, i)).collect();
    // eigenvectors are orthonormal, so the weights already sum to one up to
    // rounding; normalize away the dust
    let total: f64 = weights.iter().sum();
    GaussRule { nodes, weights: weights.into_iter().map(|w| w / total).collect() }
}

/// Gauss-Legendre rule on [-1, 1] with probability weights.
pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0)
}

//! Moment providers for the supported marginal distributions. Supports must
//! sit inside [-1, 1] so that every raw moment is bounded by one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre, GaussRule};

/// Marginal law of one variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum Marginal {
    Uniform { a: f64, b: f64 },
    Beta { alpha: f64, beta: f64, a: f64, b: f64 },
    Point { v: f64 },
    Moments { values: Vec<f64> },
}

impl Marginal {
    pub fn uniform(a: f64, b: f64) -> Self {
        Marginal::Uniform { a, b }
    }

    pub fn beta(alpha: f64, beta: f64, a: f64, b: f64) -> Self {
        Marginal::Beta { alpha, beta, a, b }
    }

    pub fn point(v: f64) -> Self {
        Marginal::Point { v }
    }

    pub fn from_moments(values: Vec<f64>) -> Self {
        Marginal::Moments { values }
    }

    // negated comparisons here double as NaN rejection
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        match self {
            Marginal::Uniform { a, b } => {
                if !(a < b) {
                    return Err(Error::InvalidMarginal(format!("uniform needs a < b, got [{a}, {b}]")));
                }
                if *a < -1.0 || *b > 1.0 {
                    return Err(Error::InvalidMarginal(format!(
                        "uniform support [{a}, {b}] must lie inside [-1, 1]"
                    )));
                }
            }
            Marginal::Beta { alpha, beta, a, b } => {
                if !(*alpha > 0.0 && *beta > 0.0) {
                    return Err(Error::InvalidMarginal(format!(
                        "beta needs positive shape parameters, got ({alpha}, {beta})"
                    )));
                }
                if !(a < b) {
                    return Err(Error::InvalidMarginal(format!("beta needs a < b, got [{a}, {b}]")));
                }
                if *a < -1.0 || *b > 1.0 {
                    return Err(Error::InvalidMarginal(format!(
                        "beta support [{a}, {b}] must lie inside [-1, 1]"
                    )));
                }
            }
            Marginal::Point { v } => {
                if v.abs() > 1.0 {
                    return Err(Error::InvalidMarginal(format!("point mass at {v} outside [-1, 1]")));
                }
            }
            Marginal::Moments { values } => {
                if values.is_empty() || (values[0] - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidMarginal("moment table must start with m_0 = 1".into()));
                }
                if values.iter().any(|m| m.abs() > 1.0 + 1e-9) {
                    return Err(Error::InvalidMarginal(
                        "moments of a law supported in [-1, 1] must lie in [-1, 1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Raw moments `E[X^k]` for `k = 0..=max_order`.
    pub fn raw_moments(&self, max_order: usize) -> Result<Vec<f64>> {
        match self {
            Marginal::Uniform { a, b } => Ok((0..=max_order)
                .map(|k| {
                    let k1 = (k + 1) as i32;
                    (b.powi(k1) - a.powi(k1)) / (k1 as f64 * (b - a))
                })
                .collect()),
            Marginal::Beta { alpha, beta, a, b } => {
                if *a == 0.0 && *b == 1.0 {
                    // exact recursion on the native support
                    let mut m = Vec::with_capacity(max_order + 1);
                    m.push(1.0);
                    for k in 1..=max_order {
                        let kf = k as f64;
                        let next = m[k - 1] * (alpha + kf - 1.0) / (alpha + beta + kf - 1.0);
                        m.push(next);
                    }
                    Ok(m)
                } else {
                    // arbitrary support: exact Gauss-Jacobi sums stay stable
                    // where the binomial affine transform would cancel
                    let rule = self.quadrature(max_order).expect("beta always has a rule");
                    Ok((0..=max_order)
                        .map(|k| rule.expect(|x| x.powi(k as i32)))
                        .collect())
                }
            }
            Marginal::Point { v } => Ok((0..=max_order).map(|k| v.powi(k as i32)).collect()),
            Marginal::Moments { values } => {
                if max_order >= values.len() {
                    return Err(Error::InsufficientMoments {
                        available: values.len() - 1,
                        needed: max_order,
                    });
                }
                Ok(values[..=max_order].to_vec())
            }
        }
    }

    /// `E[X^k]`.
    pub fn raw_moment(&self, k: usize) -> Result<f64> {
        Ok(self.raw_moments(k)?[k])
    }

    /// Chebyshev-basis moments `E[T_i(X)]` for `i = 0..=max_order`, each by
    /// a route that keeps every intermediate bounded.
    pub fn cheb_moments(&self, max_order: usize) -> Result<Vec<f64>> {
        match self {
            Marginal::Uniform { a, b } => Ok((0..=max_order)
                .map(|i| (cheb_antiderivative(i, *b) - cheb_antiderivative(i, *a)) / (b - a))
                .collect()),
            Marginal::Beta { .. } => {
                let rule = self.quadrature(max_order).expect("beta always has a rule");
                Ok(cheb_moments_from_rule(&rule, max_order))
            }
            Marginal::Point { v } => {
                let mut out = Vec::with_capacity(max_order + 1);
                let mut prev = 1.0;
                let mut cur = *v;
                out.push(1.0);
                if max_order >= 1 {
                    out.push(cur);
                }
                for _ in 2..=max_order {
                    let next = 2.0 * v * cur - prev;
                    prev = cur;
                    cur = next;
                    out.push(cur);
                }
                Ok(out)
            }
            Marginal::Moments { .. } => {
                // only the raw table is available; go through the monomial
                // coefficients of T_i and let the validity guard catch any
                // loss at high order
                let raw = self.raw_moments(max_order)?;
                let mut out = Vec::with_capacity(max_order + 1);
                let mut t_prev = vec![1.0];
                let mut t_cur = vec![0.0, 1.0];
                for i in 0..=max_order {
                    let tk: &[f64] = match i {
                        0 => &t_prev,
                        1 => &t_cur,
                        _ => {
                            let mut next = vec![0.0; i + 1];
                            for (j, &c) in t_cur.iter().enumerate() {
                                next[j + 1] += 2.0 * c;
                            }
                            for (j, &c) in t_prev.iter().enumerate() {
                                next[j] -= c;
                            }
                            t_prev = std::mem::take(&mut t_cur);
                            t_cur = next;
                            &t_cur
                        }
                    };
                    out.push(tk.iter().zip(&raw).map(|(c, m)| c * m).sum());
                }
                Ok(out)
            }
        }
    }

    /// A Gauss rule whose sums equal expectations of polynomials up to
    /// `poly_degree` exactly. `None` for table-backed marginals.
    pub fn quadrature(&self, poly_degree: usize) -> Option<GaussRule> {
        let n = GaussRule::points_for_degree(poly_degree);
        match self {
            Marginal::Uniform { a, b } => {
                Some(gauss_legendre(n).mapped((a + b) / 2.0, (b - a) / 2.0))
            }
            Marginal::Beta { alpha, beta, a, b } => Some(
                gauss_jacobi(n, beta - 1.0, alpha - 1.0).mapped((a + b) / 2.0, (b - a) / 2.0),
            ),
            Marginal::Point { v } => Some(GaussRule { nodes: vec![*v], weights: vec![1.0] }),
            Marginal::Moments { .. } => None,
        }
    }

    /// Affine description `(standardized, center, halfwidth)` mapping the
    /// support hull onto [-1, 1]: `X = center + halfwidth * Y`. A point mass
    /// standardizes with halfwidth zero.
    pub fn standardize(&self) -> (Marginal, f64, f64) {
        match self {
            Marginal::Uniform { a, b } => {
                (Marginal::Uniform { a: -1.0, b: 1.0 }, (a + b) / 2.0, (b - a) / 2.0)
            }
            Marginal::Beta { alpha, beta, a, b } => (
                Marginal::Beta { alpha: *alpha, beta: *beta, a: -1.0, b: 1.0 },
                (a + b) / 2.0,
                (b - a) / 2.0,
            ),
            Marginal::Point { v } => (Marginal::Point { v: 0.0 }, *v, 0.0),
            Marginal::Moments { .. } => (self.clone(), 0.0, 1.0),
        }
    }
}

/// Antiderivative of `T_i` evaluated at `t` in [-1, 1].
fn cheb_antiderivative(i: usize, t: f64) -> f64 {
    match i {
        0 => t,
        1 => 0.5 * t * t,
        _ => {
            let ti = |k: usize| cheb_t(k, t);
            0.5 * (ti(i + 1) / (i as f64 + 1.0) - ti(i - 1) / (i as f64 - 1.0))
        }
    }
}

fn cheb_t(k: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    let mut cur = t;
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev moments of a discrete rule by running the three-term
/// recurrence once per node.
pub fn cheb_moments_from_rule(rule: &GaussRule, max_order: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut prev = 1.0;
        let mut cur = x;
        out[0] += w;
        if max_order >= 1 {
            out[1] += w * x;
        }
        for o in out.iter_mut().take(max_order + 1).skip(2) {
            let next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
            *o += w * cur;
        }
    }
    out
}

/// Moments of `a + (b - a) * U` from the moments of `U` by binomial
/// expansion: `out_k = sum_j C(k,j) a^(k-j) (b-a)^j base_j`.
pub fn affine_moments(base: &[f64], a: f64, b: f64) -> Vec<f64> {
    let r = b - a;
    let mut out = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        let mut acc = 0.0;
        let mut binom = 1.0f64;
        for (j, &mj) in base.iter().take(k + 1).enumerate() {
            acc += binom * a.powi((k - j) as i32) * r.powi(j as i32) * mj;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        out.push(acc);
    }
    out
}

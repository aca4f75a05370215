//! Polynomials expanded in the per-variable (tensor) Chebyshev basis:
//! `sum_k c_k * prod_v T_{k_v}(x_v)`.
//!
//! Every `|T_j| <= 1` on [-1, 1], so the l1 norm of the coefficients bounds
//! the sup-norm on the box. Products follow the univariate linearization
//! rule variable by variable, which keeps coefficients of bounded functions
//! bounded, which is the property the stable moment path relies on.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use super::cheb::monomial_in_cheb;
use super::multipoly::{Monomial, MultiPoly, PolyBudget};
use super::COEFF_EPS;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorCheb {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl TensorCheb {
    pub fn zero(nvars: usize) -> Self {
        TensorCheb { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut t = TensorCheb::zero(nvars);
        if c.abs() >= COEFF_EPS {
            t.terms.insert(Monomial(vec![0; nvars]), c);
        }
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn insert(&mut self, idx: Vec<u32>, c: f64) {
        assert_eq!(idx.len(), self.nvars);
        *self.terms.entry(Monomial(idx)).or_insert(0.0) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= COEFF_EPS);
    }

    /// Expand a monomial-basis polynomial variable by variable.
    pub fn from_multipoly(p: &MultiPoly) -> TensorCheb {
        let nvars = p.nvars();
        let mut out = TensorCheb::zero(nvars);
        for (m, c) in p.terms() {
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(vec![0; nvars], c)];
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let expansion = monomial_in_cheb(e as usize);
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (idx, pc) in &partial {
                    for &(j, w) in &expansion {
                        let mut ni = idx.clone();
                        ni[v] = j as u32;
                        next.push((ni, pc * w));
                    }
                }
                partial = next;
            }
            for (idx, pc) in partial {
                *out.terms.entry(Monomial(idx)).or_insert(0.0) += pc;
            }
        }
        out.prune();
        out
    }

    /// Coefficient of the all-zeros index (the constant component).
    pub fn t0_coefficient(&self) -> f64 {
        self.terms
            .get(&Monomial(vec![0; self.nvars]))
            .copied()
            .unwrap_or(0.0)
    }

    /// Remove and return the constant component.
    pub fn take_t0(&mut self) -> f64 {
        self.terms
            .remove(&Monomial(vec![0; self.nvars]))
            .unwrap_or(0.0)
    }

    /// Sum of absolute coefficients: a certified bound on `max |p|` over
    /// the box [-1, 1]^nvars.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> TensorCheb {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &TensorCheb) -> TensorCheb {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            *out.terms.entry(m.clone()).or_insert(0.0) += c;
        }
        out.prune();
        out
    }

    /// Product using `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2` in each variable.
    pub fn mul(&self, other: &TensorCheb, budget: &PolyBudget) -> Result<TensorCheb> {
        assert_eq!(self.nvars, other.nvars);
        let mut out = TensorCheb::zero(self.nvars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                // expand the per-variable branches
                let mut partial: Vec<(Vec<u32>, f64)> = vec![(vec![0; self.nvars], ca * cb)];
                for v in 0..self.nvars {
                    let (i, j) = (ma.0[v], mb.0[v]);
                    if i == 0 || j == 0 {
                        for (idx, _) in &mut partial {
                            idx[v] = i + j;
                        }
                    } else {
                        let mut next = Vec::with_capacity(partial.len() * 2);
                        for (idx, pc) in &partial {
                            let mut hi = idx.clone();
                            hi[v] = i + j;
                            next.push((hi, 0.5 * pc));
                            let mut lo = idx.clone();
                            lo[v] = i.abs_diff(j);
                            next.push((lo, 0.5 * pc));
                        }
                        partial = next;
                    }
                }
                for (idx, pc) in partial {
                    *out.terms.entry(Monomial(idx)).or_insert(0.0) += pc;
                }
                if out.terms.len() > budget.max_terms {
                    return Err(Error::TermBudgetExceeded {
                        estimated: self.num_terms() * other.num_terms(),
                        cap: budget.max_terms,
                    });
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Evaluate at a point in [-1, 1]^nvars.
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        let max_idx: Vec<usize> = (0..self.nvars)
            .map(|v| self.terms.keys().map(|m| m.0[v] as usize).max().unwrap_or(0))
            .collect();
        // per-variable T_k tables via the three-term recurrence
        let tables: Vec<Vec<f64>> = (0..self.nvars)
            .map(|v| {
                let mut t = Vec::with_capacity(max_idx[v] + 1);
                t.push(1.0);
                if max_idx[v] >= 1 {
                    t.push(point[v]);
                }
                for k in 2..=max_idx[v] {
                    t.push(2.0 * point[v] * t[k - 1] - t[k - 2]);
                }
                t
            })
            .collect();
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut term = c;
            for (v, &k) in m.0.iter().enumerate() {
                term *= tables[v][k as usize];
            }
            acc += term;
        }
        acc
    }
}

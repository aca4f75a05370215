//! Sparse multivariate polynomials over f64.
//!
//! Terms are kept in a `BTreeMap` keyed by graded-lexicographic monomial
//! order so iteration (and therefore coefficient extraction) is
//! deterministic. Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use super::{COEFF_EPS, MULTIVARIATE_DEGREE_CAP};

/// Exponent multi-index, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Limits on multivariate arithmetic, checked before the work is done.
#[derive(Clone, Debug)]
pub struct PolyBudget {
    pub max_total_degree: usize,
    pub max_terms: usize,
}

impl Default for PolyBudget {
    fn default() -> Self {
        PolyBudget { max_total_degree: MULTIVARIATE_DEGREE_CAP, max_terms: 2_000_000 }
    }
}

impl PolyBudget {
    /// Budget sized for a specific computation rather than the defaults.
    pub fn with_degree(max_total_degree: usize) -> Self {
        PolyBudget { max_total_degree, ..Self::default() }
    }
}

/// Sparse multivariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if c.abs() >= COEFF_EPS {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    /// The polynomial `x_v`.
    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars);
        let mut exps = vec![0; nvars];
        exps[v] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(Monomial(exps), 1.0);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "multi-index length must equal nvars");
            *p.terms.entry(Monomial(exps)).or_insert(0.0) += c;
        }
        p.prune();
        p
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.terms
            .get(&Monomial(vec![0; self.nvars]))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total_degree(&self) -> usize {
        // graded order puts the highest total degree last
        self.terms
            .keys()
            .next_back()
            .map(|m| m.total_degree() as usize)
            .unwrap_or(0)
    }

    pub fn degree_of_var(&self, v: usize) -> usize {
        self.terms.keys().map(|m| m.0[v] as usize).max().unwrap_or(0)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= COEFF_EPS);
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            *out.terms.entry(m.clone()).or_insert(0.0) += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// Exact sparse product.
    pub fn mul(&self, other: &MultiPoly, budget: &PolyBudget) -> Result<MultiPoly> {
        self.check_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero(self.nvars));
        }
        let out_degree = self.total_degree() + other.total_degree();
        if out_degree > budget.max_total_degree {
            return Err(Error::DegreeCapExceeded { cap: budget.max_total_degree, needed: out_degree });
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                *out.terms.entry(Monomial(exps)).or_insert(0.0) += ca * cb;
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

    /// `self` multiplied with itself `k` times; `k = 0` gives the constant 1.
    pub fn pow(&self, k: usize, budget: &PolyBudget) -> Result<MultiPoly> {
        let mut out = MultiPoly::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = out.mul(self, budget)?;
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut t = c;
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[v].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in self.terms() {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[v] = e - 1;
            *out.terms.entry(Monomial(exps)).or_insert(0.0) += c * e as f64;
        }
        out.prune();
        out
    }

    /// Substitute `x_v = center_v + halfwidth_v * y_v` for every variable,
    /// returning the polynomial in the new variables `y`.
    pub fn substitute_affine(&self, centers: &[f64], halfwidths: &[f64]) -> MultiPoly {
        assert_eq!(centers.len(), self.nvars);
        assert_eq!(halfwidths.len(), self.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in self.terms() {
            // expand the product of per-variable binomials incrementally
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(vec![0; self.nvars], c)];
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (cv, rv) = (centers[v], halfwidths[v]);
                // (cv + rv*y)^e = sum_j binom(e,j) cv^(e-j) rv^j y^j
                let mut weights = Vec::with_capacity(e as usize + 1);
                let mut binom = 1.0f64;
                for j in 0..=e {
                    let w = binom * cv.powi((e - j) as i32) * rv.powi(j as i32);
                    weights.push(w);
                    binom = binom * (e - j) as f64 / (j + 1) as f64;
                }
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (exps, pc) in &partial {
                    for (j, &w) in weights.iter().enumerate() {
                        if w == 0.0 {
                            continue;
                        }
                        let mut ne = exps.clone();
                        ne[v] += j as u32;
                        next.push((ne, pc * w));
                    }
                }
                partial = next;
            }
            for (exps, pc) in partial {
                *out.terms.entry(Monomial(exps)).or_insert(0.0) += pc;
            }
        }
        out.prune();
        out
    }

    /// Split into a constant plus polynomials over disjoint groups of
    /// variables that never share a term.
    pub fn decompose(&self) -> Decomposition {
        // union-find over variables
        let mut parent: Vec<usize> = (0..self.nvars).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut constant = 0.0;
        for (m, c) in self.terms() {
            if m.is_constant() {
                constant += c;
                continue;
            }
            let active: Vec<usize> =
                m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, _)| v).collect();
            for w in active.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut group_vars: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut used = vec![false; self.nvars];
        for (m, _) in self.terms() {
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    used[v] = true;
                }
            }
        }
        for (v, &used_v) in used.iter().enumerate() {
            if used_v {
                let root = find(&mut parent, v);
                group_vars.entry(root).or_default().push(v);
            }
        }
        let mut groups = Vec::new();
        for (_, vars) in group_vars {
            let index_of: BTreeMap<usize, usize> =
                vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut poly = MultiPoly::zero(vars.len());
            for (m, c) in self.terms() {
                if m.is_constant() {
                    continue;
                }
                let first_active = m.0.iter().position(|&e| e > 0).unwrap();
                if find(&mut parent, first_active) != find(&mut parent, vars[0]) {
                    continue;
                }
                let mut exps = vec![0u32; vars.len()];
                for (v, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        exps[index_of[&v]] = e;
                    }
                }
                poly.terms.insert(Monomial(exps), c);
            }
            groups.push(GroupPoly { vars, poly });
        }
        Decomposition { constant, groups }
    }
}

/// A polynomial restricted to one connected group of variables.
#[derive(Clone, Debug)]
pub struct GroupPoly {
    /// Original variable indices, ascending.
    pub vars: Vec<usize>,
    /// The group polynomial over its own variables, constant term zero.
    pub poly: MultiPoly,
}

/// Result of [`MultiPoly::decompose`]: `p = constant + sum of groups`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub constant: f64,
    pub groups: Vec<GroupPoly>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> PolyBudget {
        PolyBudget::default()
    }

    #[test]
    fn monomial_product() {
        let x1 = MultiPoly::var(2, 0);
        let sq = x1.mul(&x1, &budget()).unwrap();
        assert_eq!(sq.coefficient(&[2, 0]), 1.0);
        assert_eq!(sq.num_terms(), 1);
    }

    #[test]
    fn difference_of_squares() {
        let one = MultiPoly::constant(2, 1.0);
        let x1 = MultiPoly::var(2, 0);
        let a = one.add(&x1).unwrap();
        let b = one.sub(&x1).unwrap();
        let prod = a.mul(&b, &budget()).unwrap();
        assert_eq!(prod.coefficient(&[0, 0]), 1.0);
        assert_eq!(prod.coefficient(&[2, 0]), -1.0);
        assert_eq!(prod.coefficient(&[1, 0]), 0.0);
        assert_eq!(prod.num_terms(), 2);
    }

    #[test]
    fn square_of_difference() {
        // (0.5 x1 - 0.5 x2)^2 = 0.25 x1^2 - 0.5 x1 x2 + 0.25 x2^2
        let p = MultiPoly::from_terms(2, vec![(vec![1, 0], 0.5), (vec![0, 1], -0.5)]);
        let sq = p.pow(2, &budget()).unwrap();
        assert!((sq.coefficient(&[2, 0]) - 0.25).abs() < 1e-15);
        assert!((sq.coefficient(&[1, 1]) + 0.5).abs() < 1e-15);
        assert!((sq.coefficient(&[0, 2]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pow_zero_is_one() {
        let p = MultiPoly::from_terms(3, vec![(vec![1, 2, 0], -2.5)]);
        let one = p.pow(0, &budget()).unwrap();
        assert_eq!(one.constant_term(), 1.0);
        assert_eq!(one.num_terms(), 1);
    }

    #[test]
    fn cube_of_half_difference() {
        // (0.5(x-q))^3 = 0.125x^3 - 0.375x^2 q + 0.375x q^2 - 0.125q^3
        let p = MultiPoly::from_terms(2, vec![(vec![1, 0], 0.5), (vec![0, 1], -0.5)]);
        let cube = p.pow(3, &budget()).unwrap();
        assert!((cube.coefficient(&[3, 0]) - 0.125).abs() < 1e-15);
        assert!((cube.coefficient(&[2, 1]) + 0.375).abs() < 1e-15);
        assert!((cube.coefficient(&[1, 2]) - 0.375).abs() < 1e-15);
        assert!((cube.coefficient(&[0, 3]) + 0.125).abs() < 1e-15);
        // cross-check by evaluation at a few points
        let pts = [[0.3, -0.7], [0.9, 0.2], [-0.5, 0.5], [0.1, 0.8]];
        for pt in pts {
            let direct = p.eval(&pt).powi(3);
            assert!((cube.eval(&pt) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_square() {
        let p = MultiPoly::from_terms(2, vec![(vec![1, 0], 1.0), (vec![0, 1], 1.0)]);
        let sq = p.pow(2, &budget()).unwrap();
        assert_eq!(sq.coefficient(&[2, 0]), 1.0);
        assert_eq!(sq.coefficient(&[1, 1]), 2.0);
        assert_eq!(sq.coefficient(&[0, 2]), 1.0);
    }

    #[test]
    fn var_mismatch_rejected() {
        let a = MultiPoly::var(2, 0);
        let b = MultiPoly::var(3, 0);
        assert!(matches!(a.mul(&b, &budget()), Err(Error::VarCountMismatch { .. })));
    }

    #[test]
    fn degree_cap_enforced() {
        let p = MultiPoly::var(1, 0);
        let high = p.pow(32, &budget()).unwrap();
        assert!(matches!(
            high.mul(&high.mul(&high, &budget()).unwrap(), &budget()),
            Err(Error::DegreeCapExceeded { .. })
        ));
    }

    #[test]
    fn graded_lex_iteration_order() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![2, 0], 1.0), (vec![0, 1], 1.0), (vec![1, 1], 1.0), (vec![0, 0], 1.0)],
        );
        let order: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.0.clone()).collect();
        assert_eq!(order, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn affine_substitution_matches_eval() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![3, 0], -1.0), (vec![1, 1], 0.5), (vec![0, 2], 0.25), (vec![0, 0], 0.1)],
        );
        let centers = [0.2, -0.3];
        let radii = [0.5, 0.15];
        let q = p.substitute_affine(&centers, &radii);
        for &(y1, y2) in &[(0.7, -0.4), (-1.0, 1.0), (0.0, 0.5)] {
            let x1 = centers[0] + radii[0] * y1;
            let x2 = centers[1] + radii[1] * y2;
            assert!((q.eval(&[y1, y2]) - p.eval(&[x1, x2])).abs() < 1e-13);
        }
    }

    #[test]
    fn decompose_separable() {
        // x1^2 + x2*x3 + 0.5  ->  constant 0.5, groups {x1}, {x2,x3}
        let p = MultiPoly::from_terms(
            3,
            vec![(vec![2, 0, 0], 1.0), (vec![0, 1, 1], 1.0), (vec![0, 0, 0], 0.5)],
        );
        let d = p.decompose();
        assert_eq!(d.constant, 0.5);
        assert_eq!(d.groups.len(), 2);
        assert_eq!(d.groups[0].vars, vec![0]);
        assert_eq!(d.groups[1].vars, vec![1, 2]);
        assert_eq!(d.groups[0].poly.nvars(), 1);
        assert_eq!(d.groups[1].poly.coefficient(&[1, 1]), 1.0);
    }

    #[test]
    fn decompose_connected() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![1, 1], 1.0), (vec![1, 0], 1.0), (vec![0, 1], 1.0)],
        );
        let d = p.decompose();
        assert_eq!(d.groups.len(), 1);
        assert_eq!(d.groups[0].vars, vec![0, 1]);
    }
}

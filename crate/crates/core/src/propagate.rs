//! Moments of the scalar surrogate `z = P(x, q)` and the vector surrogate
//! `Z = (P_1, ..., P_l)` from marginal moments, in the standard and
//! Chebyshev bases.
//!
//! All marginal components are treated as independent, so the expectation
//! of a monomial factors into a product of marginal moments.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::moments::Marginal;
use crate::poly::{
    certified_box_range, chebyshev_monomial_rows, Monomial, MultiPoly, PolyBudget, TensorCheb,
};

/// Basis tag for a moment vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Standard,
    Chebyshev,
}

/// Moment sequence `m_0..m_d` of a scalar random variable.
#[derive(Clone, Debug)]
pub struct MomentVector {
    pub values: Vec<f64>,
    pub basis: Basis,
}

impl MomentVector {
    pub fn degree(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Which route computes the Chebyshev-basis moments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChebPath {
    /// Three-term recurrence evaluated group by group in the tensor
    /// Chebyshev basis, with Gauss-quadrature group tables where the
    /// marginals admit a rule. Keeps every intermediate bounded.
    Grouped,
    /// Literal recurrence `T_{k+1}(p) = 2 p T_k(p) - T_{k-1}(p)` on the
    /// full monomial expansion.
    Direct,
    /// Standard moments followed by the basis-change map, whose
    /// coefficients grow exponentially in the degree; kept for
    /// cross-validation and expected to disagree at high degree.
    Conversion,
}

/// Tabulated raw moments per variable, grown to the order each variable
/// actually needs.
struct MomentTable {
    tables: Vec<Vec<f64>>,
}

/// Compensated (Neumaier) summation; the alternating sums here feed a
/// basis-change map that amplifies their rounding error exponentially in
/// the degree, so the extra digits matter.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl MomentTable {
    fn build(margins: &[Marginal], orders: &[usize]) -> Result<Self> {
        let tables = margins
            .iter()
            .zip(orders)
            .map(|(m, &k)| m.raw_moments(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentTable { tables })
    }

    #[inline]
    fn expect_monomial(&self, idx: &[u32]) -> f64 {
        let mut acc = 1.0;
        for (v, &e) in idx.iter().enumerate() {
            if e > 0 {
                acc *= self.tables[v][e as usize];
            }
        }
        acc
    }

    fn expect_poly(&self, p: &MultiPoly) -> f64 {
        compensated_sum(p.terms().map(|(m, c)| c * self.expect_monomial(&m.0)))
    }
}

/// Expectation of the monomial `prod_v x_v^(idx_v)` under independent
/// marginals: the product of the per-variable raw moments.
pub fn monomial_expectation(idx: &[u32], margins: &[Marginal]) -> Result<f64> {
    assert_eq!(idx.len(), margins.len(), "margins must cover all variables");
    let mut acc = 1.0;
    for (v, &e) in idx.iter().enumerate() {
        if e > 0 {
            acc *= margins[v].raw_moment(e as usize)?;
        }
    }
    Ok(acc)
}

/// Joint-moment model hook. Everything in this module defaults to the
/// independent product of marginal moments, which is the only model the
/// rest of the pipeline uses; dependent uncertainties can supply an
/// explicit table instead.
pub trait JointMoments {
    fn expect_monomial(&self, idx: &[u32]) -> Result<f64>;
}

/// Independent components: the expectation factors across variables.
impl JointMoments for Vec<Marginal> {
    fn expect_monomial(&self, idx: &[u32]) -> Result<f64> {
        monomial_expectation(idx, self)
    }
}

/// An explicit joint raw-moment table keyed by exponent multi-index.
pub struct JointMomentTable {
    pub values: BTreeMap<Vec<u32>, f64>,
}

impl JointMoments for JointMomentTable {
    fn expect_monomial(&self, idx: &[u32]) -> Result<f64> {
        self.values.get(idx).copied().ok_or(Error::InsufficientMoments {
            available: 0,
            needed: idx.iter().sum::<u32>() as usize,
        })
    }
}

/// Standard-basis surrogate moments under an arbitrary joint-moment model.
pub fn z_moments_standard_joint(
    p: &MultiPoly,
    joint: &dyn JointMoments,
    d: usize,
) -> Result<MomentVector> {
    let budget = PolyBudget::with_degree(p.total_degree() * d + 1);
    let mut values = Vec::with_capacity(d + 1);
    values.push(1.0);
    let mut power = MultiPoly::constant(p.nvars(), 1.0);
    for _ in 1..=d {
        power = power.mul(p, &budget)?;
        let mut acc = Vec::with_capacity(power.num_terms());
        for (m, c) in power.terms() {
            acc.push(c * joint.expect_monomial(&m.0)?);
        }
        values.push(compensated_sum(acc));
    }
    Ok(MomentVector { values, basis: Basis::Standard })
}

fn per_var_orders(p: &MultiPoly, d: usize) -> Vec<usize> {
    (0..p.nvars()).map(|v| p.degree_of_var(v) * d).collect()
}

/// Standard-basis moments `m_alpha = E[p^alpha]` for `alpha = 0..=d`,
/// computed by expanding the powers of `p` and taking monomial
/// expectations.
pub fn z_moments_standard(p: &MultiPoly, margins: &[Marginal], d: usize) -> Result<MomentVector> {
    assert_eq!(p.nvars(), margins.len(), "margins must cover all variables");
    let table = MomentTable::build(margins, &per_var_orders(p, d))?;
    let budget = PolyBudget::with_degree(p.total_degree() * d + 1);
    let mut values = Vec::with_capacity(d + 1);
    values.push(1.0);
    let mut power = MultiPoly::constant(p.nvars(), 1.0);
    for _ in 1..=d {
        power = power.mul(p, &budget)?;
        values.push(table.expect_poly(&power));
    }
    Ok(MomentVector { values, basis: Basis::Standard })
}

/// Chebyshev-basis moments `E[T_k(p(x, q))]` for `k = 0..=d` along the
/// default (grouped) path.
pub fn z_moments_cheb(p: &MultiPoly, margins: &[Marginal], d: usize) -> Result<MomentVector> {
    z_moments_cheb_with(p, margins, d, ChebPath::Grouped)
}

pub fn z_moments_cheb_with(
    p: &MultiPoly,
    margins: &[Marginal],
    d: usize,
    path: ChebPath,
) -> Result<MomentVector> {
    assert_eq!(p.nvars(), margins.len(), "margins must cover all variables");
    let values = match path {
        ChebPath::Grouped => cheb_grouped(p, margins, d)?,
        ChebPath::Direct => cheb_direct(p, margins, d)?,
        ChebPath::Conversion => {
            let standard = z_moments_standard(p, margins, d)?;
            let rows = chebyshev_monomial_rows(d);
            rows.iter()
                .map(|row| {
                    compensated_sum(row.iter().zip(&standard.values).map(|(c, m)| c * m))
                })
                .collect()
        }
    };
    Ok(MomentVector { values, basis: Basis::Chebyshev })
}

/// Largest degree d' such that all Chebyshev moments up to d' lie in
/// [-1, 1] (with a small slack for rounding). Everything past the first
/// violation is considered contaminated.
pub fn moment_validity_degree(mv: &MomentVector) -> usize {
    debug_assert_eq!(mv.basis, Basis::Chebyshev);
    let mut valid = 0usize;
    for (k, v) in mv.values.iter().enumerate() {
        if v.abs() > 1.0 + 1e-9 || !v.is_finite() {
            return k.saturating_sub(1);
        }
        valid = k;
    }
    valid
}

// ---------------------------------------------------------------------------
// direct path

fn cheb_direct(p: &MultiPoly, margins: &[Marginal], d: usize) -> Result<Vec<f64>> {
    let table = MomentTable::build(margins, &per_var_orders(p, d))?;
    let budget = PolyBudget::with_degree(p.total_degree() * d + 1);
    let mut values = Vec::with_capacity(d + 1);
    values.push(1.0);
    if d == 0 {
        return Ok(values);
    }
    let two_p = p.scaled(2.0);
    let mut t_prev = MultiPoly::constant(p.nvars(), 1.0);
    let mut t_cur = p.clone();
    values.push(table.expect_poly(&t_cur));
    for _ in 2..=d {
        let t_next = two_p.mul(&t_cur, &budget)?.sub(&t_prev)?;
        values.push(table.expect_poly(&t_next));
        t_prev = t_cur;
        t_cur = t_next;
    }
    Ok(values)
}

// ---------------------------------------------------------------------------
// grouped path

/// Upper bound on tensor-quadrature grid size before the algebraic route
/// takes over.
const GRID_CAP: usize = 20_000_000;

fn cheb_grouped(p: &MultiPoly, margins: &[Marginal], d: usize) -> Result<Vec<f64>> {
    let decomp = p.decompose();
    let mut shift = decomp.constant;
    // per-group scale and Chebyshev moment table of the normalized group
    let mut scales = Vec::new();
    let mut tables: Vec<Vec<f64>> = Vec::new();
    for group in &decomp.groups {
        let (lo, hi, _) = certified_box_range(&group.poly);
        let center = 0.5 * (hi + lo);
        let radius = 0.5 * (hi - lo);
        shift += center;
        if radius < 1e-13 {
            continue;
        }
        let centered = group.poly.add(&MultiPoly::constant(group.poly.nvars(), -center))?;
        let normalized = centered.scaled(1.0 / radius);
        let group_margins: Vec<Marginal> =
            group.vars.iter().map(|&v| margins[v].clone()).collect();
        tables.push(group_cheb_table(&normalized, &group_margins, d)?);
        scales.push(radius);
    }
    // combine: run the recurrence on phi = shift + sum_g r_g * w_g in the
    // tensor Chebyshev basis of the group surrogates
    let g = scales.len();
    let mut phi = TensorCheb::constant(g, shift);
    for (gi, &r) in scales.iter().enumerate() {
        let mut idx = vec![0u32; g];
        idx[gi] = 1;
        phi.insert(idx, r);
    }
    let budget = PolyBudget { max_total_degree: usize::MAX, max_terms: PolyBudget::default().max_terms };
    let contract = |c: &TensorCheb| -> f64 {
        c.terms()
            .map(|(m, coeff)| {
                let mut acc = coeff;
                for (gi, &k) in m.0.iter().enumerate() {
                    if k > 0 {
                        acc *= tables[gi][k as usize];
                    }
                }
                acc
            })
            .sum()
    };
    let mut values = Vec::with_capacity(d + 1);
    values.push(1.0);
    if d == 0 {
        return Ok(values);
    }
    let mut c_prev = TensorCheb::constant(g, 1.0);
    let mut c_cur = phi.clone();
    values.push(contract(&c_cur));
    let two_phi = phi.scaled(2.0);
    for _ in 2..=d {
        let c_next = two_phi.mul(&c_cur, &budget)?.add(&c_prev.scaled(-1.0));
        values.push(contract(&c_next));
        c_prev = c_cur;
        c_cur = c_next;
    }
    Ok(values)
}

/// Chebyshev moment table `E[T_i(w(x))], i = 0..=d` for a normalized group
/// polynomial with range inside [-1, 1].
fn group_cheb_table(w: &MultiPoly, margins: &[Marginal], d: usize) -> Result<Vec<f64>> {
    let rules: Option<Vec<_>> = margins
        .iter()
        .enumerate()
        .map(|(v, m)| m.quadrature(w.degree_of_var(v) * d))
        .collect();
    if let Some(rules) = rules {
        let grid: usize = rules.iter().map(|r| r.nodes.len()).product();
        if grid <= GRID_CAP {
            return Ok(group_table_quadrature(w, &rules, d));
        }
    }
    group_table_algebraic(w, margins, d)
}

/// Exact tensor-product Gauss quadrature: evaluate `w` on the grid once,
/// then run the scalar Chebyshev recurrence per node.
fn group_table_quadrature(w: &MultiPoly, rules: &[crate::quadrature::GaussRule], d: usize) -> Vec<f64> {
    let nvars = w.nvars();
    let last = nvars - 1;
    // group terms by the exponent of the last variable so the inner loop is
    // a short polynomial in x_last
    let mut by_last: BTreeMap<u32, Vec<(Vec<u32>, f64)>> = BTreeMap::new();
    for (m, c) in w.terms() {
        let mut head = m.0.clone();
        let e_last = head[last];
        head[last] = 0;
        by_last.entry(e_last).or_default().push((head, c));
    }
    // power tables for the head variables
    let pows: Vec<Vec<Vec<f64>>> = (0..last)
        .map(|v| {
            let deg = w.degree_of_var(v);
            rules[v]
                .nodes
                .iter()
                .map(|&x| {
                    let mut row = Vec::with_capacity(deg + 1);
                    let mut acc = 1.0;
                    for _ in 0..=deg {
                        row.push(acc);
                        acc *= x;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let last_rule = &rules[last];
    let deg_last = w.degree_of_var(last);
    let last_pows: Vec<Vec<f64>> = last_rule
        .nodes
        .iter()
        .map(|&x| {
            let mut row = Vec::with_capacity(deg_last + 1);
            let mut acc = 1.0;
            for _ in 0..=deg_last {
                row.push(acc);
                acc *= x;
            }
            row
        })
        .collect();
    let mut out = vec![0.0; d + 1];
    let mut idx = vec![0usize; last.max(1)];
    let head_dims: Vec<usize> = (0..last).map(|v| rules[v].nodes.len()).collect();
    loop {
        let head_weight: f64 = (0..last).map(|v| rules[v].weights[idx[v]]).product();
        // coefficients of w as a univariate polynomial in x_last at this
        // head point
        let mut coef = vec![0.0; deg_last + 1];
        for (&e_last, terms) in &by_last {
            let mut acc = 0.0;
            for (head, c) in terms {
                let mut t = *c;
                for v in 0..last {
                    let e = head[v];
                    if e > 0 {
                        t *= pows[v][idx[v]][e as usize];
                    }
                }
                acc += t;
            }
            coef[e_last as usize] += acc;
        }
        for (j, lp) in last_pows.iter().enumerate() {
            let wq = head_weight * last_rule.weights[j];
            let mut value = 0.0;
            for (e, &c) in coef.iter().enumerate() {
                value += c * lp[e];
            }
            // scalar Chebyshev recurrence at this node
            out[0] += wq;
            if d >= 1 {
                out[1] += wq * value;
            }
            let mut prev = 1.0;
            let mut cur = value;
            for o in out.iter_mut().take(d + 1).skip(2) {
                let next = 2.0 * value * cur - prev;
                prev = cur;
                cur = next;
                *o += wq * cur;
            }
        }
        // advance the head counter
        if last == 0 {
            break;
        }
        let mut v = 0;
        loop {
            if v == last {
                return out;
            }
            idx[v] += 1;
            if idx[v] < head_dims[v] {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
    out
}

/// Algebraic fallback for marginals without a quadrature rule: run the
/// recurrence in the tensor Chebyshev basis of the group variables and
/// contract with per-variable Chebyshev moment tables.
fn group_table_algebraic(w: &MultiPoly, margins: &[Marginal], d: usize) -> Result<Vec<f64>> {
    let nvars = w.nvars();
    let var_tables: Vec<Vec<f64>> = margins
        .iter()
        .enumerate()
        .map(|(v, m)| m.cheb_moments(w.degree_of_var(v) * d))
        .collect::<Result<Vec<_>>>()?;
    let contract = |c: &TensorCheb| -> f64 {
        c.terms()
            .map(|(m, coeff)| {
                let mut acc = coeff;
                for (v, &k) in m.0.iter().enumerate() {
                    if k > 0 {
                        acc *= var_tables[v][k as usize];
                    }
                }
                acc
            })
            .sum()
    };
    let w_cheb = TensorCheb::from_multipoly(w);
    let budget = PolyBudget { max_total_degree: usize::MAX, max_terms: PolyBudget::default().max_terms };
    let mut out = Vec::with_capacity(d + 1);
    out.push(1.0);
    if d == 0 {
        return Ok(out);
    }
    let mut prev = TensorCheb::constant(nvars, 1.0);
    let mut cur = w_cheb.clone();
    out.push(contract(&cur));
    let two_w = w_cheb.scaled(2.0);
    for _ in 2..=d {
        let next = two_w.mul(&cur, &budget)?.add(&prev.scaled(-1.0));
        out.push(contract(&next));
        prev = cur;
        cur = next;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// mixed moments for the multi-polynomial bound

/// Mixed Chebyshev moments `E[prod_j T_{i_j}(z_j)]` of the vector
/// surrogate, indexed by the per-polynomial degrees `i_j`.
#[derive(Clone, Debug)]
pub struct MixedChebMoments {
    pub ell: usize,
    pub degrees: Vec<usize>,
    values: BTreeMap<Monomial, f64>,
}

impl MixedChebMoments {
    pub fn get(&self, idx: &[u32]) -> f64 {
        self.values.get(&Monomial(idx.to_vec())).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.values.iter().map(|(m, &v)| (m, v))
    }
}

/// Mixed moments by multiplying the recurrence-built `T_{i_j}(P_j)` and
/// taking monomial expectations. Intermediate products share prefixes, and
/// a term budget aborts combinatorial blow-ups with a size report.
pub fn mixed_cheb_moments(
    polys: &[MultiPoly],
    margins: &[Marginal],
    degrees: &[usize],
) -> Result<MixedChebMoments> {
    assert!(!polys.is_empty(), "need at least one constraint polynomial");
    assert_eq!(polys.len(), degrees.len());
    let nvars = polys[0].nvars();
    for p in polys {
        if p.nvars() != nvars {
            return Err(Error::VarCountMismatch { left: nvars, right: p.nvars() });
        }
    }
    let orders: Vec<usize> = (0..nvars)
        .map(|v| polys.iter().zip(degrees).map(|(p, &d)| p.degree_of_var(v) * d).sum())
        .collect();
    let table = MomentTable::build(margins, &orders)?;
    let total_degree: usize = polys.iter().zip(degrees).map(|(p, &d)| p.total_degree() * d).sum();
    let budget = PolyBudget::with_degree(total_degree + 1);
    // recurrence polynomials per constraint
    let mut t_polys: Vec<Vec<MultiPoly>> = Vec::with_capacity(polys.len());
    for (p, &d) in polys.iter().zip(degrees) {
        let mut ts = Vec::with_capacity(d + 1);
        ts.push(MultiPoly::constant(nvars, 1.0));
        if d >= 1 {
            ts.push(p.clone());
        }
        let two_p = p.scaled(2.0);
        for k in 2..=d {
            let next = two_p.mul(&ts[k - 1], &budget)?.sub(&ts[k - 2])?;
            ts.push(next);
        }
        t_polys.push(ts);
    }
    let mut values = BTreeMap::new();
    let mut idx = vec![0u32; polys.len()];
    descend(&t_polys, &table, &budget, 0, &MultiPoly::constant(nvars, 1.0), &mut idx, &mut values)?;
    Ok(MixedChebMoments { ell: polys.len(), degrees: degrees.to_vec(), values })
}

fn descend(
    t_polys: &[Vec<MultiPoly>],
    table: &MomentTable,
    budget: &PolyBudget,
    j: usize,
    prefix: &MultiPoly,
    idx: &mut Vec<u32>,
    values: &mut BTreeMap<Monomial, f64>,
) -> Result<()> {
    if j == t_polys.len() {
        values.insert(Monomial(idx.clone()), table.expect_poly(prefix));
        return Ok(());
    }
    for (i, t) in t_polys[j].iter().enumerate() {
        idx[j] = i as u32;
        let next = prefix.mul(t, budget)?;
        descend(t_polys, table, budget, j + 1, &next, idx, values)?;
    }
    idx[j] = 0;
    Ok(())
}

//! Certified bounds on polynomial ranges over the unit box, and the
//! constraint rescaling that keeps polynomials and thresholds in [-1, 1].

use crate::error::{Error, Result};
use super::multipoly::MultiPoly;
use super::tensor::TensorCheb;

/// How a box bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    /// l1 norm of the tensor-Chebyshev coefficients.
    ChebyshevL1,
    /// l1 norm of the monomial coefficients.
    MonomialL1,
    /// Chebyshev l1 intersected with a grid scan plus a Lipschitz margin.
    GridRefined,
}

/// Grid resolution per axis, by group dimension. Beyond four variables the
/// grid becomes pointless and the l1 bound stands alone.
const GRID_NODES: [usize; 4] = [4097, 257, 65, 33];

/// Certified enclosure of the range of `p` over [-1, 1]^nvars.
///
/// The polynomial is split into groups of variables that never interact;
/// group ranges are bounded independently and summed exactly. Each group
/// range is the intersection of the Chebyshev-coefficient bound with a
/// dense-grid scan widened by a certified Lipschitz margin.
pub fn certified_box_range(p: &MultiPoly) -> (f64, f64, BoundMethod) {
    let decomp = p.decompose();
    let mut lo = decomp.constant;
    let mut hi = decomp.constant;
    let mut method = BoundMethod::ChebyshevL1;
    for group in &decomp.groups {
        let (glo, ghi, gm) = group_range(&group.poly);
        lo += glo;
        hi += ghi;
        if gm == BoundMethod::GridRefined {
            method = BoundMethod::GridRefined;
        }
    }
    (lo, hi, method)
}

fn group_range(poly: &MultiPoly) -> (f64, f64, BoundMethod) {
    let tensor = TensorCheb::from_multipoly(poly);
    let t0 = tensor.t0_coefficient();
    let spread = tensor.l1_norm() - t0.abs();
    let (mut lo, mut hi) = (t0 - spread, t0 + spread);
    if !lo.is_finite() || !hi.is_finite() {
        // conversion overflowed; fall back to the monomial l1 bound
        let m: f64 = poly.terms().map(|(_, c)| c.abs()).sum();
        return (-m, m, BoundMethod::MonomialL1);
    }
    let mut method = BoundMethod::ChebyshevL1;
    let nvars = poly.nvars();
    if nvars >= 1 && nvars <= GRID_NODES.len() {
        let (glo, ghi) = grid_range(poly, GRID_NODES[nvars - 1]);
        if glo > lo || ghi < hi {
            method = BoundMethod::GridRefined;
        }
        lo = lo.max(glo);
        hi = hi.min(ghi);
    }
    (lo, hi, method)
}

/// Grid scan over [-1, 1]^nvars with `nodes` points per axis, widened by a
/// Lipschitz slack so the result encloses the true range.
fn grid_range(poly: &MultiPoly, nodes: usize) -> (f64, f64) {
    let nvars = poly.nvars();
    let h = 2.0 / (nodes - 1) as f64;
    // certified per-axis derivative bounds
    let mut slack = 0.0;
    for v in 0..nvars {
        let d = poly.derivative(v);
        let l1 = TensorCheb::from_multipoly(&d).l1_norm();
        slack += l1 * h / 2.0;
    }
    // per-variable power tables: pows[v][node][exp]
    let degs: Vec<usize> = (0..nvars).map(|v| poly.degree_of_var(v)).collect();
    let pows: Vec<Vec<Vec<f64>>> = (0..nvars)
        .map(|v| {
            (0..nodes)
                .map(|i| {
                    let x = -1.0 + h * i as f64;
                    let mut row = Vec::with_capacity(degs[v] + 1);
                    let mut acc = 1.0;
                    for _ in 0..=degs[v] {
                        row.push(acc);
                        acc *= x;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let terms: Vec<(Vec<u32>, f64)> = poly.terms().map(|(m, c)| (m.0.clone(), c)).collect();
    let mut idx = vec![0usize; nvars];
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    loop {
        let mut val = 0.0;
        for (exps, c) in &terms {
            let mut t = *c;
            for v in 0..nvars {
                t *= pows[v][idx[v]][exps[v] as usize];
            }
            val += t;
        }
        min = min.min(val);
        max = max.max(val);
        // advance the grid counter
        let mut v = 0;
        loop {
            if v == nvars {
                return (min - slack, max + slack);
            }
            idx[v] += 1;
            if idx[v] < nodes {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

/// Upper bound on `max |p|` over [-1, 1]^nvars, guaranteed to be at least
/// the true maximum.
pub fn box_bound(p: &MultiPoly) -> f64 {
    box_bound_detailed(p).0
}

pub fn box_bound_detailed(p: &MultiPoly) -> (f64, BoundMethod) {
    let (lo, hi, method) = certified_box_range(p);
    (lo.abs().max(hi.abs()), method)
}

/// Diagnostics attached to a rescaled constraint.
#[derive(Clone, Debug)]
pub struct RescaleInfo {
    /// Divisor applied to the polynomial and thresholds (1.0 when none).
    pub scale: f64,
    /// The certified box bound before rescaling.
    pub bound: f64,
    pub method: BoundMethod,
}

/// Divide `p`, `l`, `u` by the box bound when it exceeds one, so that the
/// polynomial and thresholds all lie in [-1, 1]. Set membership
/// `l <= p <= u` is preserved pointwise.
pub fn rescale_constraint(
    p: &MultiPoly,
    l: f64,
    u: f64,
) -> Result<(MultiPoly, f64, f64, RescaleInfo)> {
    assert!(l <= u, "lower threshold must not exceed upper");
    if p.is_zero() {
        if l <= 0.0 && 0.0 <= u {
            let info = RescaleInfo { scale: 1.0, bound: 0.0, method: BoundMethod::ChebyshevL1 };
            return Ok((p.clone(), l.max(-1.0), u.min(1.0), info));
        }
        return Err(Error::EmptyUnsafeSet);
    }
    let (bound, method) = box_bound_detailed(p);
    let (scaled, mut sl, mut su, scale) = if bound > 1.0 {
        (p.scaled(1.0 / bound), l / bound, u / bound, bound)
    } else {
        (p.clone(), l, u, 1.0)
    };
    // since |p| <= 1 after scaling, clamping the thresholds changes nothing
    // about membership
    sl = sl.max(-1.0);
    su = su.min(1.0);
    if sl > su {
        return Err(Error::EmptyUnsafeSet);
    }
    Ok((scaled, sl, su, RescaleInfo { scale, bound, method }))
}

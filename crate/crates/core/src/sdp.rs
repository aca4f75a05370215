//! Dense semidefinite programming with block-diagonal PSD variables, a free
//! vector, and linear equality constraints.
//!
//! The solver is an infeasible-start primal-dual path-following method with
//! Nesterov-Todd scaling. Problems here are small (blocks under ~100 rows,
//! a few hundred equalities), so everything is dense and single-threaded;
//! two runs on the same input produce bitwise-identical results.

use crate::error::{Error, Result};
use crate::linalg::{solve_refined, sym_eigen, DMat};

/// Sparse symmetric matrix: entries with `i <= j`, where an off-diagonal
/// entry stands for both `(i, j)` and `(j, i)`.
pub type SparseSym = Vec<(usize, usize, f64)>;

/// One linear equality `sum_b <A_b, X_b> + sum_k B_k f_k = rhs`.
#[derive(Clone, Debug, Default)]
pub struct EqRow {
    pub rhs: f64,
    /// Per-block sparse symmetric coefficient matrices.
    pub block_entries: Vec<SparseSym>,
    /// Coefficients on the free variables.
    pub free_entries: Vec<(usize, f64)>,
}

/// minimize `sum_b <C_b, X_b> + c_f' f` over PSD blocks `X_b` and a free
/// vector `f`, subject to linear equalities.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub free_dim: usize,
    pub obj_blocks: Vec<SparseSym>,
    pub obj_free: Vec<f64>,
    pub equalities: Vec<EqRow>,
}

/// Caps guarding against misuse; the solver is meant for small problems.
const MAX_BLOCK_DIM: usize = 200;
const MAX_EQUALITIES: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
    Numerical,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Numerical => "numerical",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResiduals {
    pub primal_inf: f64,
    pub dual_inf: f64,
    pub gap: f64,
    pub min_eig: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub blocks: Vec<DMat>,
    pub free: Vec<f64>,
    pub dual: Vec<f64>,
    pub dual_blocks: Vec<DMat>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: SolveResiduals,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary factor.
    pub step_frac: f64,
    /// Centering parameter for the plain path-following mode.
    pub sigma: f64,
    /// Mehrotra-style adaptive centering from an affine predictor step.
    /// Fixed-sigma path following stalls on indicator programs whose
    /// targets are narrow intervals, so this is on by default.
    pub predictor_corrector: bool,
    pub init_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_gap: 1e-8,
            tol_feas: 1e-8,
            max_iter: 200,
            step_frac: 0.98,
            sigma: 0.3,
            predictor_corrector: true,
            init_scale: 1.0,
        }
    }
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.block_dims.iter().any(|&n| n == 0 || n > MAX_BLOCK_DIM) {
            return Err(Error::InvalidProblem(format!(
                "block dimensions must be in 1..={MAX_BLOCK_DIM}"
            )));
        }
        if self.equalities.len() > MAX_EQUALITIES {
            return Err(Error::InvalidProblem(format!(
                "too many equalities ({} > {MAX_EQUALITIES})",
                self.equalities.len()
            )));
        }
        if self.obj_blocks.len() != self.block_dims.len() {
            return Err(Error::InvalidProblem("objective blocks must match block count".into()));
        }
        if self.obj_free.len() != self.free_dim {
            return Err(Error::InvalidProblem("objective free part must match free_dim".into()));
        }
        for (e, row) in self.equalities.iter().enumerate() {
            if row.block_entries.len() != self.block_dims.len() {
                return Err(Error::InvalidProblem(format!("equality {e} has wrong block count")));
            }
            for (b, entries) in row.block_entries.iter().enumerate() {
                let n = self.block_dims[b];
                for &(i, j, v) in entries {
                    if i >= n || j >= n || i > j || !v.is_finite() {
                        return Err(Error::InvalidProblem(format!(
                            "equality {e} block {b} has bad entry ({i}, {j}, {v})"
                        )));
                    }
                }
            }
            for &(k, v) in &row.free_entries {
                if k >= self.free_dim || !v.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "equality {e} has bad free entry ({k}, {v})"
                    )));
                }
            }
            if !row.rhs.is_finite() {
                return Err(Error::InvalidProblem(format!("equality {e} has non-finite rhs")));
            }
        }
        Ok(())
    }

    /// Plain-text sparse triplet dump for cross-checking against external
    /// conic solvers.
    pub fn dump_triplets(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "blocks {:?} free {}", self.block_dims, self.free_dim).unwrap();
        for (b, c) in self.obj_blocks.iter().enumerate() {
            for &(i, j, v) in c {
                writeln!(out, "obj block {b} {i} {j} {v:.17e}").unwrap();
            }
        }
        for (k, v) in self.obj_free.iter().enumerate() {
            if *v != 0.0 {
                writeln!(out, "obj free {k} {v:.17e}").unwrap();
            }
        }
        for (e, row) in self.equalities.iter().enumerate() {
            writeln!(out, "eq {e} rhs {:.17e}", row.rhs).unwrap();
            for (b, entries) in row.block_entries.iter().enumerate() {
                for &(i, j, v) in entries {
                    writeln!(out, "eq {e} block {b} {i} {j} {v:.17e}").unwrap();
                }
            }
            for &(k, v) in &row.free_entries {
                writeln!(out, "eq {e} free {k} {v:.17e}").unwrap();
            }
        }
        out
    }
}

fn sparse_to_dense(n: usize, s: &SparseSym) -> DMat {
    let mut m = DMat::zeros(n, n);
    for &(i, j, v) in s {
        m.set(i, j, v);
        if i != j {
            m.set(j, i, v);
        }
    }
    m
}

#[inline]
fn sym_inner(s: &SparseSym, x: &DMat) -> f64 {
    let mut acc = 0.0;
    for &(i, j, v) in s {
        acc += if i == j { v * x.at(i, i) } else { 2.0 * v * x.at(i, j) };
    }
    acc
}

/// W * A * W for sparse symmetric A and dense symmetric W.
fn congruence_sparse(w: &DMat, a: &SparseSym) -> DMat {
    let n = w.rows;
    // U = A * W has nonzero rows only where A has entries
    let mut u = DMat::zeros(n, n);
    for &(i, j, v) in a {
        let wr = w.row(j);
        let ur = &mut u.data[i * n..(i + 1) * n];
        for (t, &ww) in ur.iter_mut().zip(wr) {
            *t += v * ww;
        }
        if i != j {
            let wr = w.row(i);
            let ur = &mut u.data[j * n..(j + 1) * n];
            for (t, &ww) in ur.iter_mut().zip(wr) {
                *t += v * ww;
            }
        }
    }
    // V = W * U, using only the nonzero rows of U
    let mut rows: Vec<usize> = a.iter().flat_map(|&(i, j, _)| [i, j]).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut v = DMat::zeros(n, n);
    for &r in &rows {
        let urow = u.row(r).to_vec();
        for i in 0..n {
            let wir = w.at(i, r);
            if wir == 0.0 {
                continue;
            }
            let vrow = &mut v.data[i * n..(i + 1) * n];
            for (t, &uu) in vrow.iter_mut().zip(&urow) {
                *t += wir * uu;
            }
        }
    }
    v
}

/// Relative floor applied to eigenvalues of iterates that are positive in
/// exact arithmetic but may round below zero near the boundary.
const EIG_CLAMP: f64 = 1e-14;

/// Largest step `alpha` keeping `X + alpha * D` positive semidefinite,
/// already scaled by the fraction-to-boundary factor and capped at 1.
/// Uses the eigendecomposition of X with a relative floor so nearly
/// singular iterates do not stall the line search.
fn max_step(x: &DMat, d: &DMat, frac: f64) -> f64 {
    let n = x.rows;
    let (vals, q) = sym_eigen(x);
    let vmax = vals.iter().fold(0.0f64, |a, &v| a.max(v));
    if vmax <= 0.0 {
        return 0.0;
    }
    let floor = vmax * EIG_CLAMP;
    let inv_sqrt: Vec<f64> = vals.iter().map(|&v| 1.0 / v.max(floor).sqrt()).collect();
    let mut b = q.transpose().matmul(d).matmul(&q);
    for i in 0..n {
        for j in 0..n {
            let v = b.at(i, j) * inv_sqrt[i] * inv_sqrt[j];
            b.set(i, j, v);
        }
    }
    b.symmetrize();
    let (bvals, _) = sym_eigen(&b);
    let lam_min = bvals[0];
    if lam_min >= -1e-14 {
        1.0
    } else {
        (frac * (-1.0 / lam_min)).min(1.0)
    }
}

struct Scaling {
    w: DMat,
    s_inv: DMat,
}

fn nt_scaling(x: &DMat, s: &DMat) -> Option<Scaling> {
    let (mut s_vals, s_vecs) = sym_eigen(s);
    let smax = s_vals.iter().fold(0.0f64, |a, &v| a.max(v));
    if smax <= 0.0 {
        return None;
    }
    for v in &mut s_vals {
        *v = v.max(smax * EIG_CLAMP);
    }
    let n = x.rows;
    let mut s_half = DMat::zeros(n, n);
    let mut s_inv_half = DMat::zeros(n, n);
    let mut s_inv = DMat::zeros(n, n);
    for k in 0..n {
        let (sq, isq, inv) = (s_vals[k].sqrt(), 1.0 / s_vals[k].sqrt(), 1.0 / s_vals[k]);
        for i in 0..n {
            for j in 0..=i {
                let prod = s_vecs.at(i, k) * s_vecs.at(j, k);
                s_half.add_at(i, j, sq * prod);
                s_inv_half.add_at(i, j, isq * prod);
                s_inv.add_at(i, j, inv * prod);
            }
        }
    }
    for m in [&mut s_half, &mut s_inv_half, &mut s_inv] {
        for i in 0..n {
            for j in 0..i {
                let v = m.at(i, j);
                m.set(j, i, v);
            }
        }
    }
    let t = s_half.matmul(x).matmul(&s_half);
    let mut t = t;
    t.symmetrize();
    let (mut t_vals, t_vecs) = sym_eigen(&t);
    let tmax = t_vals.iter().fold(0.0f64, |a, &v| a.max(v));
    if tmax <= 0.0 {
        return None;
    }
    for v in &mut t_vals {
        *v = v.max(tmax * EIG_CLAMP);
    }
    let mut t_half = DMat::zeros(n, n);
    for k in 0..n {
        let sq = t_vals[k].sqrt();
        for i in 0..n {
            for j in 0..=i {
                t_half.add_at(i, j, sq * t_vecs.at(i, k) * t_vecs.at(j, k));
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            let v = t_half.at(i, j);
            t_half.set(j, i, v);
        }
    }
    let mut w = s_inv_half.matmul(&t_half).matmul(&s_inv_half);
    w.symmetrize();
    Some(Scaling { w, s_inv })
}

/// Solve the SDP. Deterministic given the problem and configuration.
pub fn solve(problem: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    problem.validate()?;
    let nb = problem.block_dims.len();
    let m = problem.equalities.len();
    let nf = problem.free_dim;
    let total_dim: usize = problem.block_dims.iter().sum();

    let c_blocks: Vec<DMat> = problem
        .obj_blocks
        .iter()
        .zip(&problem.block_dims)
        .map(|(s, &n)| sparse_to_dense(n, s))
        .collect();

    let mut x: Vec<DMat> = problem
        .block_dims
        .iter()
        .map(|&n| {
            let mut i = DMat::identity(n);
            i.scale(cfg.init_scale);
            i
        })
        .collect();
    let mut s = x.clone();
    let mut y = vec![0.0; m];
    let mut f = vec![0.0; nf];

    let rhs_scale = 1.0
        + problem
            .equalities
            .iter()
            .map(|r| r.rhs.abs())
            .fold(0.0f64, f64::max);
    let obj_scale = 1.0
        + problem
            .obj_blocks
            .iter()
            .flatten()
            .map(|&(_, _, v)| v.abs())
            .chain(problem.obj_free.iter().map(|v| v.abs()))
            .fold(0.0f64, f64::max);

    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let mut residuals = SolveResiduals { primal_inf: f64::NAN, dual_inf: f64::NAN, gap: f64::NAN, min_eig: 0.0 };
    let mut primal_obj = 0.0;
    let mut dual_obj = 0.0;

    for iter in 0..cfg.max_iter {
        iterations = iter;
        // residuals
        let mut r_p = vec![0.0; m];
        for (e, row) in problem.equalities.iter().enumerate() {
            let mut lhs = 0.0;
            for (b, entries) in row.block_entries.iter().enumerate() {
                lhs += sym_inner(entries, &x[b]);
            }
            for &(k, v) in &row.free_entries {
                lhs += v * f[k];
            }
            r_p[e] = row.rhs - lhs;
        }
        let mut r_d: Vec<DMat> = (0..nb)
            .map(|b| {
                let mut rd = c_blocks[b].clone();
                for i in 0..rd.data.len() {
                    rd.data[i] -= s[b].data[i];
                }
                rd
            })
            .collect();
        for (e, row) in problem.equalities.iter().enumerate() {
            let ye = y[e];
            if ye == 0.0 {
                continue;
            }
            for (b, entries) in row.block_entries.iter().enumerate() {
                for &(i, j, v) in entries {
                    r_d[b].add_at(i, j, -ye * v);
                    if i != j {
                        r_d[b].add_at(j, i, -ye * v);
                    }
                }
            }
        }
        let mut r_f = problem.obj_free.clone();
        for (e, row) in problem.equalities.iter().enumerate() {
            for &(k, v) in &row.free_entries {
                r_f[k] -= y[e] * v;
            }
        }

        primal_obj = (0..nb).map(|b| c_blocks[b].dot(&x[b])).sum::<f64>()
            + problem.obj_free.iter().zip(&f).map(|(c, v)| c * v).sum::<f64>();
        dual_obj = problem.equalities.iter().zip(&y).map(|(r, yy)| r.rhs * yy).sum();

        let mu = if total_dim > 0 {
            (0..nb).map(|b| x[b].dot(&s[b])).sum::<f64>() / total_dim as f64
        } else {
            0.0
        };

        let primal_inf = r_p.iter().fold(0.0f64, |a, v| a.max(v.abs())) / rhs_scale;
        let dual_inf = r_d
            .iter()
            .map(|rd| rd.max_abs())
            .chain(r_f.iter().map(|v| v.abs()))
            .fold(0.0f64, f64::max)
            / obj_scale;
        let gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs() + dual_obj.abs());
        residuals = SolveResiduals { primal_inf, dual_inf, gap, min_eig: 0.0 };

        if !primal_obj.is_finite() || !dual_obj.is_finite() || !mu.is_finite() {
            status = SolveStatus::Numerical;
            break;
        }
        if primal_inf < cfg.tol_feas && dual_inf < cfg.tol_feas && gap < cfg.tol_gap {
            status = SolveStatus::Optimal;
            break;
        }
        let iterate_norm = y.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            .max(f.iter().fold(0.0f64, |a, v| a.max(v.abs())))
            .max(x.iter().map(|b| b.max_abs()).fold(0.0, f64::max));
        if iterate_norm > 1e14 {
            status = if primal_inf > 1e-4 { SolveStatus::Infeasible } else { SolveStatus::Numerical };
            break;
        }

        // NT scaling per block
        let mut scalings = Vec::with_capacity(nb);
        let mut scaling_ok = true;
        for b in 0..nb {
            match nt_scaling(&x[b], &s[b]) {
                Some(sc) => scalings.push(sc),
                None => {
                    scaling_ok = false;
                    break;
                }
            }
        }
        if !scaling_ok {
            status = SolveStatus::Numerical;
            break;
        }

        // Schur complement M = A (W . W) A^T
        let mut big = DMat::zeros(m + nf, m + nf);
        for b in 0..nb {
            let w = &scalings[b].w;
            let touching: Vec<usize> = (0..m)
                .filter(|&e| !problem.equalities[e].block_entries[b].is_empty())
                .collect();
            for &e in &touching {
                let v_e = congruence_sparse(w, &problem.equalities[e].block_entries[b]);
                for &e2 in &touching {
                    if e2 < e {
                        continue;
                    }
                    let val = sym_inner(&problem.equalities[e2].block_entries[b], &v_e);
                    big.add_at(e, e2, val);
                    if e2 != e {
                        big.add_at(e2, e, val);
                    }
                }
            }
        }
        for (e, row) in problem.equalities.iter().enumerate() {
            for &(k, v) in &row.free_entries {
                big.set(e, m + k, v);
                big.set(m + k, e, v);
            }
        }

        type Direction = (Vec<f64>, Vec<f64>, Vec<DMat>, Vec<DMat>);
        let solve_direction = |sigma_mu: f64, big: &DMat| -> Option<Direction> {
            // R_c per block
            let r_c: Vec<DMat> = (0..nb)
                .map(|b| {
                    let mut rc = scalings[b].s_inv.clone();
                    rc.scale(sigma_mu);
                    for i in 0..rc.data.len() {
                        rc.data[i] -= x[b].data[i];
                    }
                    rc
                })
                .collect();
            // rhs1 = r_p - A(R_c) - A(W R_d W)  [note: ΔS = R_d - A*Δy, so
            // ΔX = R_c - W ΔS W = R_c - W R_d W + W A*(Δy) W]
            let mut rhs = vec![0.0; m + nf];
            for (e, row) in problem.equalities.iter().enumerate() {
                let mut v = r_p[e];
                for (b, entries) in row.block_entries.iter().enumerate() {
                    if entries.is_empty() {
                        continue;
                    }
                    v -= sym_inner(entries, &r_c[b]);
                    let wrdw = congruence_sparse(&scalings[b].w, entries);
                    // <A_e, W R_d W> computed as <W A_e W, R_d>
                    v += wrdw.dot(&r_d[b]);
                }
                rhs[e] = v;
            }
            rhs[m..m + nf].copy_from_slice(&r_f);
            let sol = solve_refined(big, &rhs)?;
            let dy = sol[..m].to_vec();
            let df = sol[m..].to_vec();
            let mut ds: Vec<DMat> = r_d.clone();
            for (e, row) in problem.equalities.iter().enumerate() {
                let dye = dy[e];
                if dye == 0.0 {
                    continue;
                }
                for (b, entries) in row.block_entries.iter().enumerate() {
                    for &(i, j, v) in entries {
                        ds[b].add_at(i, j, -dye * v);
                        if i != j {
                            ds[b].add_at(j, i, -dye * v);
                        }
                    }
                }
            }
            let mut dx = Vec::with_capacity(nb);
            for b in 0..nb {
                let w = &scalings[b].w;
                let mut wdsw = w.matmul(&ds[b]).matmul(w);
                wdsw.symmetrize();
                let mut d = r_c[b].clone();
                for i in 0..d.data.len() {
                    d.data[i] -= wdsw.data[i];
                }
                d.symmetrize();
                dx.push(d);
            }
            Some((dy, df, dx, ds))
        };

        let sigma = if cfg.predictor_corrector && mu > 0.0 {
            // affine predictor to pick the centering weight
            match solve_direction(0.0, &big) {
                Some((_, _, dx_aff, ds_aff)) => {
                    let ap = (0..nb)
                        .map(|b| max_step(&x[b], &dx_aff[b], 1.0))
                        .fold(1.0f64, f64::min);
                    let ad = (0..nb)
                        .map(|b| max_step(&s[b], &ds_aff[b], 1.0))
                        .fold(1.0f64, f64::min);
                    let mut mu_aff = 0.0;
                    for b in 0..nb {
                        let mut xa = x[b].clone();
                        for i in 0..xa.data.len() {
                            xa.data[i] += ap * dx_aff[b].data[i];
                        }
                        let mut sa = s[b].clone();
                        for i in 0..sa.data.len() {
                            sa.data[i] += ad * ds_aff[b].data[i];
                        }
                        mu_aff += xa.dot(&sa);
                    }
                    mu_aff /= total_dim as f64;
                    ((mu_aff / mu).powi(3)).clamp(1e-4, 0.9)
                }
                None => cfg.sigma,
            }
        } else {
            cfg.sigma
        };

        let (dy, df, dx, ds) = match solve_direction(sigma * mu, &big) {
            Some(d) => d,
            None => {
                status = SolveStatus::Numerical;
                break;
            }
        };

        let alpha_p = (0..nb)
            .map(|b| max_step(&x[b], &dx[b], cfg.step_frac))
            .fold(1.0f64, f64::min);
        let alpha_d = (0..nb)
            .map(|b| max_step(&s[b], &ds[b], cfg.step_frac))
            .fold(1.0f64, f64::min);
        if alpha_p < 1e-10 && alpha_d < 1e-10 {
            status = SolveStatus::Numerical;
            break;
        }
        for b in 0..nb {
            for i in 0..x[b].data.len() {
                x[b].data[i] += alpha_p * dx[b].data[i];
            }
            for i in 0..s[b].data.len() {
                s[b].data[i] += alpha_d * ds[b].data[i];
            }
            x[b].symmetrize();
            s[b].symmetrize();
        }
        for (fi, di) in f.iter_mut().zip(&df) {
            *fi += alpha_p * di;
        }
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += alpha_d * di;
        }
    }

    let min_eig = x
        .iter()
        .map(crate::linalg::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    residuals.min_eig = if min_eig.is_finite() { min_eig } else { 0.0 };

    Ok(SdpSolution {
        blocks: x,
        free: f,
        dual: y,
        dual_blocks: s,
        status,
        iterations,
        primal_objective: primal_obj,
        dual_objective: dual_obj,
        residuals,
    })
}

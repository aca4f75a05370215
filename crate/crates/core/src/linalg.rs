//! Small dense linear algebra kernels: matrix type, Cholesky, LU solve and a
//! symmetric eigensolver (Householder tridiagonalization + implicit QL).
//!
//! Problem sizes in this crate stay below a few hundred rows, so everything
//! is dense row-major with no blocking.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        DMat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow.iter()) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> DMat {
        let mut out = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    /// Force exact symmetry by averaging with the transpose.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self.at(i, j) + self.at(j, i));
                self.set(i, j, v);
                self.set(j, i, v);
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).sum()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &DMat) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Returns `None` when a non-positive pivot is met.
pub fn cholesky(a: &DMat) -> Option<DMat> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = DMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.at(i, j);
            for k in 0..j {
                sum -= l.at(i, k) * l.at(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l.set(i, i, sum.sqrt());
            } else {
                l.set(i, j, sum / l.at(j, j));
            }
        }
    }
    Some(l)
}

/// Solve L x = b with L lower triangular.
pub fn forward_substitute(l: &DMat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l.at(i, k) * x[k];
        }
        x[i] /= l.at(i, i);
    }
    x
}

/// Solve Lᵀ x = b with L lower triangular.
pub fn backward_substitute_t(l: &DMat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l.at(k, i) * x[k];
        }
        x[i] /= l.at(i, i);
    }
    x
}

/// LU factorization with partial pivoting. Factors in place; returns the
/// pivot permutation, or `None` on exact singularity.
pub struct LuFactors {
    lu: DMat,
    piv: Vec<usize>,
}

pub fn lu_factor(a: &DMat) -> Option<LuFactors> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut max = lu.at(k, k).abs();
        for i in (k + 1)..n {
            let v = lu.at(i, k).abs();
            if v > max {
                max = v;
                p = i;
            }
        }
        if max == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = lu.at(k, j);
                lu.set(k, j, lu.at(p, j));
                lu.set(p, j, t);
            }
            piv.swap(k, p);
        }
        let pivot = lu.at(k, k);
        for i in (k + 1)..n {
            let f = lu.at(i, k) / pivot;
            lu.set(i, k, f);
            if f != 0.0 {
                for j in (k + 1)..n {
                    let v = lu.at(i, j) - f * lu.at(k, j);
                    lu.set(i, j, v);
                }
            }
        }
    }
    Some(LuFactors { lu, piv })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for k in 0..i {
                x[i] -= self.lu.at(i, k) * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu.at(i, k) * x[k];
            }
            x[i] /= self.lu.at(i, i);
        }
        x
    }
}

/// Solve A x = b by LU with one step of iterative refinement.
pub fn solve_refined(a: &DMat, b: &[f64]) -> Option<Vec<f64>> {
    let f = lu_factor(a)?;
    let mut x = f.solve(b);
    let ax = a.matvec(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    let dx = f.solve(&r);
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    Some(x)
}

/// Eigen decomposition of a real symmetric matrix.
///
/// Returns eigenvalues in ascending order and the orthogonal matrix whose
/// columns are the matching eigenvectors.
pub fn sym_eigen(a: &DMat) -> (Vec<f64>, DMat) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut z).expect("QL iteration failed to converge");
    sort_eigen(&mut d, &mut z);
    (d, z)
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (`e[i]` couples rows i and i+1).
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64]) -> (Vec<f64>, DMat) {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    let mut d = diag.to_vec();
    // tql2 expects the off-diagonal shifted so e[i] couples rows i-1 and i.
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(offdiag);
    let mut z = DMat::identity(n);
    tql2(&mut d, &mut e, &mut z).expect("QL iteration failed to converge");
    sort_eigen(&mut d, &mut z);
    (d, z)
}

fn sort_eigen(d: &mut [f64], z: &mut DMat) {
    let n = d.len();
    for i in 0..n {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..n {
                let t = z.at(r, i);
                z.set(r, i, z.at(r, k));
                z.set(r, k, t);
            }
        }
    }
}

/// Householder reduction to tridiagonal form, accumulating transformations.
fn tred2(a: &mut DMat, d: &mut [f64], e: &mut [f64]) {
    let n = a.rows;
    if n == 1 {
        d[0] = a.at(0, 0);
        e[0] = 0.0;
        a.set(0, 0, 1.0);
        return;
    }
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a.at(i, k).abs();
            }
            if scale == 0.0 {
                e[i] = a.at(i, l);
            } else {
                for k in 0..=l {
                    let v = a.at(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.at(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a.set(j, i, a.at(i, j) / h);
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a.at(j, k) * a.at(i, k);
                    }
                    for k in (j + 1)..=l {
                        g += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a.at(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a.at(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = a.at(j, k) - f * e[k] - g * a.at(i, k);
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.at(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a.at(i, k) * a.at(k, j);
                }
                for k in 0..i {
                    let v = a.at(k, j) - g * a.at(k, i);
                    a.set(k, j, v);
                }
            }
        }
        d[i] = a.at(i, i);
        a.set(i, i, 1.0);
        for j in 0..i {
            a.set(j, i, 0.0);
            a.set(i, j, 0.0);
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, rotating
/// the columns of `z` along with it. On entry `e[i]` couples rows i-1 and i.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut DMat) -> std::result::Result<(), ()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z.at(k, i + 1);
                    z.set(k, i + 1, s * z.at(k, i) + c * f);
                    z.set(k, i, c * z.at(k, i) - s * f);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMat) -> f64 {
    let (vals, _) = sym_eigen(a);
    vals[0]
}

//! Univariate polynomials in the Chebyshev basis of the first kind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use super::COEFF_EPS;

/// Default degree cap for univariate Chebyshev arithmetic.
pub const UNIVARIATE_DEGREE_CAP: usize = 200;

/// Weight of `T_k` in the integral over [-1, 1]: 0 for odd k, 2/(1-k^2)
/// for even k.
pub fn cheb_integral_weight(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        2.0 / (1.0 - (k * k) as f64)
    }
}

/// Polynomial `sum_k coeffs[k] * T_k(z)`. Trailing zeros are permitted in
/// storage and ignored by degree queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn zero() -> Self {
        ChebSeries { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        ChebSeries { coeffs: vec![c] }
    }

    /// The basis polynomial `T_k`.
    pub fn basis(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebSeries { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        ChebSeries { coeffs }
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.abs() >= COEFF_EPS)
            .unwrap_or(0)
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Clenshaw evaluation. Values outside [-1, 1] are permitted; callers
    /// that care should check the domain themselves.
    pub fn eval(&self, z: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * z * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + z * b1 - b2
    }

    pub fn add(&self, other: &ChebSeries) -> ChebSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = self.coefficient(i) + other.coefficient(i);
        }
        ChebSeries { coeffs }
    }

    pub fn scaled(&self, s: f64) -> ChebSeries {
        ChebSeries { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Product via the linearization `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2`.
    pub fn mul(&self, other: &ChebSeries) -> Result<ChebSeries> {
        let (da, db) = (self.degree(), other.degree());
        let out_degree = da + db;
        if out_degree > UNIVARIATE_DEGREE_CAP {
            return Err(Error::DegreeCapExceeded { cap: UNIVARIATE_DEGREE_CAP, needed: out_degree });
        }
        let mut coeffs = vec![0.0; out_degree + 1];
        for i in 0..=da {
            let a = self.coefficient(i);
            if a == 0.0 {
                continue;
            }
            for j in 0..=db {
                let b = other.coefficient(j);
                if b == 0.0 {
                    continue;
                }
                let w = 0.5 * a * b;
                coeffs[i + j] += w;
                coeffs[i.abs_diff(j)] += w;
            }
        }
        Ok(ChebSeries { coeffs })
    }

    /// Integral over [-1, 1].
    pub fn integral(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * cheb_integral_weight(k))
            .sum()
    }

    /// Change of basis from monomial coefficients `a_0..a_d` (meaning
    /// `sum a_k z^k`) to the Chebyshev basis.
    pub fn from_standard(monomial: &[f64]) -> ChebSeries {
        let mut coeffs = vec![0.0; monomial.len().max(1)];
        for (k, &a) in monomial.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, w) in monomial_in_cheb(k) {
                coeffs[j] += a * w;
            }
        }
        ChebSeries { coeffs }
    }

    /// Change of basis back to monomial coefficients.
    pub fn to_standard(&self) -> Vec<f64> {
        let d = self.degree();
        let mut out = vec![0.0; d + 1];
        // T_{k+1} = 2 z T_k - T_{k-1}
        let mut t_prev = vec![1.0]; // T_0
        let mut t_cur = vec![0.0, 1.0]; // T_1
        for k in 0..=d {
            let tk: &[f64] = match k {
                0 => &t_prev,
                1 => &t_cur,
                _ => {
                    let mut next = vec![0.0; k + 1];
                    for (i, &c) in t_cur.iter().enumerate() {
                        next[i + 1] += 2.0 * c;
                    }
                    for (i, &c) in t_prev.iter().enumerate() {
                        next[i] -= c;
                    }
                    t_prev = std::mem::take(&mut t_cur);
                    t_cur = next;
                    &t_cur
                }
            };
            let a = self.coefficient(k);
            if a != 0.0 {
                for (i, &c) in tk.iter().enumerate() {
                    out[i] += a * c;
                }
            }
        }
        out
    }

    /// Sum of absolute coefficients; an upper bound for the sup-norm on
    /// [-1, 1].
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Monomial coefficient rows of `T_0 .. T_max`: `rows[k][j]` is the
/// coefficient of `z^j` in `T_k(z)`.
pub fn chebyshev_monomial_rows(max: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(max + 1);
    rows.push(vec![1.0]);
    if max >= 1 {
        rows.push(vec![0.0, 1.0]);
    }
    for k in 2..=max {
        let mut next = vec![0.0; k + 1];
        for (j, &c) in rows[k - 1].iter().enumerate() {
            next[j + 1] += 2.0 * c;
        }
        for (j, &c) in rows[k - 2].iter().enumerate() {
            next[j] -= c;
        }
        rows.push(next);
    }
    rows
}

/// Expansion of the monomial `z^k` in the Chebyshev basis:
/// `z^k = 2^(1-k) * sum'' binom(k, (k-j)/2) T_j` over `j` with the parity
/// of `k`, where the `j = 0` term is halved. All weights are positive.
pub fn monomial_in_cheb(k: usize) -> Vec<(usize, f64)> {
    if k == 0 {
        return vec![(0, 1.0)];
    }
    let scale = (2.0f64).powi(1 - (k as i32));
    let mut out = Vec::with_capacity(k / 2 + 1);
    let mut j = k;
    loop {
        let m = (k - j) / 2;
        let mut w = scale * binom_f64(k, m);
        if j == 0 {
            w *= 0.5;
        }
        out.push((j, w));
        if j < 2 {
            break;
        }
        j -= 2;
    }
    out
}

fn binom_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_basis_values() {
        // T_2(0) = -1, T_5(1) = 1
        assert!((ChebSeries::basis(2).eval(0.0) + 1.0).abs() < 1e-15);
        assert!((ChebSeries::basis(5).eval(1.0) - 1.0).abs() < 1e-15);
        // 1 + 0.5 T_1 + 0.25 T_2 at 0.5: T_1 = 0.5, T_2 = -0.5
        let s = ChebSeries::from_coeffs(vec![1.0, 0.5, 0.25]);
        assert!((s.eval(0.5) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn product_rule() {
        // T_1 * T_2 = (T_3 + T_1) / 2
        let p = ChebSeries::basis(1).mul(&ChebSeries::basis(2)).unwrap();
        assert!((p.coefficient(3) - 0.5).abs() < 1e-15);
        assert!((p.coefficient(1) - 0.5).abs() < 1e-15);
        assert_eq!(p.coefficient(2), 0.0);

        // T_0 is the identity
        let a = ChebSeries::from_coeffs(vec![0.3, -0.2, 0.7]);
        let id = ChebSeries::basis(0).mul(&a).unwrap();
        for k in 0..3 {
            assert!((id.coefficient(k) - a.coefficient(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn t3_squared_on_grid() {
        // T_3 * T_3 = (T_6 + T_0) / 2, checked on a grid
        let p = ChebSeries::basis(3).mul(&ChebSeries::basis(3)).unwrap();
        let expect = ChebSeries::from_coeffs(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        for i in 0..50 {
            let z = -1.0 + 2.0 * (i as f64) / 49.0;
            assert!((p.eval(z) - expect.eval(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_weights() {
        assert!((ChebSeries::basis(0).integral() - 2.0).abs() < 1e-15);
        assert_eq!(ChebSeries::basis(1).integral(), 0.0);
        assert!((ChebSeries::basis(2).integral() + 2.0 / 3.0).abs() < 1e-15);
        // numeric quadrature of 2z^2 - 1 over [-1, 1] via Simpson
        let f = |z: f64| 2.0 * z * z - 1.0;
        let n = 1000;
        let h = 2.0 / n as f64;
        let mut q = f(-1.0) + f(1.0);
        for i in 1..n {
            let z = -1.0 + i as f64 * h;
            q += if i % 2 == 1 { 4.0 * f(z) } else { 2.0 * f(z) };
        }
        q *= h / 3.0;
        assert!((ChebSeries::basis(2).integral() - q).abs() < 1e-12);
    }

    #[test]
    fn standard_to_cheb_known() {
        // 2z^2 - 1 is exactly T_2
        let s = ChebSeries::from_standard(&[-1.0, 0.0, 2.0]);
        assert!((s.coefficient(0)).abs() < 1e-15);
        assert!((s.coefficient(1)).abs() < 1e-15);
        assert!((s.coefficient(2) - 1.0).abs() < 1e-15);
        // constants map to c * T_0
        let c = ChebSeries::from_standard(&[0.7]);
        assert!((c.coefficient(0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn roundtrip_degree_8() {
        let mono = [0.3, -1.2, 0.05, 2.0, -0.7, 0.11, -0.02, 1.5, -0.4];
        let back = ChebSeries::from_standard(&mono).to_standard();
        for (a, b) in mono.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let s = ChebSeries::from_coeffs(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(s.degree(), 1);
    }

    #[test]
    fn mul_degree_cap() {
        let a = ChebSeries::basis(150);
        let b = ChebSeries::basis(150);
        assert!(matches!(a.mul(&b), Err(Error::DegreeCapExceeded { .. })));
    }
}

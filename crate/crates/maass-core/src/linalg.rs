//! Small dense linear algebra for the collocation systems (a few dozen unknowns).

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factorisation with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for i in k + 1..n {
                let v = lu.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu.get(k, k);
            for i in k + 1..n {
                let f = lu.get(i, k) / piv;
                lu.set(i, k, f);
                if f != 0.0 {
                    for j in k + 1..n {
                        let v = lu.get(k, j);
                        lu.add(i, j, -f * v);
                    }
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    /// `(sign, ln |det|)`; sign is 0 for an exactly singular matrix.
    pub fn sign_log_det(&self) -> (f64, f64) {
        if self.singular {
            return (0.0, f64::NEG_INFINITY);
        }
        let mut s = self.sign;
        let mut l = 0.0;
        for k in 0..self.lu.rows {
            let d = self.lu.get(k, k);
            if d < 0.0 {
                s = -s;
            }
            l += d.abs().ln();
        }
        (s, l)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.singular {
            return Err(Error::Numerical {
                what: "singular linear system",
                estimate: f64::INFINITY,
            });
        }
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu.get(i, j) * x[j];
            }
            x[i] = s / self.lu.get(i, i);
        }
        Ok(x)
    }
}

/// 1-norm condition number through an explicit inverse (fine for n ≲ 100).
pub fn condition_estimate(a: &Matrix) -> f64 {
    let lu = Lu::new(a);
    if lu.singular {
        return f64::INFINITY;
    }
    let n = a.rows;
    let mut inv_norm: f64 = 0.0;
    let mut e = alloc::vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = lu.solve(&e).unwrap();
        inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
    }
    a.norm1() * inv_norm
}

/// Least-squares solution of `a x ≈ b` (rows ≥ cols) by Householder QR.
///
/// Returns the solution and the residual 2-norm.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::Contract("least squares needs rows >= cols"));
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    for k in 0..n {
        let norm: f64 = (k..m).map(|i| r.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Numerical {
                what: "rank-deficient least squares",
                estimate: 0.0,
            });
        }
        let alpha = if r.get(k, k) > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r.get(i, j)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                r.add(i, j, -f * v[i - k]);
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * y[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            y[i] -= f * v[i - k];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= r.get(i, j) * x[j];
        }
        x[i] = s / r.get(i, i);
    }
    let resid: f64 = y[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((x, resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Matrix {
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(
                    i,
                    j,
                    1.0 / (i + j + 1) as f64 + if i == j { 2.0 } else { 0.0 },
                );
            }
        }
        a
    }

    #[test]
    fn lu_solves_and_reports_determinant() {
        let a = sample(6);
        let x_true: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let b = a.mul_vec(&x_true);
        let lu = Lu::new(&a);
        let x = lu.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-13);
        }
        let mut m = Matrix::zeros(2, 2);
        m.data = alloc::vec![0.0, 2.0, 3.0, 1.0];
        let (s, l) = Lu::new(&m).sign_log_det();
        assert_eq!(s, -1.0);
        assert!((l - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let mut a = Matrix::zeros(8, 3);
        for i in 0..8 {
            for j in 0..3 {
                a.set(i, j, ((i + 1) as f64).powi(j as i32));
            }
        }
        let x_true = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true);
        let (x, res) = least_squares(&a, &b).unwrap();
        assert!(res < 1e-12);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn condition_of_identity_is_one() {
        let mut a = Matrix::zeros(4, 4);
        for i in 0..4 {
            a.set(i, i, 1.0);
        }
        assert!((condition_estimate(&a) - 1.0).abs() < 1e-15);
    }
}

//! Small square integer matrices: the action of a torus map on `ℤ^n`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) as f64 * v[j]).sum())
            .collect()
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn apply_ratio(&self, v: &[Ratio<i64>]) -> Vec<Ratio<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Ratio::zero(), |acc, j| acc + v[j] * self.get(i, j)))
            .collect()
    }

    /// `Mᵀ v` over the integers.
    pub fn transpose_apply_i64(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }

    pub fn transpose_apply_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) as f64 * v[i]).sum())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Self { n, data }
    }

    /// Max row sum of absolute values (operator norm for the sup norm).
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|v| v.unsigned_abs() as f64).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖M − I‖_∞`.
    pub fn inf_norm_minus_identity(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (self.get(i, j) - i64::from(i == j)).unsigned_abs() as f64)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn det(&self) -> i64 {
        // Bareiss fraction-free elimination.
        let n = self.n;
        let mut m: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k * n + k] == 0 {
                match (k + 1..n).find(|&r| m[r * n + k] != 0) {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] =
                        (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
                }
            }
            prev = m[k * n + k];
        }
        (sign * m[(n - 1) * n + (n - 1)]) as i64
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    /// Inverse over `ℤ`; fails unless `|det| = 1`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unimodular() {
            return Err(Error::InvalidMatrix(format!(
                "determinant {} is not ±1",
                self.det()
            )));
        }
        let n = self.n;
        let one = Ratio::<i128>::one();
        let mut a: Vec<Ratio<i128>> = self
            .data
            .iter()
            .map(|&v| Ratio::from_integer(v as i128))
            .collect();
        let mut inv: Vec<Ratio<i128>> = (0..n * n)
            .map(|idx| {
                if idx / n == idx % n {
                    one
                } else {
                    Ratio::zero()
                }
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or_else(|| {
                    Error::Internal("singular matrix passed determinant check".into())
                })?;
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                    inv.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a[col * n + col];
            for c in 0..n {
                a[col * n + c] /= p;
                inv[col * n + c] /= p;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r * n + col];
                    if !f.is_zero() {
                        for c in 0..n {
                            let (ac, ic) = (a[col * n + c], inv[col * n + c]);
                            a[r * n + c] -= f * ac;
                            inv[r * n + c] -= f * ic;
                        }
                    }
                }
            }
        }
        let data = inv
            .into_iter()
            .map(|v| {
                if v.is_integer() {
                    i64::try_from(v.to_integer())
                        .map_err(|_| Error::InvalidMatrix("inverse entry overflow".into()))
                } else {
                    Err(Error::Internal(
                        "non-integral inverse of unimodular matrix".into(),
                    ))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, data })
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_determinant_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(m.det(), 1);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.rows(), vec![vec![1, 0], vec![-1, 1]]);
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn cat_map_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        let p = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(p.det(), 1);
        assert!(p.mul(&p.inverse().unwrap()).is_identity());
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(m.det(), 2);
        assert!(m.inverse().is_err());
    }

    #[test]
    fn transpose_apply() {
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(m.transpose_apply_i64(&[1, 0]), vec![1, 0]);
        assert_eq!(m.transpose_apply_i64(&[0, 1]), vec![1, 1]);
    }
}

//! Real trigonometric polynomials on the torus.
//!
//! `f(x) = c + Σ_k (a_k cos 2π⟨k,x⟩ + b_k sin 2π⟨k,x⟩)` with integer frequency
//! vectors `k`. These drive the skew-product fiber functions, the cochain
//! perturbations and the default test functions of the invariance check.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    dim: usize,
    constant: f64,
    terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn new(dim: usize, constant: f64, terms: Vec<TrigTerm>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "trigonometric polynomial of dimension 0".into(),
            ));
        }
        for t in &terms {
            check_dim(dim, t.freq.len())?;
            if !(t.cos.is_finite() && t.sin.is_finite()) {
                return Err(Error::InvalidParameter(
                    "non-finite trigonometric coefficient".into(),
                ));
            }
        }
        if !constant.is_finite() {
            return Err(Error::InvalidParameter("non-finite constant term".into()));
        }
        Ok(Self {
            dim,
            constant,
            terms,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            constant: 0.0,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            dim,
            constant: value,
            terms: Vec::new(),
        }
    }

    /// One-variable polynomial `c + Σ_k cos[k-1] cos 2πkx + sin[k-1] sin 2πkx`.
    pub fn fourier_1d(constant: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        let modes = cos.len().max(sin.len());
        let terms = (0..modes)
            .map(|i| TrigTerm {
                freq: vec![i as i64 + 1],
                cos: cos.get(i).copied().unwrap_or(0.0),
                sin: sin.get(i).copied().unwrap_or(0.0),
            })
            .collect();
        Self::new(1, constant, terms)
    }

    /// `amplitude · sin 2π x_axis` on the `dim`-torus.
    pub fn sin_mode(dim: usize, axis: usize, amplitude: f64) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidParameter(format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut freq = vec![0; dim];
        freq[axis] = 1;
        Self::new(
            dim,
            0.0,
            vec![TrigTerm {
                freq,
                cos: 0.0,
                sin: amplitude,
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    fn phase(freq: &[i64], x: &[f64]) -> f64 {
        TAU * freq
            .iter()
            .zip(x)
            .map(|(&k, &xi)| k as f64 * xi)
            .sum::<f64>()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(self.constant, |acc, t| {
            let p = Self::phase(&t.freq, x);
            acc + t.cos * p.cos() + t.sin * p.sin()
        })
    }

    /// Directional derivative `∇f(x)·w`.
    pub fn derivative(&self, x: &[f64], w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let p = Self::phase(&t.freq, x);
                let kw: f64 = t.freq.iter().zip(w).map(|(&k, &wi)| k as f64 * wi).sum();
                TAU * kw * (t.sin * p.cos() - t.cos * p.sin())
            })
            .sum()
    }

    /// Upper bound on `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs()
            + self
                .terms
                .iter()
                .map(|t| t.cos.abs() + t.sin.abs())
                .sum::<f64>()
    }

    /// Lipschitz constant with respect to the sup norm on the cover.
    pub fn lipschitz(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k1: i64 = t.freq.iter().map(|k| k.abs()).sum();
                TAU * k1 as f64 * (t.cos.abs() + t.sin.abs())
            })
            .sum()
    }

    /// Integral over the unit cube; only the constant mode survives.
    pub fn mean(&self) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .filter(|t| t.freq.iter().all(|&k| k == 0))
                .map(|t| t.cos)
                .sum::<f64>()
    }

    /// Low-order test functions `sin 2π⟨k,x⟩`, `cos 2π⟨k,x⟩` for `k` with
    /// entries in {-1,0,1} and at most two nonzero entries.
    pub fn default_test_functions(dim: usize) -> Vec<TrigPolynomial> {
        let mut freqs: Vec<Vec<i64>> = Vec::new();
        for i in 0..dim {
            let mut k = vec![0; dim];
            k[i] = 1;
            freqs.push(k.clone());
            k[i] = 2;
            freqs.push(k);
            for j in (i + 1)..dim {
                for s in [1, -1] {
                    let mut k = vec![0; dim];
                    k[i] = 1;
                    k[j] = s;
                    freqs.push(k);
                }
            }
        }
        freqs
            .into_iter()
            .flat_map(|freq| {
                [(1.0, 0.0), (0.0, 1.0)]
                    .into_iter()
                    .map(move |(c, s)| TrigPolynomial {
                        dim,
                        constant: 0.0,
                        terms: vec![TrigTerm {
                            freq: freq.clone(),
                            cos: c,
                            sin: s,
                        }],
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let f = TrigPolynomial::new(
            2,
            0.3,
            vec![
                TrigTerm {
                    freq: vec![1, 0],
                    cos: 0.2,
                    sin: -0.1,
                },
                TrigTerm {
                    freq: vec![1, -2],
                    cos: 0.05,
                    sin: 0.4,
                },
            ],
        )
        .unwrap();
        let x = [0.17, 0.61];
        let w = [0.3, -0.8];
        let h = 1e-6;
        let fd = (f.eval(&[x[0] + h * w[0], x[1] + h * w[1]])
            - f.eval(&[x[0] - h * w[0], x[1] - h * w[1]]))
            / (2.0 * h);
        assert!((fd - f.derivative(&x, &w)).abs() < 1e-7);
    }

    #[test]
    fn fourier_1d_matches_direct_formula() {
        let c = TrigPolynomial::fourier_1d(0.3, &[], &[0.1]).unwrap();
        let x = 0.125;
        assert!((c.eval(&[x]) - (0.3 + 0.1 * (TAU * x).sin())).abs() < 1e-15);
        assert_eq!(c.mean(), 0.3);
        assert!((c.sup_bound() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_frequency_length() {
        let r = TrigPolynomial::new(
            2,
            0.0,
            vec![TrigTerm {
                freq: vec![1],
                cos: 1.0,
                sin: 0.0,
            }],
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}

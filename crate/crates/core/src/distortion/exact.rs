use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::BundleAutomorphism;
use crate::error::{check_dim, Error, Result};
use crate::matrix::IntMatrix;
use crate::torus::LiftedMap;

/// `(x̃, k) ↦ (M x̃ + v, k + c)` with exact rational `v` and `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactAffineAutomorphism {
    pub matrix: IntMatrix,
    pub translation: Vec<Rational64>,
    pub fiber_shift: Rational64,
}

impl ExactAffineAutomorphism {
    pub fn new(
        matrix: IntMatrix,
        translation: Vec<Rational64>,
        fiber_shift: Rational64,
    ) -> Result<Self> {
        check_dim(matrix.dim(), translation.len())?;
        if !matrix.is_unimodular() {
            return Err(Error::InvalidMatrix(format!(
                "determinant {} is not ±1",
                matrix.det()
            )));
        }
        Ok(Self {
            matrix,
            translation,
            fiber_shift,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: IntMatrix::identity(dim),
            translation: vec![Rational64::zero(); dim],
            fiber_shift: Rational64::zero(),
        }
    }

    pub fn fiber_translation(dim: usize, r: Rational64) -> Self {
        Self {
            fiber_shift: r,
            ..Self::identity(dim)
        }
    }

    pub fn rotation(v: &[Rational64]) -> Self {
        Self {
            translation: v.to_vec(),
            ..Self::identity(v.len())
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn preserves(&self, a: &[i64]) -> bool {
        a.len() == self.dim() && self.matrix.transpose_apply_i64(a) == a
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let moved = self.matrix.apply_ratio(&other.translation);
        Ok(Self {
            matrix: self.matrix.mul(&other.matrix),
            translation: moved
                .iter()
                .zip(&self.translation)
                .map(|(m, v)| m + v)
                .collect(),
            fiber_shift: self.fiber_shift + other.fiber_shift,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.matrix.inverse()?;
        let t = inv
            .apply_ratio(&self.translation)
            .into_iter()
            .map(|v| -v)
            .collect();
        Ok(Self {
            matrix: inv,
            translation: t,
            fiber_shift: -self.fiber_shift,
        })
    }

    /// Representative with translation in `[0,1)ⁿ`: the deck relation
    /// `(ỹ, k) ~ (ỹ − m, k + ⟨a, m⟩)` moves `⌊v⌋` into the fiber shift.
    pub fn canonical(&self, a: &[i64]) -> Result<Self> {
        check_dim(self.dim(), a.len())?;
        let mut fiber = self.fiber_shift;
        let translation = self
            .translation
            .iter()
            .zip(a)
            .map(|(v, ai)| {
                let m = v.floor();
                fiber += m * Rational64::from_integer(*ai);
                v - m
            })
            .collect();
        Ok(Self {
            matrix: self.matrix.clone(),
            translation,
            fiber_shift: fiber,
        })
    }

    pub fn to_bundle_automorphism(&self) -> Result<BundleAutomorphism> {
        let v: Vec<f64> = self
            .translation
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect();
        let base = if self.matrix.is_identity() {
            LiftedMap::rotation(&v)?
        } else {
            LiftedMap::affine(self.matrix.clone(), &v)?
        };
        Ok(BundleAutomorphism::new(
            base,
            self.fiber_shift.to_f64().unwrap_or(f64::NAN),
        ))
    }
}

impl fmt::Display for ExactAffineAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.translation.iter().map(|r| r.to_string()).collect();
        write!(
            f,
            "({:?}, [{}], {})",
            self.matrix.rows(),
            v.join(", "),
            self.fiber_shift
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn half_shifts_compose_to_unit_shift() {
        let h = ExactAffineAutomorphism::fiber_translation(2, q(1, 2));
        let t = h.compose(&h).unwrap();
        assert_eq!(t, ExactAffineAutomorphism::fiber_translation(2, q(1, 1)));
    }

    #[test]
    fn inverse_and_shear_products() {
        let shear = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let f = ExactAffineAutomorphism::new(shear, vec![q(1, 3), q(-2, 5)], q(7, 2)).unwrap();
        assert_eq!(
            f.compose(&f.inverse().unwrap()).unwrap(),
            ExactAffineAutomorphism::identity(2)
        );
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.matrix.rows(), vec![vec![1, 2], vec![0, 1]]);
        assert_eq!(ff.translation, vec![q(1, 3) + q(-2, 5) + q(1, 3), q(-4, 5)]);
    }

    #[test]
    fn canonical_form_identifies_r_cubed_with_unit_shift() {
        let r = ExactAffineAutomorphism::rotation(&[q(1, 3), q(0, 1)]);
        let r3 = r.compose(&r).unwrap().compose(&r).unwrap();
        let a = [1, 0];
        assert_eq!(
            r3.canonical(&a).unwrap(),
            ExactAffineAutomorphism::fiber_translation(2, q(1, 1))
        );
    }

    #[test]
    fn rejects_non_unimodular() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(ExactAffineAutomorphism::new(m, vec![q(0, 1); 2], q(0, 1)).is_err());
    }
}

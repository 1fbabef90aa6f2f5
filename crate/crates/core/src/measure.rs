//! Probability measures on the torus and integration against them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::CompensatedSum;
use crate::error::{check_dim, Error, Result};
use crate::torus::{LiftedMap, TorusPoint};
use crate::trig::TrigPolynomial;

/// Largest tensor grid the Lebesgue quadrature will evaluate.
pub const MAX_GRID_POINTS: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InvariantMeasure {
    Lebesgue {
        dim: usize,
    },
    /// `(1/q) Σ_{i<q} δ_{gⁱ(x)}`; `orbit` holds the `q` atoms.
    DiracOrbit {
        point: TorusPoint,
        period: usize,
        orbit: Vec<TorusPoint>,
    },
    Empirical {
        points: Vec<TorusPoint>,
        weights: Vec<f64>,
    },
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

impl InvariantMeasure {
    pub fn lebesgue(dim: usize) -> Self {
        Self::Lebesgue { dim }
    }

    /// Uniform measure on the first `period` points of the orbit of `x` under `g`.
    pub fn dirac_orbit(g: &LiftedMap, x: &TorusPoint, period: usize) -> Result<Self> {
        check_dim(g.dim(), x.dim())?;
        if period == 0 {
            return Err(Error::InvalidMeasure(
                "orbit period must be at least 1".into(),
            ));
        }
        let mut orbit = Vec::with_capacity(period);
        let mut cur = x.clone();
        for _ in 0..period {
            orbit.push(cur.clone());
            cur = TorusPoint::new(&g.apply(cur.coords()));
        }
        Ok(Self::DiracOrbit {
            point: x.clone(),
            period,
            orbit,
        })
    }

    pub fn empirical(points: Vec<TorusPoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure(
                "empirical measure needs at least one atom".into(),
            ));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(Error::InvalidMeasure("atoms of differing dimension".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self::Empirical { points, weights })
    }

    /// Equal weights on the given atoms.
    pub fn uniform_atoms(points: Vec<TorusPoint>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        // equal weights may miss 1 by a few ulps; renormalize the last one
        let mut weights = weights;
        if let Some(last) = weights.last_mut() {
            *last = 1.0 - w * (points.len() - 1) as f64;
        }
        Self::empirical(points, weights)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Lebesgue { dim } => *dim,
            Self::DiracOrbit { point, .. } => point.dim(),
            Self::Empirical { points, .. } => points[0].dim(),
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self, Self::Lebesgue { .. })
    }

    /// `∫ f dμ`. For Lebesgue measure this is the tensor midpoint rule on
    /// `points_per_axis` points per axis, with a Richardson estimate from the
    /// half-resolution grid; atomic measures are summed exactly.
    pub fn integrate<F>(&self, f: F, points_per_axis: usize) -> Result<Quadrature>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        match self {
            Self::Lebesgue { dim } => {
                if points_per_axis < 2 || !points_per_axis.is_multiple_of(2) {
                    return Err(Error::InvalidParameter(format!(
                        "Lebesgue quadrature needs an even number of points per axis ≥ 2, got {points_per_axis}"
                    )));
                }
                let fine = midpoint_rule(&f, *dim, points_per_axis)?;
                let coarse = midpoint_rule(&f, *dim, points_per_axis / 2)?;
                let total =
                    points_per_axis.pow(*dim as u32) + (points_per_axis / 2).pow(*dim as u32);
                // midpoint rule is second order: E_N ≈ (Q_N − Q_{N/2}) / 3
                let err = (fine - coarse).abs() / 3.0 + 4.0 * f64::EPSILON * fine.abs();
                Ok(Quadrature {
                    value: fine,
                    error_bound: err,
                    evaluations: total,
                })
            }
            Self::DiracOrbit { orbit, .. } => {
                let s: CompensatedSum = orbit.iter().map(|p| f(p.coords())).collect();
                Ok(Quadrature {
                    value: s.value() / orbit.len() as f64,
                    error_bound: 0.0,
                    evaluations: orbit.len(),
                })
            }
            Self::Empirical { points, weights } => {
                let s: CompensatedSum = points
                    .iter()
                    .zip(weights)
                    .map(|(p, w)| w * f(p.coords()))
                    .collect();
                Ok(Quadrature {
                    value: s.value(),
                    error_bound: 0.0,
                    evaluations: points.len(),
                })
            }
        }
    }
}

fn midpoint_rule<F>(f: &F, dim: usize, n: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total = n
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "quadrature grid {n}^{dim} exceeds {MAX_GRID_POINTS} points"
            ))
        })?;
    let h = 1.0 / n as f64;
    const CHUNK: usize = 4096;
    // fixed chunking keeps the summation order independent of thread scheduling
    let partial: Vec<f64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0.0; dim];
            let mut s = CompensatedSum::default();
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut r = idx;
                for xi in x.iter_mut() {
                    *xi = ((r % n) as f64 + 0.5) * h;
                    r /= n;
                }
                s.add(f(&x));
            }
            s.value()
        })
        .collect();
    let s: CompensatedSum = partial.into_iter().collect();
    Ok(s.value() / total as f64)
}

/// `max_f |∫ f∘g dμ − ∫ f dμ|` over the test functions.
pub fn measure_invariance_residual(
    g: &LiftedMap,
    mu: &InvariantMeasure,
    test_functions: &[TrigPolynomial],
    points_per_axis: usize,
) -> Result<f64> {
    check_dim(g.dim(), mu.dim())?;
    if test_functions.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one test function is required".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for f in test_functions {
        check_dim(mu.dim(), f.dim())?;
        let diff = mu.integrate(
            |x| f.eval(TorusPoint::new(&g.apply(x)).coords()) - f.eval(x),
            points_per_axis,
        )?;
        worst = worst.max(diff.value.abs());
    }
    Ok(worst)
}

/// Invariance residual against the default low-order test functions.
pub fn default_invariance_residual(
    g: &LiftedMap,
    mu: &InvariantMeasure,
    points_per_axis: usize,
) -> Result<f64> {
    measure_invariance_residual(
        g,
        mu,
        &TrigPolynomial::default_test_functions(mu.dim()),
        points_per_axis,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;
    use std::f64::consts::TAU;

    #[test]
    fn lebesgue_integrates_trig_polynomial() {
        let mu = InvariantMeasure::lebesgue(2);
        let q = mu
            .integrate(
                |x| 0.3 + 0.1 * (TAU * x[0]).sin() + (TAU * (x[0] + x[1])).cos(),
                16,
            )
            .unwrap();
        assert!((q.value - 0.3).abs() < 1e-14);
        assert!(q.error_bound < 1e-14);
    }

    #[test]
    fn lebesgue_error_estimate_tracks_nonperiodic_integrand() {
        let mu = InvariantMeasure::lebesgue(1);
        let q = mu.integrate(|x| x[0] * x[0], 64).unwrap();
        let true_err = (q.value - 1.0 / 3.0).abs();
        assert!(
            true_err <= 1.01 * q.error_bound,
            "{true_err} vs {}",
            q.error_bound
        );
    }

    #[test]
    fn empirical_weights_validated() {
        let p = vec![TorusPoint::new(&[0.1]), TorusPoint::new(&[0.2])];
        assert!(InvariantMeasure::empirical(p.clone(), vec![0.5, 0.6]).is_err());
        assert!(InvariantMeasure::empirical(p.clone(), vec![-0.5, 1.5]).is_err());
        assert!(InvariantMeasure::empirical(p, vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn dirac_orbit_rejects_zero_period() {
        let g = LiftedMap::rotation(&[0.5]).unwrap();
        assert!(InvariantMeasure::dirac_orbit(&g, &TorusPoint::new(&[0.1]), 0).is_err());
    }

    #[test]
    fn invariance_residual_examples() {
        let rot = LiftedMap::rotation(&[0.3819660112501051]).unwrap();
        let leb = InvariantMeasure::lebesgue(1);
        assert!(default_invariance_residual(&rot, &leb, 64).unwrap() < 1e-13);

        let half = LiftedMap::rotation(&[0.5]).unwrap();
        let orbit = InvariantMeasure::dirac_orbit(&half, &TorusPoint::new(&[0.125]), 2).unwrap();
        assert_eq!(default_invariance_residual(&half, &orbit, 2).unwrap(), 0.0);

        // x ↦ ⌊x⌋ + frac(x)², a degree-one circle homeomorphism that is not Lebesgue-preserving
        let square = LiftedMap::custom("square", IntMatrix::identity(1), None, |x: &[f64]| {
            let fl = x[0].floor();
            vec![fl + (x[0] - fl).powi(2)]
        })
        .unwrap();
        let sin = TrigPolynomial::sin_mode(1, 0, 1.0).unwrap();
        let r = measure_invariance_residual(&square, &leb, &[sin], 1024).unwrap();
        assert!(r > 0.1, "residual {r}");
    }
}

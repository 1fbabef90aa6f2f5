//! Homological translation vectors of isotopies from the identity.
//!
//! A class `a` is read as the circle-valued function `φ(x) = ⟨a, x⟩ mod 1`, and
//! `Δ_φ` of a path is the winding of `φ` along it, computed from the lift.

use serde::{Deserialize, Serialize};

use crate::convergence::{ConvergenceReport, Verdict};
use crate::dynamics::{orbit_average, BundleAutomorphism, LocalOptions, MeanOptions};
use crate::error::{check_dim, Error, Result};
use crate::measure::{default_invariance_residual, InvariantMeasure};
use crate::torus::{require_preserves, CohomologyClass, LiftedMap, TorusPoint};
use crate::trig::TrigPolynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IsotopyFamily {
    Identity {
        dim: usize,
    },
    /// `x + t v`
    Linear {
        v: Vec<f64>,
    },
    /// `(x + tω, y + t c(x))`
    Skew {
        omega: f64,
        c: TrigPolynomial,
    },
    /// `(x + tε sin 2πy, y)`
    SinusoidalShear {
        epsilon: f64,
    },
}

/// An isotopy `{g_t}` from the identity, given by its lift `(t, x̃) ↦ g̃_t(x̃)`.
#[derive(Clone, Debug)]
pub struct Isotopy {
    family: IsotopyFamily,
    terminal: LiftedMap,
}

impl Isotopy {
    pub fn new(family: IsotopyFamily) -> Result<Self> {
        let terminal = match &family {
            IsotopyFamily::Identity { dim } => LiftedMap::identity(*dim),
            IsotopyFamily::Linear { v } => LiftedMap::rotation(v)?,
            IsotopyFamily::Skew { omega, c } => LiftedMap::skew_product(*omega, c.clone())?,
            IsotopyFamily::SinusoidalShear { epsilon } => LiftedMap::sinusoidal_shear(*epsilon)?,
        };
        Ok(Self { family, terminal })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(IsotopyFamily::Identity { dim }).expect("identity isotopy is valid")
    }

    pub fn linear(v: &[f64]) -> Result<Self> {
        Self::new(IsotopyFamily::Linear { v: v.to_vec() })
    }

    pub fn skew(omega: f64, c: TrigPolynomial) -> Result<Self> {
        Self::new(IsotopyFamily::Skew { omega, c })
    }

    pub fn sinusoidal_shear(epsilon: f64) -> Result<Self> {
        Self::new(IsotopyFamily::SinusoidalShear { epsilon })
    }

    pub fn family(&self) -> &IsotopyFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.terminal.dim()
    }

    /// `g̃_1`.
    pub fn terminal(&self) -> &LiftedMap {
        &self.terminal
    }

    /// `g̃_t(x̃)`.
    pub fn lift(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let d = self.displacement(x);
        x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect()
    }

    /// `g̃_1(x̃) − x̃` in closed form. Every built-in family moves points along
    /// straight lines, so `g̃_t(x̃) = x̃ + t·displacement(x̃)`.
    pub fn displacement(&self, x: &[f64]) -> Vec<f64> {
        match &self.family {
            IsotopyFamily::Identity { dim } => vec![0.0; *dim],
            IsotopyFamily::Linear { v } => v.clone(),
            IsotopyFamily::Skew { omega, c } => vec![*omega, c.eval(&x[..1])],
            IsotopyFamily::SinusoidalShear { epsilon } => {
                vec![epsilon * (std::f64::consts::TAU * x[1]).sin(), 0.0]
            }
        }
    }

    /// Bundle lift of the endpoint reached continuously from the identity;
    /// in this model it is the map with fiber shift 0.
    pub fn endpoint_automorphism(&self) -> BundleAutomorphism {
        BundleAutomorphism::new(self.terminal.clone(), 0.0)
    }

    /// The arc `t ↦ g̃_t(x̃)` sampled at `samples + 1` equally spaced times.
    pub fn arc(&self, x: &[f64], samples: usize) -> Result<LiftPath> {
        check_dim(self.dim(), x.len())?;
        let m = samples.max(1);
        LiftPath::new((0..=m).map(|j| self.lift(j as f64 / m as f64, x)).collect())
    }
}

/// A path on the torus, stored as one of its lifts to `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftPath {
    points: Vec<Vec<f64>>,
}

impl LiftPath {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidParameter(
                "a path needs at least one point".into(),
            ));
        };
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: points.iter().map(Vec::len).find(|&l| l != d).unwrap_or(d),
            });
        }
        Ok(Self { points })
    }

    pub fn constant(x: &[f64]) -> Self {
        Self {
            points: vec![x.to_vec()],
        }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        self.points.last().expect("nonempty path")
    }

    /// `self ∗ other`, translating `other` by the integer vector that makes it
    /// start where `self` ends. The two must meet on the torus.
    pub fn concat(&self, other: &LiftPath) -> Result<LiftPath> {
        check_dim(self.start().len(), other.start().len())?;
        let shift: Vec<f64> = self
            .end()
            .iter()
            .zip(other.start())
            .map(|(e, s)| (e - s).round())
            .collect();
        let gap = self
            .end()
            .iter()
            .zip(other.start())
            .zip(&shift)
            .map(|((e, s), m)| (e - s - m).abs())
            .fold(0.0, f64::max);
        if gap > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "paths do not meet on the torus (gap {gap:e})"
            )));
        }
        let mut points = self.points.clone();
        points.extend(
            other.points[1..]
                .iter()
                .map(|p| p.iter().zip(&shift).map(|(x, m)| x + m).collect()),
        );
        Ok(LiftPath { points })
    }
}

/// `Δ_φ(γ) = ⟨a, γ̃(1) − γ̃(0)⟩`.
pub fn delta_phi(a: &CohomologyClass, path: &LiftPath) -> Result<f64> {
    check_dim(a.dim(), path.start().len())?;
    let d: Vec<f64> = path
        .end()
        .iter()
        .zip(path.start())
        .map(|(e, s)| e - s)
        .collect();
    Ok(a.pair(&d))
}

/// `h_{x,g̃}([φ]) = lim Δ_φ({g_t(x)} ∗ {g_t(g(x))} ∗ ⋯)/n`, with the same
/// stopping rules as the local translation number.
pub fn homological_translation(
    a: &CohomologyClass,
    iso: &Isotopy,
    x: &TorusPoint,
    opts: &LocalOptions,
) -> Result<ConvergenceReport> {
    check_dim(a.dim(), iso.dim())?;
    let g = iso.endpoint_automorphism();
    orbit_average(a, &g, x, opts, |cur, _| a.pair(&iso.displacement(cur)))
}

/// `h_{μ,g̃}([φ]) = ∫ Δ_φ({g_t(x)}) dμ(x)`.
pub fn mean_homological_translation(
    a: &CohomologyClass,
    iso: &Isotopy,
    mu: &InvariantMeasure,
    opts: &MeanOptions,
) -> Result<ConvergenceReport> {
    check_dim(a.dim(), iso.dim())?;
    check_dim(a.dim(), mu.dim())?;
    require_preserves(iso.terminal(), a)?;
    let q = mu.integrate(|x| a.pair(&iso.displacement(x)), opts.quadrature_points)?;
    let check_points = if mu.is_lebesgue() {
        opts.quadrature_points.min(64)
    } else {
        2
    };
    let residual = default_invariance_residual(iso.terminal(), mu, check_points)?;
    let mut rep = ConvergenceReport::converged(q.value, q.error_bound, q.evaluations);
    if q.error_bound.is_nan() || q.error_bound > opts.tolerance {
        rep.verdict = Verdict::NotConverged;
    }
    rep.invariance_residual = Some(residual);
    rep.non_invariant = residual > opts.invariance_tolerance;
    Ok(rep)
}

//! Bundle automorphisms and their translation numbers.
//!
//! With the standard primitive `θ([x̃, k]) = ⟨a, x̃⟩ + k`, the displacement of an
//! automorphism `ĝ = (g̃, c)` at `x` is `ρ_x(ĝ) = ⟨a, g̃(x̃) − x̃⟩ + c`, independent
//! of the lift `x̃` whenever `Mᵀa = a`. Iterates accumulate through the cocycle
//! identity `ρ_x(ĝⁿ) = Σ_{i<n} ρ_{gⁱx}(ĝ)` with the orbit reduced to `[0,1)ⁿ`
//! after every step, so the lift never drifts.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::convergence::{ConvergenceReport, Verdict, WindowedMean};
use crate::error::{check_dim, Error, Result};
use crate::measure::{default_invariance_residual, InvariantMeasure};
use crate::torus::{
    require_preserves, torus_distance, BundlePoint, Coefficients, CohomologyClass, LiftedMap,
    TorusPoint,
};
use crate::trig::TrigPolynomial;

/// An element `ĝ` of the automorphism group of the bundle: `(x̃, k) ↦ (g̃(x̃), k + c)`.
#[derive(Clone, Debug)]
pub struct BundleAutomorphism {
    pub base: LiftedMap,
    pub fiber_shift: f64,
}

impl BundleAutomorphism {
    pub fn new(base: LiftedMap, fiber_shift: f64) -> Self {
        Self { base, fiber_shift }
    }

    /// The central element `T_r`.
    pub fn fiber_translation(dim: usize, r: f64) -> Self {
        Self {
            base: LiftedMap::identity(dim),
            fiber_shift: r,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn apply(&self, p: &BundlePoint) -> BundlePoint {
        BundlePoint {
            cover: self.base.apply(&p.cover),
            fiber: p.fiber + self.fiber_shift,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BundleAutomorphism) -> Result<BundleAutomorphism> {
        Ok(Self {
            base: self.base.compose(&other.base)?,
            fiber_shift: self.fiber_shift + other.fiber_shift,
        })
    }

    pub fn inverse(&self) -> Result<BundleAutomorphism> {
        Ok(Self {
            base: self.base.inverse()?,
            fiber_shift: -self.fiber_shift,
        })
    }

    pub fn power(&self, k: i64) -> Result<BundleAutomorphism> {
        Ok(Self {
            base: self.base.power(k)?,
            fiber_shift: self.fiber_shift * k as f64,
        })
    }

    /// `self ∘ T_r`.
    pub fn then_translate(&self, r: f64) -> BundleAutomorphism {
        Self {
            base: self.base.clone(),
            fiber_shift: self.fiber_shift + r,
        }
    }
}

/// The standard primitive `θ([x̃, k]) = ⟨a, x̃⟩ + k`.
pub fn theta(a: &CohomologyClass, p: &BundlePoint) -> Result<f64> {
    check_dim(a.dim(), p.cover.len())?;
    Ok(a.pair(&p.cover) + p.fiber)
}

fn displacement(a: &CohomologyClass, g: &BundleAutomorphism, cover: &[f64], image: &[f64]) -> f64 {
    let d: Vec<f64> = image.iter().zip(cover).map(|(y, x)| y - x).collect();
    a.pair(&d) + g.fiber_shift
}

/// `ρ_{x,α}(ĝ) = θ(ĝ(x̂)) − θ(x̂)`.
pub fn rho(a: &CohomologyClass, g: &BundleAutomorphism, x: &TorusPoint) -> Result<f64> {
    rho_at_lift(a, g, x.coords())
}

/// `ρ` evaluated at an arbitrary lift `x̃` of the base point.
pub fn rho_at_lift(a: &CohomologyClass, g: &BundleAutomorphism, cover: &[f64]) -> Result<f64> {
    check_dim(a.dim(), cover.len())?;
    require_preserves(&g.base, a)?;
    Ok(displacement(a, g, cover, &g.base.apply(cover)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOptions {
    pub max_iterations: usize,
    /// Window-doubling tolerance.
    pub tolerance: f64,
    /// Torus distance under which the orbit counts as returned.
    pub orbit_tolerance: f64,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-9,
            orbit_tolerance: 1e-10,
        }
    }
}

impl LocalOptions {
    /// `1e-9` for maps with closed-form iterates, `1e-6` otherwise.
    pub fn for_map(g: &LiftedMap) -> Self {
        let closed_form = matches!(g.family(), "identity" | "rotation" | "affine");
        Self {
            tolerance: if closed_form { 1e-9 } else { 1e-6 },
            ..Self::default()
        }
    }
}

/// Tolerance on the distance of a fiber displacement to the nearest integer.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Local translation number `lim ρ_x(ĝⁿ)/n`.
///
/// Stops early with [`Verdict::ExactPeriodic`] when the base orbit returns and
/// the class is integral with an integral total fiber displacement. Running
/// out of iterations yields [`Verdict::NotConverged`], not an error.
pub fn local_translation_number(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    opts: &LocalOptions,
) -> Result<ConvergenceReport> {
    let mut report = orbit_average(a, g, x, opts, |cur, next| displacement(a, g, cur, next))?;
    report.gk_variant = gk_variant(a, g, x, &report);
    Ok(report)
}

/// Local translation number for the representative `α + dβ`.
pub fn local_translation_number_perturbed(
    a: &CohomologyClass,
    beta: &CochainPerturbation,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    opts: &LocalOptions,
) -> Result<ConvergenceReport> {
    check_dim(a.dim(), beta.beta.dim())?;
    orbit_average(a, g, x, opts, |cur, next| {
        displacement(a, g, cur, next) + beta.beta.eval(next) - beta.beta.eval(cur)
    })
}

pub(crate) fn orbit_average<F>(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    opts: &LocalOptions,
    step: F,
) -> Result<ConvergenceReport>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    check_dim(a.dim(), x.dim())?;
    require_preserves(&g.base, a)?;
    if opts.max_iterations < 2 {
        return Err(Error::InvalidParameter(
            "max_iterations must be at least 2".into(),
        ));
    }
    let integral = a.kind() == Coefficients::Integer;
    let start = x.coords();
    let mut cur = start.to_vec();
    let mut window = WindowedMean::new(opts.tolerance);
    for _ in 0..opts.max_iterations {
        let image = g.base.apply(&cur);
        let rho = step(&cur, &image);
        let converged = window.push(rho);
        let next = TorusPoint::new(&image);
        if integral && torus_distance(next.coords(), start) <= opts.orbit_tolerance {
            let total = window.total();
            let n = total.round();
            if (total - n).abs() <= INTEGRALITY_TOLERANCE {
                let q = window.count();
                let mut rep = ConvergenceReport::exact(n as i64, q as u64, q);
                rep.period = Some(q);
                return Ok(rep);
            }
        }
        if let Some(rep) = converged {
            return Ok(rep);
        }
        cur = next.coords().to_vec();
    }
    Ok(window.exhausted())
}

/// `θ'(ĝᴺ(x̂))/N` for `θ' = θ + ψ`, where `ψ` is locally constant on the bundle
/// (it depends only on the fiber coordinate modulo the period lattice `dℤ`)
/// but unbounded, so `θ'` still has `dθ' = π*α` while breaking
/// `θ'(T_r x̂) = θ'(x̂) + r`. For `A = ℤ` the fiber coordinate takes finitely many
/// values mod `d` and the limit agrees with the translation number; for real
/// shifts it need not.
fn gk_variant(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    rep: &ConvergenceReport,
) -> Option<f64> {
    let d = a.period_generator()? as f64;
    let n = rep.iterations as f64;
    if n == 0.0 {
        return None;
    }
    let t = (n * g.fiber_shift).rem_euclid(d);
    let psi = if t == 0.0 {
        0.0
    } else {
        (PI * (t / d - 0.5)).tan()
    };
    Some((a.pair(x.coords()) + rep.value * n + psi) / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanOptions {
    /// Lebesgue quadrature points per axis (even).
    pub quadrature_points: usize,
    /// Error bound above which the verdict is `NotConverged`.
    pub tolerance: f64,
    /// Invariance residual above which the report is flagged.
    pub invariance_tolerance: f64,
}

impl Default for MeanOptions {
    fn default() -> Self {
        Self {
            quadrature_points: 256,
            tolerance: 1e-6,
            invariance_tolerance: 1e-6,
        }
    }
}

/// Mean translation number `∫ ρ_x(ĝ) dμ(x)`.
pub fn mean_translation_number(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    mu: &InvariantMeasure,
    opts: &MeanOptions,
) -> Result<ConvergenceReport> {
    check_dim(a.dim(), mu.dim())?;
    require_preserves(&g.base, a)?;
    let q = mu.integrate(
        |x| displacement(a, g, x, &g.base.apply(x)),
        opts.quadrature_points,
    )?;
    let check_points = if mu.is_lebesgue() {
        opts.quadrature_points.min(64)
    } else {
        2
    };
    let residual = default_invariance_residual(&g.base, mu, check_points)?;
    let mut rep = ConvergenceReport::converged(q.value, q.error_bound, q.evaluations);
    if q.error_bound.is_nan() || q.error_bound > opts.tolerance {
        rep.verdict = Verdict::NotConverged;
    }
    rep.invariance_residual = Some(residual);
    rep.non_invariant = residual > opts.invariance_tolerance;
    Ok(rep)
}

/// Result of [`periodic_rot`]: `numerator / period` with the rounding residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicRotation {
    pub displacement: i64,
    pub period: usize,
    pub value: Ratio<i64>,
    pub residual: f64,
}

/// Default return tolerance for [`periodic_rot`].
pub const PERIODIC_TOLERANCE: f64 = 1e-10;

/// Rotation number at a point of period `q`: `n/q` where `ĝ^q(x̂) = T_n(x̂)`.
pub fn periodic_rot(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    q: usize,
) -> Result<PeriodicRotation> {
    periodic_rot_with_tolerance(a, g, x, q, PERIODIC_TOLERANCE)
}

pub fn periodic_rot_with_tolerance(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    x: &TorusPoint,
    q: usize,
    tolerance: f64,
) -> Result<PeriodicRotation> {
    check_dim(a.dim(), x.dim())?;
    require_preserves(&g.base, a)?;
    if a.kind() != Coefficients::Integer {
        return Err(Error::InvalidClass(
            "periodic rotation numbers need integer coefficients".into(),
        ));
    }
    if q == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    let mut cur = x.coords().to_vec();
    let mut total = crate::convergence::CompensatedSum::default();
    for _ in 0..q {
        let image = g.base.apply(&cur);
        total.add(displacement(a, g, &cur, &image));
        cur = TorusPoint::new(&image).coords().to_vec();
    }
    let distance = torus_distance(&cur, x.coords());
    if distance > tolerance {
        return Err(Error::NotPeriodic {
            period: q,
            distance,
        });
    }
    let s = total.value();
    let n = s.round();
    if (s - n).abs() > INTEGRALITY_TOLERANCE {
        return Err(Error::NonIntegralDisplacement { displacement: s });
    }
    Ok(PeriodicRotation {
        displacement: n as i64,
        period: q,
        value: Ratio::new(n as i64, q as i64),
        residual: s - n,
    })
}

/// A bounded function `β` on the torus; `α + dβ` is another representative of `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CochainPerturbation {
    pub beta: TrigPolynomial,
    pub sup_bound: f64,
}

impl CochainPerturbation {
    pub fn new(beta: TrigPolynomial) -> Self {
        let sup_bound = beta.sup_bound();
        Self { beta, sup_bound }
    }
}

/// `ρ` for the representative `α + dβ`: `ρ_x(ĝ) + β(g(x)) − β(x)`.
pub fn perturbed_rho(
    a: &CohomologyClass,
    beta: &CochainPerturbation,
    g: &BundleAutomorphism,
    x: &TorusPoint,
) -> Result<f64> {
    check_dim(a.dim(), beta.beta.dim())?;
    let r = rho(a, g, x)?;
    let gx = g.base.apply(x.coords());
    Ok(r + beta.beta.eval(&gx) - beta.beta.eval(x.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;

    fn class(v: &[i64]) -> CohomologyClass {
        CohomologyClass::integer(v).unwrap()
    }

    fn rot(v: &[f64], c: f64) -> BundleAutomorphism {
        BundleAutomorphism::new(LiftedMap::rotation(v).unwrap(), c)
    }

    #[test]
    fn theta_examples() {
        let a = class(&[1, 0]);
        let p = BundlePoint::new(&[0.25, 0.7], 0.0);
        assert_eq!(theta(&a, &p).unwrap(), 0.25);
        assert_eq!(theta(&a, &p.translate_fiber(2.0)).unwrap(), 2.25);
        assert_eq!(
            theta(&a, &BundlePoint::new(&[1.25, 0.7], -1.0)).unwrap(),
            0.25
        );
    }

    #[test]
    fn rho_examples() {
        let a = class(&[1]);
        assert!(
            (rho(&a, &rot(&[0.3], 0.0), &TorusPoint::new(&[0.77])).unwrap() - 0.3).abs() < 1e-15
        );
        let t = BundleAutomorphism::fiber_translation(1, 2.5);
        assert_eq!(rho(&a, &t, &TorusPoint::new(&[0.4])).unwrap(), 2.5);

        let a2 = class(&[1, 0]);
        let shear = BundleAutomorphism::new(LiftedMap::sinusoidal_shear(0.1).unwrap(), 0.0);
        let r = rho(&a2, &shear, &TorusPoint::new(&[0.0, 0.25])).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rho_requires_preserved_class() {
        let shear = LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            &[0.0, 0.0],
        )
        .unwrap();
        let g = BundleAutomorphism::new(shear, 0.0);
        let err = rho(&class(&[0, 1]), &g, &TorusPoint::new(&[0.1, 0.1])).unwrap_err();
        assert!(matches!(err, Error::ClassNotPreserved { .. }));
    }

    #[test]
    fn rho_is_lift_independent() {
        let a = class(&[1, 0]);
        let shear = LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            &[0.2, 0.3],
        )
        .unwrap();
        let g = BundleAutomorphism::new(shear, 0.7);
        let x = [0.31, 0.82];
        let r0 = rho_at_lift(&a, &g, &x).unwrap();
        for m in [[1.0, 0.0], [-2.0, 3.0], [5.0, -1.0]] {
            let r = rho_at_lift(&a, &g, &[x[0] + m[0], x[1] + m[1]]).unwrap();
            assert!((r - r0).abs() < 1e-13);
        }
    }

    #[test]
    fn local_rotation_examples() {
        let a = class(&[1]);
        let x = TorusPoint::new(&[0.1]);
        let opts = LocalOptions::default();

        let r = local_translation_number(&a, &rot(&[0.5], 0.0), &x, &opts).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::ExactPeriodic {
                numerator: 1,
                denominator: 2
            }
        );
        assert_eq!(r.value, 0.5);

        let arnold = BundleAutomorphism::new(LiftedMap::arnold(0.0, 0.9).unwrap(), 0.0);
        let r = local_translation_number(&a, &arnold, &TorusPoint::new(&[0.0]), &opts).unwrap();
        assert!(r.is_converged());
        assert_eq!(r.value, 0.0);

        // 0.3 = 3/10: the orbit closes after ten steps with displacement 3
        let r = local_translation_number(&a, &rot(&[0.3], 0.0), &x, &opts).unwrap();
        assert_eq!(r.value, 0.3);
        assert!(r.is_converged());
    }

    #[test]
    fn local_not_converged_is_a_report() {
        // Arnold map in a non-locked regime converges slowly; four iterations cannot settle
        let a = class(&[1]);
        let g = BundleAutomorphism::new(LiftedMap::arnold(0.3819660112501051, 0.5).unwrap(), 0.0);
        let opts = LocalOptions {
            max_iterations: 4,
            tolerance: 1e-12,
            orbit_tolerance: 1e-10,
        };
        let r = local_translation_number(&a, &g, &TorusPoint::new(&[0.2]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::NotConverged);
        assert_eq!(r.iterations, 4);
        assert!(r.last_windows.is_some());
    }

    #[test]
    fn local_rejects_tiny_budget() {
        let a = class(&[1]);
        let opts = LocalOptions {
            max_iterations: 1,
            ..Default::default()
        };
        assert!(
            local_translation_number(&a, &rot(&[0.1], 0.0), &TorusPoint::new(&[0.0]), &opts)
                .is_err()
        );
    }

    #[test]
    fn gk_variant_agrees_for_integer_shifts() {
        let a = class(&[1]);
        let g = rot(&[0.3819660112501051], 2.0);
        let r =
            local_translation_number(&a, &g, &TorusPoint::new(&[0.1]), &LocalOptions::default())
                .unwrap();
        let v = r.gk_variant.unwrap();
        // bounded correction: (θ(x̂) + ψ)/N with ψ = 0 for integral shifts
        assert!((v - r.value).abs() <= 1.0 / r.iterations as f64 + 1e-12);
    }

    #[test]
    fn mean_examples() {
        let c = TrigPolynomial::fourier_1d(0.3, &[], &[0.1]).unwrap();
        let skew =
            BundleAutomorphism::new(LiftedMap::skew_product(0.6180339887498949, c).unwrap(), 0.0);
        let a = class(&[0, 1]);
        let r = mean_translation_number(
            &a,
            &skew,
            &InvariantMeasure::lebesgue(2),
            &MeanOptions::default(),
        )
        .unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        assert!(!r.non_invariant);

        let t = BundleAutomorphism::fiber_translation(2, -1.5);
        let r = mean_translation_number(
            &a,
            &t,
            &InvariantMeasure::lebesgue(2),
            &MeanOptions::default(),
        )
        .unwrap();
        assert_eq!(r.value, -1.5);

        let half = rot(&[0.5], 0.0);
        let mu = InvariantMeasure::dirac_orbit(&half.base, &TorusPoint::new(&[0.2]), 2).unwrap();
        let r = mean_translation_number(&class(&[1]), &half, &mu, &MeanOptions::default()).unwrap();
        assert_eq!(r.value, 0.5);
        assert!(r.invariance_residual.unwrap() <= 1e-15);
    }

    #[test]
    fn mean_flags_non_invariant_measure() {
        let a = class(&[1]);
        let g = BundleAutomorphism::new(LiftedMap::arnold(0.1, 0.8).unwrap(), 0.0);
        let r = mean_translation_number(
            &a,
            &g,
            &InvariantMeasure::lebesgue(1),
            &MeanOptions::default(),
        )
        .unwrap();
        assert!(r.non_invariant);
    }

    #[test]
    fn periodic_rot_examples() {
        let a = class(&[1]);
        let x = TorusPoint::new(&[0.3]);
        let p = periodic_rot(&a, &rot(&[0.5], 0.0), &x, 2).unwrap();
        assert_eq!(p.value, Ratio::new(1, 2));

        let id = BundleAutomorphism::new(LiftedMap::identity(1), 3.0);
        assert_eq!(
            periodic_rot(&a, &id, &x, 1).unwrap().value,
            Ratio::from_integer(3)
        );

        let p = periodic_rot(&a, &rot(&[0.4], 0.0), &x, 5).unwrap();
        assert_eq!(p.value, Ratio::new(2, 5));
        assert_eq!(p.displacement, 2);

        assert!(matches!(
            periodic_rot(&a, &rot(&[0.4], 0.0), &x, 3),
            Err(Error::NotPeriodic { .. })
        ));
        assert!(matches!(
            periodic_rot(&a, &rot(&[0.5], 0.25), &x, 2),
            Err(Error::NonIntegralDisplacement { .. })
        ));
    }

    #[test]
    fn perturbed_rho_examples() {
        let a = class(&[1]);
        let g = rot(&[0.25], 0.0);
        let x = TorusPoint::new(&[0.0]);
        let zero = CochainPerturbation::new(TrigPolynomial::zero(1));
        assert_eq!(
            perturbed_rho(&a, &zero, &g, &x).unwrap(),
            rho(&a, &g, &x).unwrap()
        );

        let beta = CochainPerturbation::new(TrigPolynomial::sin_mode(1, 0, 0.2).unwrap());
        assert!((perturbed_rho(&a, &beta, &g, &x).unwrap() - 0.45).abs() < 1e-15);

        // telescoping over the period-4 orbit
        let mut cur = x.clone();
        let (mut plain, mut pert) = (0.0, 0.0);
        for _ in 0..4 {
            plain += rho(&a, &g, &cur).unwrap();
            pert += perturbed_rho(&a, &beta, &g, &cur).unwrap();
            cur = TorusPoint::new(&g.base.apply(cur.coords()));
        }
        assert!((plain - pert).abs() < 1e-14);
    }
}

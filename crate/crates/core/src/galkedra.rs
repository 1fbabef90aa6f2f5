//! The Gal–Kędra two-cocycle `𝔊_{x,α}(g, h) = ∫_x^{h(x)} g*α − α` on the group
//! of class-preserving torus maps, and residual checks of the identities that
//! tie it to the displacement function `ρ`.
//!
//! Sign convention for group coboundaries (trivial coefficients):
//! `δρ(ĝ, ĥ) = ρ(ĥ) − ρ(ĝĥ) + ρ(ĝ)`, so `p*𝔊 = −δρ` reads
//! `𝔊(g, h) = ρ(ĝĥ) − ρ(ĝ) − ρ(ĥ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{rho, BundleAutomorphism};
use crate::error::{check_dim, Error, Result};
use crate::measure::{default_invariance_residual, InvariantMeasure, Quadrature};
use crate::torus::{require_preserves, CohomologyClass, LiftedMap, TorusPoint};

/// Step (in the path parameter) of the central difference used when a map
/// has no analytic derivative.
pub const FINITE_DIFFERENCE_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EvaluationMethod {
    ClosedForm,
    Quadrature { segments: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleEvaluation {
    pub value: f64,
    pub method: EvaluationMethod,
    pub base_point: TorusPoint,
    /// Richardson error estimate (quadrature only; zero for the closed form).
    pub error_estimate: f64,
}

/// `𝔊_{x,α}(g, h)` in closed form: `⟨a, g̃(h̃x̃) − g̃(x̃)⟩ − ⟨a, h̃x̃ − x̃⟩`.
pub fn gal_kedra(a: &CohomologyClass, g: &LiftedMap, h: &LiftedMap, x: &TorusPoint) -> Result<f64> {
    gal_kedra_at_lift(a, g, h, x.coords())
}

/// Closed form evaluated at an arbitrary lift of the base point.
pub fn gal_kedra_at_lift(
    a: &CohomologyClass,
    g: &LiftedMap,
    h: &LiftedMap,
    cover: &[f64],
) -> Result<f64> {
    check_dim(a.dim(), cover.len())?;
    require_preserves(g, a)?;
    require_preserves(h, a)?;
    let hx = h.apply(cover);
    let ghx = g.apply(&hx);
    let gx = g.apply(cover);
    let pulled: Vec<f64> = ghx.iter().zip(&gx).map(|(u, v)| u - v).collect();
    let plain: Vec<f64> = hx.iter().zip(cover).map(|(u, v)| u - v).collect();
    Ok(a.pair(&pulled) - a.pair(&plain))
}

/// Composite-midpoint line integral of `g*α − α` along the straight segment
/// from `x̃` to `h̃(x̃)`; an oracle independent of [`gal_kedra`].
pub fn gal_kedra_quadrature(
    a: &CohomologyClass,
    g: &LiftedMap,
    h: &LiftedMap,
    x: &TorusPoint,
    segments: usize,
) -> Result<f64> {
    check_dim(a.dim(), x.dim())?;
    require_preserves(g, a)?;
    require_preserves(h, a)?;
    if segments == 0 {
        return Err(Error::InvalidParameter(
            "at least one segment is required".into(),
        ));
    }
    let start = x.coords();
    let end = h.apply(start);
    let dir: Vec<f64> = end.iter().zip(start).map(|(e, s)| e - s).collect();
    let plain = a.pair(&dir);
    let point = |t: f64| -> Vec<f64> { start.iter().zip(&dir).map(|(s, d)| s + t * d).collect() };
    let pushed = |t: f64| -> f64 {
        let p = point(t);
        let v = match g.derivative(&p, &dir) {
            Some(v) => v,
            None => {
                let step = FINITE_DIFFERENCE_STEP;
                let (fwd, bwd) = (g.apply(&point(t + step)), g.apply(&point(t - step)));
                fwd.iter()
                    .zip(&bwd)
                    .map(|(u, w)| (u - w) / (2.0 * step))
                    .collect()
            }
        };
        a.pair(&v)
    };
    let width = 1.0 / segments as f64;
    let total: crate::convergence::CompensatedSum = (0..segments)
        .map(|j| pushed((j as f64 + 0.5) * width) - plain)
        .collect();
    Ok(total.value() * width)
}

/// Evaluate `𝔊_{x,α}(g, h)` by the chosen method.
pub fn evaluate(
    a: &CohomologyClass,
    g: &LiftedMap,
    h: &LiftedMap,
    x: &TorusPoint,
    method: EvaluationMethod,
) -> Result<CocycleEvaluation> {
    let (value, error_estimate) = match method {
        EvaluationMethod::ClosedForm => (gal_kedra(a, g, h, x)?, 0.0),
        EvaluationMethod::Quadrature { segments } => {
            let fine = gal_kedra_quadrature(a, g, h, x, segments)?;
            let coarse = gal_kedra_quadrature(a, g, h, x, (segments / 2).max(1))?;
            (fine, (fine - coarse).abs() / 3.0)
        }
    };
    Ok(CocycleEvaluation {
        value,
        method,
        base_point: x.clone(),
        error_estimate,
    })
}

/// `δρ(ĝ, ĥ) = ρ(ĥ) − ρ(ĝĥ) + ρ(ĝ)`.
pub fn rho_coboundary(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    h: &BundleAutomorphism,
    x: &TorusPoint,
) -> Result<f64> {
    let gh = g.compose(h)?;
    Ok(rho(a, h, x)? - rho(a, &gh, x)? + rho(a, g, x)?)
}

/// `|𝔊(p(ĝ), p(ĥ)) + δρ(ĝ, ĥ)|`, the residual of `p*𝔊 = −δρ`.
pub fn coboundary_residual(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    h: &BundleAutomorphism,
    x: &TorusPoint,
) -> Result<f64> {
    let gk = gal_kedra(a, &g.base, &h.base, x)?;
    Ok((gk + rho_coboundary(a, g, h, x)?).abs())
}

/// `|δ𝔊(g, h, k)| = |𝔊(h,k) − 𝔊(gh,k) + 𝔊(g,hk) − 𝔊(g,h)|`.
pub fn cocycle_residual(
    a: &CohomologyClass,
    g: &LiftedMap,
    h: &LiftedMap,
    k: &LiftedMap,
    x: &TorusPoint,
) -> Result<f64> {
    let gh = g.compose(h)?;
    let hk = h.compose(k)?;
    let d = gal_kedra(a, h, k, x)? - gal_kedra(a, &gh, k, x)? + gal_kedra(a, g, &hk, x)?
        - gal_kedra(a, g, h, x)?;
    Ok(d.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingOptions {
    pub pairs: usize,
    pub max_word_length: usize,
    pub seed: u64,
    /// Lebesgue quadrature points per axis.
    pub quadrature_points: usize,
    pub invariance_tolerance: f64,
    /// Base point of `ρ` in the primitive residual.
    pub base_point: Option<TorusPoint>,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        Self {
            pairs: 100,
            max_word_length: 3,
            seed: 0,
            quadrature_points: 64,
            invariance_tolerance: 1e-6,
            base_point: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    /// `F(ŝ)` for each generator, `F` = mean translation number.
    pub generator_values: Vec<f64>,
    pub generator_invariance: Vec<f64>,
    /// `max |F(ĝĥ) − F(ĝ) − F(ĥ)|` over the sampled pairs.
    pub splitting_residual: f64,
    /// `max |F(ĝ T_r) − F(ĝ) − r|`.
    pub central_residual: f64,
    /// `max |𝔊(g,h) + δu(ĝ,ĥ)|` with `u = ρ_x − F`, a function on the base group.
    pub primitive_residual: f64,
    /// Largest quadrature error estimate encountered.
    pub quadrature_error: f64,
    pub pairs: usize,
}

fn mean_rho(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    mu: &InvariantMeasure,
    points: usize,
) -> Result<Quadrature> {
    require_preserves(&g.base, a)?;
    mu.integrate(
        |x| {
            let y = g.base.apply(x);
            let d: Vec<f64> = y.iter().zip(x).map(|(u, v)| u - v).collect();
            a.pair(&d) + g.fiber_shift
        },
        points,
    )
}

/// Symmetrized alphabet: every generator plus its inverse when one exists.
pub(crate) fn alphabet(generators: &[BundleAutomorphism]) -> Vec<BundleAutomorphism> {
    let mut out = Vec::with_capacity(2 * generators.len());
    for s in generators {
        out.push(s.clone());
        if let Ok(inv) = s.inverse() {
            out.push(inv);
        }
    }
    out
}

pub(crate) fn random_word(
    alphabet: &[BundleAutomorphism],
    max_len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BundleAutomorphism> {
    let len = rng.random_range(1..=max_len.max(1));
    let mut w = alphabet[rng.random_range(0..alphabet.len())].clone();
    for _ in 1..len {
        w = w.compose(&alphabet[rng.random_range(0..alphabet.len())])?;
    }
    Ok(w)
}

/// Check that the mean translation number splits the central extension over
/// the subgroup generated by `generators`: it must be additive, restrict to
/// the identity on the center, and turn `𝔊` into a coboundary.
pub fn splitting_check(
    a: &CohomologyClass,
    generators: &[BundleAutomorphism],
    mu: &InvariantMeasure,
    opts: &SplittingOptions,
) -> Result<SplittingReport> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one generator is required".into(),
        ));
    }
    check_dim(a.dim(), mu.dim())?;
    let check_points = if mu.is_lebesgue() {
        opts.quadrature_points.min(64)
    } else {
        2
    };
    let mut generator_values = Vec::new();
    let mut generator_invariance = Vec::new();
    let mut quadrature_error: f64 = 0.0;
    for s in generators {
        check_dim(a.dim(), s.dim())?;
        let residual = default_invariance_residual(&s.base, mu, check_points)?;
        if residual > opts.invariance_tolerance {
            return Err(Error::NonInvariantMeasure {
                map: s.base.family().to_string(),
                residual,
            });
        }
        let f = mean_rho(a, s, mu, opts.quadrature_points)?;
        quadrature_error = quadrature_error.max(f.error_bound);
        generator_values.push(f.value);
        generator_invariance.push(residual);
    }
    let letters = alphabet(generators);
    let x = opts
        .base_point
        .clone()
        .unwrap_or_else(|| TorusPoint::origin(a.dim()));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut split, mut central, mut primitive): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..opts.pairs {
        let g = random_word(&letters, opts.max_word_length, &mut rng)?;
        let h = random_word(&letters, opts.max_word_length, &mut rng)?;
        let gh = g.compose(&h)?;
        let (fg, fh, fgh) = (
            mean_rho(a, &g, mu, opts.quadrature_points)?,
            mean_rho(a, &h, mu, opts.quadrature_points)?,
            mean_rho(a, &gh, mu, opts.quadrature_points)?,
        );
        quadrature_error = quadrature_error
            .max(fg.error_bound)
            .max(fh.error_bound)
            .max(fgh.error_bound);
        split = split.max((fgh.value - fg.value - fh.value).abs());

        let r: f64 = rng.random_range(-3.0..3.0);
        let shifted = mean_rho(a, &g.then_translate(r), mu, opts.quadrature_points)?;
        central = central.max((shifted.value - fg.value - r).abs());

        let u = |rho_val: f64, f: f64| rho_val - f;
        let (ug, uh, ugh) = (
            u(rho(a, &g, &x)?, fg.value),
            u(rho(a, &h, &x)?, fh.value),
            u(rho(a, &gh, &x)?, fgh.value),
        );
        let delta_u = uh - ugh + ug;
        primitive = primitive.max((gal_kedra(a, &g.base, &h.base, &x)? + delta_u).abs());
    }
    Ok(SplittingReport {
        generator_values,
        generator_invariance,
        splitting_residual: split,
        central_residual: central,
        primitive_residual: primitive,
        quadrature_error,
        pairs: opts.pairs,
    })
}

/// `max |δρ(ĝ, ĥ)|` over random pairs of words in the generators: a lower
/// estimate of the defect of `ρ_x` as a quasimorphism on the generated group.
pub fn quasimorphism_defect(
    a: &CohomologyClass,
    generators: &[BundleAutomorphism],
    x: &TorusPoint,
    samples: usize,
    max_word_length: usize,
    seed: u64,
) -> Result<f64> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one generator is required".into(),
        ));
    }
    let letters = alphabet(generators);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let g = random_word(&letters, max_word_length, &mut rng)?;
        let h = random_word(&letters, max_word_length, &mut rng)?;
        worst = worst.max(rho_coboundary(a, &g, &h, x)?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;
    use crate::trig::TrigPolynomial;

    fn a10() -> CohomologyClass {
        CohomologyClass::integer(&[1, 0]).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let a = a10();
        let id = LiftedMap::identity(2);
        let shear = LiftedMap::sinusoidal_shear(0.1).unwrap();
        let up = LiftedMap::rotation(&[0.0, 0.25]).unwrap();
        let x = TorusPoint::origin(2);
        assert_eq!(gal_kedra(&a, &id, &shear, &x).unwrap(), 0.0);
        assert_eq!(gal_kedra(&a, &shear, &id, &x).unwrap(), 0.0);
        assert!((gal_kedra(&a, &shear, &up, &x).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn quadrature_examples() {
        let a = a10();
        let shear = LiftedMap::sinusoidal_shear(0.1).unwrap();
        let up = LiftedMap::rotation(&[0.0, 0.25]).unwrap();
        let x = TorusPoint::origin(2);
        assert!(
            gal_kedra_quadrature(&a, &LiftedMap::identity(2), &shear, &x, 10)
                .unwrap()
                .abs()
                < 1e-12
        );
        let q = gal_kedra_quadrature(&a, &shear, &up, &x, 10_000).unwrap();
        assert!((q - 0.1).abs() < 1e-6);
        let rot = LiftedMap::rotation(&[0.3, 0.7]).unwrap();
        assert!(gal_kedra_quadrature(&a, &rot, &up, &x, 7).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quadrature_without_analytic_derivative() {
        let a = a10();
        let analytic = LiftedMap::sinusoidal_shear(0.1).unwrap();
        let eps = 0.1;
        let bare = LiftedMap::custom(
            "shear-fd",
            IntMatrix::identity(2),
            None,
            move |x: &[f64]| vec![x[0] + eps * (std::f64::consts::TAU * x[1]).sin(), x[1]],
        )
        .unwrap();
        assert!(!bare.has_derivative());
        let h = LiftedMap::rotation(&[0.1, 0.4]).unwrap();
        let x = TorusPoint::new(&[0.2, 0.05]);
        let exact = gal_kedra(&a, &analytic, &h, &x).unwrap();
        let fd = gal_kedra_quadrature(&a, &bare, &h, &x, 4000).unwrap();
        assert!((exact - fd).abs() < 1e-6, "{exact} vs {fd}");
    }

    #[test]
    fn quadrature_error_decays_quadratically() {
        let a = a10();
        let g = LiftedMap::sinusoidal_shear(0.2).unwrap();
        let h = LiftedMap::rotation(&[0.1, 0.45]).unwrap();
        let x = TorusPoint::new(&[0.0, 0.1]);
        let exact = gal_kedra(&a, &g, &h, &x).unwrap();
        let e1 = (gal_kedra_quadrature(&a, &g, &h, &x, 50).unwrap() - exact).abs();
        let e2 = (gal_kedra_quadrature(&a, &g, &h, &x, 100).unwrap() - exact).abs();
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "ratio {}", e1 / e2);
        let est = evaluate(
            &a,
            &g,
            &h,
            &x,
            EvaluationMethod::Quadrature { segments: 100 },
        )
        .unwrap();
        assert!(e2 <= 1.5 * est.error_estimate);
    }

    #[test]
    fn coboundary_examples() {
        let a = a10();
        let x = TorusPoint::new(&[0.3, 0.6]);
        let g = LiftedMap::sinusoidal_shear(0.15).unwrap();
        let h = LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![2, 1]]).unwrap(),
            &[0.2, 0.1],
        )
        .unwrap();
        let r0 = coboundary_residual(
            &a,
            &BundleAutomorphism::new(g.clone(), 0.0),
            &BundleAutomorphism::new(h.clone(), 0.0),
            &x,
        )
        .unwrap();
        let r1 = coboundary_residual(
            &a,
            &BundleAutomorphism::new(g, 2.5),
            &BundleAutomorphism::new(h, -1.3),
            &x,
        )
        .unwrap();
        assert!(r0 <= 1e-12 && r1 <= 1e-12);
        let t = BundleAutomorphism::fiber_translation(2, 0.7);
        assert_eq!(gal_kedra(&a, &t.base, &t.base, &x).unwrap(), 0.0);
        assert!(rho_coboundary(&a, &t, &t, &x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cocycle_degenerate_slots() {
        let a = a10();
        let x = TorusPoint::new(&[0.1, 0.2]);
        let g = LiftedMap::sinusoidal_shear(0.1).unwrap();
        let h = LiftedMap::rotation(&[0.2, 0.3]).unwrap();
        let id = LiftedMap::identity(2);
        assert!(cocycle_residual(&a, &id, &g, &h, &x).unwrap() <= 1e-15);
        assert!(cocycle_residual(&a, &g, &id, &h, &x).unwrap() <= 1e-15);
        assert!(cocycle_residual(&a, &g, &h, &id, &x).unwrap() <= 1e-15);
        let r = |v: f64| LiftedMap::rotation(&[v, 0.1]).unwrap();
        assert!(gal_kedra(&a, &r(0.1), &r(0.2), &x).unwrap().abs() <= 1e-15);
        assert!(cocycle_residual(&a, &r(0.1), &r(0.2), &r(0.3), &x).unwrap() <= 1e-15);
    }

    #[test]
    fn gal_kedra_is_lift_independent() {
        let a = a10();
        let g = LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            &[0.3, 0.0],
        )
        .unwrap();
        let h = LiftedMap::sinusoidal_shear(0.2).unwrap();
        let x = [0.4, 0.9];
        let v0 = gal_kedra_at_lift(&a, &g, &h, &x).unwrap();
        for m in [[1.0, 0.0], [0.0, -2.0], [3.0, 4.0]] {
            let v = gal_kedra_at_lift(&a, &g, &h, &[x[0] + m[0], x[1] + m[1]]).unwrap();
            assert!((v - v0).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_examples() {
        let a = CohomologyClass::integer(&[1, 2]).unwrap();
        let r1 = BundleAutomorphism::new(LiftedMap::rotation(&[0.1, 0.7]).unwrap(), 0.5);
        let r2 = BundleAutomorphism::new(LiftedMap::rotation(&[0.618, 0.25]).unwrap(), -1.0);
        let rep = splitting_check(
            &a,
            &[r1, r2],
            &InvariantMeasure::lebesgue(2),
            &SplittingOptions::default(),
        )
        .unwrap();
        assert!(rep.splitting_residual <= 1e-9);
        assert!((rep.generator_values[0] - (0.1 + 1.4 + 0.5)).abs() < 1e-12);

        let t = BundleAutomorphism::fiber_translation(2, 2.5);
        let rep = splitting_check(
            &a,
            &[t],
            &InvariantMeasure::lebesgue(2),
            &SplittingOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.splitting_residual, 0.0);
        assert_eq!(rep.generator_values, vec![2.5]);
    }

    #[test]
    fn splitting_rejects_non_invariant_measure() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        let g = BundleAutomorphism::new(LiftedMap::arnold(0.2, 0.7).unwrap(), 0.0);
        let err = splitting_check(
            &a,
            &[g],
            &InvariantMeasure::lebesgue(1),
            &SplittingOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonInvariantMeasure { .. }));
    }

    #[test]
    fn quasimorphism_defect_of_rotations_vanishes() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        let gens = [BundleAutomorphism::new(
            LiftedMap::rotation(&[0.3]).unwrap(),
            0.0,
        )];
        let d = quasimorphism_defect(&a, &gens, &TorusPoint::new(&[0.2]), 50, 4, 1).unwrap();
        assert!(d < 1e-13);
        let c = TrigPolynomial::fourier_1d(0.0, &[], &[0.2]).unwrap();
        let skew = [BundleAutomorphism::new(
            LiftedMap::skew_product(0.1, c).unwrap(),
            0.0,
        )];
        let d = quasimorphism_defect(
            &CohomologyClass::integer(&[0, 1]).unwrap(),
            &skew,
            &TorusPoint::origin(2),
            50,
            4,
            1,
        )
        .unwrap();
        assert!(d > 1e-3);
    }
}

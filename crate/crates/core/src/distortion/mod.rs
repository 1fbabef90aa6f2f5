//! The seminorm `‖ĝ‖_α = sup_x |ρ_{x,α}(ĝ)|`, undistortion certificates, and
//! exact word norms in groups of affine bundle automorphisms.

mod exact;
mod words;

pub use exact::ExactAffineAutomorphism;
pub use words::{
    translation_length_estimate, word_norm_bfs, word_norms_bfs, BfsOptions,
    TranslationLengthReport, WordNorm,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::Verdict;
use crate::dynamics::{local_translation_number, BundleAutomorphism, LocalOptions};
use crate::error::{check_dim, Error, Result};
use crate::measure::MAX_GRID_POINTS;
use crate::torus::{require_preserves, CohomologyClass, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormMode {
    Estimate,
    Certified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    /// `max |ρ|` over the vertex grid; a lower bound on the seminorm.
    pub estimate: f64,
    /// Grid maximum plus the per-cell increment bound, when Lipschitz data exists.
    pub upper_bound: Option<f64>,
    pub grid_resolution: usize,
    pub mode: SeminormMode,
}

/// Grid estimate of `‖ĝ‖_α` on the vertices `i/N`, plus (when the lift carries
/// a Lipschitz constant `D` for `g̃ − id`) the upper bound
/// `max + ‖a‖₁·D/(2N)`: every point lies within sup-distance `1/(2N)` of a vertex.
pub fn seminorm(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    grid_resolution: usize,
    mode: SeminormMode,
) -> Result<SeminormReport> {
    check_dim(a.dim(), g.dim())?;
    require_preserves(&g.base, a)?;
    let n = grid_resolution;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "grid resolution must be at least 1".into(),
        ));
    }
    let dim = a.dim();
    let total = n
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "seminorm grid {n}^{dim} exceeds {MAX_GRID_POINTS} points"
            ))
        })?;
    let disp = g.base.displacement_lipschitz();
    if mode == SeminormMode::Certified && disp.is_none() {
        return Err(Error::MissingLipschitz(g.base.family().to_string()));
    }
    let h = 1.0 / n as f64;
    let estimate = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut r = idx;
            let x: Vec<f64> = (0..dim)
                .map(|_| {
                    let c = (r % n) as f64 * h;
                    r /= n;
                    c
                })
                .collect();
            let y = g.base.apply(&x);
            let d: Vec<f64> = y.iter().zip(&x).map(|(u, v)| u - v).collect();
            (a.pair(&d) + g.fiber_shift).abs()
        })
        .reduce(|| 0.0, f64::max);
    let upper_bound = disp.map(|d| {
        let increment = a.l1_norm() * d * h / 2.0;
        // one ulp of slack on each side so the bound survives the rounding in ρ
        if increment == 0.0 {
            estimate
        } else {
            (estimate + increment) * (1.0 + 4.0 * f64::EPSILON)
        }
    });
    Ok(SeminormReport {
        estimate,
        upper_bound,
        grid_resolution: n,
        mode,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    UndistortedCertified,
    NoCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBound {
    pub generator: String,
    pub estimate: f64,
    /// Bound used for `C`: the certified upper bound, or the grid estimate
    /// when no Lipschitz data exists.
    pub bound: f64,
    pub rigorous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UndistortionCertificate {
    pub generator_bounds: Vec<GeneratorBound>,
    pub constant_c: f64,
    pub rot_value: f64,
    pub rot_error: f64,
    pub tau_lower_bound: f64,
    pub rigorous: bool,
    pub verdict: CertificateVerdict,
    /// The certificate speaks about the subgroup generated by these inputs only.
    pub scope: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    pub grid_resolution: usize,
    pub local: LocalOptions,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            grid_resolution: 64,
            local: LocalOptions::default(),
        }
    }
}

/// `τ(ĝ) ≥ |rot_{x,α}(ĝ)| / C` with `C = max_{s∈S} ‖s‖_α`, where `S` is
/// symmetrized (inverses are added when the lift provides them).
pub fn undistortion_certificate(
    a: &CohomologyClass,
    g: &BundleAutomorphism,
    generators: &[BundleAutomorphism],
    x: &TorusPoint,
    opts: &CertificateOptions,
) -> Result<UndistortionCertificate> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("generating set is empty".into()));
    }
    let rot = local_translation_number(a, g, x, &opts.local)?;
    if rot.verdict == Verdict::NotConverged {
        return Err(Error::NotConverged {
            iterations: rot.iterations,
            last_windows: rot.last_windows.unwrap_or((f64::NAN, f64::NAN)),
        });
    }
    let mut labelled = Vec::new();
    for (i, s) in generators.iter().enumerate() {
        labelled.push((format!("s{i}"), s.clone()));
        if let Ok(inv) = s.inverse() {
            labelled.push((format!("s{i}^-1"), inv));
        }
    }
    let bounds: Vec<GeneratorBound> = labelled
        .par_iter()
        .map(|(label, s)| {
            let rep = seminorm(a, s, opts.grid_resolution, SeminormMode::Estimate)?;
            Ok(GeneratorBound {
                generator: label.clone(),
                estimate: rep.estimate,
                bound: rep.upper_bound.unwrap_or(rep.estimate),
                rigorous: rep.upper_bound.is_some(),
            })
        })
        .collect::<Result<_>>()?;
    let constant_c = bounds.iter().map(|b| b.bound).fold(0.0, f64::max);
    let rigorous = bounds.iter().all(|b| b.rigorous);
    let tau = if constant_c > 0.0 {
        ((rot.value.abs() - rot.error_bound) / constant_c).max(0.0)
    } else {
        0.0
    };
    Ok(UndistortionCertificate {
        generator_bounds: bounds,
        constant_c,
        rot_value: rot.value,
        rot_error: rot.error_bound,
        tau_lower_bound: tau,
        rigorous,
        verdict: if tau > 0.0 {
            CertificateVerdict::UndistortedCertified
        } else {
            CertificateVerdict::NoCertificate
        },
        scope: format!(
            "subgroup generated by the {} supplied generators",
            generators.len()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::LiftedMap;

    #[test]
    fn seminorm_examples() {
        let a = CohomologyClass::integer(&[1, 2]).unwrap();
        let g = BundleAutomorphism::new(LiftedMap::rotation(&[0.1, 0.2]).unwrap(), 0.25);
        let e = seminorm(&a, &g, 8, SeminormMode::Estimate).unwrap();
        let c = seminorm(&a, &g, 8, SeminormMode::Certified).unwrap();
        assert!((e.estimate - 0.75).abs() < 1e-15);
        assert_eq!(c.upper_bound, Some(c.estimate));

        let t = BundleAutomorphism::fiber_translation(2, -1.5);
        assert_eq!(
            seminorm(&a, &t, 4, SeminormMode::Certified)
                .unwrap()
                .upper_bound,
            Some(1.5)
        );

        let a = CohomologyClass::integer(&[1, 0]).unwrap();
        let shear = BundleAutomorphism::new(LiftedMap::sinusoidal_shear(0.1).unwrap(), 0.0);
        let r = seminorm(&a, &shear, 64, SeminormMode::Certified).unwrap();
        assert!((r.estimate - 0.1).abs() < 1e-15);
        let ub = r.upper_bound.unwrap();
        assert!((0.1..=0.1 + std::f64::consts::TAU * 0.1 / 128.0 + 1e-15).contains(&ub));
    }

    #[test]
    fn certified_needs_lipschitz() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        let f = LiftedMap::custom(
            "bare",
            crate::matrix::IntMatrix::identity(1),
            None,
            |x: &[f64]| vec![x[0] + 0.1],
        )
        .unwrap();
        let g = BundleAutomorphism::new(f, 0.0);
        assert!(matches!(
            seminorm(&a, &g, 8, SeminormMode::Certified),
            Err(Error::MissingLipschitz(_))
        ));
        assert!(seminorm(&a, &g, 8, SeminormMode::Estimate)
            .unwrap()
            .upper_bound
            .is_none());
    }

    #[test]
    fn certificate_examples() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        let x = TorusPoint::origin(1);
        let t1 = BundleAutomorphism::fiber_translation(1, 1.0);
        let c = undistortion_certificate(
            &a,
            &t1,
            std::slice::from_ref(&t1),
            &x,
            &CertificateOptions::default(),
        )
        .unwrap();
        assert_eq!(c.constant_c, 1.0);
        assert_eq!(c.rot_value, 1.0);
        assert_eq!(c.tau_lower_bound, 1.0);
        assert!(c.rigorous);
        assert_eq!(c.verdict, CertificateVerdict::UndistortedCertified);

        let omega = 0.6180339887498949;
        let g = BundleAutomorphism::new(LiftedMap::rotation(&[omega]).unwrap(), 0.0);
        let c = undistortion_certificate(
            &a,
            &g,
            std::slice::from_ref(&g),
            &x,
            &CertificateOptions::default(),
        )
        .unwrap();
        assert!((c.tau_lower_bound - 1.0).abs() < 1e-8);

        let id = BundleAutomorphism::new(LiftedMap::identity(1), 0.0);
        let c =
            undistortion_certificate(&a, &id, &[t1], &x, &CertificateOptions::default()).unwrap();
        assert_eq!(c.tau_lower_bound, 0.0);
        assert_eq!(c.verdict, CertificateVerdict::NoCertificate);
    }

    #[test]
    fn certificate_flags_missing_lipschitz() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        let f = LiftedMap::custom(
            "bare",
            crate::matrix::IntMatrix::identity(1),
            None,
            |x: &[f64]| vec![x[0] + 0.25],
        )
        .unwrap();
        let g = BundleAutomorphism::new(f, 0.0);
        let c = undistortion_certificate(
            &a,
            &g,
            std::slice::from_ref(&g),
            &TorusPoint::origin(1),
            &CertificateOptions::default(),
        )
        .unwrap();
        assert!(!c.rigorous);
        assert_eq!(c.generator_bounds.len(), 1);
    }
}

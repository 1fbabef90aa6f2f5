//! Translation numbers of automorphisms of flat circle and line bundles over
//! tori, the Gal–Kędra cocycle, undistortion certificates and Seifert
//! homomorphisms.
//!
//! The bundle over `Tⁿ` with holonomy `a` is modelled as `ℝⁿ × A` modulo
//! `(x̃, k) ~ (x̃ + m, k − ⟨a, m⟩)`; maps are given by equivariant lifts.

pub mod config;
pub mod convergence;
pub mod distortion;
pub mod dynamics;
pub mod error;
pub mod galkedra;
pub mod homovec;
pub mod matrix;
pub mod measure;
pub mod sampling;
pub mod seifert;
pub mod torus;
pub mod trig;

pub use convergence::{CompensatedSum, ConvergenceReport, Verdict};
pub use distortion::{
    seminorm, undistortion_certificate, word_norm_bfs, ExactAffineAutomorphism, SeminormMode,
    UndistortionCertificate,
};
pub use dynamics::{
    local_translation_number, mean_translation_number, periodic_rot, rho, theta,
    BundleAutomorphism, LocalOptions, MeanOptions,
};
pub use error::{Error, Result};
pub use galkedra::{
    coboundary_residual, cocycle_residual, gal_kedra, gal_kedra_quadrature, CocycleEvaluation,
};
pub use homovec::{
    delta_phi, homological_translation, mean_homological_translation, Isotopy, LiftPath,
};
pub use matrix::IntMatrix;
pub use measure::InvariantMeasure;
pub use seifert::{
    construct_h1_class, euler_number, verify_homomorphism, FiberClassHomomorphism, SeifertData,
};
pub use torus::{
    canonicalize, preserves_class, BundlePoint, Coefficients, CohomologyClass, LiftedMap,
    TorusPoint,
};
pub use trig::TrigPolynomial;

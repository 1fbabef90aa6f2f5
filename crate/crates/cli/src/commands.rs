use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use transnum::config::MapSpec;
use transnum::convergence::{ConvergenceReport, Verdict};
use transnum::distortion::{
    seminorm, translation_length_estimate, undistortion_certificate, word_norm_bfs, BfsOptions,
    CertificateOptions, CertificateVerdict, ExactAffineAutomorphism, SeminormMode, WordNorm,
};
use transnum::dynamics::{
    local_translation_number, mean_translation_number, BundleAutomorphism, LocalOptions,
    MeanOptions,
};
use transnum::galkedra::{
    coboundary_residual, cocycle_residual, evaluate, gal_kedra, splitting_check, EvaluationMethod,
    SplittingOptions,
};
use transnum::homovec::{homological_translation, mean_homological_translation};
use transnum::measure::InvariantMeasure;
use transnum::sampling::{random_automorphism, random_class, random_map, random_point};
use transnum::seifert::{
    construct_h1_class, euler_number, parse_datasets, verify_homomorphism, NamedSeifertData,
    SeifertData,
};
use transnum::torus::{CohomologyClass, TorusPoint};
use transnum::Error;

use crate::config::{Command, RunConfig, SeminormModeSpec};
use crate::report::Status;
use crate::{sweep, CliError};

/// One-line summary of a result, used for sweep rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub value: f64,
    pub error_bound: f64,
    pub verdict: String,
    pub iterations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub results: Value,
    pub summary: Option<Summary>,
    pub warnings: Vec<String>,
    pub status: Status,
}

impl CommandOutput {
    pub(crate) fn ok(results: Value, summary: Option<Summary>) -> Self {
        Self {
            results,
            summary,
            warnings: Vec::new(),
            status: Status::Ok,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

pub fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::Converged => "converged".into(),
        Verdict::NotConverged => "not-converged".into(),
        Verdict::ExactPeriodic {
            numerator,
            denominator,
        } => format!("exact {numerator}/{denominator}"),
    }
}

fn summarize(r: &ConvergenceReport) -> Summary {
    Summary {
        value: r.value,
        error_bound: r.error_bound,
        verdict: verdict_label(&r.verdict),
        iterations: Some(r.iterations),
    }
}

fn convergence_status(r: &ConvergenceReport) -> Status {
    if r.verdict == Verdict::NotConverged {
        Status::NotConverged
    } else {
        Status::Ok
    }
}

fn class(cfg: &RunConfig) -> Result<CohomologyClass, CliError> {
    let spec = cfg
        .class
        .as_ref()
        .ok_or_else(|| CliError::validation("missing `class`"))?;
    Ok(spec.build()?)
}

fn map(spec: &Option<MapSpec>, what: &str, dim: usize) -> Result<BundleAutomorphism, CliError> {
    let s = spec
        .as_ref()
        .ok_or_else(|| CliError::validation(format!("missing `{what}`")))?;
    let g = s.build(dim)?;
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        }
        .into());
    }
    Ok(g)
}

fn point(cfg: &RunConfig, dim: usize) -> Result<TorusPoint, CliError> {
    match &cfg.point {
        Some(p) if p.len() != dim => Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        }
        .into()),
        Some(p) => Ok(TorusPoint::new(p)),
        None => Ok(TorusPoint::origin(dim)),
    }
}

fn local_options(cfg: &RunConfig, g: &BundleAutomorphism) -> LocalOptions {
    let mut o = LocalOptions::for_map(&g.base);
    if let Some(t) = cfg.options.tolerance {
        o.tolerance = t;
    }
    if let Some(n) = cfg.options.max_iterations {
        o.max_iterations = n;
    }
    o
}

fn mean_options(cfg: &RunConfig) -> MeanOptions {
    let mut o = MeanOptions::default();
    if let Some(n) = cfg.options.grid {
        o.quadrature_points = n;
    }
    if let Some(t) = cfg.options.tolerance {
        o.tolerance = t;
    }
    o
}

fn measure(
    cfg: &RunConfig,
    dim: usize,
    g: &BundleAutomorphism,
) -> Result<InvariantMeasure, CliError> {
    match &cfg.measure {
        Some(m) => Ok(m.build(dim, &g.base)?),
        None => Ok(InvariantMeasure::lebesgue(dim)),
    }
}

pub fn execute(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    match cfg.command()? {
        Command::RotLocal => rot_local(cfg),
        Command::RotMean => rot_mean(cfg),
        Command::RotHomovec => rot_homovec(cfg),
        Command::GkEval => gk_eval(cfg),
        Command::GkCheck => gk_check(cfg),
        Command::SplitCheck => split_check(cfg),
        Command::Seminorm => seminorm_cmd(cfg),
        Command::DistortionCert => distortion_cert(cfg),
        Command::WordNorm => word_norm(cfg),
        Command::SeifertClass => seifert_class(cfg),
        Command::Sweep => sweep::run_sweep(cfg),
    }
}

fn rot_local(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let g = map(&cfg.map, "map", a.dim())?;
    let x = point(cfg, a.dim())?;
    let rep = local_translation_number(&a, &g, &x, &local_options(cfg, &g))?;
    let mut out = CommandOutput::ok(
        json!({ "point": x.coords(), "exact": rep.error_bound == 0.0 && rep.is_converged(), "rot": rep }),
        Some(summarize(&rep)),
    );
    out.status = convergence_status(&rep);
    Ok(out)
}

fn rot_mean(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let g = map(&cfg.map, "map", a.dim())?;
    let mu = measure(cfg, a.dim(), &g)?;
    let rep = mean_translation_number(&a, &g, &mu, &mean_options(cfg))?;
    let mut out = CommandOutput::ok(json!({ "rot": rep }), Some(summarize(&rep)));
    if rep.non_invariant {
        out.warnings.push(format!(
            "measure fails the invariance test (residual {:e})",
            rep.invariance_residual.unwrap_or(f64::NAN)
        ));
    }
    out.status = convergence_status(&rep);
    Ok(out)
}

fn rot_homovec(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let iso = cfg
        .isotopy
        .as_ref()
        .ok_or_else(|| CliError::validation("missing `isotopy`"))?
        .build()?;
    if iso.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: iso.dim(),
        }
        .into());
    }
    let x = point(cfg, a.dim())?;
    let g = iso.endpoint_automorphism();
    let opts = local_options(cfg, &g);
    let h = homological_translation(&a, &iso, &x, &opts)?;
    let l = local_translation_number(&a, &g, &x, &opts)?;
    let mu = measure(cfg, a.dim(), &g)?;
    let mopts = mean_options(cfg);
    let mh = mean_homological_translation(&a, &iso, &mu, &mopts)?;
    let ml = mean_translation_number(&a, &g, &mu, &mopts)?;
    let mut out = CommandOutput::ok(
        json!({
            "homological": h,
            "endpoint_local": l,
            "local_difference": (h.value - l.value).abs(),
            "mean_homological": mh,
            "endpoint_mean": ml,
            "mean_difference": (mh.value - ml.value).abs(),
        }),
        Some(summarize(&h)),
    );
    if mh.non_invariant {
        out.warnings
            .push("measure fails the invariance test for the endpoint map".into());
    }
    out.status = convergence_status(&h)
        .max(convergence_status(&l))
        .max(convergence_status(&mh));
    Ok(out)
}

fn gk_eval(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let g = map(&cfg.map, "map", a.dim())?;
    let h = map(&cfg.second_map, "second_map", a.dim())?;
    let x = point(cfg, a.dim())?;
    let closed = gal_kedra(&a, &g.base, &h.base, &x)?;
    let quad = match cfg.options.segments {
        Some(segments) => Some(evaluate(
            &a,
            &g.base,
            &h.base,
            &x,
            EvaluationMethod::Quadrature { segments },
        )?),
        None => None,
    };
    let diff = quad.as_ref().map(|q| (q.value - closed).abs());
    Ok(CommandOutput::ok(
        json!({ "closed_form": closed, "exact": true, "quadrature": quad, "difference": diff }),
        Some(Summary {
            value: closed,
            error_bound: quad.as_ref().map_or(0.0, |q| q.error_estimate),
            verdict: "closed-form".into(),
            iterations: None,
        }),
    ))
}

#[derive(Serialize)]
struct ResidualRow {
    index: usize,
    dim: usize,
    class: Vec<f64>,
    families: [String; 3],
    coboundary_residual: f64,
    cocycle_residual: f64,
}

/// Default bound for the exact identities checked by `gk-check`.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

fn gk_check(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let samples = cfg.options.samples.unwrap_or(100);
    let fixed = cfg.class.as_ref().map(|c| c.build()).transpose()?;
    let tol = cfg.options.tolerance.unwrap_or(IDENTITY_TOLERANCE);
    let rows: Vec<ResidualRow> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let a = match &fixed {
                Some(a) => a.clone(),
                None => random_class(1 + (i % 2), &mut rng)?,
            };
            let g = random_automorphism(&a, &mut rng)?;
            let h = random_automorphism(&a, &mut rng)?;
            let k = random_map(&a, &mut rng)?;
            let x = random_point(a.dim(), &mut rng);
            Ok(ResidualRow {
                index: i,
                dim: a.dim(),
                class: a.entries().to_vec(),
                families: [
                    g.base.family().into(),
                    h.base.family().into(),
                    k.family().into(),
                ],
                coboundary_residual: coboundary_residual(&a, &g, &h, &x)?,
                cocycle_residual: cocycle_residual(&a, &g.base, &h.base, &k, &x)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    let max_cob = rows
        .iter()
        .map(|r| r.coboundary_residual)
        .fold(0.0, f64::max);
    let max_coc = rows.iter().map(|r| r.cocycle_residual).fold(0.0, f64::max);
    let passed = max_cob <= tol && max_coc <= tol;
    let mut out = CommandOutput::ok(
        json!({
            "samples": samples,
            "tolerance": tol,
            "max_coboundary_residual": max_cob,
            "max_cocycle_residual": max_coc,
            "passed": passed,
            "rows": rows,
        }),
        Some(Summary {
            value: max_cob.max(max_coc),
            error_bound: 0.0,
            verdict: if passed {
                "passed".into()
            } else {
                "failed".into()
            },
            iterations: Some(samples),
        }),
    );
    if !passed {
        out.status = Status::Internal;
        out.warnings
            .push(format!("identity residual exceeds {tol:e}"));
    }
    Ok(out)
}

fn split_check(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let gens = cfg
        .generators
        .iter()
        .map(|s| s.build(a.dim()))
        .collect::<Result<Vec<_>, _>>()?;
    let mu = measure(cfg, a.dim(), &gens[0])?;
    let mut opts = SplittingOptions {
        seed: cfg.seed,
        ..Default::default()
    };
    if let Some(n) = cfg.options.pairs {
        opts.pairs = n;
    }
    if let Some(n) = cfg.options.max_word_length {
        opts.max_word_length = n;
    }
    if let Some(n) = cfg.options.grid {
        opts.quadrature_points = n;
    }
    if let Some(t) = cfg.options.tolerance {
        opts.invariance_tolerance = t;
    }
    if cfg.point.is_some() {
        opts.base_point = Some(point(cfg, a.dim())?);
    }
    let rep = splitting_check(&a, &gens, &mu, &opts)?;
    Ok(CommandOutput::ok(
        to_value(&rep),
        Some(Summary {
            value: rep.splitting_residual,
            error_bound: rep.quadrature_error,
            verdict: "residual".into(),
            iterations: Some(rep.pairs),
        }),
    ))
}

fn seminorm_cmd(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let g = map(&cfg.map, "map", a.dim())?;
    let grid = cfg.options.grid.unwrap_or(64);
    let mut warnings = Vec::new();
    let mode = match cfg.options.mode {
        Some(SeminormModeSpec::Estimate) => SeminormMode::Estimate,
        Some(SeminormModeSpec::Certified) => SeminormMode::Certified,
        None if g.base.displacement_lipschitz().is_some() => SeminormMode::Certified,
        None => {
            warnings.push("no Lipschitz data: reporting the grid estimate only".into());
            SeminormMode::Estimate
        }
    };
    let rep = seminorm(&a, &g, grid, mode)?;
    let mut out = CommandOutput::ok(
        to_value(&rep),
        Some(Summary {
            value: rep.estimate,
            error_bound: rep.upper_bound.map_or(f64::INFINITY, |u| u - rep.estimate),
            verdict: if rep.upper_bound.is_some() {
                "certified".into()
            } else {
                "estimate".into()
            },
            iterations: Some(grid),
        }),
    );
    out.warnings = warnings;
    Ok(out)
}

fn exact_group(
    cfg: &RunConfig,
    dim: usize,
) -> Result<(Vec<ExactAffineAutomorphism>, ExactAffineAutomorphism), CliError> {
    let e = cfg
        .exact
        .as_ref()
        .ok_or_else(|| CliError::validation("missing `exact`"))?;
    let gens = e
        .generators
        .iter()
        .map(|s| s.build(dim))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((gens, e.target.build(dim)?))
}

fn bfs_options(cfg: &RunConfig) -> BfsOptions {
    let mut o = BfsOptions::default();
    if let Some(r) = cfg.options.radius {
        o.radius = r;
    }
    if let Some(c) = cfg.options.ball_cap {
        o.ball_cap = c;
    }
    o
}

fn distortion_cert(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let x = point(cfg, a.dim())?;
    let (g, gens, exact) = if cfg.exact.is_some() {
        let (egens, etarget) = exact_group(cfg, a.dim())?;
        let gens = egens
            .iter()
            .map(|e| e.to_bundle_automorphism())
            .collect::<Result<Vec<_>, _>>()?;
        (
            etarget.to_bundle_automorphism()?,
            gens,
            Some((egens, etarget)),
        )
    } else {
        let gens = cfg
            .generators
            .iter()
            .map(|s| s.build(a.dim()))
            .collect::<Result<Vec<_>, _>>()?;
        (map(&cfg.map, "map", a.dim())?, gens, None)
    };
    let mut opts = CertificateOptions {
        local: local_options(cfg, &g),
        ..Default::default()
    };
    if let Some(n) = cfg.options.grid {
        opts.grid_resolution = n;
    }
    let cert = undistortion_certificate(&a, &g, &gens, &x, &opts)?;
    let lengths = match &exact {
        Some((egens, etarget)) => Some(translation_length_estimate(
            &a,
            egens,
            etarget,
            cfg.options.max_power.unwrap_or(10),
            Some(cert.tau_lower_bound),
            &bfs_options(cfg),
        )?),
        None => None,
    };
    let mut out = CommandOutput::ok(
        json!({ "certificate": cert, "translation_length": lengths }),
        Some(Summary {
            value: cert.tau_lower_bound,
            error_bound: 0.0,
            verdict: match cert.verdict {
                CertificateVerdict::UndistortedCertified => "undistorted-certified".into(),
                CertificateVerdict::NoCertificate => "no-certificate".into(),
            },
            iterations: None,
        }),
    );
    if !cert.rigorous {
        out.warnings.push(
            "some generator bounds are grid estimates; the certificate is not rigorous".into(),
        );
    }
    if lengths.as_ref().and_then(|l| l.consistent_with_certificate) == Some(false) {
        out.warnings
            .push("a computed word norm is below n·tau_lower_bound".into());
        out.status = Status::Internal;
    }
    Ok(out)
}

fn word_norm(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let a = class(cfg)?;
    let (gens, target) = exact_group(cfg, a.dim())?;
    let opts = bfs_options(cfg);
    let norm = word_norm_bfs(&a, &gens, &target, &opts)?;
    let lengths = match cfg.options.max_power {
        Some(p) => Some(translation_length_estimate(
            &a, &gens, &target, p, None, &opts,
        )?),
        None => None,
    };
    let (value, verdict) = match norm {
        WordNorm::Found { length } => (length as f64, "exact".to_string()),
        WordNorm::NotFound { radius } => (f64::NAN, format!("not-found within radius {radius}")),
    };
    Ok(CommandOutput::ok(
        json!({ "target": target.to_string(), "word_norm": norm, "translation_length": lengths }),
        Some(Summary {
            value,
            error_bound: 0.0,
            verdict,
            iterations: Some(opts.radius),
        }),
    ))
}

fn seifert_record(d: &NamedSeifertData) -> (Value, bool) {
    let data = match d.data() {
        Ok(data) => data,
        Err(e) => {
            return (
                json!({ "name": d.name, "refused": true, "reason": e.to_string() }),
                false,
            )
        }
    };
    seifert_record_for(&d.name, &data)
}

fn seifert_record_for(name: &str, data: &SeifertData) -> (Value, bool) {
    let e = euler_number(data);
    match construct_h1_class(data) {
        Ok(phi) => {
            let residuals = verify_homomorphism(data, &phi).expect("shapes agree");
            (
                json!({
                    "name": name,
                    "genus": data.genus,
                    "pairs": data.pairs,
                    "euler_number": e.to_string(),
                    "refused": false,
                    "phi": phi,
                    "residuals": residuals,
                    "all_residuals_zero": residuals.all_zero(),
                }),
                true,
            )
        }
        Err(err) => (
            json!({
                "name": name,
                "genus": data.genus,
                "pairs": data.pairs,
                "euler_number": e.to_string(),
                "beta_sum": data.beta_sum().to_string(),
                "refused": true,
                "reason": err.to_string(),
            }),
            false,
        ),
    }
}

fn seifert_class(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let s = cfg
        .seifert
        .as_ref()
        .ok_or_else(|| CliError::validation("missing `seifert`"))?;
    let records: Vec<(Value, bool)> = match &s.datasets {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::validation(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_datasets(&text)?.iter().map(seifert_record).collect()
        }
        None => {
            let data = SeifertData::new(
                s.genus.unwrap_or_default(),
                s.pairs.clone().unwrap_or_default(),
            )?;
            vec![seifert_record_for("inline", &data)]
        }
    };
    let refused = records.iter().filter(|r| !r.1).count();
    let mut out = CommandOutput::ok(
        json!({
            "euler_convention": "e = -sum(beta_j / alpha_j)",
            "constructed": records.len() - refused,
            "refused": refused,
            "datasets": records.into_iter().map(|r| r.0).collect::<Vec<_>>(),
        }),
        None,
    );
    if refused > 0 {
        out.status = Status::Precondition;
    }
    Ok(out)
}

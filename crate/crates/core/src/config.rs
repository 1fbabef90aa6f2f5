//! Declarative specifications of maps, classes, measures and isotopies, as
//! read from TOML configuration files.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::distortion::ExactAffineAutomorphism;
use crate::dynamics::BundleAutomorphism;
use crate::error::{Error, Result};
use crate::homovec::Isotopy;
use crate::matrix::IntMatrix;
use crate::measure::InvariantMeasure;
use crate::torus::{Coefficients, CohomologyClass, LiftedMap, TorusPoint};
use crate::trig::TrigPolynomial;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub entries: Vec<f64>,
    #[serde(default)]
    pub coefficients: CoefficientKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    #[default]
    Integer,
    Real,
}

impl ClassSpec {
    pub fn build(&self) -> Result<CohomologyClass> {
        match self.coefficients {
            CoefficientKind::Integer => {
                if self
                    .entries
                    .iter()
                    .any(|e| e.fract() != 0.0 || e.abs() > 1e15)
                {
                    return Err(config_err("integer class entries must be integers"));
                }
                CohomologyClass::new(Coefficients::Integer, self.entries.clone())
            }
            CoefficientKind::Real => CohomologyClass::real(&self.entries),
        }
    }
}

/// One-dimensional trigonometric polynomial `c0 + Σ cos_k cos 2πkx + sin_k sin 2πkx`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSpec {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigSpec {
    pub fn build(&self) -> Result<TrigPolynomial> {
        TrigPolynomial::fourier_1d(self.c0, &self.cos, &self.sin)
    }
}

/// A built-in map family with its parameters. Only the fields used by
/// `family` may be set.
///
/// | family | fields |
/// |---|---|
/// | `identity` | `dim` |
/// | `rotation` | `vector` |
/// | `affine` | `matrix`, `vector` |
/// | `arnold` | `omega`, `coupling` |
/// | `sinusoidal-shear` | `epsilon` |
/// | `skew-product` | `omega`, `c` |
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<TrigSpec>,
    /// Fiber shift of the bundle automorphism.
    #[serde(default)]
    pub fiber_shift: f64,
    /// Overrides the family's sup-norm Lipschitz constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_bound: Option<f64>,
    /// Iterate the map this many times (negative powers use the inverse).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<i64>,
}

impl MapSpec {
    fn allowed(&self) -> Result<&'static [&'static str]> {
        Ok(match self.family.as_str() {
            "identity" => &["dim"],
            "rotation" => &["vector"],
            "affine" => &["matrix", "vector"],
            "arnold" => &["omega", "coupling"],
            "sinusoidal-shear" => &["epsilon"],
            "skew-product" => &["omega", "c"],
            other => return Err(config_err(format!("unknown map family `{other}`"))),
        })
    }

    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let flags = [
            ("dim", self.dim.is_some()),
            ("vector", self.vector.is_some()),
            ("matrix", self.matrix.is_some()),
            ("omega", self.omega.is_some()),
            ("coupling", self.coupling.is_some()),
            ("epsilon", self.epsilon.is_some()),
            ("c", self.c.is_some()),
        ];
        for (name, set) in flags {
            if set {
                v.push(name);
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.allowed()?;
        if let Some(bad) = self.present().into_iter().find(|p| !allowed.contains(p)) {
            return Err(config_err(format!(
                "field `{bad}` does not apply to family `{}`",
                self.family
            )));
        }
        if let Some(missing) = allowed
            .iter()
            .find(|f| !self.present().contains(f) && **f != "dim" && **f != "c")
        {
            return Err(config_err(format!(
                "family `{}` requires `{missing}`",
                self.family
            )));
        }
        if !self.fiber_shift.is_finite() {
            return Err(config_err("fiber_shift must be finite"));
        }
        Ok(())
    }

    /// Build the lift; `dim` is used by families that do not fix it themselves.
    pub fn build_map(&self, dim: usize) -> Result<LiftedMap> {
        self.validate()?;
        let g = match self.family.as_str() {
            "identity" => LiftedMap::identity(self.dim.unwrap_or(dim)),
            "rotation" => LiftedMap::rotation(self.vector.as_deref().unwrap_or_default())?,
            "affine" => {
                let m = IntMatrix::from_rows(self.matrix.as_deref().unwrap_or_default())?;
                LiftedMap::affine(m, self.vector.as_deref().unwrap_or_default())?
            }
            "arnold" => LiftedMap::arnold(
                self.omega.unwrap_or_default(),
                self.coupling.unwrap_or_default(),
            )?,
            "sinusoidal-shear" => LiftedMap::sinusoidal_shear(self.epsilon.unwrap_or_default())?,
            "skew-product" => LiftedMap::skew_product(
                self.omega.unwrap_or_default(),
                self.c.clone().unwrap_or_default().build()?,
            )?,
            _ => unreachable!("validated"),
        };
        let g = match self.lipschitz_bound {
            Some(l) if l.is_finite() && l >= 0.0 => g.with_lipschitz_bound(l),
            Some(l) => {
                return Err(config_err(format!(
                    "lipschitz_bound {l} must be finite and nonnegative"
                )))
            }
            None => g,
        };
        match self.power {
            Some(k) => g.power(k),
            None => Ok(g),
        }
    }

    pub fn build(&self, dim: usize) -> Result<BundleAutomorphism> {
        let g = self.build_map(dim)?;
        let shift = self.fiber_shift * self.power.unwrap_or(1) as f64;
        Ok(BundleAutomorphism::new(g, shift))
    }

    /// Override one scalar parameter by name (used by sweeps).
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "omega" => self.omega = Some(value),
            "coupling" => self.coupling = Some(value),
            "epsilon" => self.epsilon = Some(value),
            "fiber_shift" => self.fiber_shift = value,
            "c0" => self.c.get_or_insert_with(TrigSpec::default).c0 = value,
            _ => {
                if let Some(i) = name
                    .strip_prefix("vector.")
                    .and_then(|i| i.parse::<usize>().ok())
                {
                    let v = self.vector.get_or_insert_with(Vec::new);
                    if i >= v.len() {
                        v.resize(i + 1, 0.0);
                    }
                    v[i] = value;
                } else {
                    return Err(config_err(format!(
                        "map parameter `{name}` cannot be swept"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue {},
    /// Uniform measure on the first `period` points of the orbit of `point`
    /// under the configured map.
    DiracOrbit {
        point: Vec<f64>,
        period: usize,
    },
    Empirical {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

impl MeasureSpec {
    pub fn build(&self, dim: usize, map: &LiftedMap) -> Result<InvariantMeasure> {
        match self {
            Self::Lebesgue {} => Ok(InvariantMeasure::lebesgue(dim)),
            Self::DiracOrbit { point, period } => {
                InvariantMeasure::dirac_orbit(map, &TorusPoint::new(point), *period)
            }
            Self::Empirical { points, weights } => InvariantMeasure::empirical(
                points.iter().map(|p| TorusPoint::new(p)).collect(),
                weights.clone(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IsotopySpec {
    Identity { dim: usize },
    Linear { vector: Vec<f64> },
    Skew { omega: f64, c: TrigSpec },
    SinusoidalShear { epsilon: f64 },
}

impl IsotopySpec {
    pub fn build(&self) -> Result<Isotopy> {
        match self {
            Self::Identity { dim } => Ok(Isotopy::identity(*dim)),
            Self::Linear { vector } => Isotopy::linear(vector),
            Self::Skew { omega, c } => Isotopy::skew(*omega, c.build()?),
            Self::SinusoidalShear { epsilon } => Isotopy::sinusoidal_shear(*epsilon),
        }
    }
}

/// An exact affine element; rationals are written as strings like `"1/3"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub translation: Vec<String>,
    #[serde(default = "zero_string")]
    pub fiber_shift: String,
}

fn zero_string() -> String {
    "0".into()
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    s.trim()
        .parse::<Rational64>()
        .map_err(|e| config_err(format!("`{s}` is not a rational: {e}")))
}

impl ExactSpec {
    pub fn build(&self, dim: usize) -> Result<ExactAffineAutomorphism> {
        let matrix = match &self.matrix {
            Some(rows) => IntMatrix::from_rows(rows)?,
            None => IntMatrix::identity(dim),
        };
        let mut translation = self
            .translation
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        if translation.is_empty() {
            translation = vec![Rational64::from_integer(0); matrix.dim()];
        }
        ExactAffineAutomorphism::new(matrix, translation, parse_rational(&self.fiber_shift)?)
    }
}

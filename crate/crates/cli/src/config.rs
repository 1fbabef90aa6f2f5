use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use transnum::config::{ClassSpec, ExactSpec, IsotopySpec, MapSpec, MeasureSpec};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RotLocal,
    RotMean,
    RotHomovec,
    GkEval,
    GkCheck,
    SplitCheck,
    Seminorm,
    DistortionCert,
    WordNorm,
    SeifertClass,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::RotLocal => "rot-local",
            Self::RotMean => "rot-mean",
            Self::RotHomovec => "rot-homovec",
            Self::GkEval => "gk-eval",
            Self::GkCheck => "gk-check",
            Self::SplitCheck => "split-check",
            Self::Seminorm => "seminorm",
            Self::DistortionCert => "distortion-cert",
            Self::WordNorm => "word-norm",
            Self::SeifertClass => "seifert-class",
            Self::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Table,
    Record,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeminormModeSpec {
    Estimate,
    #[default]
    Certified,
}

/// Numeric knobs shared by the commands. Unset values fall back to each
/// command's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// Quadrature points per axis, or seminorm grid resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SeminormModeSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactGroupSpec {
    pub generators: Vec<ExactSpec>,
    pub target: ExactSpec,
}

/// Either inline Seifert data or a path to a `[[dataset]]` corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeifertSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(i64, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datasets: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParameter {
    /// `map.<field>`, `point.<i>`, or an option name (`tolerance`, `grid`, …).
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl SweepParameter {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, self.start, self.stop, self.steps) {
            (Some(v), None, None, None) if !v.is_empty() => Ok(v.clone()),
            (None, Some(a), Some(b), Some(n)) if n >= 1 && a.is_finite() && b.is_finite() => {
                if n == 1 {
                    return Ok(vec![a]);
                }
                Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
            }
            _ => Err(CliError::validation(format!(
                "sweep parameter `{}` needs either nonempty `values` or finite `start`, `stop`, `steps`",
                self.name
            ))),
        }
    }
}

pub const DEFAULT_MAX_ROWS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: Command,
    pub parameters: Vec<SweepParameter>,
    #[serde(default = "default_max_rows")]
    pub max_rows: usize,
}

fn default_max_rows() -> usize {
    DEFAULT_MAX_ROWS
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    /// Second argument `h` of `gk-eval`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isotopy: Option<IsotopySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactGroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seifert: Option<SeifertSpec>,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub grid: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text)
            .map_err(|e| CliError::validation(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // relative dataset paths are resolved against the config file
        if let (Some(s), Some(dir)) = (cfg.seifert.as_mut(), path.parent()) {
            if let Some(p) = s.datasets.as_mut() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Resolve the command against the subcommand given on the command line
    /// and apply flag overrides.
    pub fn resolve(mut self, command: Command, o: &Overrides) -> Result<Self, CliError> {
        match self.command {
            Some(c) if c != command => {
                return Err(CliError::validation(format!(
                    "configuration is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )))
            }
            _ => self.command = Some(command),
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if o.tolerance.is_some() {
            self.options.tolerance = o.tolerance;
        }
        if o.max_iterations.is_some() {
            self.options.max_iterations = o.max_iterations;
        }
        if o.grid.is_some() {
            self.options.grid = o.grid;
        }
        if o.format.is_some() {
            self.output.format = o.format;
        }
        if o.out.is_some() {
            self.output.path = o.out.clone();
        }
        self.validate()?;
        Ok(self)
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command
            .ok_or_else(|| CliError::validation("no command given"))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let cmd = self.command()?;
        let need = |present: bool, what: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::validation(format!(
                    "`{}` requires `{what}`",
                    cmd.name()
                )))
            }
        };
        if let Some(t) = self.options.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::validation(format!(
                    "tolerance {t} must be positive"
                )));
            }
        }
        for m in self
            .map
            .iter()
            .chain(&self.second_map)
            .chain(&self.generators)
        {
            m.validate().map_err(CliError::from)?;
        }
        match cmd {
            Command::RotLocal | Command::RotMean | Command::Seminorm => {
                need(self.class.is_some(), "class")?;
                need(self.map.is_some(), "map")?;
            }
            Command::RotHomovec => {
                need(self.class.is_some(), "class")?;
                need(self.isotopy.is_some(), "isotopy")?;
            }
            Command::GkEval => {
                need(self.class.is_some(), "class")?;
                need(self.map.is_some(), "map")?;
                need(self.second_map.is_some(), "second_map")?;
            }
            Command::GkCheck => {}
            Command::SplitCheck => {
                need(self.class.is_some(), "class")?;
                need(!self.generators.is_empty(), "generators")?;
            }
            Command::DistortionCert => {
                need(self.class.is_some(), "class")?;
                need(
                    self.exact.is_some() || (self.map.is_some() && !self.generators.is_empty()),
                    "exact or map and generators",
                )?;
            }
            Command::WordNorm => {
                need(self.class.is_some(), "class")?;
                need(self.exact.is_some(), "exact")?;
            }
            Command::SeifertClass => {
                let s = self.seifert.as_ref();
                need(s.is_some(), "seifert")?;
                let s = s.expect("checked");
                let inline = s.genus.is_some() || s.pairs.is_some();
                if inline == s.datasets.is_some()
                    || (inline && (s.genus.is_none() || s.pairs.is_none()))
                {
                    return Err(CliError::validation(
                        "`seifert` needs either `genus` and `pairs`, or `datasets`",
                    ));
                }
            }
            Command::Sweep => {
                let s = self.sweep.as_ref();
                need(s.is_some(), "sweep")?;
                let s = s.expect("checked");
                if matches!(s.target, Command::Sweep) {
                    return Err(CliError::validation("sweeps cannot be nested"));
                }
                if s.parameters.is_empty() {
                    return Err(CliError::validation("sweep needs at least one parameter"));
                }
                for p in &s.parameters {
                    p.grid()?;
                }
                let mut inner = self.clone();
                inner.command = Some(s.target);
                inner.sweep = None;
                inner.validate()?;
            }
        }
        Ok(())
    }
}

//! Run configuration: figure-caption defaults, flat `key=value` config
//! files, and flag overrides.
//!
//! Precedence, lowest to highest: built-in defaults, config file, command
//! line flags, then the `TEMPWIT_OUT` environment variable for the output
//! directory. The transverse rate can be given either as `gamma_phi` (pure
//! dephasing) or as the total `gamma2`; setting both in one layer is an
//! error, and a flag for either replaces whichever form a file used.

use std::path::PathBuf;

use clap::Args;
use tempwit_core::error::{CoreError, CoreResult};
use tempwit_core::model::ModelParams;

/// Encoding for tabular data files. Figure files are always CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Global flags; each one overrides the matching config-file key.
#[derive(Debug, Args)]
pub struct Overrides {
    /// Flat key=value config file. Keys: omega0, temperature, gamma1,
    /// gamma2, gamma_phi, t_min, t_max, samples, out, format.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory for emitted files (TEMPWIT_OUT overrides this).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Scan window start.
    #[arg(long, global = true, value_name = "T")]
    pub t_min: Option<f64>,

    /// Scan window end.
    #[arg(long, global = true, value_name = "T")]
    pub t_max: Option<f64>,

    /// Number of scan samples.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,

    /// Qubit splitting.
    #[arg(long, global = true, value_name = "FREQ")]
    pub omega0: Option<f64>,

    /// Bath temperature.
    #[arg(long, global = true, value_name = "TEMP")]
    pub temperature: Option<f64>,

    /// Relaxation rate.
    #[arg(long, global = true, value_name = "RATE")]
    pub gamma1: Option<f64>,

    /// Total transverse decay rate (gamma1/2 + gamma_phi).
    #[arg(long, global = true, value_name = "RATE", conflicts_with = "gamma_phi")]
    pub gamma2: Option<f64>,

    /// Pure dephasing rate.
    #[arg(long, global = true, value_name = "RATE")]
    pub gamma_phi: Option<f64>,

    /// Encoding for tabular outputs.
    #[arg(long, global = true, value_name = "FMT", value_enum)]
    pub format: Option<OutputFormat>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
}

/// The transverse rate accepts two parametrizations; track which one the
/// highest-precedence layer used.
#[derive(Debug, Clone, Copy)]
enum GammaSpec {
    Phi(f64),
    Total(f64),
}

#[derive(Default)]
struct Builder {
    omega0: Option<f64>,
    temperature: Option<f64>,
    gamma1: Option<f64>,
    gamma: Option<GammaSpec>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

fn parse_number(key: &str, value: &str) -> CoreResult<f64> {
    value.parse().map_err(|_| {
        CoreError::Configuration(format!(
            "config key '{key}' has a non-numeric value '{value}'"
        ))
    })
}

impl Builder {
    fn apply_file(&mut self, text: &str) -> CoreResult<()> {
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CoreError::Configuration(format!(
                    "config line {} is not key=value: '{line}'",
                    index + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "omega0" => self.omega0 = Some(parse_number(key, value)?),
                "temperature" => self.temperature = Some(parse_number(key, value)?),
                "gamma1" => self.gamma1 = Some(parse_number(key, value)?),
                "gamma2" => {
                    if matches!(self.gamma, Some(GammaSpec::Phi(_))) {
                        return Err(both_gammas());
                    }
                    self.gamma = Some(GammaSpec::Total(parse_number(key, value)?));
                }
                "gamma_phi" => {
                    if matches!(self.gamma, Some(GammaSpec::Total(_))) {
                        return Err(both_gammas());
                    }
                    self.gamma = Some(GammaSpec::Phi(parse_number(key, value)?));
                }
                "t_min" => self.t_min = Some(parse_number(key, value)?),
                "t_max" => self.t_max = Some(parse_number(key, value)?),
                "samples" => {
                    self.samples = Some(value.parse().map_err(|_| {
                        CoreError::Configuration(format!(
                            "config key 'samples' has a non-integer value '{value}'"
                        ))
                    })?);
                }
                "out" => self.out = Some(PathBuf::from(value)),
                "format" => {
                    self.format = Some(match value {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        other => {
                            return Err(CoreError::Configuration(format!(
                                "config key 'format' must be csv or json, got '{other}'"
                            )))
                        }
                    });
                }
                other => {
                    return Err(CoreError::Configuration(format!(
                        "unknown config key '{other}'"
                    )));
                }
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, flags: &Overrides) {
        if let Some(v) = flags.omega0 {
            self.omega0 = Some(v);
        }
        if let Some(v) = flags.temperature {
            self.temperature = Some(v);
        }
        if let Some(v) = flags.gamma1 {
            self.gamma1 = Some(v);
        }
        if let Some(v) = flags.gamma2 {
            self.gamma = Some(GammaSpec::Total(v));
        }
        if let Some(v) = flags.gamma_phi {
            self.gamma = Some(GammaSpec::Phi(v));
        }
        if let Some(v) = flags.t_min {
            self.t_min = Some(v);
        }
        if let Some(v) = flags.t_max {
            self.t_max = Some(v);
        }
        if let Some(v) = flags.samples {
            self.samples = Some(v);
        }
        if let Some(v) = &flags.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = flags.format {
            self.format = Some(v);
        }
    }

    fn build(self) -> CoreResult<RunConfig> {
        let omega0 = self.omega0.unwrap_or(1.0);
        let temperature = self.temperature.unwrap_or(1.0);
        let gamma1 = self.gamma1.unwrap_or(0.9);
        let params = match self.gamma.unwrap_or(GammaSpec::Phi(0.75)) {
            GammaSpec::Phi(phi) => ModelParams::new(omega0, temperature, gamma1, phi)?,
            GammaSpec::Total(g2) => ModelParams::from_gamma2(omega0, temperature, gamma1, g2)?,
        };
        let t_min = self.t_min.unwrap_or(0.0);
        let t_max = self.t_max.unwrap_or(10.0);
        let samples = self.samples.unwrap_or(400);
        if !t_min.is_finite() || t_min < 0.0 {
            return Err(CoreError::Parameter {
                name: "t_min",
                value: t_min,
                reason: "must be finite and nonnegative",
            });
        }
        if !t_max.is_finite() || t_max <= t_min {
            return Err(CoreError::Parameter {
                name: "t_max",
                value: t_max,
                reason: "must be finite and above t_min",
            });
        }
        if samples < 2 {
            return Err(CoreError::Parameter {
                name: "samples",
                value: samples as f64,
                reason: "a scan needs at least 2 samples",
            });
        }
        Ok(RunConfig {
            params,
            t_min,
            t_max,
            samples,
            out: self.out.unwrap_or_else(|| PathBuf::from(".")),
            format: self.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

fn both_gammas() -> CoreError {
    CoreError::Configuration(
        "config sets both gamma2 and gamma_phi; give the transverse rate one way".into(),
    )
}

/// Resolves defaults, the optional config file, flags, and `TEMPWIT_OUT`
/// into a validated [`RunConfig`].
pub fn resolve(overrides: &Overrides) -> CoreResult<RunConfig> {
    let mut builder = Builder::default();
    if let Some(path) = &overrides.config {
        let text = std::fs::read_to_string(path).map_err(|err| {
            CoreError::Configuration(format!("cannot read config {}: {err}", path.display()))
        })?;
        builder.apply_file(&text)?;
    }
    builder.apply_flags(overrides);
    if let Ok(dir) = std::env::var("TEMPWIT_OUT") {
        if !dir.is_empty() {
            builder.out = Some(PathBuf::from(dir));
        }
    }
    builder.build()
}

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Run parameters shared by every subcommand. Flags a command does not use
/// are ignored. A `--config` JSON file supplies defaults; flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// cylinder-plane, sphere-plane, two-spheres, paraboloid, inclined-cylinders or plates
    #[arg(long)]
    pub geometry: Option<String>,
    /// electrostatic, dirichlet, neumann, em, dn, nd or power-law
    #[arg(long)]
    pub kernel: Option<String>,
    /// Minimal separation
    #[arg(long)]
    pub a: Option<f64>,
    /// Radius of the (first) curved surface
    #[arg(long = "R", visible_alias = "R1")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Radius of the second surface
    #[arg(long = "R2")]
    #[serde(rename = "R2")]
    pub r2: Option<f64>,
    /// Inclination angle in radians
    #[arg(long)]
    pub theta: Option<f64>,
    /// Cylinder length
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Spacetime dimension parameter of the Dirichlet kernel
    #[arg(long)]
    pub d: Option<u32>,
    /// Exponent of a power-law kernel
    #[arg(long)]
    pub p: Option<f64>,
    /// Kernel amplitude (eps0 V0^2 for electrostatics)
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Override the stored DE coefficient
    #[arg(long = "beta-coefficient")]
    pub beta_coefficient: Option<f64>,
    /// Inverse temperature; omit for zero temperature
    #[arg(long = "inverse-temperature")]
    pub inverse_temperature: Option<f64>,
    /// Fraction of the radius kept by truncated profiles
    #[arg(long)]
    pub frac: Option<f64>,
    /// Dimensionless a/beta for thermal coefficients
    #[arg(long)]
    pub xi: Option<f64>,
    /// Largest momentum of a form-factor scan
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Number of samples in a scan
    #[arg(long)]
    pub samples: Option<usize>,
    /// Static polarizability
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Resonance frequency of a single-resonance polarizability
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Table to print: beta or thermal-ratio
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file with default values for any of these flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Params {
    /// Merge with the config file, if any. Values given as flags take precedence.
    pub fn resolve(self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let base = load_config(&path)?;
        let mut merged = serde_json::to_value(base).expect("params serialize");
        let flags = serde_json::to_value(&self).expect("params serialize");
        if let (Value::Object(m), Value::Object(f)) = (&mut merged, flags) {
            for (k, v) in f {
                if !v.is_null() {
                    m.insert(k, v);
                }
            }
        }
        let mut out: Params = serde_json::from_value(merged).map_err(|e| CliError::Usage(e.to_string()))?;
        out.config = Some(path);
        Ok(out)
    }

    pub fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
    }
}

fn load_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

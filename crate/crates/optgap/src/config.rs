use std::path::{Path, PathBuf};

use optgap_core::computable::set_step_budget;
use optgap_core::rational::{parse_rational, Rational};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const STEP_BUDGET_ENV: &str = "OPTGAP_STEP_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every subcommand; a JSON file may supply them and
/// command-line flags override individual fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub precision: u32,
    pub iterations: u32,
    /// Rational tolerance as `p/q`, an integer or a decimal.
    pub tol: String,
    /// Path samples per side for `validate`.
    pub samples: usize,
    /// Number of dyadic exponents `j` in the gap grid `t = +-2^-j`.
    pub gap_depth: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            precision: 16,
            iterations: 200,
            tol: "1/100".into(),
            samples: 50,
            gap_depth: 16,
            seed: 0,
            out_dir: PathBuf::from("optgap-out"),
            formats: vec![Format::Json, Format::Csv],
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn tolerance(&self) -> Result<Rational, CliError> {
        let tol = parse_rational(&self.tol).map_err(|e| CliError::Config(e.to_string()))?;
        if !tol.is_positive() {
            return Err(CliError::Config(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.tolerance()?;
        if self.precision == 0 || self.iterations == 0 || self.gap_depth == 0 {
            return Err(CliError::Config("precision, iterations and gap depth must be at least 1".into()));
        }
        if self.samples < 2 {
            return Err(CliError::Config("samples must be at least 2".into()));
        }
        if self.formats.is_empty() {
            return Err(CliError::Config("at least one output format is required".into()));
        }
        Ok(())
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Applies the step budget from the environment, if set.
pub fn apply_step_budget_env() -> Result<Option<u64>, CliError> {
    match std::env::var(STEP_BUDGET_ENV) {
        Ok(raw) => {
            let steps: u64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{STEP_BUDGET_ENV}={raw} is not a step count")))?;
            set_step_budget(steps);
            Ok(Some(steps))
        }
        Err(_) => Ok(None),
    }
}

//! Suite configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pipelines::{Tolerances, VerifyOptions};
use super::report::Theorem;
use crate::error::{Error, Result};
use crate::geometry::DomainConfig;
use crate::params::ThresholdRule;
use crate::weights::WeightConfig;

fn default_h() -> f64 {
    VerifyOptions::default().h
}

fn default_refinements() -> usize {
    VerifyOptions::default().refinements
}

/// `{"domains": [...], "weights": [...], "theorems": [...], "h": .., "refinements": .., "tolerances": {..}}`
///
/// Every (domain, weight, theorem) triple is checked; theorems that do not
/// apply to the weight family are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub domains: Vec<DomainConfig>,
    #[serde(default)]
    pub weights: Vec<WeightConfig>,
    #[serde(default)]
    pub theorems: Vec<Theorem>,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_refinements")]
    pub refinements: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub f_threshold: ThresholdRule,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config")
    }
}

impl SuiteConfig {
    /// Parses JSON text; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("h must be positive, got {}", self.h)));
        }
        let t = self.tolerances;
        if !(t.identity > 0.0 && t.slack >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative (identity > 0)".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> VerifyOptions {
        VerifyOptions {
            h: self.h,
            refinements: self.refinements,
            threshold_rule: self.f_threshold,
            tolerances: self.tolerances,
            ..VerifyOptions::default()
        }
    }
}

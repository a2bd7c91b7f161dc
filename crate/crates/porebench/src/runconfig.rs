//! JSON run configuration shared by the CLI commands.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classify::AlgorithmConfig;
use crate::data::GenConfig;
use crate::error::{Error, Result};
use crate::eval::SplitConfig;
use crate::tune::SearchSpace;

/// On-disk run configuration. Every section is optional; command-line
/// flags take precedence over values given here. Unknown keys are
/// rejected, naming the offending key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub gen_config: Option<GenConfig>,
    pub split: Option<SplitConfig>,
    pub algorithms: Option<Vec<AlgorithmConfig>>,
    pub search_space: Option<SearchSpace>,
    pub out: Option<PathBuf>,
}

impl RunConfigFile {
    pub fn from_json(text: &str) -> Result<RunConfigFile> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("run config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfigFile> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

//! Optional JSON file supplying defaults for command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::commands::CliError;
use crate::Format;

/// Either `"a,b"` or `["a", "b"]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ListOrString {
    List(Vec<String>),
    Joined(String),
}

impl ListOrString {
    pub fn joined(&self) -> String {
        match self {
            ListOrString::List(items) => items.join(","),
            ListOrString::Joined(s) => s.clone(),
        }
    }
}

/// Keys mirror the long flag names; flags given on the command line win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<PathBuf>,
    pub model2: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub features: Option<ListOrString>,
    pub loss: Option<String>,
    pub priors: Option<ListOrString>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub ranges: Vec<String>,
    pub grid: Option<String>,
    pub plot_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Loads the file, resolving relative paths against its directory.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.model,
            &mut cfg.model2,
            &mut cfg.data,
            &mut cfg.out,
            &mut cfg.plot_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

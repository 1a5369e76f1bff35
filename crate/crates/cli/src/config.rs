//! Settings resolution: command-line flags override the config file, which
//! overrides built-in defaults.
//!
//! The config file is TOML with these optional keys:
//!
//! ```toml
//! prefix = ";; "
//! begin = "\\begin{code}"
//! end = "\\end{code}"
//! strict = true
//! allow_n = false
//! format = "human"   # or "json"
//! ```
//!
//! Its path comes from `--config` or the `LITONTO_CONFIG` environment
//! variable.

use std::fs;
use std::path::Path;

use litonto::lentic::{ConfigError, LiterateConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub prefix: Option<String>,
    pub begin: Option<String>,
    pub end: Option<String>,
    pub strict: Option<bool>,
    pub allow_n: Option<bool>,
    pub format: Option<OutputFormat>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Default)]
pub struct FlagConfig {
    pub prefix: Option<String>,
    pub begin: Option<String>,
    pub end: Option<String>,
    pub strict: Option<bool>,
    pub allow_n: bool,
    pub json: bool,
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub literate: LiterateConfig,
    pub allow_n: bool,
    pub format: OutputFormat,
}

impl CliConfig {
    pub fn resolve(flags: FlagConfig, file: FileConfig) -> Result<CliConfig, ConfigError> {
        let defaults = LiterateConfig::default();
        let prefix = flags.prefix.or(file.prefix).unwrap_or_else(|| defaults.comment_prefix().to_owned());
        let begin = flags.begin.or(file.begin).unwrap_or_else(|| defaults.begin_marker().to_owned());
        let end = flags.end.or(file.end).unwrap_or_else(|| defaults.end_marker().to_owned());
        let strict = flags.strict.or(file.strict).unwrap_or(true);
        let literate = LiterateConfig::new(prefix, begin, end)?.with_strict(strict);
        let format = if flags.json {
            OutputFormat::Json
        } else {
            file.format.unwrap_or(OutputFormat::Human)
        };
        Ok(CliConfig {
            literate,
            allow_n: flags.allow_n || file.allow_n.unwrap_or(false),
            format,
        })
    }
}

//! Error-to-exit-code mapping and output sinks shared by the subcommands.

use std::fs;
use std::path::Path;

/// Usage/configuration problems exit 1; data/format problems exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<adcr_core::Error> for CliError {
    fn from(err: adcr_core::Error) -> Self {
        match err {
            adcr_core::Error::Parameter(_) => CliError::Usage(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

/// Write `text` to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(CliError::from),
        None => {
            println!("{}", text.trim_end_matches('\n'));
            Ok(())
        }
    }
}

/// Resolve the saliency configuration: an explicit JSON file wins over the
/// named preset.
pub fn resolve_config(
    preset_name: &str,
    config_path: Option<&Path>,
) -> CliResult<adcr_core::saliency::SaliencyConfig> {
    if let Some(path) = config_path {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())));
    }
    match adcr_core::saliency::preset(preset_name) {
        Some(p) => Ok(p.config),
        None => {
            let names: Vec<&str> = adcr_core::saliency::presets().iter().map(|p| p.name).collect();
            Err(CliError::Usage(format!(
                "unknown preset '{preset_name}'; available: {}",
                names.join(", ")
            )))
        }
    }
}

use std::path::Path;

use adcr_core::saliency::presets;
use serde_json::json;

use crate::output::{emit, CliResult};

pub fn run(out: Option<&Path>) -> CliResult<()> {
    let listing: Vec<serde_json::Value> = presets()
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "nominal_fs_hz": p.nominal_fs,
                "config": p.config,
            })
        })
        .collect();
    emit(out, &serde_json::to_string_pretty(&listing).expect("serializable presets"))
}

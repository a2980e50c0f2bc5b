use std::path::Path;

use adcr_core::codec::{reconstruct_with_report, ReconstructionPath};
use adcr_core::{container, metrics};
use serde_json::json;

use crate::output::{emit, CliError, CliResult};

pub fn run(input: &Path, output: &Path, original: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let compressed = container::read_container(input)?;
    let (segment, path) = reconstruct_with_report(&compressed);
    container::write_raw_segment(output, &segment)?;

    let mut summary = json!({
        "input": input.display().to_string(),
        "output": output.display().to_string(),
        "samples": segment.num_samples(),
        "channels": segment.num_channels(),
        "sample_rate_hz": segment.sample_rate(),
        "reconstruction": path,
        "used_fallback": path == ReconstructionPath::Fallback,
    });

    if let Some(original_path) = original {
        let reference = container::read_raw_segment(original_path)?;
        let report = metrics::fidelity_report(&reference, &segment, compressed.realized_keep_ratio())?;
        summary["fidelity"] = serde_json::to_value(&report)
            .map_err(|e| CliError::Data(format!("fidelity serialization: {e}")))?;
    }
    emit(out, &serde_json::to_string_pretty(&summary).expect("serializable summary"))
}

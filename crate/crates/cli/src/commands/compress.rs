use std::path::Path;

use adcr_core::{codec, container};
use serde_json::json;

use crate::output::{emit, resolve_config, CliResult};

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &Path,
    output: &Path,
    ratio: f64,
    preset: &str,
    saliency_config: Option<&Path>,
    dmax: u32,
    out: Option<&Path>,
) -> CliResult<()> {
    let config = resolve_config(preset, saliency_config)?;
    let segment = container::read_raw_segment(input)?;
    let (compressed, report) = codec::compress(&segment, ratio, &config, dmax)?;
    container::write_container(output, &compressed)?;

    let raw_scalars = segment.num_samples() as u64 * segment.num_channels() as u64;
    let summary = json!({
        "input": input.display().to_string(),
        "output": output.display().to_string(),
        "samples": segment.num_samples(),
        "channels": segment.num_channels(),
        "sample_rate_hz": segment.sample_rate(),
        "keep_ratio_target": ratio,
        "realized_keep_ratio": report.realized_keep_ratio,
        "rate": { "u": report.rate_numerator, "d": report.rate_denominator },
        "protected_count": report.protected_count,
        "stored_scalars": compressed.stored_scalars(),
        "raw_scalars": raw_scalars,
        "budget_overshoot": report.budget_overshoot,
        "saliency_fallback": report.saliency_fallback,
    });
    emit(out, &serde_json::to_string_pretty(&summary).expect("serializable summary"))
}

use std::fs;
use std::path::Path;

use adcr_core::container;
use adcr_core::synth::{generate, SynthSpec};
use serde::Deserialize;
use serde_json::json;

use crate::output::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct GenSpec {
    #[serde(flatten)]
    synth: SynthSpec,
    #[serde(default)]
    seed: u64,
    /// Number of segments; each uses `seed + index`.
    #[serde(default = "one")]
    count: usize,
    /// Stem for output file names.
    #[serde(default = "default_name")]
    name: String,
}

fn one() -> usize {
    1
}

fn default_name() -> String {
    "segment".into()
}

pub fn run(spec_path: &Path, out_dir: &Path, seed_override: Option<u64>) -> CliResult<()> {
    let text = fs::read_to_string(spec_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", spec_path.display())))?;
    let spec: GenSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", spec_path.display())))?;
    let base_seed = seed_override.unwrap_or(spec.seed);
    fs::create_dir_all(out_dir)?;

    let mut files = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let (segment, truth) = generate(&spec.synth, base_seed + i as u64)?;
        let stem = format!("{}_{i:03}", spec.name);
        let raw_path = out_dir.join(format!("{stem}.raw"));
        container::write_raw_segment(&raw_path, &segment)?;
        let events_path = out_dir.join(format!("{stem}.events.json"));
        fs::write(
            &events_path,
            serde_json::to_string_pretty(&truth).expect("serializable truth"),
        )?;
        files.push(raw_path.display().to_string());
    }

    let summary = json!({
        "spec": spec_path.display().to_string(),
        "out_dir": out_dir.display().to_string(),
        "seed": base_seed,
        "count": spec.count,
        "files": files,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable summary"));
    Ok(())
}

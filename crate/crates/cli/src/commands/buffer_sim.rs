use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use adcr_core::buffer::{Admission, Buffer, BufferConfig, BufferEntry, Provenance, RejectReason};
use adcr_core::{codec, container};
use serde_json::json;

use crate::output::{emit, resolve_config, CliError, CliResult};

pub struct Args {
    pub manifest: PathBuf,
    pub budget_true: u64,
    pub budget_pseudo: u64,
    pub ratio: f64,
    pub preset: String,
    pub saliency_config: Option<PathBuf>,
    pub dmax: u32,
    pub conf_threshold: f64,
    pub min_windows: usize,
    pub mix: String,
    pub batch_size: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

struct ManifestRow {
    path: PathBuf,
    label: u32,
    provenance: Provenance,
    confidences: Vec<f64>,
    feature: Vec<f32>,
}

fn parse_mix(s: &str) -> CliResult<(u32, u32)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 2 {
        if let (Ok(t), Ok(p)) = (parts[0].parse::<u32>(), parts[1].parse::<u32>()) {
            if t + p > 0 {
                return Ok((t, p));
            }
        }
    }
    Err(CliError::Usage(format!("bad mix ratio '{s}', expected like 8:2")))
}

fn parse_row(line: &str, base: &std::path::Path) -> Result<ManifestRow, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(format!("expected 5 tab-separated fields, got {}", fields.len()));
    }
    let label: u32 = fields[1].parse().map_err(|_| format!("bad label '{}'", fields[1]))?;
    let provenance = match fields[2] {
        "true" => Provenance::TrueLabel,
        "pseudo" => Provenance::PseudoLabel,
        other => return Err(format!("bad provenance '{other}'")),
    };
    let parse_list = |s: &str| -> Result<Vec<f64>, String> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad number '{v}'")))
            .collect()
    };
    let confidences = parse_list(fields[3])?;
    let feature: Vec<f32> = parse_list(fields[4])?.into_iter().map(|v| v as f32).collect();
    let mut path = PathBuf::from(fields[0]);
    if path.is_relative() {
        path = base.join(path);
    }
    Ok(ManifestRow {
        path,
        label,
        provenance,
        confidences,
        feature,
    })
}

pub fn run(args: Args) -> CliResult<()> {
    let config = resolve_config(&args.preset, args.saliency_config.as_deref())?;
    let mix = parse_mix(&args.mix)?;
    let manifest_text = fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.manifest.display())))?;
    let base = args
        .manifest
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_default();

    let mut buffer_config = BufferConfig::new(args.budget_true, args.budget_pseudo);
    buffer_config.conf_threshold = args.conf_threshold;
    buffer_config.min_windows = args.min_windows;
    buffer_config.mix_ratio = mix;
    let mut buffer = Buffer::new(buffer_config);

    let mut log = String::new();
    let mut counts = (0u64, 0u64, 0u64, 0u64, 0u64); // inserted, admitted, rejected, evicted_true, evicted_pseudo

    for (line_no, line) in manifest_text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let row = match parse_row(line, &base) {
            Ok(row) => row,
            Err(reason) => {
                eprintln!("warning: manifest line {}: {reason}", line_no + 1);
                continue;
            }
        };
        let segment = match container::read_raw_segment(&row.path) {
            Ok(seg) => seg,
            Err(err) => {
                eprintln!("warning: manifest line {}: {err}", line_no + 1);
                continue;
            }
        };
        let compressed = match codec::compress(&segment, args.ratio, &config, args.dmax) {
            Ok((compressed, _)) => compressed,
            Err(err) => {
                eprintln!("warning: manifest line {}: {err}", line_no + 1);
                continue;
            }
        };
        let cost = compressed.stored_scalars();
        let entry = BufferEntry {
            payload: compressed,
            label: row.label,
            provenance: row.provenance,
            window_confidences: row.confidences,
            feature: row.feature,
        };
        let event = match row.provenance {
            Provenance::TrueLabel => match buffer.insert_true(entry) {
                Ok(evicted) => {
                    counts.0 += 1;
                    counts.3 += evicted.len() as u64;
                    json!({
                        "event": "insert",
                        "line": line_no + 1,
                        "label": row.label,
                        "cost": cost,
                        "evicted": evicted.len(),
                    })
                }
                Err(err) => {
                    eprintln!("warning: manifest line {}: {err}", line_no + 1);
                    continue;
                }
            },
            Provenance::PseudoLabel => match buffer.admit_pseudo(entry) {
                Admission::Accepted { evicted } => {
                    counts.1 += 1;
                    counts.4 += evicted.len() as u64;
                    json!({
                        "event": "admit",
                        "line": line_no + 1,
                        "label": row.label,
                        "cost": cost,
                        "evicted": evicted.len(),
                    })
                }
                Admission::Rejected(reason) => {
                    counts.2 += 1;
                    let reason_value = match reason {
                        RejectReason::BelowGate { passing, required } => json!({
                            "kind": "below_gate",
                            "passing": passing,
                            "required": required,
                        }),
                        RejectReason::Malformed(msg) => json!({
                            "kind": "malformed",
                            "detail": msg,
                        }),
                    };
                    json!({
                        "event": "reject",
                        "line": line_no + 1,
                        "label": row.label,
                        "reason": reason_value,
                    })
                }
            },
        };
        writeln!(log, "{event}").expect("string write");
    }

    let batch = buffer.sample_replay_batch(args.batch_size, args.seed);
    let composition: Vec<serde_json::Value> = batch
        .iter()
        .map(|s| json!({ "label": s.label, "provenance": s.provenance.as_str() }))
        .collect();
    writeln!(log, "{}", json!({ "event": "replay", "seed": args.seed, "batch": composition }))
        .expect("string write");
    writeln!(
        log,
        "{}",
        json!({
            "event": "final",
            "true_count": buffer.true_entries().len(),
            "true_cost": buffer.true_cost(),
            "budget_true": args.budget_true,
            "pseudo_count": buffer.pseudo_entries().len(),
            "pseudo_cost": buffer.pseudo_cost(),
            "budget_pseudo": args.budget_pseudo,
            "inserted_true": counts.0,
            "admitted_pseudo": counts.1,
            "rejected_pseudo": counts.2,
            "evicted_true": counts.3,
            "evicted_pseudo": counts.4,
        })
    )
    .expect("string write");

    emit(args.out.as_deref(), &log)
}

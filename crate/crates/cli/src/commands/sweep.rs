use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use adcr_core::{codec, container, metrics};
use serde_json::json;

use crate::output::{emit, resolve_config, CliError, CliResult};
use crate::OutputFormat;

struct RatioRow {
    ratio: f64,
    realized: f64,
    pearson: f64,
    snr_db: f64,
    psd_cosine: f64,
    ok: usize,
    failed: usize,
}

pub fn run(
    inputs: &[PathBuf],
    ratios: &str,
    preset: &str,
    saliency_config: Option<&Path>,
    dmax: u32,
    format: OutputFormat,
    out: Option<&Path>,
) -> CliResult<()> {
    let config = resolve_config(preset, saliency_config)?;
    let ratios: Vec<f64> = ratios
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad ratio '{s}'")))
        })
        .collect::<CliResult<_>>()?;
    if ratios.is_empty() {
        return Err(CliError::Usage("at least one ratio is required".into()));
    }
    for &r in &ratios {
        if !(r > 0.0 && r <= 1.0) {
            return Err(CliError::Usage(format!("ratio {r} outside (0, 1]")));
        }
    }

    let mut rows = Vec::with_capacity(ratios.len());
    for &ratio in &ratios {
        let mut sums = (0.0, 0.0, 0.0, 0.0); // realized, pearson, snr, psdcos
        let mut ok = 0usize;
        let mut failed = 0usize;
        for input in inputs {
            match sweep_one(input, ratio, &config, dmax) {
                Ok((realized, report)) => {
                    sums.0 += realized;
                    sums.1 += report.mean_pearson_r;
                    sums.2 += report.mean_snr_db;
                    sums.3 += report.mean_psd_cosine;
                    ok += 1;
                }
                Err(err) => {
                    eprintln!("warning: {} at ratio {ratio}: {err}", input.display());
                    failed += 1;
                }
            }
        }
        let denom = ok.max(1) as f64;
        rows.push(RatioRow {
            ratio,
            realized: sums.0 / denom,
            pearson: sums.1 / denom,
            snr_db: sums.2 / denom,
            psd_cosine: sums.3 / denom,
            ok,
            failed,
        });
    }

    let text = match format {
        OutputFormat::Csv => {
            let mut csv = String::from("ratio,realized_ratio,pearson_r,snr_db,psd_cosine,segments_ok,segments_failed\n");
            for row in &rows {
                writeln!(
                    csv,
                    "{},{:.6},{:.6},{:.6},{:.6},{},{}",
                    row.ratio, row.realized, row.pearson, row.snr_db, row.psd_cosine, row.ok, row.failed
                )
                .expect("string write");
            }
            csv
        }
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "ratio": row.ratio,
                        "realized_ratio": row.realized,
                        "pearson_r": row.pearson,
                        "snr_db": row.snr_db,
                        "psd_cosine": row.psd_cosine,
                        "segments_ok": row.ok,
                        "segments_failed": row.failed,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&items).expect("serializable rows")
        }
    };
    emit(out, &text)
}

fn sweep_one(
    input: &Path,
    ratio: f64,
    config: &adcr_core::saliency::SaliencyConfig,
    dmax: u32,
) -> adcr_core::Result<(f64, metrics::FidelityReport)> {
    let segment = container::read_raw_segment(input)?;
    let (compressed, report) = codec::compress(&segment, ratio, config, dmax)?;
    let restored = codec::reconstruct(&compressed);
    let fidelity = metrics::fidelity_report(&segment, &restored, report.realized_keep_ratio)?;
    Ok((report.realized_keep_ratio, fidelity))
}

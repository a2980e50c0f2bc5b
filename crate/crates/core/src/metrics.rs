//! Reconstruction fidelity measures (Pearson r, SNR, spectral cosine) and
//! the plasticity/stability scores computed from prediction logs.

use serde::Serialize;

use crate::dsp::welch_psd;
use crate::error::{Error, Result};
use crate::types::Segment;

/// SNR is clamped to this many dB; exact matches report the cap.
pub const SNR_CAP_DB: f64 = 100.0;

/// Sample Pearson correlation. Degenerate inputs (either side constant)
/// report 0 by convention.
pub fn pearson_r(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "pearson_r needs equal lengths");
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    (cov / (vx * vy).sqrt()).clamp(-1.0, 1.0)
}

/// `10 * log10(signal power / error power)`, clamped to
/// `[-SNR_CAP_DB, SNR_CAP_DB]`. Exact matches report the cap; an all-zero
/// signal with nonzero error reports the floor.
pub fn snr_db(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "snr_db needs equal lengths");
    let signal: f64 = x.iter().map(|v| v * v).sum();
    let error: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    if error == 0.0 {
        return SNR_CAP_DB;
    }
    if signal == 0.0 {
        return -SNR_CAP_DB;
    }
    (10.0 * (signal / error).log10()).clamp(-SNR_CAP_DB, SNR_CAP_DB)
}

/// Cosine similarity between the Welch power spectra of the two sequences.
/// Two all-zero spectra compare as 1 (identical); exactly one zero spectrum
/// compares as 0.
pub fn psd_cosine(x: &[f64], y: &[f64], fs: f64) -> Result<f64> {
    let (_, px) = welch_psd(x, fs)?;
    let (_, py) = welch_psd(y, fs)?;
    let dot: f64 = px.iter().zip(py.iter()).map(|(a, b)| a * b).sum();
    let nx: f64 = px.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny: f64 = py.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 && ny == 0.0 {
        return Ok(1.0);
    }
    if nx == 0.0 || ny == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nx * ny)).clamp(0.0, 1.0))
}

/// Per-channel fidelity of one reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelFidelity {
    pub pearson_r: f64,
    pub snr_db: f64,
    pub psd_cosine: f64,
}

/// Fidelity of a reconstruction against its original, per channel and
/// averaged.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub per_channel: Vec<ChannelFidelity>,
    pub mean_pearson_r: f64,
    pub mean_snr_db: f64,
    pub mean_psd_cosine: f64,
    pub realized_keep_ratio: f64,
}

/// Compare a reconstruction to its original. Both segments must share the
/// same geometry and have at least 16 samples (for the spectral term).
pub fn fidelity_report(
    original: &Segment,
    reconstructed: &Segment,
    realized_keep_ratio: f64,
) -> Result<FidelityReport> {
    if original.num_channels() != reconstructed.num_channels()
        || original.num_samples() != reconstructed.num_samples()
    {
        return Err(Error::InvalidData(
            "original and reconstruction have different shapes".into(),
        ));
    }
    let fs = original.sample_rate();
    let channels = original.num_channels();
    let mut per_channel = Vec::with_capacity(channels);
    for c in 0..channels {
        let x = original.channel_f64(c);
        let y = reconstructed.channel_f64(c);
        per_channel.push(ChannelFidelity {
            pearson_r: pearson_r(&x, &y),
            snr_db: snr_db(&x, &y),
            psd_cosine: psd_cosine(&x, &y, fs)?,
        });
    }
    let mean = |f: fn(&ChannelFidelity) -> f64| {
        per_channel.iter().map(f).sum::<f64>() / channels as f64
    };
    Ok(FidelityReport {
        mean_pearson_r: mean(|c| c.pearson_r),
        mean_snr_db: mean(|c| c.snr_db),
        mean_psd_cosine: mean(|c| c.psd_cosine),
        per_channel,
        realized_keep_ratio,
    })
}

/// Predictions recorded for one (adaptation step, subject) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u32,
    pub subject: u32,
    /// `(predicted, true)` label pairs.
    pub pairs: Vec<(u32, u32)>,
}

/// Per-step, per-subject predicted/true label records over `steps`
/// adaptation steps. Current-subject records (`subject == step`) feed the
/// plasticity scores; future-subject records (`subject > step`) feed the
/// stability scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionLog {
    pub records: Vec<StepRecord>,
    pub steps: u32,
}

/// Plasticity and stability scores, as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub accuracy: f64,
    pub macro_f1: f64,
}

impl std::fmt::Display for Scores {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.1}/{:.1}", self.accuracy, self.macro_f1)
    }
}

fn accuracy(pairs: &[(u32, u32)]) -> f64 {
    let correct = pairs.iter().filter(|(p, t)| p == t).count();
    correct as f64 / pairs.len() as f64
}

/// Macro-averaged F1 over the classes present in truth or predictions.
fn macro_f1(pairs: &[(u32, u32)]) -> f64 {
    let mut classes: Vec<u32> = pairs.iter().flat_map(|&(p, t)| [p, t]).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut total = 0.0;
    for &class in &classes {
        let tp = pairs.iter().filter(|&&(p, t)| p == class && t == class).count() as f64;
        let fp = pairs.iter().filter(|&&(p, t)| p == class && t != class).count() as f64;
        let fn_ = pairs.iter().filter(|&&(p, t)| p != class && t == class).count() as f64;
        let denom = 2.0 * tp + fp + fn_;
        total += if denom == 0.0 { 0.0 } else { 2.0 * tp / denom };
    }
    total / classes.len() as f64
}

fn find_record(log: &PredictionLog, step: u32, subject: u32) -> Result<&StepRecord> {
    let mut found: Option<&StepRecord> = None;
    for rec in &log.records {
        if rec.step == step && rec.subject == subject {
            if found.is_some() {
                return Err(Error::InvalidData(format!(
                    "duplicate record for step {step}, subject {subject}"
                )));
            }
            found = Some(rec);
        }
    }
    let rec = found.ok_or_else(|| {
        Error::IncompleteLog(format!("missing record for step {step}, subject {subject}"))
    })?;
    if rec.pairs.is_empty() {
        return Err(Error::InvalidData(format!(
            "empty record for step {step}, subject {subject}"
        )));
    }
    Ok(rec)
}

/// Current-subject performance averaged over all steps: the mean over
/// `t = 1..=T` of accuracy and macro-F1 on subject `t` at step `t`.
pub fn plasticity(log: &PredictionLog) -> Result<Scores> {
    if log.steps == 0 {
        return Err(Error::IncompleteLog("log has zero steps".into()));
    }
    let mut acc = 0.0;
    let mut f1 = 0.0;
    for t in 1..=log.steps {
        let rec = find_record(log, t, t)?;
        acc += accuracy(&rec.pairs);
        f1 += macro_f1(&rec.pairs);
    }
    let t = log.steps as f64;
    Ok(Scores {
        accuracy: 100.0 * acc / t,
        macro_f1: 100.0 * f1 / t,
    })
}

/// Future-subject performance: for each step `t < T`, average over the
/// not-yet-adapted subjects `s > t`, then average over steps.
pub fn stability(log: &PredictionLog) -> Result<Scores> {
    if log.steps < 2 {
        return Err(Error::IncompleteLog(
            "stability needs at least two adaptation steps".into(),
        ));
    }
    let mut acc = 0.0;
    let mut f1 = 0.0;
    for t in 1..log.steps {
        let mut step_acc = 0.0;
        let mut step_f1 = 0.0;
        let future = (t + 1)..=log.steps;
        let count = future.clone().count() as f64;
        for s in future {
            let rec = find_record(log, t, s)?;
            step_acc += accuracy(&rec.pairs);
            step_f1 += macro_f1(&rec.pairs);
        }
        acc += step_acc / count;
        f1 += step_f1 / count;
    }
    let t = (log.steps - 1) as f64;
    Ok(Scores {
        accuracy: 100.0 * acc / t,
        macro_f1: 100.0 * f1 / t,
    })
}

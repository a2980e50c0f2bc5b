//! Saliency trace, robust peak thresholding, and keyframe protection.
//!
//! The trace combines band-power envelopes (weighted by per-band robust
//! statistics) with rectified Teager-Kaiser transient energy. Peaks above a
//! median/MAD threshold expand into protected neighborhoods, greedily
//! admitted under a coverage cap, with both segment endpoints always kept.

use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{Error, Result};
use crate::types::{ProtectedSet, Segment};

/// Normal-consistent scale factor: `1 / Phi^-1(0.75)`, so that
/// `1.4826 * MAD` estimates the standard deviation of Gaussian data.
pub const MAD_SCALE: f64 = 1.4826;

/// Per-band weighting statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStat {
    /// Median of the band-power trace over time.
    Median,
    /// Mean after trimming this fraction from each tail.
    TrimmedMean(f64),
}

/// Parameters of the saliency pipeline. Time-valued fields (`rho_seconds`,
/// `smooth_window_seconds`) convert to samples with the segment's rate at
/// use time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaliencyConfig {
    /// Frequency bands in Hz, each `(low, high)` with `0 < low < high < fs/2`.
    pub bands: Vec<(f64, f64)>,
    pub weight_stat: WeightStat,
    /// Number of bands (largest robust statistic) that keep nonzero weight.
    pub top_k: usize,
    /// Weight of the Teager-Kaiser term.
    pub gamma: f64,
    /// Threshold multiplier in `tau = median + kappa * 1.4826 * MAD`.
    pub kappa: f64,
    /// Protection radius around each admitted peak, in seconds.
    pub rho_seconds: f64,
    /// Coverage cap: peak-derived protection is limited to `ceil(phi * N)`
    /// samples (the two forced endpoints are not counted against it).
    pub phi: f64,
    /// Smoothing window in seconds.
    pub smooth_window_seconds: f64,
    /// Peak-candidate stride in samples.
    pub stride: usize,
}

impl SaliencyConfig {
    /// Check the configuration against a segment's sample rate.
    pub fn validate(&self, fs: f64) -> Result<()> {
        if self.bands.is_empty() {
            return Err(Error::parameter("at least one frequency band is required"));
        }
        for &(lo, hi) in &self.bands {
            if !(lo > 0.0 && lo < hi && hi < fs / 2.0) {
                return Err(Error::parameter(format!(
                    "band ({lo}, {hi}) Hz must satisfy 0 < low < high < fs/2 = {}",
                    fs / 2.0
                )));
            }
        }
        if self.top_k == 0 || self.top_k > self.bands.len() {
            return Err(Error::parameter(format!(
                "top_k must be in [1, {}], got {}",
                self.bands.len(),
                self.top_k
            )));
        }
        if let WeightStat::TrimmedMean(alpha) = self.weight_stat {
            if !(0.0..0.5).contains(&alpha) {
                return Err(Error::parameter("trim fraction must be in [0, 0.5)"));
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::parameter("gamma must be >= 0"));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::parameter("phi must be in (0, 1)"));
        }
        if self.rho_seconds < 0.0 {
            return Err(Error::parameter("rho must be >= 0 seconds"));
        }
        if self.smooth_window_seconds < 0.0 {
            return Err(Error::parameter("smoothing window must be >= 0 seconds"));
        }
        if self.stride == 0 {
            return Err(Error::parameter("stride must be >= 1"));
        }
        Ok(())
    }

    /// Smoothing window in samples, clamped to `[1, n]`.
    pub fn smooth_samples(&self, fs: f64, n: usize) -> usize {
        ((self.smooth_window_seconds * fs).floor() as usize).clamp(1, n)
    }

    /// Protection radius in samples.
    pub fn rho_samples(&self, fs: f64) -> usize {
        (self.rho_seconds * fs).round() as usize
    }
}

/// A computed saliency trace with its threshold and detected peaks.
#[derive(Debug, Clone)]
pub struct SaliencyTrace {
    pub values: Vec<f64>,
    pub threshold: f64,
    pub peak_indices: Vec<usize>,
}

/// Named parameter preset.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    /// Sample rate the preset was tuned for (informational; the config works
    /// at any rate that keeps its bands below Nyquist).
    pub nominal_fs: f64,
    pub config: SaliencyConfig,
}

/// Built-in presets for the three supported recording styles.
pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "isruc",
            nominal_fs: 100.0,
            config: SaliencyConfig {
                bands: vec![(0.5, 4.0), (11.0, 16.0)],
                weight_stat: WeightStat::Median,
                top_k: 2,
                gamma: 0.3,
                kappa: 2.5,
                rho_seconds: 0.75,
                phi: 0.05,
                smooth_window_seconds: 0.5,
                stride: 5,
            },
        },
        Preset {
            name: "faced",
            nominal_fs: 250.0,
            config: SaliencyConfig {
                bands: vec![(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 30.0), (30.0, 45.0)],
                weight_stat: WeightStat::Median,
                top_k: 3,
                gamma: 0.1,
                kappa: 2.5,
                rho_seconds: 0.75,
                phi: 0.10,
                smooth_window_seconds: 0.5,
                stride: 5,
            },
        },
        Preset {
            name: "physionet-mi",
            nominal_fs: 160.0,
            config: SaliencyConfig {
                bands: vec![(6.0, 9.0), (8.0, 13.0), (13.0, 30.0)],
                weight_stat: WeightStat::TrimmedMean(0.1),
                top_k: 2,
                gamma: 0.3,
                kappa: 2.5,
                rho_seconds: 0.3,
                phi: 0.10,
                smooth_window_seconds: 0.1,
                stride: 5,
            },
        },
    ]
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

fn median(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn trimmed_mean(values: &[f64], alpha: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let cut = (alpha * sorted.len() as f64).floor() as usize;
    let kept = &sorted[cut..sorted.len() - cut];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Instantaneous power of one band: per-channel zero-phase bandpass followed
/// by the Hilbert envelope, averaged across channels, then smoothed over
/// `smooth_samples`.
pub fn band_power(segment: &Segment, band: (f64, f64), smooth_samples: usize) -> Result<Vec<f64>> {
    let fs = segment.sample_rate();
    let n = segment.num_samples();
    let taps = dsp::bandpass_taps(band.0, band.1, fs, 8.6, n)?;
    let mut mean = vec![0.0; n];
    for c in 0..segment.num_channels() {
        let x = segment.channel_f64(c);
        let filtered = dsp::filtfilt(&x, &taps)?;
        let envelope = dsp::hilbert_envelope(&filtered)?;
        for (m, e) in mean.iter_mut().zip(envelope.iter()) {
            *m += e;
        }
    }
    let channels = segment.num_channels() as f64;
    for m in &mut mean {
        *m /= channels;
    }
    dsp::moving_average(&mean, smooth_samples.clamp(1, n))
}

/// Rectified Teager-Kaiser energy, smoothed per channel and averaged.
fn teager_aggregate(segment: &Segment, smooth_samples: usize) -> Result<Vec<f64>> {
    let n = segment.num_samples();
    let mut mean = vec![0.0; n];
    for c in 0..segment.num_channels() {
        let x = segment.channel_f64(c);
        let energy = dsp::teager_kaiser(&x)?;
        let smoothed = dsp::moving_average(&energy, smooth_samples.clamp(1, n))?;
        for (m, e) in mean.iter_mut().zip(smoothed.iter()) {
            *m += e;
        }
    }
    let channels = segment.num_channels() as f64;
    for m in &mut mean {
        *m /= channels;
    }
    Ok(mean)
}

/// The scalar saliency trace: robustly weighted band powers plus the
/// gamma-scaled transient term.
///
/// Band weights are the configured robust statistic of each band-power
/// trace, restricted to the `top_k` largest and normalized to sum to one.
/// A segment whose selected statistics are all zero yields an all-zero
/// trace.
pub fn saliency_trace(segment: &Segment, config: &SaliencyConfig) -> Result<Vec<f64>> {
    let fs = segment.sample_rate();
    config.validate(fs)?;
    let n = segment.num_samples();
    let smooth = config.smooth_samples(fs, n);

    let mut powers = Vec::with_capacity(config.bands.len());
    for &band in &config.bands {
        powers.push(band_power(segment, band, smooth)?);
    }
    let stats: Vec<f64> = powers
        .iter()
        .map(|p| match config.weight_stat {
            WeightStat::Median => median(p),
            WeightStat::TrimmedMean(alpha) => trimmed_mean(p, alpha),
        })
        .collect();

    // top_k bands by statistic; ties resolve to the lower band index
    let mut order: Vec<usize> = (0..stats.len()).collect();
    order.sort_by(|&a, &b| stats[b].partial_cmp(&stats[a]).expect("finite stats").then(a.cmp(&b)));
    let selected = &order[..config.top_k];
    let total: f64 = selected.iter().map(|&i| stats[i]).sum();

    let mut trace = vec![0.0; n];
    if total > 0.0 {
        for &i in selected {
            let w = stats[i] / total;
            for (t, p) in trace.iter_mut().zip(powers[i].iter()) {
                *t += w * p;
            }
        }
    }
    if config.gamma > 0.0 {
        let tk = teager_aggregate(segment, smooth)?;
        for (t, e) in trace.iter_mut().zip(tk.iter()) {
            *t += config.gamma * e;
        }
    }
    Ok(trace)
}

/// Adaptive threshold `median + kappa * 1.4826 * MAD`. A zero MAD falls back
/// to the sample standard deviation; a fully constant trace yields its own
/// median so that nothing strictly exceeds it.
pub fn robust_threshold(values: &[f64], kappa: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let med = median(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let mad = median(&deviations);
    if mad > 0.0 {
        return med + kappa * MAD_SCALE * mad;
    }
    let n = values.len();
    if n > 1 {
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            return med + kappa * sd;
        }
    }
    med
}

/// Grid-restricted local maxima above the threshold. Candidates are the
/// indices `{0, s, 2s, ...}`; a candidate is a peak when it strictly exceeds
/// the threshold and is `>=` both grid neighbors (edge candidates compare
/// only to the neighbor that exists).
pub fn detect_peaks(values: &[f64], threshold: f64, stride: usize) -> Vec<usize> {
    assert!(stride >= 1, "stride must be >= 1");
    let n = values.len();
    let mut peaks = Vec::new();
    let mut p = 0;
    while p < n {
        if values[p] > threshold {
            let left_ok = p < stride || values[p] >= values[p - stride];
            let right_ok = p + stride >= n || values[p] >= values[p + stride];
            if left_ok && right_ok {
                peaks.push(p);
            }
        }
        p += stride;
    }
    peaks
}

/// Expand peaks into protected neighborhoods under the coverage cap.
///
/// Peaks are visited strongest-first (ties to the lower index); each marks
/// `[p - rho, p + rho]` clipped to the segment. A peak whose new indices
/// would push peak-derived coverage past `ceil(phi * n)` is skipped, and
/// later peaks that still fit are admitted. Both endpoints are forced in
/// afterwards and do not count against the cap.
pub fn build_protected_set(
    peaks: &[usize],
    values: &[f64],
    rho_samples: usize,
    phi: f64,
    n: usize,
) -> Result<ProtectedSet> {
    if n < 2 {
        return Err(Error::length("protection needs a segment of length >= 2"));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::parameter("phi must be in (0, 1)"));
    }
    let cap = (phi * n as f64).ceil() as usize;

    let mut order: Vec<usize> = peaks.to_vec();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite trace").then(a.cmp(&b)));

    let mut mask = vec![false; n];
    let mut covered = 0usize;
    for &p in &order {
        let lo = p.saturating_sub(rho_samples);
        let hi = (p + rho_samples).min(n - 1);
        let marginal = mask[lo..=hi].iter().filter(|&&m| !m).count();
        if covered + marginal > cap {
            continue;
        }
        for m in &mut mask[lo..=hi] {
            *m = true;
        }
        covered += marginal;
    }
    mask[0] = true;
    mask[n - 1] = true;

    let indices: Vec<u32> = mask
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i as u32))
        .collect();
    ProtectedSet::new(indices, n)
}

/// Run the full detection chain: trace, threshold, peaks.
pub fn analyze(segment: &Segment, config: &SaliencyConfig) -> Result<SaliencyTrace> {
    let values = saliency_trace(segment, config)?;
    let threshold = robust_threshold(&values, config.kappa);
    let peak_indices = detect_peaks(&values, threshold, config.stride);
    Ok(SaliencyTrace {
        values,
        threshold,
        peak_indices,
    })
}

/// Detection chain plus neighborhood expansion: the keyframe set for one
/// segment.
pub fn protected_set(segment: &Segment, config: &SaliencyConfig) -> Result<ProtectedSet> {
    let trace = analyze(segment, config)?;
    build_protected_set(
        &trace.peak_indices,
        &trace.values,
        config.rho_samples(segment.sample_rate()),
        config.phi,
        segment.num_samples(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthEvent, SynthSpec};

    fn isruc() -> SaliencyConfig {
        preset("isruc").unwrap().config
    }

    fn sinusoid_segment(freq: f64, amp: f64, fs: f64, n: usize, channels: usize) -> Segment {
        let row: Vec<f32> = (0..n)
            .map(|i| (amp * (std::f64::consts::TAU * freq * i as f64 / fs).sin()) as f32)
            .collect();
        Segment::from_channels(vec![row; channels], fs).unwrap()
    }

    #[test]
    fn band_power_tracks_in_band_sinusoid() {
        let seg = sinusoid_segment(13.0, 2.0, 100.0, 3000, 2);
        let p = band_power(&seg, (11.0, 16.0), 50).unwrap();
        for &v in &p[500..2500] {
            assert!((v - 2.0).abs() < 0.1, "in-band power {v}");
        }
    }

    #[test]
    fn band_power_rejects_out_of_band_sinusoid() {
        let seg = sinusoid_segment(35.0, 2.0, 100.0, 3000, 2);
        let p = band_power(&seg, (11.0, 16.0), 50).unwrap();
        for &v in &p[500..2500] {
            assert!(v < 0.1, "out-of-band leak {v}");
        }
    }

    #[test]
    fn band_power_of_zeros_is_zero() {
        let seg = Segment::from_channels(vec![vec![0.0; 2000]; 2], 100.0).unwrap();
        let p = band_power(&seg, (11.0, 16.0), 50).unwrap();
        assert!(p.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn band_power_rejects_invalid_band() {
        let seg = sinusoid_segment(13.0, 1.0, 100.0, 1000, 1);
        assert!(band_power(&seg, (40.0, 60.0), 50).is_err());
    }

    #[test]
    fn trace_of_zeros_is_zero() {
        let seg = Segment::from_channels(vec![vec![0.0; 3000]; 2], 100.0).unwrap();
        let s = saliency_trace(&seg, &isruc()).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_band_weight_is_unity() {
        let seg = sinusoid_segment(13.0, 1.5, 100.0, 3000, 1);
        let cfg = SaliencyConfig {
            bands: vec![(11.0, 16.0)],
            weight_stat: WeightStat::Median,
            top_k: 1,
            gamma: 0.0,
            kappa: 2.5,
            rho_seconds: 0.75,
            phi: 0.05,
            smooth_window_seconds: 0.5,
            stride: 5,
        };
        let s = saliency_trace(&seg, &cfg).unwrap();
        let p = band_power(&seg, (11.0, 16.0), cfg.smooth_samples(100.0, 3000)).unwrap();
        for (a, b) in s.iter().zip(p.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn burst_dominates_trace() {
        let spec = SynthSpec {
            fs: 100.0,
            length: 3200,
            channels: 2,
            noise_level: 1.0,
            events: vec![SynthEvent {
                center_s: 16.0,
                duration_s: 1.0,
                band: (11.0, 16.0),
                amplitude: 5.0,
            }],
        };
        let (seg, truth) = generate(&spec, 77).unwrap();
        let s = saliency_trace(&seg, &isruc()).unwrap();
        let ev = &truth[0];
        let inside: f64 =
            s[ev.start..ev.end].iter().sum::<f64>() / (ev.end - ev.start) as f64;
        let outside_count = s.len() - (ev.end - ev.start);
        let outside: f64 = (s[..ev.start].iter().sum::<f64>() + s[ev.end..].iter().sum::<f64>())
            / outside_count as f64;
        assert!(
            inside >= 3.0 * outside,
            "burst mean {inside} vs background mean {outside}"
        );
    }

    #[test]
    fn band_power_scales_linearly_with_input() {
        let seg = sinusoid_segment(13.0, 1.0, 100.0, 2000, 2);
        let tripled: Vec<Vec<f32>> = (0..2)
            .map(|c| seg.channel(c).iter().map(|&v| 3.0 * v).collect())
            .collect();
        let seg3 = Segment::from_channels(tripled, 100.0).unwrap();
        let p1 = band_power(&seg, (11.0, 16.0), 50).unwrap();
        let p3 = band_power(&seg3, (11.0, 16.0), 50).unwrap();
        for (a, b) in p1.iter().zip(p3.iter()) {
            assert!((b - 3.0 * a).abs() <= 1e-6 * a.abs().max(1e-12), "{b} vs 3*{a}");
        }
    }

    #[test]
    fn transient_term_scales_quadratically_with_input() {
        let x: Vec<f64> = (0..200).map(|i| (0.4 * i as f64).sin() + 0.3 * (0.05 * i as f64).cos()).collect();
        let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let t1 = crate::dsp::teager_kaiser(&x).unwrap();
        let t2 = crate::dsp::teager_kaiser(&doubled).unwrap();
        for (a, b) in t1.iter().zip(t2.iter()) {
            assert!((b - 4.0 * a).abs() < 1e-12, "{b} vs 4*{a}");
        }
    }

    #[test]
    fn argmax_invariant_under_doubling_without_transient_term() {
        let spec = SynthSpec {
            fs: 100.0,
            length: 3000,
            channels: 2,
            noise_level: 1.0,
            events: vec![SynthEvent {
                center_s: 15.0,
                duration_s: 1.0,
                band: (11.0, 16.0),
                amplitude: 5.0,
            }],
        };
        let (seg, _) = generate(&spec, 5).unwrap();
        let mut cfg = isruc();
        cfg.gamma = 0.0;
        let s1 = saliency_trace(&seg, &cfg).unwrap();
        let doubled: Vec<Vec<f32>> = (0..seg.num_channels())
            .map(|c| seg.channel(c).iter().map(|&v| v * 2.0).collect())
            .collect();
        let seg2 = Segment::from_channels(doubled, 100.0).unwrap();
        let s2 = saliency_trace(&seg2, &cfg).unwrap();
        let argmax = |s: &[f64]| {
            s.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        assert_eq!(argmax(&s1), argmax(&s2));
    }

    #[test]
    fn threshold_worked_example() {
        let tau = robust_threshold(&[1.0, 2.0, 3.0, 4.0, 5.0], 2.5);
        assert!((tau - 6.7065).abs() < 1e-9, "tau {tau}");
    }

    #[test]
    fn threshold_constant_trace_degenerates() {
        let s = vec![2.0; 40];
        let tau = robust_threshold(&s, 2.5);
        assert_eq!(tau, 2.0);
        assert!(detect_peaks(&s, tau, 1).is_empty());
    }

    #[test]
    fn threshold_monotone_in_kappa() {
        let s: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64).collect();
        let mut last = f64::NEG_INFINITY;
        for k in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let tau = robust_threshold(&s, k);
            assert!(tau >= last);
            last = tau;
        }
    }

    #[test]
    fn mad_zero_falls_back_to_standard_deviation() {
        // more than half the samples identical -> MAD = 0, spread nonzero
        let mut s = vec![1.0; 30];
        s.extend([5.0; 10]);
        let tau = robust_threshold(&s, 1.0);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let sd = (s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (s.len() - 1) as f64).sqrt();
        assert!((tau - (1.0 + sd)).abs() < 1e-12);
    }

    #[test]
    fn peaks_empty_when_below_threshold() {
        assert!(detect_peaks(&[1.0, 2.0, 1.0], 5.0, 1).is_empty());
    }

    #[test]
    fn peaks_single_spike() {
        assert_eq!(detect_peaks(&[0.0, 0.0, 10.0, 0.0, 0.0], 5.0, 1), vec![2]);
    }

    #[test]
    fn peaks_plateau_keeps_both() {
        assert_eq!(detect_peaks(&[0.0, 10.0, 10.0, 0.0], 5.0, 1), vec![1, 2]);
    }

    #[test]
    fn peaks_respect_stride_grid() {
        // index 3 is off-grid for stride 2
        let s = vec![0.0, 0.0, 6.0, 9.0, 6.0, 0.0];
        assert_eq!(detect_peaks(&s, 5.0, 2), vec![2, 4]);
    }

    #[test]
    fn peaks_with_stride_beyond_length() {
        // only index 0 is on the grid; it has no neighbors to lose to
        assert_eq!(detect_peaks(&[7.0, 1.0, 2.0], 5.0, 10), vec![0]);
        assert!(detect_peaks(&[4.0, 1.0, 2.0], 5.0, 10).is_empty());
    }

    #[test]
    fn protection_no_peaks_keeps_endpoints() {
        let p = build_protected_set(&[], &vec![0.0; 100], 2, 0.05, 100).unwrap();
        assert_eq!(p.indices(), &[0, 99]);
    }

    #[test]
    fn protection_greedy_cap_worked_example() {
        // cap = ceil(0.05 * 100) = 5; the stronger peak's 5-sample window
        // exhausts it and the weaker peak is skipped
        let mut values = vec![0.0; 100];
        values[50] = 9.0;
        values[10] = 8.0;
        let p = build_protected_set(&[50, 10], &values, 2, 0.05, 100).unwrap();
        assert_eq!(p.indices(), &[0, 48, 49, 50, 51, 52, 99]);
    }

    #[test]
    fn protection_counts_overlapping_windows_once() {
        let mut values = vec![0.0; 100];
        values[50] = 9.0;
        values[52] = 8.0;
        // windows [48..52] and [50..54] overlap; union is 7 samples <= cap 8
        let p = build_protected_set(&[50, 52], &values, 2, 0.08, 100).unwrap();
        let expected: Vec<u32> = [0u32, 48, 49, 50, 51, 52, 53, 54, 99].to_vec();
        assert_eq!(p.indices(), expected.as_slice());
    }

    #[test]
    fn protection_cap_bounds_set_size() {
        let values: Vec<f64> = (0..1000).map(|i| (i % 97) as f64).collect();
        let peaks: Vec<usize> = (0..1000).step_by(5).collect();
        let p = build_protected_set(&peaks, &values, 10, 0.05, 1000).unwrap();
        let cap = (0.05f64 * 1000.0).ceil() as usize;
        assert!(p.len() <= cap + 2, "|P| = {} cap {}", p.len(), cap);
    }

    #[test]
    fn presets_validate_at_nominal_rate() {
        for p in presets() {
            p.config.validate(p.nominal_fs).unwrap();
        }
        assert!(preset("isruc").is_some());
        assert!(preset("FACED").is_some());
        assert!(preset("nope").is_none());
    }
}

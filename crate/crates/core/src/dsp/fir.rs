//! Kaiser-windowed FIR design, zero-phase filtering, and moving averages.

use crate::error::{Error, Result};

/// A linear-phase lowpass FIR kernel: odd length, symmetric about the center,
/// unit DC gain.
#[derive(Debug, Clone, PartialEq)]
pub struct FirKernel {
    taps: Vec<f64>,
    design_cutoff: f64,
    kaiser_beta: f64,
}

impl FirKernel {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Cutoff in cycles/sample the kernel was designed for.
    pub fn design_cutoff(&self) -> f64 {
        self.design_cutoff
    }

    pub fn kaiser_beta(&self) -> f64 {
        self.kaiser_beta
    }

    /// Integer group delay `(len - 1) / 2`.
    pub fn group_delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..=60 {
        let f = half / k as f64;
        term *= f * f;
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Kaiser-windowed sinc taps of odd length `total_len`, normalized to unit DC
/// gain. Shared by the public designer and the bandpass builder.
pub(crate) fn lowpass_taps(cutoff: f64, beta: f64, total_len: usize) -> Vec<f64> {
    debug_assert!(total_len % 2 == 1);
    let half = (total_len - 1) as f64 / 2.0;
    let mut taps = Vec::with_capacity(total_len);
    let i0_beta = bessel_i0(beta);
    for k in 0..total_len {
        let t = k as f64 - half;
        let ideal = 2.0 * cutoff * sinc(2.0 * cutoff * t);
        let frac = if half == 0.0 { 0.0 } else { t / half };
        let window = bessel_i0(beta * (1.0 - frac * frac).max(0.0).sqrt()) / i0_beta;
        taps.push(ideal * window);
    }
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Design a Kaiser-windowed sinc lowpass.
///
/// `cutoff` is the -6 dB point in cycles/sample, in `(0, 0.5]`; at exactly
/// 0.5 the design degenerates to a unit impulse. The total length is
/// `2 * ceil(taps_per_branch * 0.5 / cutoff) + 1`, which for a resampling
/// kernel at cutoff `0.5 / max(u, d)` gives `taps_per_branch` taps per
/// polyphase branch.
pub fn design_lowpass(cutoff: f64, beta: f64, taps_per_branch: usize) -> Result<FirKernel> {
    if !(cutoff > 0.0 && cutoff <= 0.5) {
        return Err(Error::parameter(format!(
            "cutoff must be in (0, 0.5], got {cutoff}"
        )));
    }
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::parameter("kaiser beta must be finite and >= 0"));
    }
    if taps_per_branch < 4 {
        return Err(Error::parameter("taps_per_branch must be >= 4"));
    }
    let half = (taps_per_branch as f64 * 0.5 / cutoff).ceil() as usize;
    let total = 2 * half + 1;
    Ok(FirKernel {
        taps: lowpass_taps(cutoff, beta, total),
        design_cutoff: cutoff,
        kaiser_beta: beta,
    })
}

/// Linear-phase bandpass taps built as the difference of two lowpass designs
/// with a common length.
///
/// `low_hz < high_hz` are the band edges at sample rate `fs`. The length
/// follows the Kaiser relation for a transition of `max(1 Hz, low/4)` and is
/// capped so that zero-phase filtering of an `n`-sample sequence stays legal
/// (`3 * len < n`).
pub(crate) fn bandpass_taps(low_hz: f64, high_hz: f64, fs: f64, beta: f64, n: usize) -> Result<Vec<f64>> {
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0) {
        return Err(Error::parameter(format!(
            "band ({low_hz}, {high_hz}) Hz must satisfy 0 < low < high < fs/2 = {}",
            fs / 2.0
        )));
    }
    let transition = (0.25 * low_hz).max(1.0) / fs; // cycles/sample
    let atten_db = beta / 0.1102 + 8.7;
    let ideal_len = ((atten_db - 7.95) / (2.285 * std::f64::consts::TAU * transition)).ceil() as usize;
    let max_len = (n.saturating_sub(1)) / 3;
    let mut len = ideal_len.min(max_len);
    if len.is_multiple_of(2) {
        len = len.saturating_sub(1);
    }
    if len < 5 {
        return Err(Error::length(format!(
            "{n} samples are too few to bandpass-filter at {fs} Hz"
        )));
    }
    let hi = lowpass_taps(high_hz / fs, beta, len);
    let lo = lowpass_taps(low_hz / fs, beta, len);
    Ok(hi.iter().zip(lo.iter()).map(|(a, b)| a - b).collect())
}

/// Same-length convolution with the filter centered, i.e. the full
/// convolution with the integer group delay removed. Indices outside the
/// input contribute zero.
fn convolve_centered(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let n = x.len();
    let t = taps.len();
    let half = (t - 1) / 2;
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        // out[i] = sum_k taps[k] * x[i + half - k]
        let k_lo = (i + half).saturating_sub(n - 1);
        let k_hi = (i + half).min(t - 1);
        for k in k_lo..=k_hi {
            acc += taps[k] * x[i + half - k];
        }
        *o = acc;
    }
    out
}

/// Zero-phase filtering: forward pass, backward pass, reflection padding of
/// one kernel length at each edge. The magnitude response is applied twice
/// and the net phase is zero.
///
/// Requires `n > 3 * taps.len()` and an odd tap count.
pub fn filtfilt(x: &[f64], taps: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let t = taps.len();
    if t == 0 || t.is_multiple_of(2) {
        return Err(Error::parameter("filtfilt requires an odd, nonempty tap count"));
    }
    if n <= 3 * t {
        return Err(Error::length(format!(
            "filtfilt needs more than {} samples for {t} taps, got {n}",
            3 * t
        )));
    }
    // Mirror-reflect T samples at each edge (without repeating the edge sample).
    let mut padded = Vec::with_capacity(n + 2 * t);
    for k in (1..=t).rev() {
        padded.push(x[k]);
    }
    padded.extend_from_slice(x);
    for k in 1..=t {
        padded.push(x[n - 1 - k]);
    }

    let forward = convolve_centered(&padded, taps);
    let mut reversed: Vec<f64> = forward.into_iter().rev().collect();
    reversed = convolve_centered(&reversed, taps);
    reversed.reverse();

    Ok(reversed[t..t + n].to_vec())
}

/// Centered moving mean with shrinking windows at the edges; no padding
/// values are invented. `window` must be in `[1, n]`.
pub fn moving_average(x: &[f64], window: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if window == 0 || window > n {
        return Err(Error::parameter(format!(
            "window must be in [1, {n}], got {window}"
        )));
    }
    let half_lo = window / 2;
    let half_hi = window - 1 - half_lo;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half_lo);
        let hi = (i + half_hi).min(n - 1);
        let count = (hi - lo + 1) as f64;
        out.push((prefix[hi + 1] - prefix[lo]) / count);
    }
    Ok(out)
}

/// Magnitude of the kernel's DTFT at normalized frequency `f` (cycles/sample).
pub fn frequency_response_magnitude(taps: &[f64], f: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, &h) in taps.iter().enumerate() {
        let phase = -std::f64::consts::TAU * f * k as f64;
        re += h * phase.cos();
        im += h * phase.sin();
    }
    (re * re + im * im).sqrt()
}

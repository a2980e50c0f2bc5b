//! FFT-based analytic-signal envelopes and Welch power spectral density.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Envelope of the analytic signal `|x + j*H{x}|`, computed on the discrete
/// grid by zeroing negative frequencies and doubling positive ones (DC and
/// Nyquist bins stay unscaled).
///
/// Requires at least 8 samples. The output is nonnegative and bounds `|x|`
/// pointwise from above.
pub fn hilbert_envelope(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 8 {
        return Err(Error::length(format!(
            "hilbert envelope needs at least 8 samples, got {n}"
        )));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);

    let half = n / 2;
    for (k, v) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            // DC and Nyquist stay as-is
        } else if k < half || (n % 2 == 1 && k == half) {
            *v *= 2.0;
        } else {
            *v = Complex::new(0.0, 0.0);
        }
    }

    ifft.process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(buf.iter().map(|v| (v * scale).norm()).collect())
}

/// Welch power spectral density: Hann window, segment length `min(256, n)`,
/// 50% overlap, mean of the one-sided periodograms.
///
/// Returns `(frequencies_hz, power_density)`; the density integrates to the
/// signal power (`sum(psd) * fs / nseg ~ variance` for zero-mean noise).
pub fn welch_psd(x: &[f64], fs: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if n < 16 {
        return Err(Error::length(format!(
            "welch psd needs at least 16 samples, got {n}"
        )));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::parameter("sample rate must be positive and finite"));
    }
    let nseg = n.min(256);
    let hop = (nseg / 2).max(1);

    let window: Vec<f64> = (0..nseg)
        .map(|i| {
            0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / (nseg - 1) as f64).cos())
        })
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nseg);

    let n_bins = nseg / 2 + 1;
    let mut psd = vec![0.0; n_bins];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + nseg <= n {
        let mut buf: Vec<Complex<f64>> = x[start..start + nseg]
            .iter()
            .zip(window.iter())
            .map(|(&v, &w)| Complex::new(v * w, 0.0))
            .collect();
        fft.process(&mut buf);
        for (k, p) in psd.iter_mut().enumerate() {
            *p += buf[k].norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let scale = 1.0 / (segments as f64 * fs * window_power);
    for (k, p) in psd.iter_mut().enumerate() {
        *p *= scale;
        let is_dc = k == 0;
        let is_nyquist = nseg.is_multiple_of(2) && k == nseg / 2;
        if !is_dc && !is_nyquist {
            *p *= 2.0;
        }
    }
    let freqs = (0..n_bins).map(|k| k as f64 * fs / nseg as f64).collect();
    Ok((freqs, psd))
}

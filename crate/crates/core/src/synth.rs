//! Synthetic segment generation: pink-plus-white noise background with
//! Hann-windowed band-limited bursts at specified locations, plus the
//! ground-truth event intervals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Segment;

/// One band-limited burst: a Hann-windowed sinusoid at the band's center
/// frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthEvent {
    pub center_s: f64,
    pub duration_s: f64,
    /// `(low, high)` in Hz; the carrier sits at the midpoint.
    pub band: (f64, f64),
    pub amplitude: f64,
}

/// Generation parameters for one synthetic segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub fs: f64,
    /// Samples per channel.
    pub length: usize,
    pub channels: usize,
    /// RMS of the noise background; zero for a clean segment.
    pub noise_level: f64,
    #[serde(default)]
    pub events: Vec<SynthEvent>,
}

/// Ground-truth location of a generated event, in samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventInterval {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub band: (f64, f64),
    pub amplitude: f64,
}

/// 1/f-shaped noise with unit RMS, deterministic for a given rng state.
fn pink_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf[0] = Complex::new(0.0, 0.0);
    for (k, v) in buf.iter_mut().enumerate().skip(1) {
        let f = k.min(n - k) as f64; // symmetric spectral index
        *v /= f.sqrt();
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let mut out: Vec<f64> = buf.iter().map(|v| v.re / n as f64).collect();
    let rms = (out.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        for v in &mut out {
            *v /= rms;
        }
    }
    out
}

/// Generate one segment and its ground-truth event intervals. Identical
/// `(spec, seed)` pairs produce identical samples.
pub fn generate(spec: &SynthSpec, seed: u64) -> Result<(Segment, Vec<EventInterval>)> {
    let n = spec.length;
    let fs = spec.fs;
    if n < 2 {
        return Err(Error::length("synthetic segment needs at least 2 samples"));
    }
    if spec.channels < 1 {
        return Err(Error::parameter("synthetic segment needs at least one channel"));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::parameter("sample rate must be positive and finite"));
    }
    if spec.noise_level < 0.0 {
        return Err(Error::parameter("noise level must be >= 0"));
    }

    // resolve event intervals up front so placement errors surface before
    // any expensive noise synthesis
    let mut truth = Vec::with_capacity(spec.events.len());
    for ev in &spec.events {
        if ev.duration_s <= 0.0 || ev.amplitude < 0.0 {
            return Err(Error::parameter("event duration must be > 0 and amplitude >= 0"));
        }
        let len = (ev.duration_s * fs).round() as i64;
        let start = ((ev.center_s - ev.duration_s / 2.0) * fs).round() as i64;
        let end = start + len.max(1);
        if start < 0 || end > n as i64 {
            return Err(Error::parameter(format!(
                "event at {}s +/- {}s falls outside the segment",
                ev.center_s,
                ev.duration_s / 2.0
            )));
        }
        truth.push(EventInterval {
            start: start as usize,
            end: end as usize,
            band: ev.band,
            amplitude: ev.amplitude,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(spec.channels);
    for _ in 0..spec.channels {
        let mut row = vec![0.0f64; n];
        if spec.noise_level > 0.0 {
            let pink = pink_noise(n, &mut rng);
            // pink carries most of the background, white keeps the top end alive
            let mix = (0.8f64, 0.2f64);
            let norm = (mix.0 * mix.0 + mix.1 * mix.1).sqrt();
            for v in row.iter_mut().zip(pink) {
                let white: f64 = StandardNormal.sample(&mut rng);
                *v.0 = spec.noise_level * (mix.0 * v.1 + mix.1 * white) / norm;
            }
        }
        for (ev, interval) in spec.events.iter().zip(truth.iter()) {
            let carrier_hz = (ev.band.0 + ev.band.1) / 2.0;
            let len = interval.end - interval.start;
            for j in 0..len {
                let i = interval.start + j;
                let window = if len > 1 {
                    0.5 * (1.0 - (std::f64::consts::TAU * j as f64 / (len - 1) as f64).cos())
                } else {
                    1.0
                };
                let phase = std::f64::consts::TAU * carrier_hz * i as f64 / fs;
                row[i] += ev.amplitude * window * phase.sin();
            }
        }
        rows.push(row.into_iter().map(|v| v as f32).collect());
    }
    let segment = Segment::from_channels(rows, fs)?;
    Ok((segment, truth))
}

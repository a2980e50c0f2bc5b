//! Shared domain types: segments, protected index sets, rational rates, and
//! compressed payloads, plus the stored-scalar cost accounting used by the
//! replay buffer.
//!
//! All signal data is IEEE-754 binary32. Matrices are channel-major: channel
//! `c` occupies samples `c*n ..= c*n + n - 1` of the flat buffer.

use crate::error::{Error, Result};

/// A multichannel fixed-rate signal window: `C` channels of `N` samples at
/// `Fs` Hz. The unit of compression.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    channels: usize,
    samples: usize,
    sample_rate: f64,
    data: Vec<f32>,
}

impl Segment {
    /// Build a segment from a flat channel-major buffer.
    ///
    /// Requires `channels >= 1`, `samples >= 2`, a positive finite sample
    /// rate, and finite data of length `channels * samples`.
    pub fn new(channels: usize, samples: usize, sample_rate: f64, data: Vec<f32>) -> Result<Self> {
        if channels < 1 {
            return Err(Error::parameter("segment needs at least one channel"));
        }
        if samples < 2 {
            return Err(Error::length("segment needs at least two samples"));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::parameter(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if data.len() != channels * samples {
            return Err(Error::InvalidData(format!(
                "expected {} samples ({channels} x {samples}), got {}",
                channels * samples,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("segment contains non-finite samples".into()));
        }
        Ok(Segment {
            channels,
            samples,
            sample_rate,
            data,
        })
    }

    /// Build a segment from per-channel rows of equal length.
    pub fn from_channels(rows: Vec<Vec<f32>>, sample_rate: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::parameter("segment needs at least one channel"));
        }
        let samples = rows[0].len();
        if rows.iter().any(|r| r.len() != samples) {
            return Err(Error::InvalidData("ragged channel lengths".into()));
        }
        let channels = rows.len();
        let mut data = Vec::with_capacity(channels * samples);
        for row in rows {
            data.extend_from_slice(&row);
        }
        Segment::new(channels, samples, sample_rate, data)
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    /// Samples per channel.
    pub fn num_samples(&self) -> usize {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        &self.data[c * self.samples..(c + 1) * self.samples]
    }

    /// One channel widened to f64 for the signal kernels.
    pub fn channel_f64(&self, c: usize) -> Vec<f64> {
        self.channel(c).iter().map(|&v| v as f64).collect()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// Sorted keyframe indices for one segment, always containing both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectedSet {
    indices: Vec<u32>,
    segment_length: usize,
}

impl ProtectedSet {
    /// Validate and wrap a strictly increasing index list that covers both
    /// endpoints of a length-`segment_length` segment.
    pub fn new(indices: Vec<u32>, segment_length: usize) -> Result<Self> {
        if segment_length < 2 {
            return Err(Error::length("protected set needs a segment of length >= 2"));
        }
        if indices.first() != Some(&0) {
            return Err(Error::InvalidData("protected set must contain index 0".into()));
        }
        let last = (segment_length - 1) as u32;
        if indices.last() != Some(&last) {
            return Err(Error::InvalidData(format!(
                "protected set must contain the last index {last}"
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("protected indices must be strictly increasing".into()));
        }
        Ok(ProtectedSet {
            indices,
            segment_length,
        })
    }

    /// The minimal protected set: endpoints only.
    pub fn endpoints_only(segment_length: usize) -> Result<Self> {
        if segment_length < 2 {
            return Err(Error::length("protected set needs a segment of length >= 2"));
        }
        Ok(ProtectedSet {
            indices: vec![0, (segment_length - 1) as u32],
            segment_length,
        })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // endpoints are always present
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn contains(&self, index: u32) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// A reduced rational resampling rate `u/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalRate {
    u: u32,
    d: u32,
}

impl RationalRate {
    /// Construct a rate, reducing `u/d` to lowest terms. Both parts must be
    /// at least 1.
    pub fn new(u: u32, d: u32) -> Result<Self> {
        if u == 0 || d == 0 {
            return Err(Error::parameter("rational rate parts must be >= 1"));
        }
        let g = gcd(u, d);
        Ok(RationalRate { u: u / g, d: d / g })
    }

    pub fn identity() -> Self {
        RationalRate { u: 1, d: 1 }
    }

    pub fn numerator(&self) -> u32 {
        self.u
    }

    pub fn denominator(&self) -> u32 {
        self.d
    }

    pub fn value(&self) -> f64 {
        self.u as f64 / self.d as f64
    }

    pub fn is_identity(&self) -> bool {
        self.u == 1 && self.d == 1
    }

    /// Swap numerator and denominator (the reconstruction direction).
    pub fn inverse(&self) -> Self {
        RationalRate { u: self.d, d: self.u }
    }

    /// Length of the resampled output for an input of `n` samples:
    /// `ceil(n * u / d)`.
    pub fn output_len(&self, n: usize) -> usize {
        let num = n as u64 * self.u as u64;
        num.div_ceil(self.d as u64) as usize
    }
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The stored form of one segment: a low-rate sequence, verbatim samples at
/// the protected indices, and the metadata needed to reconstruct.
///
/// Fields deserialized from a container are stored as-is; semantic
/// consistency (rate vs. `y` length, index ranges, finiteness) is checked by
/// [`crate::codec::reconstruct`], which falls back to interpolation when the
/// metadata cannot be trusted.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSegment {
    /// Flat channel-major low-rate data, `C x y_len`.
    pub y: Vec<f32>,
    /// Samples per channel in `y`.
    pub y_len: usize,
    /// Protected indices, ascending in a well-formed container.
    pub protected_indices: Vec<u32>,
    /// Verbatim samples, index-major: `protected_indices.len() x C`.
    pub verbatim: Vec<f32>,
    pub rate: RationalRate,
    /// Original samples per channel.
    pub original_length: usize,
    pub channels: usize,
    pub sample_rate: f64,
}

impl CompressedSegment {
    /// Storage cost in stored scalars: `(y_len + |P|) * C`.
    pub fn stored_scalars(&self) -> u64 {
        (self.y_len as u64 + self.protected_indices.len() as u64) * self.channels as u64
    }

    /// Stored scalars as a fraction of the raw segment's scalars.
    pub fn realized_keep_ratio(&self) -> f64 {
        (self.y_len + self.protected_indices.len()) as f64 / self.original_length as f64
    }

    /// Low-rate row for channel `c`.
    pub fn y_channel(&self, c: usize) -> &[f32] {
        &self.y[c * self.y_len..(c + 1) * self.y_len]
    }

    /// Verbatim channel values for the `i`-th protected index.
    pub fn verbatim_row(&self, i: usize) -> &[f32] {
        &self.verbatim[i * self.channels..(i + 1) * self.channels]
    }
}

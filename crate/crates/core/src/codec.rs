//! End-to-end compression and reconstruction: keyframe detection, rate
//! selection, polyphase resampling, verbatim overwrite, and the
//! interpolation fallback for damaged containers.

use crate::error::{Error, Result};
use crate::rate::refine_farey;
use crate::resample::ResamplePlan;
use crate::saliency::{self, SaliencyConfig};
use crate::types::{CompressedSegment, ProtectedSet, RationalRate, Segment};

/// What `compress` did, alongside the container itself.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CompressReport {
    pub rate_numerator: u32,
    pub rate_denominator: u32,
    pub protected_count: usize,
    /// `(y_len + |P|) / N`.
    pub realized_keep_ratio: f64,
    /// Set when the target is unreachable: protection alone exceeds `r*N`,
    /// or the minimum available rate `1/d_max` overshoots `r`. The container
    /// is emitted anyway; budget policy is the caller's.
    pub budget_overshoot: bool,
    /// Saliency failed (e.g. bands invalid at this rate) and protection fell
    /// back to the two endpoints.
    pub saliency_fallback: bool,
}

/// How a segment was reconstructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionPath {
    /// Adjoint resampling plus verbatim overwrite.
    Polyphase,
    /// Linear interpolation from the verbatim samples (inconsistent
    /// metadata).
    Fallback,
}

/// Compress one segment toward a target keep ratio.
///
/// The protected set comes from the saliency chain (falling back to the two
/// endpoints if saliency fails); the rate comes from Farey refinement of the
/// keep ratio adjusted for the protection overhead, except that `r = 1`
/// always selects the identity rate. Verbatim samples are exact copies of
/// the input at the protected indices.
pub fn compress(
    segment: &Segment,
    keep_ratio: f64,
    config: &SaliencyConfig,
    d_max: u32,
) -> Result<(CompressedSegment, CompressReport)> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) || !keep_ratio.is_finite() {
        return Err(Error::parameter(format!(
            "keep ratio must be in (0, 1], got {keep_ratio}"
        )));
    }
    if d_max < 1 || d_max > u16::MAX as u32 {
        return Err(Error::parameter("d_max must be in [1, 65535]"));
    }
    let n = segment.num_samples();
    let channels = segment.num_channels();

    let (protected, saliency_fallback) = match saliency::protected_set(segment, config) {
        Ok(p) => (p, false),
        Err(_) => (ProtectedSet::endpoints_only(n)?, true),
    };

    let rate = if keep_ratio == 1.0 {
        RationalRate::identity()
    } else {
        refine_farey(keep_ratio, n, protected.len(), d_max)?
    };

    let plan = ResamplePlan::new(rate, n)?;
    let y_len = plan.output_len();
    let mut y = Vec::with_capacity(y_len * channels);
    for c in 0..channels {
        let low = plan.apply(&segment.channel_f64(c));
        y.extend(low.into_iter().map(|v| v as f32));
    }

    let mut verbatim = Vec::with_capacity(protected.len() * channels);
    for &idx in protected.indices() {
        for c in 0..channels {
            verbatim.push(segment.channel(c)[idx as usize]);
        }
    }

    let compressed = CompressedSegment {
        y,
        y_len,
        protected_indices: protected.indices().to_vec(),
        verbatim,
        rate,
        original_length: n,
        channels,
        sample_rate: segment.sample_rate(),
    };
    let report = CompressReport {
        rate_numerator: rate.numerator(),
        rate_denominator: rate.denominator(),
        protected_count: protected.len(),
        realized_keep_ratio: compressed.realized_keep_ratio(),
        budget_overshoot: protected.len() as f64 > keep_ratio * n as f64
            || 1.0 / d_max as f64 > keep_ratio,
        saliency_fallback,
    };
    Ok((compressed, report))
}

/// Why the polyphase path cannot be trusted for a container, if anything.
fn consistency_problem(c: &CompressedSegment) -> Option<String> {
    let n = c.original_length;
    if c.channels == 0 || n < 2 {
        return Some("degenerate geometry".into());
    }
    let expected_y = c.rate.output_len(n);
    if c.y_len != expected_y {
        return Some(format!(
            "y length {} does not match ceil(N*u/d) = {expected_y}",
            c.y_len
        ));
    }
    if c.y.len() != c.y_len * c.channels {
        return Some("y data does not match declared length".into());
    }
    if c.verbatim.len() != c.protected_indices.len() * c.channels {
        return Some("verbatim data does not match protected count".into());
    }
    if c.protected_indices.windows(2).any(|w| w[0] >= w[1]) {
        return Some("protected indices not strictly increasing".into());
    }
    if c.protected_indices.last().is_some_and(|&i| i as usize >= n) {
        return Some("protected index out of range".into());
    }
    if c.y.iter().any(|v| !v.is_finite()) || c.verbatim.iter().any(|v| !v.is_finite()) {
        return Some("non-finite stored samples".into());
    }
    None
}

/// Reconstruct a segment, reporting which path produced it. Total for any
/// parseable container: inconsistent metadata routes to the interpolation
/// fallback instead of failing.
pub fn reconstruct_with_report(c: &CompressedSegment) -> (Segment, ReconstructionPath) {
    if consistency_problem(c).is_some() {
        return (fallback_reconstruct(c), ReconstructionPath::Fallback);
    }
    match polyphase_reconstruct(c) {
        Ok(seg) => (seg, ReconstructionPath::Polyphase),
        Err(_) => (fallback_reconstruct(c), ReconstructionPath::Fallback),
    }
}

/// Reconstruct a segment (adjoint resampling with verbatim overwrite, or the
/// interpolation fallback when the metadata is inconsistent).
pub fn reconstruct(c: &CompressedSegment) -> Segment {
    reconstruct_with_report(c).0
}

fn polyphase_reconstruct(c: &CompressedSegment) -> Result<Segment> {
    let n = c.original_length;
    let channels = c.channels;
    let plan = ResamplePlan::new(c.rate.inverse(), c.y_len)?;
    let mut data = Vec::with_capacity(n * channels);
    for ch in 0..channels {
        let y: Vec<f64> = c.y_channel(ch).iter().map(|&v| v as f64).collect();
        let mut dense = plan.apply(&y);
        // ceil(y_len * d / u) >= N for consistent metadata; trim, and pad
        // with the last value should a damaged container still reach here
        dense.truncate(n);
        let pad = *dense.last().unwrap_or(&0.0);
        while dense.len() < n {
            dense.push(pad);
        }
        data.extend(
            dense
                .into_iter()
                .map(|v| v.clamp(f32::MIN as f64, f32::MAX as f64) as f32),
        );
    }
    // verbatim overwrite: protected samples are restored bit-exactly
    for (i, &idx) in c.protected_indices.iter().enumerate() {
        let row = c.verbatim_row(i);
        for ch in 0..channels {
            data[ch * n + idx as usize] = row[ch];
        }
    }
    Segment::new(channels, n, c.sample_rate, data)
}

/// Linear interpolation from whatever verbatim samples are usable. Rows with
/// out-of-range indices or non-finite values are dropped; missing endpoint
/// values extend the nearest known row (zeros when nothing is usable).
fn fallback_reconstruct(c: &CompressedSegment) -> Segment {
    let n = c.original_length.max(2);
    let channels = c.channels.max(1);
    let mut known: Vec<(u32, Vec<f32>)> = Vec::new();
    for (i, &idx) in c.protected_indices.iter().enumerate() {
        if (idx as usize) < n && c.verbatim.len() >= (i + 1) * channels {
            let row = c.verbatim[i * channels..(i + 1) * channels].to_vec();
            if row.iter().all(|v| v.is_finite()) {
                known.push((idx, row));
            }
        }
    }
    known.sort_by_key(|(idx, _)| *idx);
    known.dedup_by_key(|(idx, _)| *idx);
    if known.first().map(|(idx, _)| *idx) != Some(0) {
        let row = known.first().map(|(_, r)| r.clone()).unwrap_or_else(|| vec![0.0; channels]);
        known.insert(0, (0, row));
    }
    let last = (n - 1) as u32;
    if known.last().map(|(idx, _)| *idx) != Some(last) {
        let row = known.last().map(|(_, r)| r.clone()).unwrap();
        known.push((last, row));
    }
    fallback_interpolate(&known, n, channels, c.sample_rate.max(f64::MIN_POSITIVE))
        .expect("endpoint-padded knowns always interpolate")
}

/// Piecewise-linear reconstruction from known `(index, channel-values)`
/// rows, which must be strictly increasing, include both endpoints, and hold
/// finite values. Known indices are reproduced exactly.
pub fn fallback_interpolate(
    known: &[(u32, Vec<f32>)],
    n: usize,
    channels: usize,
    sample_rate: f64,
) -> Result<Segment> {
    if n < 2 || channels == 0 {
        return Err(Error::parameter("interpolation needs n >= 2 and channels >= 1"));
    }
    if known.len() < 2 {
        return Err(Error::InvalidData(
            "interpolation needs at least two known indices".into(),
        ));
    }
    if known.first().unwrap().0 != 0 || known.last().unwrap().0 != (n - 1) as u32 {
        return Err(Error::InvalidData(
            "interpolation needs both endpoints among the known indices".into(),
        ));
    }
    if known.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidData("known indices must be strictly increasing".into()));
    }
    if known.iter().any(|(_, row)| row.len() != channels) {
        return Err(Error::InvalidData("known rows must have one value per channel".into()));
    }

    let mut data = vec![0.0f32; channels * n];
    for win in known.windows(2) {
        let (i0, ref v0) = win[0];
        let (i1, ref v1) = win[1];
        let span = (i1 - i0) as f64;
        for ch in 0..channels {
            let a = v0[ch] as f64;
            let b = v1[ch] as f64;
            for t in i0..i1 {
                let frac = (t - i0) as f64 / span;
                data[ch * n + t as usize] = (a + (b - a) * frac) as f32;
            }
        }
    }
    // known rows land exactly, untouched by interpolation arithmetic
    for (idx, row) in known {
        for ch in 0..channels {
            data[ch * n + *idx as usize] = row[ch];
        }
    }
    Segment::new(channels, n, sample_rate, data)
}

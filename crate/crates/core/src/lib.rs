//! Memory-bounded, morphology-aware compression and replay buffering for
//! multichannel time series.
//!
//! The pipeline per segment:
//!
//! 1. [`saliency`] scores every timepoint from band-power envelopes and
//!    Teager-Kaiser transient energy, thresholds the trace robustly
//!    (median + 1.4826 * MAD), and expands the strongest peaks into a
//!    coverage-capped protected index set.
//! 2. [`rate`] turns a target keep ratio into a reduced rational `u/d`
//!    (continued fractions, then Farey-neighbor refinement that accounts for
//!    the protected-sample overhead).
//! 3. [`codec`] stores the polyphase-resampled low-rate sequence plus the
//!    protected samples verbatim; reconstruction resamples back with the
//!    swapped rate and overwrites the protected indices bit-exactly, falling
//!    back to linear interpolation when a container's metadata is damaged.
//! 4. [`buffer`] maintains the compressed exemplars under stored-scalar
//!    budgets with prototype-distance and confidence-ranked eviction, and
//!    samples fixed-ratio replay batches.
//!
//! [`metrics`] provides the fidelity measures (Pearson r, SNR, spectral
//! cosine) and the plasticity/stability scores; [`synth`] generates
//! deterministic test fixtures; [`container`] defines the bit-exact `.adcr`
//! file format.

pub mod buffer;
pub mod codec;
pub mod container;
pub mod dsp;
pub mod error;
pub mod metrics;
pub mod rate;
pub mod resample;
pub mod saliency;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use types::{CompressedSegment, ProtectedSet, RationalRate, Segment};

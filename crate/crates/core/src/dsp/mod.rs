//! Low-level signal kernels: FIR design, zero-phase filtering, analytic
//! envelopes, Teager-Kaiser energy, smoothing, and Welch spectra.
//!
//! All operations are pure functions on immutable inputs and are safe to run
//! in parallel across channels and segments.

mod fir;
mod spectral;
mod tkeo;

pub use fir::{design_lowpass, filtfilt, frequency_response_magnitude, moving_average, FirKernel};
pub(crate) use fir::bandpass_taps;
pub use spectral::{hilbert_envelope, welch_psd};
pub use tkeo::teager_kaiser;

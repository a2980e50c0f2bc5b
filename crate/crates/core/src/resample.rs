//! Rational polyphase resampling: upsampler, decimator, and the combined
//! `downsample(filter(upsample(x)))` operator computed without materializing
//! the zero-stuffed intermediate.

use crate::dsp::{design_lowpass, FirKernel};
use crate::error::{Error, Result};
use crate::types::RationalRate;

/// Kaiser shape parameter shared by all resampling kernels.
pub const KAISER_BETA: f64 = 8.6;
/// Taps per polyphase branch; the full kernel has
/// `2 * ceil(TAPS_PER_BRANCH * max(u, d)) + 1` taps.
pub const TAPS_PER_BRANCH: usize = 10;

/// Zero-stuff by `l`: `(up x)[n] = x[n/l]` when `l` divides `n`, else 0.
pub fn upsample(x: &[f64], l: usize) -> Vec<f64> {
    assert!(l >= 1, "upsampling factor must be >= 1");
    let mut out = vec![0.0; x.len() * l];
    for (i, &v) in x.iter().enumerate() {
        out[i * l] = v;
    }
    out
}

/// Keep every `m`-th sample starting at index 0; output length `ceil(n/m)`.
pub fn downsample(x: &[f64], m: usize) -> Vec<f64> {
    assert!(m >= 1, "decimation factor must be >= 1");
    x.iter().step_by(m).copied().collect()
}

/// A reusable resampling plan: the gain-compensated anti-imaging /
/// anti-aliasing kernel plus input/output geometry for one rate and length.
///
/// The kernel cutoff is `0.5 / max(u, d)` cycles/sample at the upsampled
/// rate; taps are scaled by `u` to restore unit passband gain after
/// zero-stuffing. The output aligns sample `k` with input time `k*d/u` (the
/// kernel's integer group delay is removed before decimation), and the
/// output length is exactly `ceil(n * u / d)`.
#[derive(Debug, Clone)]
pub struct ResamplePlan {
    rate: RationalRate,
    kernel: FirKernel,
    gain: f64,
    input_len: usize,
    output_len: usize,
}

impl ResamplePlan {
    pub fn new(rate: RationalRate, input_len: usize) -> Result<Self> {
        let u = rate.numerator() as usize;
        let d = rate.denominator() as usize;
        let branch = u.max(d);
        let kernel = design_lowpass(0.5 / branch as f64, KAISER_BETA, TAPS_PER_BRANCH)?;
        let min_len = kernel.len().div_ceil(branch);
        if input_len < min_len {
            return Err(Error::length(format!(
                "resampling at {}/{} needs at least {min_len} samples, got {input_len}",
                u, d
            )));
        }
        Ok(ResamplePlan {
            rate,
            kernel,
            gain: u as f64,
            input_len,
            output_len: rate.output_len(input_len),
        })
    }

    pub fn rate(&self) -> RationalRate {
        self.rate
    }

    pub fn kernel(&self) -> &FirKernel {
        &self.kernel
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    /// Gain-compensated taps (`u * h[k]`).
    pub fn scaled_taps(&self) -> Vec<f64> {
        self.kernel.taps().iter().map(|t| t * self.gain).collect()
    }

    /// Resample one channel. Only taps landing on nonzero samples of the
    /// conceptual zero-stuffed sequence are visited, i.e. each output sample
    /// runs over a single polyphase branch.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_len, "plan built for a different length");
        let u = self.rate.numerator() as usize;
        let d = self.rate.denominator() as usize;
        let taps = self.kernel.taps();
        let t = taps.len();
        let delay = self.kernel.group_delay();
        let n = x.len();

        let mut out = Vec::with_capacity(self.output_len);
        for m in 0..self.output_len {
            // position in the delay-compensated upsampled stream
            let pos = m * d + delay;
            // first tap index hitting a nonzero (stuffed) sample
            let k0 = pos % u;
            let mut i = (pos - k0) / u; // input index paired with tap k0
            let mut k = k0;
            let mut acc = 0.0;
            loop {
                if i < n {
                    acc += taps[k] * x[i];
                }
                if i == 0 {
                    break;
                }
                k += u;
                if k >= t {
                    break;
                }
                i -= 1;
            }
            out.push(acc * self.gain);
        }
        out
    }
}

/// Resample one channel at rate `u/d` (coprime). The result is numerically
/// equivalent to zero-stuffing by `u`, filtering with the gain-compensated
/// kernel, removing the kernel delay, and keeping every `d`-th sample,
/// truncated to exactly `ceil(n * u / d)` samples.
pub fn polyphase_resample(x: &[f64], u: u32, d: u32) -> Result<Vec<f64>> {
    if u == 0 || d == 0 {
        return Err(Error::parameter("resampling factors must be >= 1"));
    }
    if crate::types::gcd(u, d) != 1 {
        return Err(Error::parameter(format!("resampling rate {u}/{d} must be in lowest terms")));
    }
    let rate = RationalRate::new(u, d)?;
    let plan = ResamplePlan::new(rate, x.len())?;
    Ok(plan.apply(x))
}

//! Teager-Kaiser energy operator for transient emphasis.

use crate::error::{Error, Result};

/// Rectified Teager-Kaiser energy: `max(0, x[n]^2 - x[n-1]*x[n+1])` on the
/// interior, zero at both endpoints. Output length equals the input length.
///
/// For a sinusoid `A*cos(omega*n)` the interior value is `A^2 * sin^2(omega)`.
pub fn teager_kaiser(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 {
        return Err(Error::length(format!(
            "teager-kaiser needs at least 3 samples, got {n}"
        )));
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (x[i] * x[i] - x[i - 1] * x[i + 1]).max(0.0);
    }
    Ok(out)
}

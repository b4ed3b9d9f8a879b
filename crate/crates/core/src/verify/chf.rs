//! Empirical characteristic functions of symmetric samples.

use serde::{Deserialize, Serialize};

use crate::exec::{stable_sum, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChfEstimate {
    pub t: f64,
    /// `mean(cos(t·X))`, the real part; the imaginary part vanishes for
    /// symmetric laws.
    pub value: f64,
    pub std_error: f64,
}

/// Real part of the empirical ch.f. on the grid `ts`.
pub fn empirical_chf(exec: Execution, samples: &[f64], ts: &[f64]) -> Result<Vec<ChfEstimate>> {
    if samples.is_empty() {
        return Err(Error::domain("characteristic function of an empty sample"));
    }
    let n = samples.len() as f64;
    Ok(ts
        .iter()
        .map(|&t| {
            let mean = stable_sum(exec, samples, |x| (t * x).cos()) / n;
            let second = stable_sum(exec, samples, |x| (t * x).cos().powi(2)) / n;
            let var = (second - mean * mean).max(0.0);
            ChfEstimate {
                t,
                value: mean,
                std_error: (var / n).sqrt(),
            }
        })
        .collect())
}

/// `mean(sin(t·X))`; near zero for symmetric samples.
pub fn empirical_chf_imag(exec: Execution, samples: &[f64], t: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("characteristic function of an empty sample"));
    }
    Ok(stable_sum(exec, samples, |x| (t * x).sin()) / samples.len() as f64)
}

/// `(1 - |t|^α)_+^n`, the ch.f. of the associated sum with `δ̃_1` steps.
pub fn associated_chf(alpha: f64, n: u32, t: f64) -> f64 {
    (1.0 - t.abs().powf(alpha)).max(0.0).powi(n as i32)
}

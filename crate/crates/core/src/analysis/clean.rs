//! CLEAN deconvolution of a received waveform against a pulse template.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::delay_of_bin;
use crate::synthesis::{PulseTemplate, ScanWaveform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanConfig {
    /// Stop once the residual peak falls below this fraction of the
    /// original waveform's peak amplitude.
    pub stop_fraction: f64,
    pub max_iters: usize,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig { stop_fraction: 0.10, max_iters: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanTap {
    pub bin: usize,
    pub delay_ns: f64,
    /// Signed template gain.
    pub amplitude: f64,
}

fn peak_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Repeatedly picks the lag whose template projection removes the most
/// residual energy, records the least-squares gain there and subtracts the
/// scaled template. Taps landing on the same bin are merged.
pub fn clean_deconvolve(
    waveform: &ScanWaveform,
    template: &PulseTemplate,
    config: &CleanConfig,
) -> Result<Vec<CleanTap>> {
    if !(template.energy() > 0.0) {
        return Err(Error::InvalidParameter("CLEAN template is all zeros".into()));
    }
    if waveform.samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("waveform samples must be finite".into()));
    }
    let original_peak = peak_abs(&waveform.samples);
    if original_peak == 0.0 {
        return Ok(Vec::new());
    }
    let stop = config.stop_fraction * original_peak;
    let n = waveform.samples.len() as isize;
    let t = &template.samples;
    let center = template.center() as isize;

    let mut residual = waveform.samples.clone();
    let mut gains = vec![0.0; residual.len()];
    for _ in 0..config.max_iters {
        if peak_abs(&residual) < stop {
            break;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for lag in 0..n {
            let mut corr = 0.0;
            let mut energy = 0.0;
            for (k, &tk) in t.iter().enumerate() {
                let idx = lag + k as isize - center;
                if (0..n).contains(&idx) {
                    corr += residual[idx as usize] * tk;
                    energy += tk * tk;
                }
            }
            if energy <= 0.0 {
                continue;
            }
            let score = corr.abs() / energy.sqrt();
            if best.is_none_or(|(_, s, _)| score > s) {
                best = Some((lag as usize, score, corr / energy));
            }
        }
        let Some((lag, score, gain)) = best else { break };
        if score == 0.0 {
            break;
        }
        for (k, &tk) in t.iter().enumerate() {
            let idx = lag as isize + k as isize - center;
            if (0..n).contains(&idx) {
                residual[idx as usize] -= gain * tk;
            }
        }
        gains[lag] += gain;
    }

    Ok(gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g != 0.0)
        .map(|(bin, &amplitude)| CleanTap { bin, delay_ns: delay_of_bin(bin), amplitude })
        .collect())
}

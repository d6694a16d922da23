use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_K_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KFactorEstimate {
    pub linear: f64,
    pub db: f64,
    /// Diffuse power estimated as zero; `linear` and `db` are `+inf`.
    pub saturated: bool,
}

/// Rician K from the second and fourth moments of envelope samples:
/// `2 mu2^2 - mu4` estimates the squared LOS power, whose square root is
/// compared with the remaining diffuse power. Samples heavier-tailed than
/// Rayleigh give K = 0.
pub fn estimate_k_factor(samples: &[f64]) -> Result<KFactorEstimate> {
    if samples.len() < MIN_K_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "K-factor estimation needs at least {MIN_K_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter("envelope samples must be finite and >= 0".into()));
    }
    let n = samples.len() as f64;
    let mu2 = samples.iter().map(|r| r * r).sum::<f64>() / n;
    let mu4 = samples.iter().map(|r| (r * r) * (r * r)).sum::<f64>() / n;
    if mu2 == 0.0 {
        return Err(Error::DegenerateInput("all envelope samples are zero".into()));
    }
    let d = 2.0 * mu2 * mu2 - mu4;
    if d <= 0.0 {
        return Ok(KFactorEstimate { linear: 0.0, db: f64::NEG_INFINITY, saturated: false });
    }
    let los = d.sqrt();
    let diffuse = mu2 - los;
    if diffuse <= 1e-9 * mu2 {
        return Ok(KFactorEstimate { linear: f64::INFINITY, db: f64::INFINITY, saturated: true });
    }
    let linear = los / diffuse;
    Ok(KFactorEstimate { linear, db: 10.0 * linear.log10(), saturated: false })
}

//! Wind-driven rain on a power delay profile: `P_rain = β P + X_R`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

use crate::analysis::Pdp;
use crate::error::{Error, Result};
use crate::units::power_sigma_ln;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainModel {
    /// Attenuation factor in `(0, 1]`.
    pub beta: f64,
    pub sigma_r_db: f64,
}

/// Scales every bin by `beta` and perturbs it with zero-mean Gaussian noise.
///
/// The noise on a bin has relative standard deviation
/// `sigma_r_db ln10 / 10` of `beta P(n)` and is truncated symmetrically to
/// `±beta P(n)`, so bins never go negative and the expected energy is
/// exactly `beta` times the input. `beta = 1` is only accepted together with
/// `sigma_r_db = 0`, which returns the input unchanged.
pub fn apply_rain<R: Rng + ?Sized>(pdp: &Pdp, beta: f64, sigma_r_db: f64, rng: &mut R) -> Result<Pdp> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1]")));
    }
    if beta == 1.0 && sigma_r_db != 0.0 {
        return Err(Error::InvalidParameter("beta = 1 is only the identity (sigma_r_db = 0)".into()));
    }
    if !(sigma_r_db >= 0.0) {
        return Err(Error::InvalidParameter("sigma_r_db must be >= 0".into()));
    }
    let mut out = pdp.clone();
    if beta == 1.0 {
        return Ok(out);
    }
    let rel = power_sigma_ln(sigma_r_db);
    let std = StatNormal::standard();
    // Truncation at ±1 relative: z limited to ±1/rel.
    let (lo, hi) = if rel > 0.0 {
        let hi = std.cdf(1.0 / rel);
        (1.0 - hi, hi)
    } else {
        (0.5, 0.5)
    };
    for bin in out.bins.iter_mut() {
        let scaled = beta * *bin;
        let noise = if rel > 0.0 && scaled > 0.0 {
            let u: f64 = rng.random_range(lo..hi);
            (rel * std.inverse_cdf(u)).clamp(-1.0, 1.0) * scaled
        } else {
            0.0
        };
        *bin = (scaled + noise).max(0.0);
    }
    Ok(out)
}

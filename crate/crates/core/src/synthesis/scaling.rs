use serde::Serialize;

use crate::error::Result;
use crate::params::HurricaneScaling;

/// Mean inter-arrival times under hurricane conditions and their rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanArrivals {
    pub gamma_bar_ns: f64,
    pub tau_bar_ns: f64,
    pub cluster_rate: f64,
    pub ray_rate: f64,
}

/// `Γ̄ = (1 + c_c) Γ̄_b` and `τ̄ = (1 + c_m) τ̄_b`.
pub fn apply_hurricane_scaling(scaling: &HurricaneScaling) -> Result<MeanArrivals> {
    scaling.validate()?;
    let gamma_bar_ns = (1.0 + scaling.c_c) * scaling.gamma_bar_b_ns;
    let tau_bar_ns = (1.0 + scaling.c_m) * scaling.tau_bar_b_ns;
    Ok(MeanArrivals {
        gamma_bar_ns,
        tau_bar_ns,
        cluster_rate: 1.0 / gamma_bar_ns,
        ray_rate: 1.0 / tau_bar_ns,
    })
}

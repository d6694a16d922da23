use serde::{Deserialize, Serialize};

use crate::analysis::Pdp;
use crate::error::{Error, Result};
use crate::params::Scenario;

/// Empirical attenuation at one wind velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttenuationSample {
    pub wind_mph: f64,
    pub attenuation_db: f64,
    pub scenario: Scenario,
}

/// `10 log10(E_ref / E_v)` from two total energies.
pub fn attenuation_db(reference_energy: f64, energy: f64) -> Result<f64> {
    if !(reference_energy > 0.0) || !(energy > 0.0) {
        return Err(Error::InsufficientData(format!(
            "attenuation needs positive energies (reference {reference_energy}, scan {energy})"
        )));
    }
    Ok(10.0 * (reference_energy / energy).log10())
}

/// Ratio of the reference ensemble's total energy to the hurricane
/// ensemble's, summed over all scans and bins, in dB.
pub fn empirical_attenuation(ensemble: &[Pdp], reference: &[Pdp]) -> Result<AttenuationSample> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InsufficientData("empty hurricane ensemble".into()))?;
    if reference.is_empty() {
        return Err(Error::InsufficientData("empty reference ensemble".into()));
    }
    let energy: f64 = ensemble.iter().map(Pdp::total_energy).sum();
    let reference_energy: f64 = reference.iter().map(Pdp::total_energy).sum();
    if !(energy > 0.0) {
        return Err(Error::InsufficientData("hurricane ensemble has zero energy".into()));
    }
    if !(reference_energy > 0.0) {
        return Err(Error::InsufficientData("reference ensemble has zero energy".into()));
    }
    Ok(AttenuationSample {
        wind_mph: first.scenario.wind_mph,
        attenuation_db: attenuation_db(reference_energy, energy)?,
        scenario: first.scenario,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{bin_of_delay, BIN_WIDTH_PS, NUM_BINS};
use crate::params::Scenario;
use crate::synthesis::Cir;

/// Power delay profile on the scan grid, linear power per bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pdp {
    pub bins: Vec<f64>,
    pub scenario: Scenario,
}

impl Pdp {
    pub fn new(bins: Vec<f64>, scenario: Scenario) -> Result<Self> {
        if bins.len() != NUM_BINS {
            return Err(Error::GridMismatch(format!("PDP has {} bins, expected {NUM_BINS}", bins.len())));
        }
        if bins.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter("PDP bins must be finite and >= 0".into()));
        }
        Ok(Pdp { bins, scenario })
    }

    pub fn bin_width_ps(&self) -> u32 {
        BIN_WIDTH_PS
    }

    pub fn total_energy(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.bins.iter().copied().fold(0.0, f64::max)
    }
}

/// Sum of squared amplitudes per bin; the direct component lands in bin 0.
pub fn compute_pdp(cir: &Cir) -> Pdp {
    let mut bins = vec![0.0; NUM_BINS];
    if let Some(d) = cir.direct {
        bins[0] += d.power();
    }
    for tap in cir.taps() {
        bins[bin_of_delay(tap.delay_ns)] += tap.amplitude * tap.amplitude;
    }
    Pdp { bins, scenario: cir.scenario }
}

/// Bin-wise mean of an ensemble.
pub fn mean_pdp(ensemble: &[Pdp]) -> Result<Pdp> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InsufficientData("mean of an empty PDP ensemble".into()))?;
    let mut bins = vec![0.0; NUM_BINS];
    for pdp in ensemble {
        for (acc, b) in bins.iter_mut().zip(&pdp.bins) {
            *acc += b;
        }
    }
    let n = ensemble.len() as f64;
    bins.iter_mut().for_each(|b| *b /= n);
    Ok(Pdp { bins, scenario: first.scenario })
}

/// Removes the static environment: per-bin `max(0, P - background)`.
pub fn static_background_subtract(ensemble: &[Pdp], background: &Pdp) -> Result<Vec<Pdp>> {
    ensemble
        .iter()
        .map(|pdp| {
            if pdp.bins.len() != background.bins.len() {
                return Err(Error::GridMismatch(format!(
                    "PDP has {} bins but the background has {}",
                    pdp.bins.len(),
                    background.bins.len()
                )));
            }
            let bins = pdp
                .bins
                .iter()
                .zip(&background.bins)
                .map(|(p, b)| (p - b).max(0.0))
                .collect();
            Ok(Pdp { bins, scenario: pdp.scenario })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Position;
    use crate::synthesis::{Cluster, Tap};

    fn single(amplitude: f64, delay_ns: f64) -> Cir {
        Cir {
            scenario: Scenario::reference(Position::P1),
            seed: 0,
            clusters: vec![Cluster {
                arrival_ns: delay_ns,
                taps: vec![Tap { delay_ns, amplitude, phase_rad: 0.0, cluster_index: 1, ray_index: 1 }],
            }],
            direct: None,
            truncated: false,
            attenuation_db: 0.0,
        }
    }

    #[test]
    fn single_tap_power() {
        let pdp = compute_pdp(&single(2.0, 5.0));
        assert_eq!(pdp.bins[82], 4.0);
        assert_eq!(pdp.bins.iter().filter(|&&b| b != 0.0).count(), 1);
    }

    #[test]
    fn minimal_energy() {
        assert_eq!(compute_pdp(&single(1.0, 0.0)).total_energy(), 1.0);
    }

    #[test]
    fn background_rules() {
        let a = compute_pdp(&single(2.0, 5.0));
        let b = compute_pdp(&single(1.0, 5.0));
        let zero = Pdp::new(vec![0.0; NUM_BINS], a.scenario).unwrap();
        assert_eq!(static_background_subtract(&[a.clone()], &zero).unwrap()[0], a);

        let ens = vec![a.clone(), b.clone()];
        let mean = mean_pdp(&ens).unwrap();
        let residual = static_background_subtract(&ens, &mean).unwrap();
        // Mean of clamped residuals: (4 - 2.5) clamps to 1.5 and (1 - 2.5) to 0.
        assert_eq!(residual[0].bins[82], 1.5);
        assert_eq!(residual[1].bins[82], 0.0);

        let short = Pdp { bins: vec![0.0; 10], scenario: a.scenario };
        assert!(matches!(static_background_subtract(&[a], &short), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn rejects_negative_bins() {
        let mut bins = vec![0.0; NUM_BINS];
        bins[3] = -1.0;
        assert!(Pdp::new(bins, Scenario::reference(Position::P2)).is_err());
    }
}

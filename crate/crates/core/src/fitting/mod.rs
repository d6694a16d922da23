//! Ensemble parameter estimation.

mod decay;
mod diffuse;
mod fading;
mod large_scale;
mod optim;
mod rates;
mod roundtrip;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use decay::{fit_decay_constants, scan_decay_stats, ClusterObservation, DecayEstimate, DecayFit, DecayStats};
pub use diffuse::{fit_diffuse_power_lse, DiffuseFit};
pub use fading::{fit_nakagami, k_to_m, lognormal_m_statistics, nakagami_moments, NakagamiFit, SmallScaleStats};
pub use large_scale::fit_large_scale;
pub use rates::{
    fit_cluster_count, fit_exponential_rate, fit_jittered_rate, fit_poisson_rates, ArrivalSummary, ClusterCountFit,
    JitteredRateFit, PoissonRates, RateObservation,
};
pub use roundtrip::{
    compare_with_column, roundtrip_report, RoundtripReport, RoundtripRow, RowStatus, ScanSummary, Tolerance, Tolerances, ROUNDTRIP_SCHEMA,
};

/// Named estimates with Wald standard errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FitResult {
    pub estimates: BTreeMap<String, f64>,
    pub standard_errors: BTreeMap<String, f64>,
    pub n_samples: usize,
    pub residual_norm: f64,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.estimates.get(name).copied()
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.standard_errors.get(name).copied()
    }

    pub(crate) fn insert(&mut self, name: &str, estimate: f64, standard_error: f64) {
        self.estimates.insert(name.to_owned(), estimate);
        self.standard_errors.insert(name.to_owned(), standard_error.max(0.0));
    }
}

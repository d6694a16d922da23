//! Quantities derived from individual scans and scan ensembles.

mod attenuation;
mod clean;
mod clusters;
mod kfactor;
mod mpc;
mod pdp;

pub use attenuation::{attenuation_db, empirical_attenuation, AttenuationSample};
pub use clean::{clean_deconvolve, CleanConfig, CleanTap};
pub use clusters::{identify_clusters, ClusterConfig, ClusterSegment, ClusterSegmentation};
pub use kfactor::{estimate_k_factor, KFactorEstimate, MIN_K_SAMPLES};
pub use mpc::{
    count_above_amplitude, count_significant_mpcs, reference_peak_amplitude, SIGNIFICANT_MPC_FRACTION,
};
pub use pdp::{compute_pdp, mean_pdp, static_background_subtract, Pdp};

//! Stochastic ultra-wideband channel model for hurricane conditions.
//!
//! The crate is split along the life of a channel sounding experiment:
//!
//! - [`params`]: per-scenario parameter tables (large scale, small scale and
//!   clustered multipath), scenario descriptors and validation.
//! - [`synthesis`]: clustered Saleh-Valenzuela impulse responses with
//!   Poisson arrivals, dual-exponential power decay, LOS direct component,
//!   wind-driven-rain PDP attenuation and pulse rendering.
//! - [`analysis`]: power delay profiles, empirical attenuation, cluster
//!   identification, significant-MPC counting, CLEAN deconvolution and
//!   Rician K-factor estimation.
//! - [`fitting`]: estimators that recover every model parameter from scan
//!   ensembles, and the generator/estimator round-trip report.
//! - [`io`]: JSON-lines and CSV formats shared with the command line tool.

pub mod analysis;
pub mod error;
pub mod fitting;
pub mod grid;
pub mod io;
pub mod params;
pub mod rng;
pub mod synthesis;
pub mod units;

pub use error::{Error, Result};
pub use params::{
    DiffusePowerModel, HurricaneScaling, LargeScaleParams, MultipathParams, ParameterSet,
    PathKind, Position, RainState, Scenario, ScenarioParams, SmallScaleParams,
};
pub use synthesis::{Cir, Cluster, DirectPath, ScanWaveform, SynthesisOptions, Tap};
pub use analysis::{ClusterSegmentation, Pdp};

//! Stochastic impulse-response synthesis.
//!
//! A scan is built in four steps: draw the cluster count and the Poisson
//! cluster arrivals, fill every cluster with Poisson rays up to the next
//! cluster (or the scan end), give every ray a lognormal amplitude around
//! the dual-exponential power law, and finally place the line-of-sight
//! direct component and the large-scale attenuation. Each step draws from
//! its own random stream (see [`crate::rng`]).

mod amplitude;
mod arrivals;
mod rain;
mod scaling;
mod waveform;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SCAN_DURATION_NS;
use crate::params::{validate, HurricaneScaling, LargeScaleParams, MultipathParams, PathKind, Scenario, ScenarioParams};
use crate::rng::{scan_seed, stream, Stream};
use crate::units::db_to_power;

pub use amplitude::{draw_log_power_jitter, draw_tap_amplitude, draw_tap_log_amplitude};
pub use arrivals::{
    draw_cluster_arrivals, draw_cluster_count, draw_ray_arrivals, jittered_mean_gap, ClusterArrivals,
    JITTER_BOUND,
};
pub use rain::{apply_rain, RainModel};
pub use scaling::{apply_hurricane_scaling, MeanArrivals};
pub use waveform::{render_waveform, PulseTemplate, ScanWaveform};

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    /// Absolute delay from the start of the scan (ns).
    pub delay_ns: f64,
    pub amplitude: f64,
    /// Phase in `[0, 2π)`.
    pub phase_rad: f64,
    /// 1-based cluster number.
    pub cluster_index: u32,
    /// 1-based ray number inside the cluster.
    pub ray_index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub arrival_ns: f64,
    /// Rays sorted by delay; the first one arrives at `arrival_ns`.
    pub taps: Vec<Tap>,
}

/// Dominant line-of-sight component, located at delay zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectPath {
    pub amplitude: f64,
    pub phase_rad: f64,
}

impl DirectPath {
    pub fn power(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// A sparse clustered channel impulse response for one scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cir {
    pub scenario: Scenario,
    pub seed: u64,
    pub clusters: Vec<Cluster>,
    pub direct: Option<DirectPath>,
    /// The cluster arrival process was cut short by the scan end.
    pub truncated: bool,
    /// Large-scale attenuation applied to every component (dB).
    pub attenuation_db: f64,
}

impl Cir {
    /// Diffuse taps in delay order.
    pub fn taps(&self) -> impl Iterator<Item = &Tap> + '_ {
        self.clusters.iter().flat_map(|c| c.taps.iter())
    }

    pub fn num_taps(&self) -> usize {
        self.clusters.iter().map(|c| c.taps.len()).sum()
    }

    pub fn diffuse_energy(&self) -> f64 {
        self.taps().map(|t| t.amplitude * t.amplitude).sum()
    }

    pub fn direct_power(&self) -> f64 {
        self.direct.map_or(0.0, |d| d.power())
    }

    pub fn total_energy(&self) -> f64 {
        self.diffuse_energy() + self.direct_power()
    }

    /// All component amplitudes, direct path first.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.direct
            .iter()
            .map(|d| d.amplitude)
            .chain(self.taps().map(|t| t.amplitude))
            .collect()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes().into_iter().fold(0.0, f64::max)
    }

    /// Per-scan Rician K-factor `10 log10(B0 / (2 A0))`; `None` without a
    /// direct component.
    pub fn k_factor_db(&self) -> Option<f64> {
        self.direct
            .map(|d| 10.0 * (d.power() / (2.0 * self.diffuse_energy())).log10())
    }

    /// Sum of all components as complex phasors (the frequency-flat gain).
    pub fn narrowband_gain(&self) -> Complex64 {
        let direct = self
            .direct
            .map_or(Complex64::new(0.0, 0.0), |d| Complex64::from_polar(d.amplitude, d.phase_rad));
        self.taps()
            .fold(direct, |acc, t| acc + Complex64::from_polar(t.amplitude, t.phase_rad))
    }

    /// Checks ordering, positivity and scan-window invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.clusters.is_empty() {
            return bad("a CIR needs at least one cluster".into());
        }
        for pair in self.clusters.windows(2) {
            if !(pair[0].arrival_ns < pair[1].arrival_ns) {
                return bad("cluster arrivals must strictly increase".into());
            }
        }
        for cluster in &self.clusters {
            let Some(first) = cluster.taps.first() else {
                return bad("empty cluster".into());
            };
            if first.delay_ns != cluster.arrival_ns {
                return bad("first ray must coincide with its cluster arrival".into());
            }
            for pair in cluster.taps.windows(2) {
                if !(pair[0].delay_ns < pair[1].delay_ns) {
                    return bad("ray delays must strictly increase".into());
                }
            }
            for tap in &cluster.taps {
                if !(tap.amplitude > 0.0) || !tap.amplitude.is_finite() {
                    return bad(format!("non-positive amplitude {}", tap.amplitude));
                }
                if !(0.0..std::f64::consts::TAU).contains(&tap.phase_rad) {
                    return bad(format!("phase {} outside [0, 2π)", tap.phase_rad));
                }
                if !(0.0..SCAN_DURATION_NS).contains(&tap.delay_ns) {
                    return bad(format!("delay {} outside the scan", tap.delay_ns));
                }
            }
        }
        Ok(())
    }
}

/// Where the cluster/ray rates and the mean cluster count come from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrivalModel {
    /// Use the measured column as is.
    #[default]
    Table,
    /// Inflate the base-case mean arrival times.
    Scaled(HurricaneScaling),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosMode {
    /// Direct component on LOS positions only.
    #[default]
    Auto,
    /// Never add a direct component; the diffuse part is left untouched.
    ForceNlos,
}

/// Which random variations are switched on. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variations {
    /// `X_N`: scan-to-scan spread of the cluster count.
    pub cluster_count: bool,
    /// `X_c`, `X_m`: scan-to-scan spread of the mean inter-arrival times.
    pub arrival_times: bool,
    /// `X_P`, `X_mp`: cluster and ray power jitter.
    pub power: bool,
    /// Lognormal spread of individual tap amplitudes.
    pub amplitude: bool,
}

impl Default for Variations {
    fn default() -> Self {
        Variations { cluster_count: true, arrival_times: true, power: true, amplitude: true }
    }
}

impl Variations {
    pub fn none() -> Self {
        Variations { cluster_count: false, arrival_times: false, power: false, amplitude: false }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub arrivals: ArrivalModel,
    pub los_mode: LosMode,
    pub variations: Variations,
    /// Scale each scan's diffuse energy to `A0` drawn from `(mu_Df, sigma_Df)`.
    /// When off, the first ray of the first cluster has unit mean power.
    pub normalize_diffuse: bool,
    /// Apply `A_w0 + alpha v + X_A` to hurricane scans.
    pub large_scale: Option<LargeScaleParams>,
    /// Fixed cluster arrivals (ns) instead of drawn ones; used to build
    /// oracle channels.
    pub forced_arrivals_ns: Option<Vec<f64>>,
}

impl SynthesisOptions {
    /// The full model: diffuse normalisation and large-scale attenuation on.
    pub fn full(large_scale: LargeScaleParams) -> Self {
        SynthesisOptions {
            normalize_diffuse: true,
            large_scale: Some(large_scale),
            ..Default::default()
        }
    }
}

/// Draws one CIR. The result is a pure function of the arguments.
pub fn synthesize_cir(
    scenario: &Scenario,
    multipath: &MultipathParams,
    options: &SynthesisOptions,
    seed: u64,
) -> Result<Cir> {
    scenario.validate()?;
    let report = validate(multipath);
    if !report.is_empty() {
        return Err(Error::InvalidParameter(format!("invalid multipath parameters: {:?}", report.violations)));
    }
    if scenario.path_kind() == PathKind::Nlos && multipath.has_direct_stats() {
        return Err(Error::InvalidParameter(
            "NLOS scenario paired with direct-component statistics".into(),
        ));
    }

    let (gamma_rate, zeta_rate, n_bar) = match options.arrivals {
        ArrivalModel::Table => (multipath.gamma_rate, multipath.zeta_rate, multipath.n_bar),
        ArrivalModel::Scaled(scaling) => {
            let mean = apply_hurricane_scaling(&scaling)?;
            (mean.cluster_rate, mean.ray_rate, scaling.mean_cluster_count())
        }
    };
    let v = options.variations;

    let mut jitter_rng = stream(seed, Stream::Jitter);
    let (cluster_gap, ray_gap) = if v.arrival_times {
        (
            jittered_mean_gap(1.0 / gamma_rate, multipath.sigma_c_ns, &mut jitter_rng),
            jittered_mean_gap(1.0 / zeta_rate, multipath.sigma_m_ns, &mut jitter_rng),
        )
    } else {
        (1.0 / gamma_rate, 1.0 / zeta_rate)
    };
    let a0_db = multipath.mu_df_db
        + multipath.sigma_df_db * Normal::new(0.0, 1.0).expect("unit normal").sample(&mut jitter_rng);

    let mut structure = stream(seed, Stream::Structure);
    let arrivals = match &options.forced_arrivals_ns {
        Some(forced) => forced_arrivals(forced)?,
        None => {
            let sigma = if v.cluster_count { multipath.sigma_nbar } else { 0.0 };
            let n = draw_cluster_count(n_bar, sigma, &mut structure);
            draw_cluster_arrivals(1.0 / cluster_gap, n, &mut structure)
        }
    };

    let mut amp_rng = stream(seed, Stream::Amplitude);
    let mut phase_rng = stream(seed, Stream::Phase);
    let sigma_a = if v.amplitude { multipath.sigma_a_db } else { 0.0 };
    let (sigma_p, sigma_mp) = if v.power {
        (multipath.sigma_p_db, multipath.sigma_mp_db)
    } else {
        (0.0, 0.0)
    };

    // Log-amplitudes first; scaling happens once the diffuse energy is known.
    let mut clusters = Vec::with_capacity(arrivals.arrivals_ns.len());
    let mut log_amps: Vec<f64> = Vec::new();
    for (i, &start) in arrivals.arrivals_ns.iter().enumerate() {
        let horizon = arrivals.arrivals_ns.get(i + 1).copied().unwrap_or(SCAN_DURATION_NS);
        let offsets = draw_ray_arrivals(1.0 / ray_gap, start, horizon, &mut structure);
        let cluster_level = -start / multipath.lambda_cap + draw_log_power_jitter(sigma_p, &mut amp_rng);
        let mut taps = Vec::with_capacity(offsets.len());
        for (l, &offset) in offsets.iter().enumerate() {
            let ln_target = cluster_level - offset / multipath.lambda_ray
                + draw_log_power_jitter(sigma_mp, &mut amp_rng);
            log_amps.push(draw_tap_log_amplitude(ln_target, sigma_a, &mut amp_rng));
            taps.push(Tap {
                delay_ns: start + offset,
                amplitude: 0.0,
                phase_rad: uniform_phase(&mut phase_rng),
                cluster_index: (i + 1) as u32,
                ray_index: (l + 1) as u32,
            });
        }
        clusters.push(Cluster { arrival_ns: start, taps });
    }

    let attenuation_db = match (&options.large_scale, scenario.is_reference()) {
        (Some(ls), false) => {
            let mut rng = stream(seed, Stream::LargeScale);
            ls.mean_attenuation_db(scenario.wind_mph)
                + ls.sigma_a_db * Normal::new(0.0, 1.0).expect("unit normal").sample(&mut rng)
        }
        _ => 0.0,
    };
    // ln of the amplitude factor from the large-scale attenuation.
    let ln_atten = -0.5 * attenuation_db * std::f64::consts::LN_10 / 10.0;

    let ln_shift = if options.normalize_diffuse {
        let ln_energy = log_sum_exp(log_amps.iter().map(|a| 2.0 * a));
        0.5 * (db_to_power(a0_db).ln() - ln_energy)
    } else {
        0.0
    };
    for (tap, ln_amp) in clusters.iter_mut().flat_map(|c| c.taps.iter_mut()).zip(&log_amps) {
        tap.amplitude = (ln_amp + ln_shift + ln_atten).exp().max(f64::MIN_POSITIVE);
    }

    let direct = match (scenario.path_kind(), options.los_mode) {
        (PathKind::Los, LosMode::Auto) => {
            let (mu, sigma) = match (multipath.mu_dr_db, multipath.sigma_dr_db) {
                (Some(mu), Some(sigma)) => (mu, sigma),
                _ => {
                    return Err(Error::InvalidParameter(
                        "LOS synthesis needs direct-path statistics mu_dr_db and sigma_dr_db".into(),
                    ))
                }
            };
            let mut rng = stream(seed, Stream::Direct);
            let b0_db = mu + sigma * Normal::new(0.0, 1.0).expect("unit normal").sample(&mut rng);
            let amplitude = (0.5 * db_to_power(b0_db).ln() + ln_atten).exp();
            Some(DirectPath { amplitude, phase_rad: uniform_phase(&mut rng) })
        }
        _ => None,
    };

    Ok(Cir {
        scenario: *scenario,
        seed,
        clusters,
        direct,
        truncated: arrivals.truncated,
        attenuation_db,
    })
}

fn forced_arrivals(forced: &[f64]) -> Result<ClusterArrivals> {
    let ok = !forced.is_empty()
        && forced[0] >= 0.0
        && forced.windows(2).all(|w| w[0] < w[1])
        && forced.iter().all(|&t| t < SCAN_DURATION_NS);
    if !ok {
        return Err(Error::InvalidParameter(
            "forced arrivals must be non-empty, increasing and inside the scan".into(),
        ));
    }
    Ok(ClusterArrivals { arrivals_ns: forced.to_vec(), truncated: false })
}

fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// A scenario column bound to synthesis options.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub scenario: Scenario,
    pub params: ScenarioParams,
    pub options: SynthesisOptions,
}

impl ChannelModel {
    pub fn new(scenario: Scenario, params: ScenarioParams, options: SynthesisOptions) -> Result<Self> {
        if (params.position, params.rain) != scenario.key() && !scenario.is_reference() {
            return Err(Error::InvalidScenario(format!(
                "parameters of ({}, {}) do not belong to scenario ({}, {})",
                params.position, params.rain, scenario.position, scenario.rain
            )));
        }
        Ok(ChannelModel { scenario, params, options })
    }

    pub fn synthesize(&self, seed: u64) -> Result<Cir> {
        synthesize_cir(&self.scenario, &self.params.multipath, &self.options, seed)
    }

    /// Scan `index` of the ensemble seeded by `master_seed`.
    pub fn synthesize_scan(&self, master_seed: u64, index: u64) -> Result<Cir> {
        self.synthesize(scan_seed(master_seed, index))
    }

    /// Synthesizes `count` scans in parallel and maps each one through `f`
    /// without keeping the CIRs. Results come back in scan order.
    pub fn map_ensemble<T, F>(&self, master_seed: u64, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &Cir) -> T + Sync + Send,
    {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.synthesize_scan(master_seed, i).map(|cir| f(i, &cir)))
            .collect()
    }

    /// Materialises an ensemble of `count` scans in scan order.
    pub fn ensemble(&self, master_seed: u64, count: usize) -> Result<Vec<Cir>> {
        self.map_ensemble(master_seed, count, |_, cir| cir.clone())
    }
}

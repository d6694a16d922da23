//! Arrival-rate and cluster-count estimators.
//!
//! Gaps cut short by the end of the scan (or by the next cluster, for rays)
//! are censored: they add exposure time but no arrival event.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fitting::optim::nelder_mead;
use crate::fitting::FitResult;
use crate::grid::SCAN_DURATION_NS;
use crate::synthesis::{Cir, JITTER_BOUND};

/// Arrival events and observed time of one process in one scan.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RateObservation {
    pub events: u64,
    pub exposure_ns: f64,
}

impl RateObservation {
    fn add(&mut self, other: RateObservation) {
        self.events += other.events;
        self.exposure_ns += other.exposure_ns;
    }
}

/// Arrival statistics of one scan at both levels of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSummary {
    pub clusters: RateObservation,
    pub rays: RateObservation,
    /// Clusters observed inside the scan.
    pub cluster_count: usize,
    /// More clusters were drawn than fit inside the scan.
    pub truncated: bool,
}

impl ArrivalSummary {
    pub fn from_cir(cir: &Cir) -> Self {
        let arrivals: Vec<f64> = cir.clusters.iter().map(|c| c.arrival_ns).collect();
        let first = arrivals.first().copied().unwrap_or(0.0);
        let last = arrivals.last().copied().unwrap_or(0.0);
        let clusters = RateObservation {
            events: arrivals.len().saturating_sub(1) as u64,
            exposure_ns: if cir.truncated { SCAN_DURATION_NS - first } else { last - first },
        };
        let mut rays = RateObservation::default();
        for (i, cluster) in cir.clusters.iter().enumerate() {
            let horizon = arrivals.get(i + 1).copied().unwrap_or(SCAN_DURATION_NS);
            if let Some(last_ray) = cluster.taps.last() {
                rays.add(RateObservation {
                    events: cluster.taps.len() as u64 - 1,
                    exposure_ns: horizon - cluster.arrival_ns,
                });
                debug_assert!(last_ray.delay_ns < horizon);
            }
        }
        ArrivalSummary { clusters, rays, cluster_count: arrivals.len(), truncated: cir.truncated }
    }
}

/// Exponential-rate MLE `n / (sum of gaps + censored exposure)` with Wald
/// standard error `rate / sqrt(n)`.
pub fn fit_exponential_rate(gaps: &[f64], censored_exposure: f64) -> Result<FitResult> {
    if gaps.is_empty() {
        return Err(Error::InsufficientData("no inter-arrival gaps".into()));
    }
    if gaps.iter().any(|&g| !(g >= 0.0)) || !(censored_exposure >= 0.0) {
        return Err(Error::InvalidParameter("gaps and exposure must be >= 0".into()));
    }
    let total = gaps.iter().sum::<f64>() + censored_exposure;
    if !(total > 0.0) {
        return Err(Error::DegenerateInput("all gaps are zero".into()));
    }
    let n = gaps.len() as f64;
    let rate = n / total;
    let mut fit = FitResult { n_samples: gaps.len(), ..Default::default() };
    fit.insert("rate", rate, rate / n.sqrt());
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRates {
    pub gamma_hat: f64,
    pub gamma_se: f64,
    pub zeta_hat: f64,
    pub zeta_se: f64,
    pub cluster_gaps: u64,
    pub ray_gaps: u64,
}

fn pooled_rate(obs: RateObservation, what: &str) -> Result<(f64, f64)> {
    if obs.events == 0 || !(obs.exposure_ns > 0.0) {
        return Err(Error::InsufficientData(format!("no {what} gaps")));
    }
    let rate = obs.events as f64 / obs.exposure_ns;
    Ok((rate, rate / (obs.events as f64).sqrt()))
}

/// Pooled censored-exponential MLE of the cluster and ray arrival rates.
pub fn fit_poisson_rates(scans: &[Cir]) -> Result<PoissonRates> {
    let mut clusters = RateObservation::default();
    let mut rays = RateObservation::default();
    for s in scans.iter().map(ArrivalSummary::from_cir) {
        clusters.add(s.clusters);
        rays.add(s.rays);
    }
    let (gamma_hat, gamma_se) = pooled_rate(clusters, "cluster")?;
    let (zeta_hat, zeta_se) = pooled_rate(rays, "ray")?;
    Ok(PoissonRates {
        gamma_hat,
        gamma_se,
        zeta_hat,
        zeta_se,
        cluster_gaps: clusters.events,
        ray_gaps: rays.events,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitteredRateFit {
    pub rate: f64,
    pub mean_gap_ns: f64,
    pub sigma_gap_ns: f64,
    pub events: u64,
    pub n_scans: usize,
}

const GRID_POINTS: usize = 600;

/// Rate MLE when each scan's mean gap is drawn from a Normal truncated to
/// `±JITTER_BOUND` of the ensemble mean. The per-scan mean is integrated out
/// on a log grid and the two hyperparameters are found by Nelder-Mead.
pub fn fit_jittered_rate(observations: &[RateObservation]) -> Result<JitteredRateFit> {
    let obs: Vec<RateObservation> = observations.iter().copied().filter(|o| o.exposure_ns > 0.0).collect();
    let events: u64 = obs.iter().map(|o| o.events).sum();
    let exposure: f64 = obs.iter().map(|o| o.exposure_ns).sum();
    if events == 0 {
        return Err(Error::InsufficientData("no arrival events".into()));
    }
    let pooled_gap = exposure / events as f64;

    let (lo, hi) = ((0.02 * pooled_gap).ln(), (5.0 * pooled_gap).ln());
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| (lo + step * i as f64).exp()).collect();
    // Per-scan likelihood on the grid, scaled so each row peaks at 1.
    let mut table = vec![0.0; obs.len() * GRID_POINTS];
    for (row, o) in table.chunks_mut(GRID_POINTS).zip(&obs) {
        let k = o.events as f64;
        let mut max = f64::NEG_INFINITY;
        for (cell, &m) in row.iter_mut().zip(&grid) {
            *cell = -k * m.ln() - o.exposure_ns / m;
            max = max.max(*cell);
        }
        row.iter_mut().for_each(|c| *c = (*c - max).exp());
    }

    let std = Normal::standard();
    let nll = |theta: &[f64]| -> f64 {
        let mean = theta[0].exp();
        let sigma = theta[1].exp();
        let half = JITTER_BOUND * mean;
        let mass = std.cdf(half / sigma) - std.cdf(-half / sigma);
        if !(mass > 0.0) {
            return f64::INFINITY;
        }
        // Density times the grid cell width (d m = m d ln m).
        let weights: Vec<f64> = grid
            .iter()
            .map(|&m| {
                if (m - mean).abs() <= half {
                    std.pdf((m - mean) / sigma) / sigma * m * step / mass
                } else {
                    0.0
                }
            })
            .collect();
        let mut total = 0.0;
        for row in table.chunks(GRID_POINTS) {
            let v: f64 = row.iter().zip(&weights).map(|(a, w)| a * w).sum();
            total -= v.max(1e-300).ln();
        }
        total
    };
    let start = [pooled_gap.ln(), (0.3 * pooled_gap).ln()];
    let (theta, _) = nelder_mead(nll, &start, &[0.2, 0.5], 400, 1e-10);
    let mean_gap_ns = theta[0].exp();
    Ok(JitteredRateFit {
        rate: 1.0 / mean_gap_ns,
        mean_gap_ns,
        sigma_gap_ns: theta[1].exp(),
        events,
        n_scans: obs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterCountFit {
    pub n_bar: f64,
    pub sigma_nbar: f64,
    pub n_scans: usize,
}

/// MLE of `(n_bar, sigma)` for counts `max(1, round(n_bar + x))`,
/// `x ~ Normal(0, sigma^2)`. A truncated scan only shows that its drawn
/// count exceeded the observed one.
pub fn fit_cluster_count(observed: &[(usize, bool)]) -> Result<ClusterCountFit> {
    if observed.is_empty() {
        return Err(Error::InsufficientData("no cluster counts".into()));
    }
    if observed.iter().any(|&(k, _)| k == 0) {
        return Err(Error::InvalidParameter("cluster counts must be >= 1".into()));
    }
    // Collapse to distinct (count, truncated) cells.
    let mut cells: std::collections::BTreeMap<(usize, bool), f64> = Default::default();
    for &key in observed {
        *cells.entry(key).or_default() += 1.0;
    }
    let std = Normal::standard();
    let nll = |theta: &[f64]| -> f64 {
        let (mu, sigma) = (theta[0], theta[1].exp());
        let cdf = |x: f64| std.cdf((x - mu) / sigma);
        cells
            .iter()
            .map(|(&(k, truncated), &w)| {
                let k = k as f64;
                let p = if truncated {
                    1.0 - cdf(k + 0.5)
                } else if k == 1.0 {
                    cdf(1.5)
                } else {
                    cdf(k + 0.5) - cdf(k - 0.5)
                };
                -w * p.max(1e-300).ln()
            })
            .sum()
    };
    let n = observed.len() as f64;
    let mean = observed.iter().map(|&(k, _)| k as f64).sum::<f64>() / n;
    let var = observed.iter().map(|&(k, _)| (k as f64 - mean).powi(2)).sum::<f64>() / n;
    let start = [mean, var.sqrt().max(0.3).ln()];
    let (theta, _) = nelder_mead(nll, &start, &[0.3, 0.3], 600, 1e-12);
    Ok(ClusterCountFit { n_bar: theta[0], sigma_nbar: theta[1].exp(), n_scans: observed.len() })
}

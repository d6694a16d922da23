//! Sliding-window cluster detector.
//!
//! A cluster opens at the first bin above the noise floor. The detector fits
//! a log-linear envelope to the bins that follow the current cluster's peak,
//! smooths the PDP with a causal box window, and opens a new cluster when the
//! smoothed power exceeds the envelope by `margin_db` at least `min_gap_ns`
//! after the current cluster started.

use serde::{Deserialize, Serialize};

use crate::analysis::Pdp;
use crate::grid::BIN_WIDTH_NS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub margin_db: f64,
    pub min_gap_ns: f64,
    pub smoothing_ns: f64,
    /// Bins below this fraction of the PDP peak are silence.
    pub noise_floor: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig { margin_db: 6.0, min_gap_ns: 1.0, smoothing_ns: 0.5, noise_floor: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSegment {
    pub start_bin: usize,
    pub end_bin: usize,
    pub peak_bin: usize,
    pub peak_power: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterSegmentation {
    pub boundaries: Vec<ClusterSegment>,
    pub count: usize,
}

/// Running least-squares fit of `ln s` against the bin index.
#[derive(Default)]
struct Envelope {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    sxy: f64,
}

impl Envelope {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.sxy += x * y;
    }

    /// Predicted log power at `x`, or `fallback` while the fit is not a decay.
    fn predict(&self, x: f64, fallback: f64) -> f64 {
        let den = self.n * self.sxx - self.sx * self.sx;
        if self.n < 2.0 || den <= 0.0 {
            return fallback;
        }
        let slope = (self.n * self.sxy - self.sx * self.sy) / den;
        if slope >= 0.0 {
            return fallback;
        }
        let intercept = (self.sy - slope * self.sx) / self.n;
        intercept + slope * x
    }
}

/// Feeds one raw bin into the current cluster's envelope fit, restarting the
/// fit when a bin clears the current peak by `restart` (log units). Bins
/// holding several merged rays sit a few dB above their neighbours and must
/// not restart it.
fn track(envelope: &mut Envelope, peak_ln: &mut f64, n: usize, power: f64, floor: f64, restart: f64) {
    if power <= floor {
        return;
    }
    let ln_p = power.ln();
    if ln_p > *peak_ln + restart {
        *peak_ln = ln_p;
        *envelope = Envelope::default();
    }
    envelope.push(n as f64, ln_p);
}

pub fn identify_clusters(pdp: &Pdp, config: &ClusterConfig) -> ClusterSegmentation {
    let bins = &pdp.bins;
    let peak = pdp.peak();
    if !(peak > 0.0) {
        return ClusterSegmentation::default();
    }
    let floor = config.noise_floor * peak;
    let Some(first) = bins.iter().position(|&b| b > floor) else {
        return ClusterSegmentation::default();
    };

    let w = ((config.smoothing_ns / BIN_WIDTH_NS).round() as usize).max(1);
    let mut smoothed = vec![0.0; bins.len()];
    let mut acc = 0.0;
    for n in 0..bins.len() {
        acc += bins[n];
        if n >= w {
            acc -= bins[n - w];
        }
        smoothed[n] = acc.max(0.0) / w as f64;
    }

    let min_gap = (config.min_gap_ns / BIN_WIDTH_NS).round() as usize;
    let margin = config.margin_db * std::f64::consts::LN_10 / 10.0;
    let restart = 0.5 * margin;
    let mut starts = vec![first];
    let mut start = first;
    let mut peak_ln = f64::NEG_INFINITY;
    let mut envelope = Envelope::default();

    for n in first..bins.len() {
        let s = smoothed[n];
        if s > floor && n >= start + min_gap && envelope.n >= 1.0 {
            let predicted = envelope.predict(n as f64, peak_ln);
            if s.ln() > predicted + margin {
                // The onset is the strongest raw bin inside the window that
                // pushed the smoothed value over the envelope.
                let lo = (n + 1).saturating_sub(w).max(start + 1);
                let onset = (lo..=n)
                    .max_by(|&a, &b| bins[a].total_cmp(&bins[b]).then(b.cmp(&a)))
                    .unwrap_or(n);
                start = onset;
                starts.push(onset);
                peak_ln = f64::NEG_INFINITY;
                envelope = Envelope::default();
                for k in onset..=n {
                    track(&mut envelope, &mut peak_ln, k, bins[k], floor, restart);
                }
                continue;
            }
        }
        track(&mut envelope, &mut peak_ln, n, bins[n], floor, restart);
    }

    let boundaries: Vec<ClusterSegment> = starts
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let stop = starts.get(j + 1).copied().unwrap_or(bins.len());
            let end = (s..stop).rev().find(|&k| bins[k] > floor).unwrap_or(s);
            let peak_bin = (s..=end)
                .max_by(|&a, &b| bins[a].total_cmp(&bins[b]).then(b.cmp(&a)))
                .unwrap_or(s);
            ClusterSegment { start_bin: s, end_bin: end, peak_bin, peak_power: bins[peak_bin] }
        })
        .collect();
    ClusterSegmentation { count: boundaries.len(), boundaries }
}

//! Inter- and intra-cluster power decay constants.
//!
//! Both fits are log-linear regressions with group fixed effects: cluster
//! peak powers are regressed on arrival time within each scan, and ray powers
//! on their offset within each cluster. Demeaning inside each group removes
//! per-scan normalisation, large-scale attenuation and per-cluster power
//! offsets, none of which carry information about the decay slopes.

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::analysis::{ClusterSegmentation, Pdp};
use crate::error::{Error, Result};
use crate::grid::delay_of_bin;
use crate::synthesis::Cir;

/// One cluster: its arrival, peak power and `(offset_ns, power)` per ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterObservation {
    pub arrival_ns: f64,
    pub peak_power: f64,
    pub rays: Vec<(f64, f64)>,
}

impl ClusterObservation {
    /// Clusters of a synthesized scan; the peak is the cluster's first ray
    /// and the direct path is left out.
    pub fn from_cir(cir: &Cir) -> Vec<ClusterObservation> {
        cir.clusters
            .iter()
            .filter(|c| !c.taps.is_empty())
            .map(|c| ClusterObservation {
                arrival_ns: c.arrival_ns,
                peak_power: c.taps[0].amplitude.powi(2),
                rays: c
                    .taps
                    .iter()
                    .map(|t| (t.delay_ns - c.arrival_ns, t.amplitude * t.amplitude))
                    .collect(),
            })
            .collect()
    }

    /// Clusters of a measured PDP: each segment's nonzero bins measured from
    /// its peak bin.
    pub fn from_pdp(pdp: &Pdp, segmentation: &ClusterSegmentation) -> Vec<ClusterObservation> {
        segmentation
            .boundaries
            .iter()
            .map(|s| ClusterObservation {
                arrival_ns: delay_of_bin(s.peak_bin),
                peak_power: s.peak_power,
                rays: (s.peak_bin..=s.end_bin)
                    .filter(|&b| pdp.bins[b] > 0.0)
                    .map(|b| (delay_of_bin(b) - delay_of_bin(s.peak_bin), pdp.bins[b]))
                    .collect(),
            })
            .collect()
    }
}

/// Within-group sums of a fixed-effects regression; mergeable across scans.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecayStats {
    pub points: u64,
    pub groups: u64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

impl DecayStats {
    /// Adds one group of `(x, ln power)` points. Groups with fewer than two
    /// points carry no slope information and are skipped.
    pub fn add_group(&mut self, points: impl Iterator<Item = (f64, f64)> + Clone) {
        let (n, sx, sy) = points.clone().fold((0u64, 0.0, 0.0), |(n, sx, sy), (x, y)| (n + 1, sx + x, sy + y));
        if n < 2 {
            return;
        }
        let (mx, my) = (sx / n as f64, sy / n as f64);
        for (x, y) in points {
            let (dx, dy) = (x - mx, y - my);
            self.sxx += dx * dx;
            self.sxy += dx * dy;
            self.syy += dy * dy;
        }
        self.points += n;
        self.groups += 1;
    }

    fn decay(&self, what: &str) -> Result<DecayEstimate> {
        if self.groups == 0 || !(self.sxx > 0.0) {
            return Err(Error::InsufficientData(format!("no {what} with two or more points")));
        }
        let slope = self.sxy / self.sxx;
        if !(slope < 0.0) {
            return Err(Error::InsufficientData(format!("{what} power does not decay (slope {slope})")));
        }
        let dof = self.points.saturating_sub(self.groups + 1);
        let rss = (self.syy - slope * self.sxy).max(0.0);
        let slope_se = if dof > 0 { (rss / dof as f64 / self.sxx).sqrt() } else { 0.0 };
        let value_ns = -1.0 / slope;
        Ok(DecayEstimate {
            value_ns,
            standard_error: slope_se * value_ns * value_ns,
            points: self.points,
            groups: self.groups,
        })
    }
}

impl AddAssign for DecayStats {
    fn add_assign(&mut self, o: Self) {
        self.points += o.points;
        self.groups += o.groups;
        self.sxx += o.sxx;
        self.sxy += o.sxy;
        self.syy += o.syy;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    pub value_ns: f64,
    pub standard_error: f64,
    pub points: u64,
    pub groups: u64,
}

#[derive(Debug)]
pub struct DecayFit {
    pub lambda_cap: Result<DecayEstimate>,
    pub lambda_ray: Result<DecayEstimate>,
}

impl DecayFit {
    /// Both estimates exist and the inter-cluster decay is the slower one.
    pub fn consistent(&self) -> bool {
        matches!((&self.lambda_cap, &self.lambda_ray), (Ok(c), Ok(r)) if c.value_ns > r.value_ns)
    }

    pub fn from_stats(inter: &DecayStats, intra: &DecayStats) -> Self {
        DecayFit { lambda_cap: inter.decay("cluster sequence"), lambda_ray: intra.decay("cluster") }
    }
}

/// Sufficient statistics of one scan's clusters: `(inter, intra)`.
pub fn scan_decay_stats(clusters: &[ClusterObservation]) -> (DecayStats, DecayStats) {
    let mut inter = DecayStats::default();
    let mut intra = DecayStats::default();
    let ln = |p: f64| p.max(f64::MIN_POSITIVE).ln();
    inter.add_group(clusters.iter().filter(|c| c.peak_power > 0.0).map(|c| (c.arrival_ns, ln(c.peak_power))));
    for c in clusters {
        intra.add_group(c.rays.iter().filter(|r| r.1 > 0.0).map(|&(x, p)| (x, ln(p))));
    }
    (inter, intra)
}

/// Fits `Lambda` and `lambda` over an ensemble of scans (one inner list per
/// scan). Either estimate may fail on its own.
pub fn fit_decay_constants(scans: &[Vec<ClusterObservation>]) -> DecayFit {
    let mut inter = DecayStats::default();
    let mut intra = DecayStats::default();
    for scan in scans {
        let (a, b) = scan_decay_stats(scan);
        inter += a;
        intra += b;
    }
    DecayFit::from_stats(&inter, &intra)
}

//! Cluster counts and the two Poisson arrival processes.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

use crate::grid::SCAN_DURATION_NS;

/// `max(1, round(n_bar + x))` with `x ~ Normal(0, sigma_nbar^2)`.
pub fn draw_cluster_count<R: Rng + ?Sized>(n_bar: f64, sigma_nbar: f64, rng: &mut R) -> usize {
    let x = if sigma_nbar > 0.0 {
        Normal::new(0.0, sigma_nbar).expect("finite sigma").sample(rng)
    } else {
        0.0
    };
    let n = (n_bar + x).round();
    if n < 1.0 {
        1
    } else {
        n as usize
    }
}

/// Cluster arrival times of one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterArrivals {
    /// `Γ_1 = 0 < Γ_2 < …`, all inside the scan.
    pub arrivals_ns: Vec<f64>,
    /// A drawn arrival fell at or beyond the scan end and was dropped.
    pub truncated: bool,
}

/// Draws `n` cluster arrivals with exponential gaps of rate `gamma_rate`.
/// The first cluster arrives at zero; arrivals at or past the scan end are
/// dropped, so the result holds between 1 and `n` entries.
pub fn draw_cluster_arrivals<R: Rng + ?Sized>(gamma_rate: f64, n: usize, rng: &mut R) -> ClusterArrivals {
    let gaps = Exp::new(gamma_rate).expect("positive rate");
    let mut arrivals_ns = vec![0.0];
    let mut truncated = false;
    let mut t = 0.0;
    for _ in 1..n {
        let next = loop {
            let candidate = t + gaps.sample(rng);
            if candidate > t {
                break candidate;
            }
        };
        if next >= SCAN_DURATION_NS {
            truncated = true;
            break;
        }
        arrivals_ns.push(next);
        t = next;
    }
    ClusterArrivals { arrivals_ns, truncated }
}

/// Ray offsets within a cluster starting at `cluster_start_ns`.
///
/// The first ray sits at offset zero; later offsets have exponential gaps of
/// rate `zeta_rate` and generation stops once `cluster_start_ns + offset`
/// reaches `horizon_ns` (the next cluster or the scan end).
pub fn draw_ray_arrivals<R: Rng + ?Sized>(
    zeta_rate: f64,
    cluster_start_ns: f64,
    horizon_ns: f64,
    rng: &mut R,
) -> Vec<f64> {
    let gaps = Exp::new(zeta_rate).expect("positive rate");
    let mut offsets = vec![0.0];
    let mut offset = 0.0;
    let mut delay = cluster_start_ns;
    loop {
        offset += gaps.sample(rng);
        let next = cluster_start_ns + offset;
        if next >= horizon_ns {
            break;
        }
        // Keep absolute delays strictly increasing after rounding.
        if next > delay {
            offsets.push(offset);
            delay = next;
        }
    }
    offsets
}

/// Per-scan mean inter-arrival time: `nominal + x`, where `x` is
/// Normal(0, sigma^2) truncated symmetrically to `±0.9 nominal`.
///
/// The symmetric truncation keeps the result above 10% of nominal and its
/// expectation equal to `nominal`.
pub fn jittered_mean_gap<R: Rng + ?Sized>(nominal: f64, sigma: f64, rng: &mut R) -> f64 {
    if !(sigma > 0.0) {
        return nominal;
    }
    let half_width = JITTER_BOUND * nominal;
    let std = StatNormal::standard();
    let hi = std.cdf(half_width / sigma);
    let lo = 1.0 - hi;
    let u: f64 = rng.random_range(lo..hi);
    let x = sigma * std.inverse_cdf(u);
    nominal + x.clamp(-half_width, half_width)
}

/// Relative half-width of the symmetric truncation in [`jittered_mean_gap`].
pub const JITTER_BOUND: f64 = 0.9;

//! Lognormal tap amplitudes and multiplicative power jitter.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::units::{amplitude_sigma_ln, power_sigma_ln};

/// Natural log of a lognormal tap amplitude `a = e^Z` whose squared mean is
/// `exp(ln_target_power)`.
///
/// `Z ~ Normal(mu, s^2)` with `s = sigma_a_db ln10 / 20` and
/// `mu = ln_target_power / 2 - s^2`, so that `E[a^2]` equals the target.
pub fn draw_tap_log_amplitude<R: Rng + ?Sized>(ln_target_power: f64, sigma_a_db: f64, rng: &mut R) -> f64 {
    let s = amplitude_sigma_ln(sigma_a_db);
    let mu = 0.5 * ln_target_power - s * s;
    if s > 0.0 {
        mu + s * standard_normal(rng)
    } else {
        mu
    }
}

/// Lognormal tap amplitude with `E[a^2] = target_mean_power`.
pub fn draw_tap_amplitude<R: Rng + ?Sized>(target_mean_power: f64, sigma_a_db: f64, rng: &mut R) -> f64 {
    draw_tap_log_amplitude(target_mean_power.ln(), sigma_a_db, rng).exp()
}

/// Natural log of a unit-mean lognormal power factor with a `sigma_db` dB
/// spread.
pub fn draw_log_power_jitter<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    let s = power_sigma_ln(sigma_db);
    if s > 0.0 {
        -0.5 * s * s + s * standard_normal(rng)
    } else {
        0.0
    }
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").sample(rng)
}

//! dB conventions used throughout the crate.
//!
//! Powers: `dB = 10 log10(linear)`. A lognormal spread quoted in dB on an
//! amplitude converts to a natural-log standard deviation with
//! `sigma_ln = sigma_db * ln(10) / 20`; on a power with `ln(10) / 10`.

use std::f64::consts::LN_10;

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn power_to_db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Natural-log std of an amplitude whose spread is `sigma_db` dB.
pub fn amplitude_sigma_ln(sigma_db: f64) -> f64 {
    sigma_db * LN_10 / 20.0
}

/// Natural-log std of a power whose spread is `sigma_db` dB.
pub fn power_sigma_ln(sigma_db: f64) -> f64 {
    sigma_db * LN_10 / 10.0
}

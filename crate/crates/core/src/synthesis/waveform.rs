//! Received waveforms: the pulse template convolved with the taps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{bin_of_delay, BIN_WIDTH_NS, NUM_BINS};
use crate::params::Scenario;
use crate::synthesis::Cir;

/// Carrier of the default pulse: centre of the 3.1–5.3 GHz band.
const DEFAULT_CARRIER_GHZ: f64 = 4.2;
const DEFAULT_TEMPLATE_LEN: usize = 16;

/// A sampled pulse shape on the scan grid. Taps are aligned on the sample
/// with the largest magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTemplate {
    pub samples: Vec<f64>,
}

impl Default for PulseTemplate {
    /// Raised-cosine windowed sinusoid with 1 ns support, unit peak.
    fn default() -> Self {
        let n = DEFAULT_TEMPLATE_LEN;
        let mid = (n as f64 - 1.0) / 2.0;
        let support = n as f64 * BIN_WIDTH_NS;
        let raw: Vec<f64> = (0..n)
            .map(|k| {
                let t = (k as f64 - mid) * BIN_WIDTH_NS;
                let window = 0.5 * (1.0 + (2.0 * PI * t / support).cos());
                window * (2.0 * PI * DEFAULT_CARRIER_GHZ * t).cos()
            })
            .collect();
        let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        PulseTemplate { samples: raw.into_iter().map(|v| v / peak).collect() }
    }
}

impl PulseTemplate {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.len() > NUM_BINS {
            return Err(Error::InvalidParameter(format!(
                "template length {} must be in 1..={NUM_BINS}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("template samples must be finite".into()));
        }
        Ok(PulseTemplate { samples })
    }

    pub fn impulse() -> Self {
        PulseTemplate { samples: vec![1.0] }
    }

    /// One value per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value = line.split(',').next_back().unwrap_or(line).trim();
            samples.push(value.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("not a number: {value:?}"),
            })?);
        }
        PulseTemplate::new(samples)
    }

    /// Index of the sample with the largest magnitude.
    pub fn center(&self) -> usize {
        self.samples
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) })
            .0
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A dense received waveform on the 61 ps grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanWaveform {
    pub samples: Vec<f64>,
    pub scenario: Scenario,
}

impl ScanWaveform {
    pub fn new(samples: Vec<f64>, scenario: Scenario) -> Result<Self> {
        if samples.len() != NUM_BINS {
            return Err(Error::GridMismatch(format!("waveform has {} samples, expected {NUM_BINS}", samples.len())));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("waveform samples must be finite".into()));
        }
        Ok(ScanWaveform { samples, scenario })
    }

    pub fn zeros(scenario: Scenario) -> Self {
        ScanWaveform { samples: vec![0.0; NUM_BINS], scenario }
    }

    /// Adds `gain * template` aligned at `bin`, clipped to the scan.
    pub fn add_pulse(&mut self, template: &PulseTemplate, bin: usize, gain: f64) {
        let center = template.center() as isize;
        for (k, &s) in template.samples.iter().enumerate() {
            let idx = bin as isize + k as isize - center;
            if (0..NUM_BINS as isize).contains(&idx) {
                self.samples[idx as usize] += gain * s;
            }
        }
    }
}

/// Superposes `amplitude cos(phase)` scaled copies of the template at each
/// component's nearest bin.
pub fn render_waveform(cir: &Cir, template: &PulseTemplate) -> ScanWaveform {
    let mut wave = ScanWaveform::zeros(cir.scenario);
    if let Some(d) = cir.direct {
        wave.add_pulse(template, 0, d.amplitude * d.phase_rad.cos());
    }
    for tap in cir.taps() {
        wave.add_pulse(template, bin_of_delay(tap.delay_ns), tap.amplitude * tap.phase_rad.cos());
    }
    wave
}

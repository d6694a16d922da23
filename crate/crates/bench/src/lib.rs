//! Shared fixtures for the criterion benches.

use wow_uwb_core::params::builtin_column;
use wow_uwb_core::synthesis::{render_waveform, ChannelModel, PulseTemplate};
use wow_uwb_core::{Cir, Position, RainState, Scenario, ScanWaveform, SynthesisOptions};

/// Full-model channel for a column at 90 mph.
pub fn model(position: Position, rain: RainState) -> ChannelModel {
    let params = builtin_column(position, rain);
    let scenario = Scenario::hurricane(position, rain, 90.0).expect("90 mph is a hurricane step");
    let options = SynthesisOptions::full(params.large_scale);
    ChannelModel::new(scenario, params, options).expect("builtin column matches its scenario")
}

pub fn sample_cir(seed: u64) -> Cir {
    model(Position::P1, RainState::S1).synthesize(seed).expect("builtin column synthesizes")
}

pub fn sample_waveform(seed: u64, template: &PulseTemplate) -> ScanWaveform {
    render_waveform(&sample_cir(seed), template)
}

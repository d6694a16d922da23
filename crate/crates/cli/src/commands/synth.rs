use std::process::ExitCode;

use rayon::prelude::*;
use wow_uwb_core::io::{cir_to_json_line, waveform_to_json_line, CIR_SCHEMA, WAVEFORM_SCHEMA};
use wow_uwb_core::rng::scan_seed;
use wow_uwb_core::synthesis::{render_waveform, synthesize_cir};
use wow_uwb_core::{Scenario, SynthesisOptions};

use super::{Manifest, SynthEcho, MANIFEST_FILE, MANIFEST_SCHEMA, REFERENCE_FILE, SCANS_FILE, WAVEFORMS_FILE};
use crate::config::{config_hash, CliError, Settings};
use crate::output::{create_dir, write_json, write_lines};

pub fn run(settings: &Settings) -> Result<ExitCode, CliError> {
    let (position, rain) = settings.column()?;
    let scans = settings.scans(None)?;
    let seed = settings.seed.unwrap_or(0);
    let velocities = settings.velocities()?;
    let waveforms = settings.waveforms.unwrap_or(false);
    let out = settings.out()?;
    let (set, params_sha256) = settings.parameter_set()?;
    let params = set.column(position, rain)?.clone();
    let (template, template_sha256) = settings.pulse_template()?;

    let scenario = format!("{position},{rain}");
    let echo = SynthEcho {
        command: "synth".into(),
        scenario: scenario.clone(),
        scans,
        seed,
        velocities: velocities.clone(),
        waveforms,
        params_sha256,
        template_sha256,
    };
    let hash = config_hash(&echo)?;

    let options = SynthesisOptions::full(params.large_scale);
    let reference_scenario = Scenario::reference(position);
    let records: Vec<(String, String, Option<String>)> = (0..scans as u64)
        .into_par_iter()
        .map(|i| -> anyhow::Result<_> {
            let wind = velocities[(i % velocities.len() as u64) as usize];
            let scan_scenario = Scenario::hurricane(position, rain, wind)?;
            let s = scan_seed(seed, i);
            let cir = synthesize_cir(&scan_scenario, &params.multipath, &options, s)?;
            let reference = synthesize_cir(&reference_scenario, &params.multipath, &options, s)?;
            let wave = if waveforms {
                Some(waveform_to_json_line(i, &render_waveform(&cir, &template), Some(&hash))?)
            } else {
                None
            };
            Ok((cir_to_json_line(i, &cir, Some(&hash))?, cir_to_json_line(i, &reference, Some(&hash))?, wave))
        })
        .collect::<anyhow::Result<_>>()?;

    create_dir(out)?;
    let mut files = vec![SCANS_FILE.to_owned(), REFERENCE_FILE.to_owned()];
    let mut schemas = vec![CIR_SCHEMA.to_owned()];
    let (mut scan_lines, mut reference_lines, mut wave_lines) = (Vec::new(), Vec::new(), Vec::new());
    for (scan, reference, wave) in records {
        scan_lines.push(scan);
        reference_lines.push(reference);
        wave_lines.extend(wave);
    }
    write_lines(&out.join(SCANS_FILE), scan_lines)?;
    write_lines(&out.join(REFERENCE_FILE), reference_lines)?;
    if waveforms {
        write_lines(&out.join(WAVEFORMS_FILE), wave_lines)?;
        files.push(WAVEFORMS_FILE.to_owned());
        schemas.push(WAVEFORM_SCHEMA.to_owned());
    }

    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        config: echo,
        config_sha256: hash,
        seed,
        scenario,
        path_kind: position.path_kind(),
        velocities,
        schemas,
        params: set,
        files,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    eprintln!("wrote {scans} scans to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

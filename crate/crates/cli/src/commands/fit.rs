use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;
use wow_uwb_core::fitting::{compare_with_column, RoundtripReport, ScanSummary, Tolerances};

use super::*;
use crate::config::{config_hash, CliError, Settings};
use crate::output::{create_dir, write_csv, write_json};

#[derive(Serialize)]
struct FitEcho<'a> {
    command: &'a str,
    source_config_sha256: &'a str,
    tolerances: Tolerances,
}

#[derive(Serialize)]
struct FitOutput<'a> {
    schema: &'static str,
    config_sha256: &'a str,
    source_config_sha256: &'a str,
    passed: bool,
    report: &'a RoundtripReport,
}

pub fn tolerances(settings: &Settings) -> Result<Tolerances, CliError> {
    Ok(settings.tolerance()?.map_or_else(Tolerances::default, Tolerances::uniform))
}

/// Fits every estimator to a synth output and compares the estimates with
/// the column the scans were drawn from. Exits 1 when a checked estimate is
/// out of tolerance.
pub fn run(settings: &Settings) -> Result<ExitCode, CliError> {
    let input = settings.input()?;
    let out = settings.out()?;
    let tol = tolerances(settings)?;
    let ensemble = Ensemble::load(input)?;
    let manifest = &ensemble.manifest;
    let (position, rain) = wow_uwb_core::params::parse_column(&manifest.scenario)?;
    let params = manifest.params.column(position, rain)?;
    let echo = FitEcho { command: "fit", source_config_sha256: &manifest.config_sha256, tolerances: tol };
    let hash = config_hash(&echo)?;

    let summaries: Vec<ScanSummary> = ensemble
        .scans
        .par_iter()
        .zip(&ensemble.reference)
        .map(|(cir, reference)| ScanSummary::from_pair(cir, reference))
        .collect();
    let report = compare_with_column(params, &summaries, manifest.seed, &tol);

    create_dir(out)?;
    write_csv(&out.join("fit.csv"), FIT_SCHEMA, &hash, &report.to_csv())?;
    let passed = report.passed();
    write_json(
        &out.join("fit.json"),
        &FitOutput {
            schema: FIT_SCHEMA,
            config_sha256: &hash,
            source_config_sha256: &manifest.config_sha256,
            passed,
            report: &report,
        },
    )?;
    eprint!("{}", report.to_csv());
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

use std::process::ExitCode;

use serde::Serialize;
use wow_uwb_core::fitting::{roundtrip_report, RoundtripReport, Tolerances, ROUNDTRIP_SCHEMA};

use super::fit::tolerances;
use crate::config::{config_hash, CliError, Settings};
use crate::output::{create_dir, write_csv, write_json};

pub const DEFAULT_SCANS: usize = 10_000;

#[derive(Serialize)]
struct RoundtripEcho {
    command: &'static str,
    scenario: String,
    scans: usize,
    seed: u64,
    tolerances: Tolerances,
    params_sha256: Option<String>,
}

#[derive(Serialize)]
struct RoundtripOutput<'a> {
    schema: &'static str,
    config_sha256: &'a str,
    passed: bool,
    report: &'a RoundtripReport,
}

/// Exit code 0 iff every checked parameter is within tolerance.
pub fn run(settings: &Settings) -> Result<ExitCode, CliError> {
    let (position, rain) = settings.column()?;
    let scans = settings.scans(Some(DEFAULT_SCANS))?;
    let seed = settings.seed.unwrap_or(0);
    let tol = tolerances(settings)?;
    let out = settings.out()?;
    let (params, params_sha256) = settings.column_params()?;
    let echo = RoundtripEcho {
        command: "roundtrip",
        scenario: format!("{position},{rain}"),
        scans,
        seed,
        tolerances: tol,
        params_sha256,
    };
    let hash = config_hash(&echo)?;

    let report = roundtrip_report(&params, scans, seed, &tol)?;
    let passed = report.passed();
    create_dir(out)?;
    write_csv(&out.join("roundtrip.csv"), ROUNDTRIP_SCHEMA, &hash, &report.to_csv())?;
    write_json(
        &out.join("roundtrip.json"),
        &RoundtripOutput { schema: ROUNDTRIP_SCHEMA, config_sha256: &hash, passed, report: &report },
    )?;
    eprint!("{}", report.to_csv());
    eprintln!("{}", if passed { "all checked parameters within tolerance" } else { "round trip FAILED" });
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

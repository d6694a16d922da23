use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::anyhow;
use rayon::prelude::*;
use serde::Serialize;
use wow_uwb_core::analysis::{
    clean_deconvolve, compute_pdp, count_above_amplitude, count_significant_mpcs, empirical_attenuation,
    estimate_k_factor, identify_clusters, reference_peak_amplitude, AttenuationSample, CleanConfig, ClusterConfig,
    SIGNIFICANT_MPC_FRACTION,
};
use wow_uwb_core::io::{attenuation_to_csv, pdp_to_csv, read_waveform_jsonl, ATTENUATION_SCHEMA, PDP_SCHEMA};
use wow_uwb_core::{PathKind, Pdp};

use super::*;
use crate::config::{config_hash, CliError, Settings};
use crate::output::{create_dir, read_file, write_csv, write_json};

#[derive(Serialize)]
struct AnalyzeEcho<'a> {
    command: &'a str,
    source_config_sha256: &'a str,
    template_sha256: Option<String>,
}

#[derive(Serialize)]
struct VelocitySummary {
    wind_mph: f64,
    scans: usize,
    attenuation_db: Option<f64>,
    mean_significant_mpcs: f64,
    mean_mpcs_above_common_threshold: f64,
    mean_cluster_count: f64,
    k_factor_db: Option<f64>,
}

#[derive(Serialize)]
struct AnalysisReport {
    schema: &'static str,
    config_sha256: String,
    source_config_sha256: String,
    scenario: String,
    path_kind: PathKind,
    scans: usize,
    significant_fraction: f64,
    common_threshold: Option<f64>,
    velocities: Vec<VelocitySummary>,
}

struct ScanAnalysis {
    pdp: Pdp,
    significant: usize,
    above_common: usize,
    clusters: Vec<(f64, f64, f64)>,
}

fn mean(values: impl Iterator<Item = usize>) -> f64 {
    let (sum, n) = values.fold((0usize, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum as f64 / n as f64
    }
}


pub fn run(settings: &Settings) -> Result<ExitCode, CliError> {
    let input = settings.input()?;
    let out = settings.out()?;
    let (template, template_sha256) = settings.pulse_template()?;
    let ensemble = Ensemble::load(input)?;
    let manifest = &ensemble.manifest;
    let echo = AnalyzeEcho { command: "analyze", source_config_sha256: &manifest.config_sha256, template_sha256 };
    let hash = config_hash(&echo)?;

    // One amplitude threshold shared by every scan: a fraction of the
    // median reference peak.
    let common_threshold = reference_peak_amplitude(&ensemble.reference).map(|p| SIGNIFICANT_MPC_FRACTION * p);
    let cluster_config = ClusterConfig::default();
    let per_scan: Vec<ScanAnalysis> = ensemble
        .scans
        .par_iter()
        .map(|cir| {
            let pdp = compute_pdp(cir);
            let seg = identify_clusters(&pdp, &cluster_config);
            let clusters = seg
                .boundaries
                .iter()
                .map(|s| {
                    let ns = |b: usize| wow_uwb_core::grid::delay_of_bin(b);
                    (ns(s.start_bin), ns(s.peak_bin), ns(s.end_bin))
                })
                .collect();
            ScanAnalysis {
                significant: count_significant_mpcs(cir, SIGNIFICANT_MPC_FRACTION),
                above_common: common_threshold.map_or(0, |t| count_above_amplitude(cir, t)),
                clusters,
                pdp,
            }
        })
        .collect();
    let reference_pdps: Vec<Pdp> = ensemble.reference.par_iter().map(compute_pdp).collect();

    create_dir(out)?;
    let pdp_dir = out.join("pdp");
    create_dir(&pdp_dir)?;
    per_scan.par_iter().enumerate().try_for_each(|(i, s)| {
        write_csv(&pdp_dir.join(format!("scan_{i:06}.csv")), PDP_SCHEMA, &hash, &pdp_to_csv(&s.pdp))
    })?;

    let mut attenuation = Vec::new();
    let mut summaries = Vec::new();
    let mut kfactor = String::from("wind_mph,n_samples,k_linear,k_db,status\n");
    for &wind in &manifest.velocities {
        let idx: Vec<usize> = (0..ensemble.scans.len()).filter(|&i| ensemble.scans[i].scenario.wind_mph == wind).collect();
        let pdps: Vec<Pdp> = idx.iter().map(|&i| per_scan[i].pdp.clone()).collect();
        let refs: Vec<Pdp> = idx.iter().map(|&i| reference_pdps[i].clone()).collect();
        let sample: Option<AttenuationSample> = empirical_attenuation(&pdps, &refs).ok();
        attenuation.extend(sample);

        let k_db = match manifest.path_kind {
            PathKind::Nlos => {
                writeln!(kfactor, "{wind},{},,,absent (NLOS)", idx.len()).unwrap();
                None
            }
            PathKind::Los => {
                let envelopes: Vec<f64> = idx.iter().map(|&i| ensemble.scans[i].narrowband_gain().norm()).collect();
                match estimate_k_factor(&envelopes) {
                    Ok(k) => {
                        let status = if k.saturated { "saturated" } else { "ok" };
                        writeln!(kfactor, "{wind},{},{},{},{status}", idx.len(), k.linear, k.db).unwrap();
                        Some(k.db)
                    }
                    Err(e) => {
                        writeln!(kfactor, "{wind},{},,,error: {}", idx.len(), e.to_string().replace(',', ";")).unwrap();
                        None
                    }
                }
            }
        };
        summaries.push(VelocitySummary {
            wind_mph: wind,
            scans: idx.len(),
            attenuation_db: sample.map(|s| s.attenuation_db),
            mean_significant_mpcs: mean(idx.iter().map(|&i| per_scan[i].significant)),
            mean_mpcs_above_common_threshold: mean(idx.iter().map(|&i| per_scan[i].above_common)),
            mean_cluster_count: mean(idx.iter().map(|&i| per_scan[i].clusters.len())),
            k_factor_db: k_db.filter(|k| k.is_finite()),
        });
    }
    if attenuation.len() != manifest.velocities.len() {
        let missing: Vec<f64> = summaries.iter().filter(|s| s.attenuation_db.is_none()).map(|s| s.wind_mph).collect();
        return Err(anyhow!("no attenuation estimate at {missing:?} mph (too few scans?)").into());
    }
    write_csv(&out.join("attenuation.csv"), ATTENUATION_SCHEMA, &hash, &attenuation_to_csv(&attenuation))?;
    write_csv(&out.join("kfactor.csv"), KFACTOR_SCHEMA, &hash, &kfactor)?;

    let mut mpc = String::from("index,wind_mph,significant_mpcs,mpcs_above_common_threshold\n");
    let mut clusters = String::from("index,wind_mph,cluster,start_ns,peak_ns,end_ns\n");
    for (i, (s, cir)) in per_scan.iter().zip(&ensemble.scans).enumerate() {
        let wind = cir.scenario.wind_mph;
        writeln!(mpc, "{i},{wind},{},{}", s.significant, s.above_common).unwrap();
        for (c, (start, peak, end)) in s.clusters.iter().enumerate() {
            writeln!(clusters, "{i},{wind},{c},{start},{peak},{end}").unwrap();
        }
    }
    write_csv(&out.join("mpc.csv"), MPC_SCHEMA, &hash, &mpc)?;
    write_csv(&out.join("clusters.csv"), CLUSTERS_SCHEMA, &hash, &clusters)?;

    if manifest.files.iter().any(|f| f == WAVEFORMS_FILE) {
        let waves = read_waveform_jsonl(&read_file(&input.join(WAVEFORMS_FILE))?)
            .map_err(|e| anyhow!("{WAVEFORMS_FILE}: {e}"))?;
        let config = CleanConfig::default();
        let taps = waves
            .par_iter()
            .map(|(i, w)| clean_deconvolve(w, &template, &config).map(|t| (*i, t)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut clean = String::from("index,bin,delay_ns,amplitude\n");
        for (i, scan_taps) in taps {
            for t in scan_taps {
                writeln!(clean, "{i},{},{},{}", t.bin, t.delay_ns, t.amplitude).unwrap();
            }
        }
        write_csv(&out.join("clean.csv"), CLEAN_SCHEMA, &hash, &clean)?;
    }

    let report = AnalysisReport {
        schema: ANALYSIS_SCHEMA,
        config_sha256: hash,
        source_config_sha256: manifest.config_sha256.clone(),
        scenario: manifest.scenario.clone(),
        path_kind: manifest.path_kind,
        scans: ensemble.scans.len(),
        significant_fraction: SIGNIFICANT_MPC_FRACTION,
        common_threshold,
        velocities: summaries,
    };
    write_json(&out.join("analysis.json"), &report)?;
    eprintln!("analyzed {} scans into {}", ensemble.scans.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

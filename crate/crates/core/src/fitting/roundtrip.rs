//! Synthesize-then-estimate comparison against a parameter column.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{attenuation_db, AttenuationSample};
use crate::error::{Error, Result};
use crate::fitting::decay::{scan_decay_stats, ClusterObservation, DecayFit, DecayStats};
use crate::fitting::fading::{lognormal_m_statistics, nakagami_moments, NakagamiFit};
use crate::fitting::large_scale::fit_large_scale;
use crate::fitting::rates::{fit_cluster_count, fit_jittered_rate, ArrivalSummary};
use crate::params::{PathKind, Scenario, ScenarioParams, HURRICANE_WINDS_MPH};
use crate::rng::scan_seed;
use crate::synthesis::{synthesize_cir, Cir, SynthesisOptions};
use crate::units::power_to_db;

pub const ROUNDTRIP_SCHEMA: &str = "wow-uwb-roundtrip/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(t) => write!(f, "rel {t}"),
            Tolerance::Absolute(t) => write!(f, "abs {t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rate_rel: f64,
    pub count_rel: f64,
    pub decay_rel: f64,
    pub alpha_abs: f64,
    pub a_w0_abs_db: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rate_rel: 0.10, count_rel: 0.10, decay_rel: 0.15, alpha_abs: 0.05, a_w0_abs_db: 4.0 }
    }
}

impl Tolerances {
    /// One relative tolerance for every relative check; absolute checks keep
    /// their defaults.
    pub fn uniform(rel: f64) -> Self {
        Tolerances { rate_rel: rel, count_rel: rel, decay_rel: rel, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail,
    Info,
    Absent,
    Error(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Pass => f.write_str("pass"),
            RowStatus::Fail => f.write_str("fail"),
            RowStatus::Info => f.write_str("info"),
            RowStatus::Absent => f.write_str("absent (NLOS)"),
            RowStatus::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripRow {
    pub parameter: String,
    pub table_value: Option<f64>,
    pub estimate: Option<f64>,
    pub relative_error: Option<f64>,
    pub tolerance: Option<Tolerance>,
    pub status: RowStatus,
}

impl RoundtripRow {
    fn new(parameter: &str, table_value: Option<f64>, estimate: Result<f64>, tolerance: Option<Tolerance>) -> Self {
        let (estimate, status) = match estimate {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(RowStatus::Error(e.to_string()))),
        };
        let relative_error = match (table_value, estimate) {
            (Some(t), Some(e)) if t != 0.0 => Some((e - t) / t.abs()),
            _ => None,
        };
        let status = status.unwrap_or_else(|| match (tolerance, table_value, estimate) {
            (None, None, _) => RowStatus::Absent,
            (None, _, _) => RowStatus::Info,
            (Some(Tolerance::Relative(tol)), Some(_), Some(_)) => {
                if relative_error.is_some_and(|r| r.abs() <= tol) {
                    RowStatus::Pass
                } else {
                    RowStatus::Fail
                }
            }
            (Some(Tolerance::Absolute(tol)), Some(t), Some(e)) => {
                if (e - t).abs() <= tol {
                    RowStatus::Pass
                } else {
                    RowStatus::Fail
                }
            }
            (Some(_), _, _) => RowStatus::Fail,
        });
        RoundtripRow { parameter: parameter.to_owned(), table_value, estimate, relative_error, tolerance, status }
    }

    fn absent(parameter: &str) -> Self {
        RoundtripRow {
            parameter: parameter.to_owned(),
            table_value: None,
            estimate: None,
            relative_error: None,
            tolerance: None,
            status: RowStatus::Absent,
        }
    }

    /// Checked rows carry a tolerance; informational rows do not.
    pub fn is_checked(&self) -> bool {
        self.tolerance.is_some()
    }

    pub fn passed(&self) -> bool {
        !self.is_checked() || self.status == RowStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub schema: String,
    pub column: String,
    pub path_kind: PathKind,
    pub n_scans: usize,
    pub seed: u64,
    pub rows: Vec<RoundtripRow>,
}

impl RoundtripReport {
    pub fn row(&self, parameter: &str) -> Option<&RoundtripRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    /// Every checked row is within tolerance.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(RoundtripRow::passed)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("parameter,table_value,estimate,relative_error,tolerance,status\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.parameter,
                opt(r.table_value),
                opt(r.estimate),
                opt(r.relative_error),
                r.tolerance.map(|t| t.to_string()).unwrap_or_default(),
                r.status.to_string().replace(',', ";"),
            ));
        }
        out
    }
}

/// Everything the estimators need from one scan and its matched reference.
#[derive(Debug)]
pub struct ScanSummary {
    arrivals: ArrivalSummary,
    inter: DecayStats,
    intra: DecayStats,
    attenuation: Result<AttenuationSample>,
    a0_db: f64,
    b0_db: Option<f64>,
    k_db: Option<f64>,
    nakagami: Option<NakagamiFit>,
}

impl ScanSummary {
    /// `reference` is the same scan recorded without hurricane conditions.
    pub fn from_pair(cir: &Cir, reference: &Cir) -> Self {
        let (inter, intra) = scan_decay_stats(&ClusterObservation::from_cir(cir));
        let attenuation = attenuation_db(reference.total_energy(), cir.total_energy()).map(|a| AttenuationSample {
            wind_mph: cir.scenario.wind_mph,
            attenuation_db: a,
            scenario: cir.scenario,
        });
        ScanSummary {
            arrivals: ArrivalSummary::from_cir(cir),
            inter,
            intra,
            attenuation,
            a0_db: power_to_db(reference.diffuse_energy()),
            b0_db: reference.direct.map(|d| power_to_db(d.power())),
            k_db: reference.k_factor_db(),
            nakagami: nakagami_moments(&cir.amplitudes()).ok(),
        }
    }
}

fn summarize(params: &ScenarioParams, options: &SynthesisOptions, master: u64, index: u64) -> Result<ScanSummary> {
    let wind = HURRICANE_WINDS_MPH[(index % HURRICANE_WINDS_MPH.len() as u64) as usize];
    let scenario = Scenario::hurricane(params.position, params.rain, wind)?;
    let seed = scan_seed(master, index);
    let cir = synthesize_cir(&scenario, &params.multipath, options, seed)?;
    let reference = synthesize_cir(&Scenario::reference(params.position), &params.multipath, options, seed)?;
    Ok(ScanSummary::from_pair(&cir, &reference))
}

fn relay(e: &Error) -> Error {
    Error::InsufficientData(e.to_string())
}

fn val<T>(r: &Result<T>, f: impl Fn(&T) -> f64) -> Result<f64> {
    r.as_ref().map(f).map_err(relay)
}

fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::InsufficientData("fewer than two values".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Synthesizes `n_scans` scans of a column (velocities cycling through the
/// hurricane steps, each paired with a matched-seed reference scan) and
/// compares every estimator with the column's values.
pub fn roundtrip_report(
    params: &ScenarioParams,
    n_scans: usize,
    seed: u64,
    tolerances: &Tolerances,
) -> Result<RoundtripReport> {
    if n_scans == 0 {
        return Err(Error::InsufficientData("round trip needs at least one scan".into()));
    }
    let options = SynthesisOptions::full(params.large_scale);
    let scans: Vec<ScanSummary> = (0..n_scans as u64)
        .into_par_iter()
        .map(|i| summarize(params, &options, seed, i))
        .collect::<Result<_>>()?;

    Ok(compare_with_column(params, &scans, seed, tolerances))
}

/// Runs every estimator over per-scan summaries and compares the results
/// with a parameter column.
pub fn compare_with_column(
    params: &ScenarioParams,
    scans: &[ScanSummary],
    seed: u64,
    tolerances: &Tolerances,
) -> RoundtripReport {
    let mp = &params.multipath;
    let ls = &params.large_scale;
    let ss = &params.small_scale;
    let nlos = params.position.path_kind() == PathKind::Nlos;
    let rel = |t: f64| Some(Tolerance::Relative(t));
    let mut rows = Vec::new();

    let clusters = fit_jittered_rate(&scans.iter().map(|s| s.arrivals.clusters).collect::<Vec<_>>());
    let rays = fit_jittered_rate(&scans.iter().map(|s| s.arrivals.rays).collect::<Vec<_>>());
    let counts = fit_cluster_count(
        &scans.iter().map(|s| (s.arrivals.cluster_count, s.arrivals.truncated)).collect::<Vec<_>>(),
    );
    let (mut inter, mut intra) = (DecayStats::default(), DecayStats::default());
    for s in scans {
        inter += s.inter;
        intra += s.intra;
    }
    let decay = DecayFit::from_stats(&inter, &intra);

    rows.push(RoundtripRow::new("gamma_rate", Some(mp.gamma_rate), val(&clusters, |f| f.rate), rel(tolerances.rate_rel)));
    rows.push(RoundtripRow::new("zeta_rate", Some(mp.zeta_rate), val(&rays, |f| f.rate), rel(tolerances.rate_rel)));
    rows.push(RoundtripRow::new("n_bar", Some(mp.n_bar), val(&counts, |f| f.n_bar), rel(tolerances.count_rel)));
    rows.push(RoundtripRow::new("lambda_cap", Some(mp.lambda_cap), val(&decay.lambda_cap, |d| d.value_ns), rel(tolerances.decay_rel)));
    rows.push(RoundtripRow::new("lambda_ray", Some(mp.lambda_ray), val(&decay.lambda_ray, |d| d.value_ns), rel(tolerances.decay_rel)));

    let samples: Result<Vec<AttenuationSample>> =
        scans.iter().map(|s| s.attenuation.as_ref().copied().map_err(relay)).collect();
    let large = samples.and_then(|s| fit_large_scale(&s));
    let get = |name: &str| -> Result<f64> {
        match &large {
            Ok(f) => f.get(name).ok_or_else(|| Error::InsufficientData(format!("{name} missing"))),
            Err(e) => Err(relay(e)),
        }
    };
    rows.push(RoundtripRow::new("alpha", Some(ls.alpha), get("alpha"), Some(Tolerance::Absolute(tolerances.alpha_abs))));
    rows.push(RoundtripRow::new(
        "a_w0_db",
        Some(ls.a_w0_db),
        get("a_w0_db"),
        Some(Tolerance::Absolute(tolerances.a_w0_abs_db)),
    ));
    rows.push(RoundtripRow::new("sigma_a_large_db", Some(ls.sigma_a_db), get("sigma_a_db"), None));

    rows.push(RoundtripRow::new("sigma_nbar", Some(mp.sigma_nbar), val(&counts, |f| f.sigma_nbar), None));
    rows.push(RoundtripRow::new("sigma_c_ns", Some(mp.sigma_c_ns), val(&clusters, |f| f.sigma_gap_ns), None));
    rows.push(RoundtripRow::new("sigma_m_ns", Some(mp.sigma_m_ns), val(&rays, |f| f.sigma_gap_ns), None));

    let a0: Vec<f64> = scans.iter().map(|s| s.a0_db).filter(|v| v.is_finite()).collect();
    let a0_stats = mean_std(&a0);
    rows.push(RoundtripRow::new("mu_df_db", Some(mp.mu_df_db), val(&a0_stats, |s| s.0), None));
    rows.push(RoundtripRow::new("sigma_df_db", Some(mp.sigma_df_db), val(&a0_stats, |s| s.1), None));

    if nlos {
        for name in ["mu_dr_db", "sigma_dr_db", "mu_k_db", "sigma_k_db"] {
            rows.push(RoundtripRow::absent(name));
        }
    } else {
        let b0: Vec<f64> = scans.iter().filter_map(|s| s.b0_db).collect();
        let k: Vec<f64> = scans.iter().filter_map(|s| s.k_db).filter(|v| v.is_finite()).collect();
        let b0_stats = mean_std(&b0);
        let k_stats = mean_std(&k);
        rows.push(RoundtripRow::new("mu_dr_db", mp.mu_dr_db, val(&b0_stats, |s| s.0), None));
        rows.push(RoundtripRow::new("sigma_dr_db", mp.sigma_dr_db, val(&b0_stats, |s| s.1), None));
        rows.push(RoundtripRow::new("mu_k_db", mp.mu_k_db, val(&k_stats, |s| s.0), None));
        rows.push(RoundtripRow::new("sigma_k_db", mp.sigma_k_db, val(&k_stats, |s| s.1), None));
    }

    let fits: Vec<NakagamiFit> = scans.iter().filter_map(|s| s.nakagami).collect();
    let small = lognormal_m_statistics(&fits);
    let pick = |f: fn(&crate::fitting::SmallScaleStats) -> f64| val(&small, f);
    rows.push(RoundtripRow::new("mu_mf_db", Some(ss.mu_mf_db), pick(|s| s.mu_mf_db), None));
    rows.push(RoundtripRow::new("sigma_mf_db", Some(ss.sigma_mf_db), pick(|s| s.sigma_mf_db), None));
    rows.push(RoundtripRow::new("mu_sc_db", Some(ss.mu_sc_db), pick(|s| s.mu_sc_db), None));
    rows.push(RoundtripRow::new("sigma_sc_db", Some(ss.sigma_sc_db), pick(|s| s.sigma_sc_db), None));

    RoundtripReport {
        schema: ROUNDTRIP_SCHEMA.to_owned(),
        column: format!("{},{}", params.position, params.rain),
        path_kind: params.position.path_kind(),
        n_scans: scans.len(),
        seed,
        rows,
    }
}

//! File formats: scan ensembles as JSON lines, PDPs and attenuation as CSV.
//!
//! CSV files use `.` as the decimal separator, no thousands separators and
//! LF line endings. Lines starting with `#` are comments and are skipped on
//! input.

use serde::{Deserialize, Serialize};

use crate::analysis::{AttenuationSample, Pdp};
use crate::error::{Error, Result};
use crate::grid::{delay_of_bin, NUM_BINS};
use crate::params::Scenario;
use crate::synthesis::{Cir, Cluster, DirectPath, ScanWaveform, Tap};

pub const CIR_SCHEMA: &str = "wow-uwb-cir/1";
pub const PDP_SCHEMA: &str = "wow-uwb-pdp/1";
pub const ATTENUATION_SCHEMA: &str = "wow-uwb-attenuation/1";
pub const WAVEFORM_SCHEMA: &str = "wow-uwb-waveform/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClusterRecord {
    arrival_ns: f64,
    /// `[delay_ns, amplitude, phase_rad]` per ray.
    taps: Vec<[f64; 3]>,
}

/// One line of a scan ensemble file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CirRecord {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_sha256: Option<String>,
    index: u64,
    seed: u64,
    scenario: Scenario,
    truncated: bool,
    attenuation_db: f64,
    direct: Option<DirectPath>,
    clusters: Vec<ClusterRecord>,
}

/// Serialises one scan as a single JSON line (no trailing newline),
/// optionally tagged with the hash of the producing configuration.
pub fn cir_to_json_line(index: u64, cir: &Cir, config_sha256: Option<&str>) -> Result<String> {
    let record = CirRecord {
        schema: CIR_SCHEMA.to_owned(),
        config_sha256: config_sha256.map(str::to_owned),
        index,
        seed: cir.seed,
        scenario: cir.scenario,
        truncated: cir.truncated,
        attenuation_db: cir.attenuation_db,
        direct: cir.direct,
        clusters: cir
            .clusters
            .iter()
            .map(|c| ClusterRecord {
                arrival_ns: c.arrival_ns,
                taps: c.taps.iter().map(|t| [t.delay_ns, t.amplitude, t.phase_rad]).collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string(&record)?)
}

fn record_to_cir(record: CirRecord) -> Cir {
    Cir {
        scenario: record.scenario,
        seed: record.seed,
        clusters: record
            .clusters
            .into_iter()
            .enumerate()
            .map(|(i, c)| Cluster {
                arrival_ns: c.arrival_ns,
                taps: c
                    .taps
                    .into_iter()
                    .enumerate()
                    .map(|(l, [delay_ns, amplitude, phase_rad])| Tap {
                        delay_ns,
                        amplitude,
                        phase_rad,
                        cluster_index: i as u32 + 1,
                        ray_index: l as u32 + 1,
                    })
                    .collect(),
            })
            .collect(),
        direct: record.direct,
        truncated: record.truncated,
        attenuation_db: record.attenuation_db,
    }
}

/// Parses a scan ensemble. Blank lines are ignored; errors name the
/// 1-based line number.
pub fn read_cir_jsonl(text: &str) -> Result<Vec<(u64, Cir)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(CIR_SCHEMA) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "line {line_no}: schema version {other:?} is not supported (expected {CIR_SCHEMA:?})"
                )))
            }
            None => return Err(Error::Schema(format!("line {line_no}: missing schema field"))),
        }
        let record: CirRecord =
            serde_json::from_value(value).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        let index = record.index;
        let cir = record_to_cir(record);
        cir.check_invariants().map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        out.push((index, cir));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WaveformRecord {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_sha256: Option<String>,
    index: u64,
    scenario: Scenario,
    samples: Vec<f64>,
}

pub fn waveform_to_json_line(index: u64, waveform: &ScanWaveform, config_sha256: Option<&str>) -> Result<String> {
    Ok(serde_json::to_string(&WaveformRecord {
        schema: WAVEFORM_SCHEMA.to_owned(),
        config_sha256: config_sha256.map(str::to_owned),
        index,
        scenario: waveform.scenario,
        samples: waveform.samples.clone(),
    })?)
}

pub fn read_waveform_jsonl(text: &str) -> Result<Vec<(u64, ScanWaveform)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: WaveformRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        if record.schema != WAVEFORM_SCHEMA {
            return Err(Error::Schema(format!(
                "line {line_no}: schema version {:?} is not supported (expected {WAVEFORM_SCHEMA:?})",
                record.schema
            )));
        }
        let wave = ScanWaveform::new(record.samples, record.scenario)
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        out.push((record.index, wave));
    }
    Ok(out)
}

/// `bin_ns,power` rows for every bin.
pub fn pdp_to_csv(pdp: &Pdp) -> String {
    let mut out = String::with_capacity(24 * pdp.bins.len());
    out.push_str("bin_ns,power\n");
    for (bin, power) in pdp.bins.iter().enumerate() {
        out.push_str(&format!("{},{}\n", delay_of_bin(bin), power));
    }
    out
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_field(line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse { line, message: format!("{field:?}: {e}") })
}

/// Reads a PDP written by [`pdp_to_csv`] or exported from measurement
/// software in the same layout.
pub fn read_pdp_csv(text: &str, scenario: Scenario) -> Result<Pdp> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, header)) if header.trim() == "bin_ns,power" => {}
        Some((line, header)) => {
            return Err(Error::Parse { line, message: format!("expected header bin_ns,power, found {header:?}") })
        }
        None => return Err(Error::Parse { line: 1, message: "empty PDP file".into() }),
    }
    let mut bins = Vec::with_capacity(NUM_BINS);
    for (line, l) in lines {
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line, message: format!("expected 2 fields, found {}", fields.len()) });
        }
        parse_field(line, fields[0])?;
        bins.push(parse_field(line, fields[1])?);
    }
    Pdp::new(bins, scenario)
}

/// `wind_mph,attenuation_db` rows in the given order.
pub fn attenuation_to_csv(samples: &[AttenuationSample]) -> String {
    let mut out = String::from("wind_mph,attenuation_db\n");
    for s in samples {
        out.push_str(&format!("{},{}\n", s.wind_mph, s.attenuation_db));
    }
    out
}

/// Reads `(wind_mph, attenuation_db)` pairs.
pub fn read_attenuation_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h.trim() == "wind_mph,attenuation_db" => {}
        Some((line, h)) => {
            return Err(Error::Parse { line, message: format!("expected header wind_mph,attenuation_db, found {h:?}") })
        }
        None => return Ok(Vec::new()),
    }
    lines
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != 2 {
                return Err(Error::Parse { line, message: format!("expected 2 fields, found {}", fields.len()) });
            }
            Ok((parse_field(line, fields[0])?, parse_field(line, fields[1])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::compute_pdp;
    use crate::params::{builtin_column, Position, RainState};
    use crate::synthesis::{synthesize_cir, SynthesisOptions};

    fn sample_cir() -> Cir {
        let p = builtin_column(Position::P2, RainState::S2);
        let s = Scenario::hurricane(Position::P2, RainState::S2, 120.0).unwrap();
        synthesize_cir(&s, &p.multipath, &SynthesisOptions::full(p.large_scale), 77).unwrap()
    }

    #[test]
    fn cir_round_trip_is_exact() {
        let cir = sample_cir();
        let line = cir_to_json_line(4, &cir, Some("abc")).unwrap();
        assert!(!line.contains('\n'));
        let parsed = read_cir_jsonl(&format!("{line}\n\n{line}\n")).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].0, 4);
        assert_eq!(parsed[0].1, cir);
    }

    #[test]
    fn corrupt_line_is_named() {
        let line = cir_to_json_line(0, &sample_cir(), None).unwrap();
        let text = format!("{line}\n{line}\n{{\"schema\": \"wow-uwb-cir/1\", \n");
        let err = read_cir_jsonl(&text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3:"));
    }

    #[test]
    fn foreign_schema() {
        let line = cir_to_json_line(0, &sample_cir(), None).unwrap().replace(CIR_SCHEMA, "wow-uwb-cir/9");
        assert!(matches!(read_cir_jsonl(&line), Err(Error::Schema(_))));
    }

    #[test]
    fn pdp_csv_round_trip() {
        let cir = sample_cir();
        let pdp = compute_pdp(&cir);
        let text = format!("# {PDP_SCHEMA}\n{}", pdp_to_csv(&pdp));
        assert!(!text.contains('\r'));
        assert_eq!(read_pdp_csv(&text, cir.scenario).unwrap(), pdp);
    }

    #[test]
    fn pdp_csv_bad_number() {
        let err = read_pdp_csv("bin_ns,power\n0,1\n0.061,abc\n", Scenario::reference(Position::P1)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn waveform_round_trip() {
        let cir = sample_cir();
        let wave = crate::synthesis::render_waveform(&cir, &crate::synthesis::PulseTemplate::default());
        let line = waveform_to_json_line(2, &wave, None).unwrap();
        let back = read_waveform_jsonl(&line).unwrap();
        assert_eq!(back, vec![(2, wave)]);
    }

    #[test]
    fn attenuation_csv() {
        let s = Scenario::hurricane(Position::P1, RainState::S1, 90.0).unwrap();
        let rows = [AttenuationSample { wind_mph: 90.0, attenuation_db: 4.68, scenario: s }];
        let text = attenuation_to_csv(&rows);
        assert_eq!(text, "wind_mph,attenuation_db\n90,4.68\n");
        assert_eq!(read_attenuation_csv(&text).unwrap(), vec![(90.0, 4.68)]);
    }
}

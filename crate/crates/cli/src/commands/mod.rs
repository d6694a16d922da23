pub mod analyze;
pub mod fit;
pub mod roundtrip;
pub mod synth;

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use wow_uwb_core::io::read_cir_jsonl;
use wow_uwb_core::{Cir, ParameterSet, PathKind};

use crate::output::read_file;

pub const MANIFEST_SCHEMA: &str = "wow-uwb-manifest/1";
pub const ANALYSIS_SCHEMA: &str = "wow-uwb-analysis/1";
pub const FIT_SCHEMA: &str = "wow-uwb-fit/1";
pub const MPC_SCHEMA: &str = "wow-uwb-mpc/1";
pub const KFACTOR_SCHEMA: &str = "wow-uwb-kfactor/1";
pub const CLUSTERS_SCHEMA: &str = "wow-uwb-clusters/1";
pub const CLEAN_SCHEMA: &str = "wow-uwb-clean/1";

pub const SCANS_FILE: &str = "scans.jsonl";
pub const REFERENCE_FILE: &str = "reference.jsonl";
pub const WAVEFORMS_FILE: &str = "waveforms.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

/// What `synth` used to produce its files; hashed into `config_sha256`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthEcho {
    pub command: String,
    pub scenario: String,
    pub scans: usize,
    pub seed: u64,
    pub velocities: Vec<f64>,
    pub waveforms: bool,
    pub params_sha256: Option<String>,
    pub template_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub config: SynthEcho,
    pub config_sha256: String,
    pub seed: u64,
    pub scenario: String,
    pub path_kind: PathKind,
    pub velocities: Vec<f64>,
    pub schemas: Vec<String>,
    /// The parameter set the scans were drawn from.
    pub params: ParameterSet,
    pub files: Vec<String>,
}

/// A synth output directory, loaded and cross-checked.
pub struct Ensemble {
    pub manifest: Manifest,
    pub scans: Vec<Cir>,
    pub reference: Vec<Cir>,
}

impl Ensemble {
    pub fn load(dir: &Path) -> anyhow::Result<Ensemble> {
        let text = read_file(&dir.join(MANIFEST_FILE))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", MANIFEST_FILE))?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(MANIFEST_SCHEMA) => {}
            Some(other) => bail!("{MANIFEST_FILE}: schema version {other:?} is not supported (expected {MANIFEST_SCHEMA:?})"),
            None => bail!("{MANIFEST_FILE}: missing schema field"),
        }
        let manifest: Manifest = serde_json::from_value(value).with_context(|| format!("{MANIFEST_FILE}: malformed"))?;
        let scans = load_cirs(&dir.join(SCANS_FILE))?;
        let reference = load_cirs(&dir.join(REFERENCE_FILE))?;
        if scans.len() != reference.len() {
            bail!("{SCANS_FILE} has {} scans but {REFERENCE_FILE} has {}", scans.len(), reference.len());
        }
        if scans.len() != manifest.config.scans {
            bail!("manifest declares {} scans, {SCANS_FILE} has {}", manifest.config.scans, scans.len());
        }
        Ok(Ensemble { manifest, scans, reference })
    }
}

/// Reads a scan file and checks indices run 0, 1, 2, ...
fn load_cirs(path: &Path) -> anyhow::Result<Vec<Cir>> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("scans");
    let records = read_cir_jsonl(&read_file(path)?).map_err(|e| anyhow!("{name}: {e}"))?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, (index, cir))| {
            if index != i as u64 {
                bail!("{name}: record {} has index {index}, expected {i}", i + 1);
            }
            Ok(cir)
        })
        .collect()
}

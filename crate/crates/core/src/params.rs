//! Scenario descriptors and the per-scenario parameter tables.
//!
//! Three receiver positions (P1 and P2 line-of-sight, P3 behind an obstacle)
//! are measured without rain (S1) and with rain (S2). Each of the six
//! columns carries large-scale, small-scale and clustered-multipath
//! parameters. Cells that were not measured (rain noise without rain,
//! direct-path and K-factor statistics on the NLOS link) are `None`, never
//! zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PARAMS_SCHEMA: &str = "wow-uwb-params/1";

/// Hurricane wind velocities in mph, six discrete steps.
pub const HURRICANE_WINDS_MPH: [f64; 6] = [90.0, 100.0, 110.0, 120.0, 130.0, 140.0];

/// Wind velocity of the no-hurricane reference scans.
pub const REFERENCE_WIND_MPH: f64 = 1.86;

/// Transmitter to receiver distance, identical for all positions.
pub const LINK_DISTANCE_M: f64 = 12.0;

/// Rain intensity of the S2 scenarios.
pub const RAIN_INTENSITY_MMH: f64 = 223.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    P1,
    P2,
    P3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RainState {
    /// No rain.
    S1,
    /// Wind-driven rain.
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PathKind {
    Los,
    Nlos,
}

impl Position {
    pub const ALL: [Position; 3] = [Position::P1, Position::P2, Position::P3];

    pub fn path_kind(self) -> PathKind {
        match self {
            Position::P3 => PathKind::Nlos,
            _ => PathKind::Los,
        }
    }
}

impl RainState {
    pub const ALL: [RainState; 2] = [RainState::S1, RainState::S2];
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for RainState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathKind::Los => f.write_str("LOS"),
            PathKind::Nlos => f.write_str("NLOS"),
        }
    }
}

/// One measurement condition: where the receiver is, whether it rains and
/// how hard the wind blows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub position: Position,
    pub rain: RainState,
    pub wind_mph: f64,
}

impl Scenario {
    /// A hurricane scenario; the wind must be one of [`HURRICANE_WINDS_MPH`].
    pub fn hurricane(position: Position, rain: RainState, wind_mph: f64) -> Result<Self> {
        if !HURRICANE_WINDS_MPH.contains(&wind_mph) {
            return Err(Error::InvalidScenario(format!(
                "wind velocity {wind_mph} mph is not one of the hurricane steps 90..140"
            )));
        }
        Ok(Scenario { position, rain, wind_mph })
    }

    /// The no-hurricane reference at `position`: no rain, 1.86 mph.
    pub fn reference(position: Position) -> Self {
        Scenario { position, rain: RainState::S1, wind_mph: REFERENCE_WIND_MPH }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_reference() {
            if self.rain != RainState::S1 {
                return Err(Error::InvalidScenario("reference scans have no rain".into()));
            }
            return Ok(());
        }
        Scenario::hurricane(self.position, self.rain, self.wind_mph).map(|_| ())
    }

    pub fn is_reference(&self) -> bool {
        self.wind_mph == REFERENCE_WIND_MPH
    }

    pub fn path_kind(&self) -> PathKind {
        self.position.path_kind()
    }

    pub fn distance_m(&self) -> f64 {
        LINK_DISTANCE_M
    }

    pub fn rain_intensity_mmh(&self) -> f64 {
        match self.rain {
            RainState::S1 => 0.0,
            RainState::S2 => RAIN_INTENSITY_MMH,
        }
    }

    pub fn key(&self) -> (Position, RainState) {
        (self.position, self.rain)
    }
}

/// Parses `"P1,S1"`, `"P1S1"` or `"P1,S1,90"` (case-insensitive). Without a
/// velocity the first hurricane step is used.
impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let (column, rest) = match parse_column(parts[0]) {
            Ok(column) => (column, &parts[1..]),
            Err(_) if parts.len() >= 2 => (parse_column(&format!("{}{}", parts[0], parts[1]))?, &parts[2..]),
            Err(e) => return Err(e),
        };
        let wind = match rest {
            [] => HURRICANE_WINDS_MPH[0],
            [w] => w
                .parse::<f64>()
                .map_err(|_| Error::InvalidScenario(format!("bad wind velocity in {s:?}")))?,
            _ => return Err(Error::InvalidScenario(format!("cannot parse scenario {s:?}"))),
        };
        Scenario::hurricane(column.0, column.1, wind)
    }
}

/// Parses a table column name such as `"P2,S2"` or `"p2s2"`.
pub fn parse_column(s: &str) -> Result<(Position, RainState)> {
    let compact: String = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',' && *c != '_' && *c != '-')
        .collect::<String>()
        .to_ascii_uppercase();
    let bad = || Error::InvalidScenario(format!("unknown scenario {s:?}; expected P1..P3 with S1/S2"));
    if compact.len() != 4 {
        return Err(bad());
    }
    let position = match &compact[..2] {
        "P1" => Position::P1,
        "P2" => Position::P2,
        "P3" => Position::P3,
        _ => return Err(bad()),
    };
    let rain = match &compact[2..] {
        "S1" => RainState::S1,
        "S2" => RainState::S2,
        _ => return Err(bad()),
    };
    Ok((position, rain))
}

/// Clustered multipath parameters of one scenario column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipathParams {
    /// Mean cluster count.
    pub n_bar: f64,
    /// Cluster arrival rate (1/ns).
    pub gamma_rate: f64,
    /// Ray arrival rate within a cluster (1/ns).
    pub zeta_rate: f64,
    /// Inter-cluster power decay constant (ns).
    pub lambda_cap: f64,
    /// Intra-cluster power decay constant (ns).
    pub lambda_ray: f64,
    /// Lognormal spread of tap amplitudes (dB).
    pub sigma_a_db: f64,
    pub sigma_nbar: f64,
    pub sigma_c_ns: f64,
    pub sigma_m_ns: f64,
    pub sigma_p_db: f64,
    pub sigma_mp_db: f64,
    /// Wind-driven-rain noise; only measured with rain.
    pub sigma_r_db: Option<f64>,
    pub sigma_a0_db: f64,
    pub sigma_df_db: f64,
    pub mu_df_db: f64,
    /// Direct-path power statistics; only on line-of-sight links.
    pub sigma_dr_db: Option<f64>,
    pub mu_dr_db: Option<f64>,
    pub sigma_k_db: Option<f64>,
    pub mu_k_db: Option<f64>,
}

impl MultipathParams {
    /// True when any direct-component (LOS) statistic is present.
    pub fn has_direct_stats(&self) -> bool {
        self.mu_dr_db.is_some() || self.sigma_dr_db.is_some()
    }
}

/// Linear regression of attenuation on wind velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleParams {
    /// Slope (dB per mph).
    pub alpha: f64,
    /// Intercept (dB).
    pub a_w0_db: f64,
    /// Shadowing spread (dB).
    pub sigma_a_db: f64,
}

impl LargeScaleParams {
    /// Mean attenuation at `wind_mph`, noise excluded.
    pub fn mean_attenuation_db(&self, wind_mph: f64) -> f64 {
        self.a_w0_db + self.alpha * wind_mph
    }
}

/// Nakagami small-scale statistics of one column, verbatim from the table.
///
/// `mu_*` is `10 log10` of the across-scan mean and `sigma_*` is `10 log10`
/// of the across-scan variance, which is why negative spreads are legal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleParams {
    pub mu_mf_db: f64,
    pub sigma_mf_db: f64,
    pub mu_sc_db: f64,
    pub sigma_sc_db: f64,
}

/// Everything known about one (position, rain) column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub position: Position,
    pub rain: RainState,
    pub multipath: MultipathParams,
    pub large_scale: LargeScaleParams,
    pub small_scale: SmallScaleParams,
}

/// Hurricane inflation of mean arrival times relative to a no-hurricane
/// base case, and the matching mean cluster count relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurricaneScaling {
    pub c_c: f64,
    pub c_m: f64,
    pub gamma_bar_b_ns: f64,
    pub tau_bar_b_ns: f64,
    pub n_bar_b: f64,
    pub c_j: f64,
    pub c_p: f64,
    pub c_r: f64,
}

impl Default for HurricaneScaling {
    fn default() -> Self {
        let base = BaseCase::default();
        HurricaneScaling {
            c_c: 0.2,
            c_m: 0.1,
            gamma_bar_b_ns: base.gamma_bar_b_ns,
            tau_bar_b_ns: base.tau_bar_b_ns,
            n_bar_b: base.n_bar_b,
            c_j: 1.0,
            c_p: 1.0,
            c_r: 1.0,
        }
    }
}

impl HurricaneScaling {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must lie in [0, 1)")))
            }
        };
        unit("c_c", self.c_c)?;
        unit("c_m", self.c_m)?;
        // c_c = c_m = 0 is the base case itself.
        let base_case = self.c_c == 0.0 && self.c_m == 0.0;
        if !base_case && self.c_m >= self.c_c {
            return Err(Error::InvalidParameter(format!(
                "c_c must exceed c_m (c_c = {}, c_m = {})",
                self.c_c, self.c_m
            )));
        }
        if !(self.c_p > 0.0) || !(self.c_r > 0.0) || !(self.c_j >= 0.0) {
            return Err(Error::InvalidParameter(
                "scaling constants require c_p > 0, c_r > 0, c_j >= 0".into(),
            ));
        }
        if !(self.gamma_bar_b_ns > 0.0) || !(self.tau_bar_b_ns > 0.0) || !(self.n_bar_b >= 1.0) {
            return Err(Error::InvalidParameter(
                "base case needs positive mean arrival times and a mean cluster count >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Mean cluster count `(1 + c_j c_p / c_r) N_b`.
    pub fn mean_cluster_count(&self) -> f64 {
        (1.0 + self.c_j * self.c_p / self.c_r) * self.n_bar_b
    }
}

/// Base-case anchors that are not published and therefore configurable.
/// Defaults anchor on the least perturbed measured column (P1, S1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCase {
    pub gamma_bar_b_ns: f64,
    pub tau_bar_b_ns: f64,
    pub n_bar_b: f64,
    /// Diffuse power of the base case, linear units.
    pub a_b: f64,
}

impl Default for BaseCase {
    fn default() -> Self {
        let p1s1 = builtin_column(Position::P1, RainState::S1).multipath;
        BaseCase {
            gamma_bar_b_ns: 1.0 / p1s1.gamma_rate,
            tau_bar_b_ns: 1.0 / p1s1.zeta_rate,
            n_bar_b: p1s1.n_bar,
            a_b: 1.0,
        }
    }
}

/// Diffuse power regression constants: `A0 = A_b + c_r0 b_r0 + c_p0 b_p0
/// + c_w0 v_w0 + X_A0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusePowerModel {
    pub a_b: f64,
    pub c_r0: f64,
    pub c_p0: f64,
    pub c_w0: f64,
    /// Spread of `X_A0`, `10 log10` of its linear standard deviation.
    pub sigma_a0_db: f64,
}

/// One design row `[b_r0, b_p0, v_w0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffuseDesignRow {
    /// 1 with rain, 0 without.
    pub b_r0: u8,
    /// 1 in the low pressure-head region, 0 otherwise.
    pub b_p0: u8,
    pub v_w0: f64,
}

impl DiffuseDesignRow {
    pub fn new(b_r0: u8, b_p0: u8, v_w0: f64) -> Result<Self> {
        if b_r0 > 1 || b_p0 > 1 {
            return Err(Error::InvalidParameter("b_r0 and b_p0 are binary".into()));
        }
        if !HURRICANE_WINDS_MPH.contains(&v_w0) {
            return Err(Error::InvalidParameter(format!("v_w0 = {v_w0} is not a hurricane step")));
        }
        Ok(DiffuseDesignRow { b_r0, b_p0, v_w0 })
    }

    /// All 24 combinations of rain, pressure head and wind step.
    pub fn full_design() -> Vec<DiffuseDesignRow> {
        let mut rows = Vec::with_capacity(24);
        for b_r0 in 0..=1 {
            for b_p0 in 0..=1 {
                for v in HURRICANE_WINDS_MPH {
                    rows.push(DiffuseDesignRow { b_r0, b_p0, v_w0: v });
                }
            }
        }
        rows
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.b_r0 as f64, self.b_p0 as f64, self.v_w0]
    }
}

impl DiffusePowerModel {
    pub fn validate(&self) -> Result<()> {
        if self.c_r0 < 0.0 || self.c_p0 < 0.0 || self.c_w0 < 0.0 {
            return Err(Error::InvalidParameter("diffuse power constants must be >= 0".into()));
        }
        Ok(())
    }

    pub fn mean_a0(&self, row: &DiffuseDesignRow) -> f64 {
        let [r, p, v] = row.as_array();
        self.a_b + self.c_r0 * r + self.c_p0 * p + self.c_w0 * v
    }
}

/// A violated invariant, named by field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.rule.contains(needle) || v.field == needle)
    }

    fn check(&mut self, ok: bool, field: &'static str, rule: &str) {
        if !ok {
            self.violations.push(Violation { field, rule: rule.to_string() });
        }
    }
}

/// Checks the invariants of a multipath column and lists every violation.
pub fn validate(params: &MultipathParams) -> ValidationReport {
    let p = params;
    let mut report = ValidationReport::default();
    report.check(p.lambda_cap > p.lambda_ray, "lambda_cap", "lambda_cap > lambda_ray");
    report.check(p.n_bar >= 1.0, "n_bar", "n_bar >= 1");
    report.check(p.gamma_rate > 0.0, "gamma_rate", "gamma_rate > 0");
    report.check(p.zeta_rate > 0.0, "zeta_rate", "zeta_rate > 0");
    report.check(p.lambda_ray > 0.0, "lambda_ray", "lambda_ray > 0");
    report.check(p.gamma_rate < p.zeta_rate, "gamma_rate", "gamma_rate < zeta_rate");
    let spreads: [(&'static str, Option<f64>); 11] = [
        ("sigma_a_db", Some(p.sigma_a_db)),
        ("sigma_nbar", Some(p.sigma_nbar)),
        ("sigma_c_ns", Some(p.sigma_c_ns)),
        ("sigma_m_ns", Some(p.sigma_m_ns)),
        ("sigma_p_db", Some(p.sigma_p_db)),
        ("sigma_mp_db", Some(p.sigma_mp_db)),
        ("sigma_r_db", p.sigma_r_db),
        ("sigma_a0_db", Some(p.sigma_a0_db)),
        ("sigma_df_db", Some(p.sigma_df_db)),
        ("sigma_dr_db", p.sigma_dr_db),
        ("sigma_k_db", p.sigma_k_db),
    ];
    for (field, value) in spreads {
        if let Some(v) = value {
            report.check(v >= 0.0 && v.is_finite(), field, &format!("{field} >= 0"));
        }
    }
    report
}

#[rustfmt::skip]
const TABLE_ORDER: [(Position, RainState); 6] = [
    (Position::P1, RainState::S1), (Position::P1, RainState::S2),
    (Position::P2, RainState::S1), (Position::P2, RainState::S2),
    (Position::P3, RainState::S1), (Position::P3, RainState::S2),
];

// Rows of the three tables, columns in TABLE_ORDER.
#[rustfmt::skip]
mod table {
    pub const ALPHA: [f64; 6] = [0.182, 0.122, 0.15, 0.06, -0.01, -0.005];
    pub const A_W0: [f64; 6] = [-11.7, -1.9, -5.5, 9.73, 23.0, 25.0];
    pub const SIGMA_A_LARGE: [f64; 6] = [12.39, 10.09, 13.0, 11.53, 18.32, 16.75];

    pub const MU_MF: [f64; 6] = [-2.69, -2.96, -2.47, -3.25, -2.55, -2.92];
    pub const SIGMA_MF: [f64; 6] = [-25.2, -25.7, -27.2, -31.5, -20.5, -19.9];
    pub const MU_SC: [f64; 6] = [0.92, 2.28, 1.29, -3.07, -9.21, -10.6];
    pub const SIGMA_SC: [f64; 6] = [1.21, 6.26, -1.75, -3.85, -16.5, -27.0];

    pub const N_BAR: [f64; 6] = [5.2, 4.0, 3.33, 3.1, 1.67, 1.67];
    pub const GAMMA: [f64; 6] = [0.11, 0.06, 0.043, 0.027, 0.017, 0.017];
    pub const ZETA: [f64; 6] = [16.32, 12.6, 9.32, 5.61, 2.33, 0.3];
    pub const LAMBDA_CAP: [f64; 6] = [2.3, 2.45, 2.38, 2.47, 1.72, 1.86];
    pub const LAMBDA_RAY: [f64; 6] = [0.8, 0.91, 0.82, 0.85, 0.54, 0.61];
    pub const SIGMA_A: [f64; 6] = [23.14, 21.22, 21.56, 18.51, 15.12, 13.2];
    pub const SIGMA_NBAR: [f64; 6] = [1.59, 0.98, 0.836, 0.837, 0.53, 0.516];
    pub const SIGMA_C: [f64; 6] = [16.4, 34.5, 43.93, 49.47, 51.63, 52.14];
    pub const SIGMA_M: [f64; 6] = [0.287, 0.268, 0.277, 0.265, 0.28, 0.253];
    pub const SIGMA_P: [f64; 6] = [21.3, 20.1, 20.03, 19.72, 17.41, 14.1];
    pub const SIGMA_MP: [f64; 6] = [55.14, 38.44, 33.22, 26.77, 20.17, 15.22];
    pub const SIGMA_R: [Option<f64>; 6] = [None, Some(5.77), None, Some(6.39), None, Some(7.31)];
    pub const SIGMA_A0: [f64; 6] = [28.97, 10.45, 8.44, 0.219, 6.46, 0.959];
    pub const SIGMA_DF: [f64; 6] = [18.83, 17.79, 17.6, 15.3, 12.78, 11.45];
    pub const MU_DF: [f64; 6] = [16.19, 15.17, 15.28, 13.54, 11.78, 10.9];
    pub const SIGMA_DR: [Option<f64>; 6] = [Some(11.53), Some(10.97), Some(10.64), Some(9.6), None, None];
    pub const MU_DR: [Option<f64>; 6] = [Some(33.3), Some(31.0), Some(30.7), Some(27.86), None, None];
    pub const SIGMA_K: [Option<f64>; 6] = [Some(14.64), Some(14.5), Some(11.2), Some(6.44), None, None];
    pub const MU_K: [Option<f64>; 6] = [Some(17.69), Some(14.43), Some(16.0), Some(13.79), None, None];
}

fn column_index(position: Position, rain: RainState) -> usize {
    TABLE_ORDER
        .iter()
        .position(|&k| k == (position, rain))
        .expect("every column is tabulated")
}

/// The published column for `(position, rain)`.
pub fn builtin_column(position: Position, rain: RainState) -> ScenarioParams {
    let i = column_index(position, rain);
    ScenarioParams {
        position,
        rain,
        multipath: MultipathParams {
            n_bar: table::N_BAR[i],
            gamma_rate: table::GAMMA[i],
            zeta_rate: table::ZETA[i],
            lambda_cap: table::LAMBDA_CAP[i],
            lambda_ray: table::LAMBDA_RAY[i],
            sigma_a_db: table::SIGMA_A[i],
            sigma_nbar: table::SIGMA_NBAR[i],
            sigma_c_ns: table::SIGMA_C[i],
            sigma_m_ns: table::SIGMA_M[i],
            sigma_p_db: table::SIGMA_P[i],
            sigma_mp_db: table::SIGMA_MP[i],
            sigma_r_db: table::SIGMA_R[i],
            sigma_a0_db: table::SIGMA_A0[i],
            sigma_df_db: table::SIGMA_DF[i],
            mu_df_db: table::MU_DF[i],
            sigma_dr_db: table::SIGMA_DR[i],
            mu_dr_db: table::MU_DR[i],
            sigma_k_db: table::SIGMA_K[i],
            mu_k_db: table::MU_K[i],
        },
        large_scale: LargeScaleParams {
            alpha: table::ALPHA[i],
            a_w0_db: table::A_W0[i],
            sigma_a_db: table::SIGMA_A_LARGE[i],
        },
        small_scale: SmallScaleParams {
            mu_mf_db: table::MU_MF[i],
            sigma_mf_db: table::SIGMA_MF[i],
            mu_sc_db: table::MU_SC[i],
            sigma_sc_db: table::SIGMA_SC[i],
        },
    }
}

/// All six published columns keyed by `(position, rain)`.
pub fn builtin_tables() -> BTreeMap<(Position, RainState), ScenarioParams> {
    TABLE_ORDER
        .iter()
        .map(|&(p, r)| ((p, r), builtin_column(p, r)))
        .collect()
}

/// A serializable bundle of parameter columns plus configurable anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub schema: String,
    pub base_case: BaseCase,
    pub scaling: HurricaneScaling,
    pub columns: Vec<ScenarioParams>,
}

impl Default for ParameterSet {
    fn default() -> Self {
        ParameterSet::builtin()
    }
}

impl ParameterSet {
    pub fn builtin() -> Self {
        ParameterSet {
            schema: PARAMS_SCHEMA.to_string(),
            base_case: BaseCase::default(),
            scaling: HurricaneScaling::default(),
            columns: builtin_tables().into_values().collect(),
        }
    }

    pub fn column(&self, position: Position, rain: RainState) -> Result<&ScenarioParams> {
        self.columns
            .iter()
            .find(|c| c.position == position && c.rain == rain)
            .ok_or_else(|| Error::InvalidScenario(format!("no parameters for ({position}, {rain})")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(PARAMS_SCHEMA) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "parameter file has schema {other:?}, expected {PARAMS_SCHEMA:?}"
                )))
            }
            None => return Err(Error::Schema("parameter file lacks a schema field".into())),
        }
        let set: ParameterSet = serde_json::from_value(value)?;
        for column in &set.columns {
            let report = validate(&column.multipath);
            if !report.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "({}, {}): {:?}",
                    column.position, column.rain, report.violations
                )));
            }
        }
        set.scaling.validate()?;
        Ok(set)
    }
}

//! Run configuration: schema-checked JSON ingestion, default materialization
//! and canonical serialization for provenance hashing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::ClassifyPolicy;
use crate::experiments::{SolverSettings, WegnerMode};
use crate::model::{ModelParams, PowerWall};
use crate::{Error, Result};

fn default_c1() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    1.3
}
fn default_m() -> f64 {
    2.0
}
fn default_left() -> PowerWall {
    PowerWall { coeff: 1.0, exponent: 2.0 }
}
fn default_right() -> PowerWall {
    PowerWall { coeff: 1.3, exponent: 2.0 }
}

/// Model block. `W` and `layer` default to their minimal admissible values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    pub epsilon: f64,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_m")]
    pub m1: f64,
    #[serde(default = "default_m")]
    pub m2: f64,
    #[serde(default = "default_left")]
    pub left: PowerWall,
    #[serde(default = "default_right")]
    pub right: PowerWall,
    #[serde(rename = "W", default)]
    pub w: Option<f64>,
    #[serde(default)]
    pub layer: Option<f64>,
    #[serde(default)]
    pub seed_base: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub resolution: usize,
    pub tol: f64,
    pub dimension_cap: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSection { resolution: s.resolution, tol: s.tol, dimension_cap: s.dimension_cap }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySection {
    pub j_edge: Option<f64>,
    pub j_bulk: Option<f64>,
    pub radius: Option<f64>,
    pub cluster_tol: f64,
    pub pairwise_slack: f64,
}

impl Default for ClassifySection {
    fn default() -> Self {
        let p = ClassifyPolicy::default();
        ClassifySection {
            j_edge: p.j_edge,
            j_bulk: p.j_bulk,
            radius: p.radius,
            cluster_tol: p.cluster_tol,
            pairwise_slack: crate::classify::PAIRWISE_SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub samples: usize,
    pub seed: u64,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { samples: 10_000, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecouplingSection {
    /// Boundary-layer width `D`; defaults to `L/4`.
    pub d: Option<f64>,
    pub floor: f64,
    pub points_per_gap: usize,
    pub probes: usize,
}

impl Default for DecouplingSection {
    fn default() -> Self {
        DecouplingSection { d: None, floor: 1e-4, points_per_gap: 8, probes: crate::decouple::PROBES }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WegnerSection {
    /// Defaults to the window midpoint.
    pub energy: Option<f64>,
    pub deltas: Vec<f64>,
    pub mode: WegnerMode,
}

impl Default for WegnerSection {
    fn default() -> Self {
        WegnerSection {
            energy: None,
            deltas: vec![0.0, 0.0025, 0.005, 0.01, 0.02, 0.04, 0.08, 0.16],
            mode: WegnerMode::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Theorem1Section {
    pub lengths: Vec<f64>,
    pub p: f64,
    pub theta: Option<f64>,
}

impl Default for Theorem1Section {
    fn default() -> Self {
        Theorem1Section { lengths: vec![8.0, 12.0, 16.0], p: 7.0, theta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HallSection {
    /// Defaults: `μ_ℓ, μ_r` one sixth inside the window ends, `E_F` at its middle.
    pub mu_l: Option<f64>,
    pub mu_r: Option<f64>,
    pub e_f: Option<f64>,
    pub scan_points: usize,
}

impl Default for HallSection {
    fn default() -> Self {
        HallSection { mu_l: None, mu_r: None, e_f: None, scan_points: 21 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub lengths: Vec<f64>,
    pub h1_threshold: f64,
    pub h2_threshold: f64,
    /// Bulk states within this distance of the discrete Landau level are
    /// left out of the H2 sample.
    pub level_offset: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection { lengths: vec![8.0, 12.0, 16.0], h1_threshold: 0.01, h2_threshold: 1e-3, level_offset: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub count: u64,
    /// Run the disorder-free system instead of sampled realizations.
    pub clean: bool,
}

impl Default for SeedSection {
    fn default() -> Self {
        SeedSection { count: 50, clean: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub decoupling: DecouplingSection,
    #[serde(default)]
    pub wegner: WegnerSection,
    #[serde(default)]
    pub theorem1: Theorem1Section,
    #[serde(default)]
    pub hall: HallSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default = "default_out")]
    pub out: String,
}

fn default_out() -> String {
    "run".into()
}

/// Keys accepted at the top level; `flatten` disables serde's own check.
const TOP_KEYS: &[&str] = &[
    "B", "L", "V0", "epsilon", "c1", "c2", "m1", "m2", "left", "right", "W", "layer", "seed_base", "solver",
    "classify", "kernel", "decoupling", "wegner", "theorem1", "hall", "diagnostics", "seeds", "out",
];

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        let m = &self.model;
        let mut p = ModelParams::new(m.b, m.l, m.v0, m.epsilon);
        p.c1 = m.c1;
        p.c2 = m.c2;
        p.m1 = m.m1;
        p.m2 = m.m2;
        p.left = m.left;
        p.right = m.right;
        p.w = m.w.unwrap_or_else(|| p.minimal_margin());
        p.layer = m.layer.unwrap_or(m.l.ln());
        p.seed_base = m.seed_base;
        p
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings { resolution: self.solver.resolution, tol: self.solver.tol, dimension_cap: self.solver.dimension_cap }
    }

    pub fn policy(&self) -> ClassifyPolicy {
        ClassifyPolicy {
            j_edge: self.classify.j_edge,
            j_bulk: self.classify.j_bulk,
            radius: self.classify.radius,
            cluster_tol: self.classify.cluster_tol,
        }
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds.count).collect()
    }

    /// Fills every derived default and re-validates.
    fn materialize(mut self) -> Result<Self> {
        let m = &mut self.model;
        if m.w.is_none() {
            m.w = Some(((0.5 * m.b + m.v0 + 10.0 * m.b) / m.c1).powf(1.0 / m.m1));
        }
        if m.layer.is_none() {
            m.layer = Some(m.l.ln());
        }
        let params = self.params();
        params.validate()?;
        let (a, b) = params.window();
        let sixth = (b - a) / 6.0;
        self.hall.mu_l.get_or_insert(a + sixth);
        self.hall.mu_r.get_or_insert(b - sixth);
        self.hall.e_f.get_or_insert(0.5 * (a + b));
        self.wegner.energy.get_or_insert(0.5 * (a + b));
        self.decoupling.d.get_or_insert(0.25 * params.l);
        if self.solver.resolution == 0 || !(self.solver.tol > 0.0) {
            return Err(Error::Config("solver: resolution ≥ 1 and tol > 0 required".into()));
        }
        if self.theorem1.p < 7.0 {
            return Err(Error::Config(format!("theorem1.p ≥ 7 violated (p = {})", self.theorem1.p)));
        }
        Ok(self)
    }

    /// Canonical JSON: fixed key order, all defaults present.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON with `out` blanked, so that the
    /// same computation written to two directories hashes identically.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out.clear();
        let d = Sha256::digest(c.canonical_json().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses and validates a JSON document, materializing all defaults.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let value: serde_json::Value =
        serde_json::from_str(document).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| Error::Config("top level must be an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("{k}: unknown field")));
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(value)
        .map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))?;
    cfg.materialize()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"B": 1, "L": 8, "V0": 0.2, "epsilon": 0.05}"#;

    #[test]
    fn minimal_document_materializes_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.model.layer, Some(8f64.ln()));
        assert!(c.model.w.unwrap() > 0.0);
        assert_eq!(c.solver.resolution, 8);
        assert_eq!(c.theorem1.p, 7.0);
        assert_eq!(c.hall.e_f, Some(0.625));
        let v: serde_json::Value = serde_json::from_str(&c.canonical_json()).unwrap();
        assert!(v["hall"]["mu_l"].is_f64() && v["W"].is_f64() && v["decoupling"]["d"].is_f64());
    }

    #[test]
    fn physical_constraint_is_named() {
        let e = parse_config(r#"{"B": 1, "L": 8, "V0": 0.3, "epsilon": 0.05}"#).unwrap_err();
        assert!(e.to_string().contains("B > 4·V0"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let e = parse_config(r#"{"B": 1, "L": 8, "V0": 0.2, "epsilon": 0.05, "bogus": 1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = parse_config(r#"{"B": 1, "L": 8, "V0": 0.2, "epsilon": 0.05, "hall": {"mu": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("hall"), "{e}");
        let e = parse_config(r#"{"B": 1, "L": 8, "V0": 0.2, "epsilon": 0.05, "solver": {"tol": "x"}}"#).unwrap_err();
        assert!(e.to_string().contains("solver.tol"), "{e}");
    }

    #[test]
    fn round_trip_is_stable() {
        let c = parse_config(MINIMAL).unwrap();
        let c2 = parse_config(&c.canonical_json()).unwrap();
        assert_eq!(c, c2);
        assert_eq!(c.canonical_json(), c2.canonical_json());
        assert_eq!(c.hash(), c2.hash());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let mut c = parse_config(MINIMAL).unwrap();
        let h = c.hash();
        c.out = "elsewhere".into();
        assert_eq!(c.hash(), h);
        c.solver.tol = 1e-10;
        assert_ne!(c.hash(), h);
    }

    #[test]
    fn params_match_constructor() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.params(), ModelParams::new(1.0, 8.0, 0.2, 0.05));
    }
}

//! `section.key = value` configuration files.
//!
//! A file is applied on top of a type's defaults. Keys are dotted paths into
//! the type's serialised form; any path the defaults do not contain is
//! rejected, as is any value the type cannot hold. `#` starts a comment.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::perception::{BagCalibration, NoisySegmenter, OracleSegmenter, Segmenter, ThresholdSegmenter, UvRanges};
use crate::policy::{PolicyConfig, PolicyContext, PolicyThresholds};
use crate::primitives::{PrimitiveDefaults, Workspace};
use crate::simulator::{sim_calibration, SimConfig};

fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    if let Some(s) = raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        return Value::String(s.to_owned());
    }
    match raw {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Value::from(i);
    }
    if let Some(n) = raw.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        return Value::Number(n);
    }
    Value::String(raw.to_owned())
}

fn slot<'a>(root: &'a mut Value, path: &[&str]) -> Option<&'a mut Value> {
    path.iter().try_fold(root, |v, k| v.as_object_mut()?.get_mut(*k))
}

/// Parses `text` over `defaults`.
pub fn parse_over<T: Serialize + DeserializeOwned>(defaults: &T, text: &str) -> Result<T> {
    let mut root = serde_json::to_value(defaults).map_err(|e| Error::config(0, e.to_string()))?;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, raw) = body
            .split_once('=')
            .ok_or_else(|| Error::config(n, format!("expected `key = value`, found `{body}`")))?;
        let key = key.trim();
        let path: Vec<&str> = key.split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(Error::config(n, format!("malformed key `{key}`")));
        }
        let target = slot(&mut root, &path).ok_or_else(|| Error::config(n, format!("unknown key `{key}`")))?;
        if target.is_object() {
            return Err(Error::config(n, format!("`{key}` is a section, not a key")));
        }
        *target = parse_value(raw);
        // Type-check now so the error points at this line.
        serde_json::from_value::<T>(root.clone())
            .map_err(|e| Error::config(n, format!("`{key}`: {e}")))?;
    }
    serde_json::from_value(root).map_err(|e| Error::config(0, e.to_string()))
}

pub fn load_over<T: Serialize + DeserializeOwned>(defaults: &T, path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_over(defaults, &text)
}

/// Every leaf key with its default, in file syntax.
pub fn key_table<T: Serialize>(defaults: &T) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, v, out);
                }
            }
            Value::Null => out.push((prefix.to_owned(), "(unset)".to_owned())),
            Value::String(s) => out.push((prefix.to_owned(), s.clone())),
            other => out.push((prefix.to_owned(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", &serde_json::to_value(defaults).unwrap_or(Value::Object(Map::new())), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmenterKind {
    Oracle,
    Noisy,
    Threshold,
}

/// Which mask provider trials observe through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmenterConfig {
    pub kind: SegmenterKind,
    pub p_drop: f64,
    pub p_flip: f64,
    pub erosion_radius: u32,
    pub dilation_radius: u32,
    pub min_component: usize,
    pub ranges: UvRanges,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            kind: SegmenterKind::Oracle,
            p_drop: 0.05,
            p_flip: 0.02,
            erosion_radius: 0,
            dilation_radius: 1,
            min_component: 4,
            ranges: UvRanges::default(),
        }
    }
}

impl SegmenterConfig {
    /// Segmenter for one trial; noise streams derive from `seed`.
    pub fn build(&self, seed: u64) -> Box<dyn Segmenter> {
        match self.kind {
            SegmenterKind::Oracle => Box::new(OracleSegmenter),
            SegmenterKind::Noisy => Box::new(NoisySegmenter {
                p_drop: self.p_drop,
                p_flip: self.p_flip,
                erosion_radius: self.erosion_radius,
                seed,
            }),
            SegmenterKind::Threshold => Box::new(ThresholdSegmenter {
                ranges: self.ranges,
                dilation_radius: self.dilation_radius,
                min_component: self.min_component,
            }),
        }
    }
}

/// Calibration overrides; unset values follow the simulated bag.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub max_hull_area: Option<f64>,
    pub max_bag_area: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    pub n_objects: usize,
    pub trials_per_cell: usize,
    pub seed_base: u64,
    /// Worker threads for `run-trials`; 0 uses every core.
    pub threads: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig { n_objects: 2, trials_per_cell: 6, seed_base: 0, threads: 0 }
    }
}

/// Complete experiment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trial: TrialConfig,
    pub policy: PolicyConfig,
    pub thresholds: PolicyThresholds,
    pub primitives: PrimitiveDefaults,
    pub workspace: Workspace,
    pub calibration: CalibrationConfig,
    pub segmenter: SegmenterConfig,
    pub sim: SimConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c = parse_over(&RunConfig::default(), text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    /// Defaults with every simulator draw at its mode.
    pub fn deterministic() -> Self {
        RunConfig { sim: SimConfig::deterministic(), ..RunConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.workspace.validate()?;
        self.thresholds.validate()?;
        self.sim.validate()?;
        self.segmenter.ranges.validate()?;
        self.calibration().validate()?;
        if self.trial.n_objects == 0 {
            return Err(Error::config(0, "trial.n_objects must be at least 1"));
        }
        for (k, p) in [("segmenter.p_drop", self.segmenter.p_drop), ("segmenter.p_flip", self.segmenter.p_flip)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(0, format!("{k} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn calibration(&self) -> BagCalibration {
        let sim = sim_calibration(&self.workspace);
        BagCalibration {
            max_hull_area: self.calibration.max_hull_area.unwrap_or(sim.max_hull_area),
            max_bag_area: self.calibration.max_bag_area.unwrap_or(sim.max_bag_area),
        }
    }

    pub fn policy_context(&self) -> PolicyContext {
        PolicyContext {
            thresholds: self.thresholds,
            config: self.policy,
            primitives: self.primitives,
            ws: self.workspace,
        }
    }
}

/// Markdown table of every configuration key and its default.
pub fn config_docs() -> String {
    let mut s = String::from(
        "# Configuration keys\n\n\
         Files hold `section.key = value` lines; `#` starts a comment. Unset keys keep\n\
         the defaults below.\n\n| key | default |\n|---|---|\n",
    );
    for (k, v) in key_table(&RunConfig::default()) {
        s.push_str(&format!("| `{k}` | `{v}` |\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply() {
        let c = RunConfig::parse(
            "# comment\n\
             sim.p_slip = 0.25\n\
             policy.variant = ab-a   # trailing\n\
             policy.budget = 9\n\
             primitives.dilate_exec.d = 8.5\n\
             sim.deterministic = true\n\
             calibration.max_hull_area = 4000\n",
        )
        .unwrap();
        assert_eq!(c.sim.p_slip, 0.25);
        assert_eq!(c.policy.variant, crate::policy::Variant::AbA);
        assert_eq!(c.policy.budget, 9);
        assert_eq!(c.primitives.dilate_exec.d, 8.5);
        assert!(c.sim.deterministic);
        assert_eq!(c.calibration().max_hull_area, 4000.0);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let e = RunConfig::parse("sim.p_slip = 0.1\n\nsim.p_slipp = 0.2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }), "{e}");
        let e = RunConfig::parse("sim = 3\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
    }

    #[test]
    fn bad_value_reports_its_line() {
        let e = RunConfig::parse("policy.budget = 15\npolicy.budget = many\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");
        let e = RunConfig::parse("no equals sign\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
    }

    #[test]
    fn semantic_checks_run_after_parsing() {
        assert!(RunConfig::parse("sim.p_slip = 1.5\n").is_err());
        assert!(RunConfig::parse("thresholds.a1 = 0.6\n").is_err());
    }

    #[test]
    fn shipped_docs_are_current() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/config.md");
        let on_disk = std::fs::read_to_string(path).unwrap_or_default();
        assert_eq!(on_disk, config_docs(), "regenerate docs/config.md from config_docs()");
    }

    #[test]
    fn key_table_round_trips() {
        let text: String = key_table(&RunConfig::default())
            .into_iter()
            .filter(|(_, v)| v != "(unset)")
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(RunConfig::parse(&text).unwrap(), RunConfig::default());
    }
}

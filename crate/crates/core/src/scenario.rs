//! Scenario files: flat `key = value` lines with `#` comments.
//!
//! ```text
//! # baseline engagement, level 2
//! mu = 0.85
//! v_E = 1.0
//! R = 1.7
//! q = 2.55
//! t_L = 0.7
//! N = 6.0
//! knowledge_level = "L2"
//! ```
//!
//! Every key except `knowledge_level` falls back to the engine default.
//! All quantities are in dimensionless scenario units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::ScenarioParams;
use crate::engine::{Guidance, RunLevel, SimConfig};
use crate::error::NavError;
use crate::geometry::Side;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] NavError),
}

fn d_mu() -> f64 {
    ScenarioParams::default().mu
}
fn d_v_e() -> f64 {
    ScenarioParams::default().v_evader
}
fn d_range() -> f64 {
    ScenarioParams::default().range
}
fn d_q() -> f64 {
    ScenarioParams::default().target_q
}
fn d_t_l() -> f64 {
    ScenarioParams::default().launch_period
}
fn d_n() -> f64 {
    ScenarioParams::default().pn_gain
}
fn d_dt() -> f64 {
    SimConfig::DEFAULT_DT
}
fn d_capture() -> f64 {
    SimConfig::DEFAULT_CAPTURE_EPS
}
fn d_arrive() -> f64 {
    SimConfig::DEFAULT_ARRIVE_EPS
}
fn d_guidance() -> Guidance {
    Guidance::ProNav
}
fn d_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "d_mu")]
    pub mu: f64,
    #[serde(rename = "v_E", default = "d_v_e")]
    pub v_e: f64,
    #[serde(rename = "R", default = "d_range")]
    pub range: f64,
    #[serde(default = "d_q")]
    pub q: f64,
    #[serde(rename = "t_L", default = "d_t_l")]
    pub t_l: f64,
    #[serde(rename = "N", default = "d_n")]
    pub n: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_capture")]
    pub capture_eps: f64,
    #[serde(default = "d_arrive")]
    pub arrive_eps: f64,
    pub knowledge_level: RunLevel,
    #[serde(default = "d_guidance")]
    pub guidance: Guidance,
    #[serde(default)]
    pub side: Side,
    #[serde(default)]
    pub first_launch_at_entry: bool,
    /// Always true: nothing in a run is random.
    #[serde(default = "d_true")]
    pub seedless: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
}

impl ScenarioFile {
    /// The Baseline engagement at `level`, every other key defaulted.
    pub fn baseline(level: RunLevel) -> Self {
        ScenarioFile {
            mu: d_mu(),
            v_e: d_v_e(),
            range: d_range(),
            q: d_q(),
            t_l: d_t_l(),
            n: d_n(),
            dt: d_dt(),
            capture_eps: d_capture(),
            arrive_eps: d_arrive(),
            knowledge_level: level,
            guidance: d_guidance(),
            side: Side::Ccw,
            first_launch_at_entry: false,
            seedless: true,
            time_limit: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => ScenarioError::Parse {
                line: text[..span.start.min(text.len())].matches('\n').count() + 1,
                message: e.message().trim().to_string(),
            },
            None => ScenarioError::Syntax(e.message().trim().to_string()),
        })?;
        if !file.seedless {
            return Err(
                NavError::InvalidConfig("seedless = false is unsupported: runs are deterministic".into()).into(),
            );
        }
        file.to_config()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Serializes with every key written out, defaults included.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat scenario always serializes")
    }

    pub fn to_config(&self) -> Result<SimConfig, NavError> {
        let scenario = ScenarioParams {
            mu: self.mu,
            v_evader: self.v_e,
            range: self.range,
            target_q: self.q,
            launch_period: self.t_l,
            pn_gain: self.n,
            side: self.side,
        };
        scenario.validate()?;
        let mut cfg = SimConfig::new(scenario, self.knowledge_level);
        cfg.guidance = self.guidance;
        cfg.dt = self.dt;
        cfg.capture_eps = self.capture_eps;
        cfg.arrive_eps = self.arrive_eps;
        cfg.first_launch_at_entry = self.first_launch_at_entry;
        if let Some(t) = self.time_limit {
            cfg.time_limit = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value, as a sweep would.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ScenarioError> {
        let mut table: toml::Table = toml::from_str(&self.to_text()).expect("own output parses");
        if !table.contains_key(key) && key != "time_limit" {
            return Err(ScenarioError::Syntax(format!("unknown key `{key}`")));
        }
        let parsed: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {value}")) {
            Ok(mut t) => t.remove("v").expect("key present"),
            Err(_) => toml::Value::String(value.to_string()),
        };
        table.insert(key.to_string(), parsed);
        *self = Self::parse(&toml::to_string(&table).expect("flat table serializes"))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const L2: &str =
        "# baseline\nmu = 0.85\nv_E = 1.0\nR = 1.7\nq = 2.55\nt_L = 0.7\nN = 6.0\nknowledge_level = \"L2\"\n";

    #[test]
    fn parses_and_defaults() {
        let f = ScenarioFile::parse(L2).unwrap();
        assert_eq!(f, ScenarioFile::baseline(RunLevel::L2));
        let cfg = f.to_config().unwrap();
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.level, RunLevel::L2);
    }

    #[test]
    fn round_trip() {
        let mut f = ScenarioFile::baseline(RunLevel::IdealNoLaunch);
        f.side = Side::Cw;
        f.time_limit = Some(20.0);
        f.guidance = Guidance::CollisionCourse;
        assert_eq!(ScenarioFile::parse(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = ScenarioFile::parse("mu = 0.85\nknowledge_level = \"L1\"\nbogus = 3\n").unwrap_err();
        match err {
            ScenarioError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_reports_line() {
        let err = ScenarioFile::parse("knowledge_level = \"L2\"\nmu = \"fast\"\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn missing_level_rejected() {
        assert!(ScenarioFile::parse("mu = 0.85\n").is_err());
    }

    #[test]
    fn target_inside_region() {
        let err = ScenarioFile::parse("q = 1.0\nknowledge_level = \"L1\"\n").unwrap_err();
        assert!(err.to_string().contains("target inside reachability region"), "{err}");
    }

    #[test]
    fn set_key() {
        let mut f = ScenarioFile::baseline(RunLevel::L2);
        f.set("t_L", "0.9").unwrap();
        assert_eq!(f.t_l, 0.9);
        f.set("knowledge_level", "L3").unwrap();
        assert_eq!(f.knowledge_level, RunLevel::L3);
        f.set("first_launch_at_entry", "true").unwrap();
        assert!(f.first_launch_at_entry);
        assert!(f.set("nope", "1").is_err());
        assert!(f.set("mu", "2.0").is_err());
    }
}

//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers or scenario text and returns a JSON
//! string. The `*_json` functions hold the logic so they can be tested
//! off the browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use cutrun_core::cutting::{self, CuttingParams};
use cutrun_core::engine::{self, EventKind, RunLevel, SimConfig};
use cutrun_core::scenario::ScenarioFile;

/// Upper bound on points sent to the page per polyline.
const MAX_POINTS: usize = 1500;

#[derive(Serialize)]
struct Run {
    level: &'static str,
    outcome: String,
    path_length: f64,
    l1_length: f64,
    improvement_pct: f64,
    range: f64,
    target: [f64; 2],
    evader: Vec<[f64; 2]>,
    pursuers: Vec<Vec<[f64; 2]>>,
    launches: Vec<f64>,
    captured_by: Option<usize>,
}

fn thin<T: Copy>(items: &[T]) -> Vec<T> {
    let stride = items.len().div_ceil(MAX_POINTS).max(1);
    let mut out: Vec<T> = items.iter().step_by(stride).copied().collect();
    if let Some(&last) = items.last() {
        if !(items.len() - 1).is_multiple_of(stride) {
            out.push(last);
        }
    }
    out
}

pub fn simulate_json(scenario: &str) -> Result<String, String> {
    let file = ScenarioFile::parse(scenario).map_err(|e| e.to_string())?;
    let cfg = file.to_config().map_err(|e| e.to_string())?;
    let res = engine::run(&cfg).map_err(|e| e.to_string())?;
    let l1 = engine::run(&SimConfig {
        level: RunLevel::L1,
        ..cfg
    })
    .map_err(|e| e.to_string())?;
    let xy = |p: cutrun_core::geometry::Point2| [p.x, p.y];
    let run = Run {
        level: cfg.level.label(),
        outcome: format!("{:?}", res.outcome),
        path_length: res.path_length,
        l1_length: l1.path_length,
        improvement_pct: 100.0 * (l1.path_length - res.path_length) / l1.path_length,
        range: cfg.scenario.range,
        target: xy(cfg.scenario.target()),
        evader: thin(&res.trajectory.iter().map(|s| xy(s.position)).collect::<Vec<_>>()),
        pursuers: res
            .pursuer_tracks
            .iter()
            .map(|t| thin(&t.samples.iter().map(|s| xy(s.position)).collect::<Vec<_>>()))
            .collect(),
        launches: res.launch_times(),
        captured_by: res.events.iter().find_map(|e| match e.kind {
            EventKind::Capture { id } => Some(id),
            _ => None,
        }),
    };
    serde_json::to_string(&run).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Curves {
    radial: Vec<f64>,
    unlaunched: Vec<f64>,
    launched: Vec<f64>,
}

/// Maximum cutting angle against an unlaunched pursuer and against one
/// that has flown `traveled`, for evader distances in (0, 2R].
pub fn cutting_curves_json(mu: f64, range: f64, traveled: f64, samples: usize) -> Result<String, String> {
    let samples = samples.clamp(2, 2000);
    let mut curves = Curves {
        radial: Vec::new(),
        unlaunched: Vec::new(),
        launched: Vec::new(),
    };
    for i in 1..=samples {
        let r = 2.0 * range * i as f64 / samples as f64;
        let fixed = cutting::phi_max_static(mu, range, r).map_err(|e| e.to_string())?;
        let moving = cutting::phi_max_l2(&CuttingParams::new(mu, range, r, traveled)).map_err(|e| e.to_string())?;
        curves.radial.push(r);
        curves.unlaunched.push(fixed.phi_max);
        curves.launched.push(moving.phi_max);
    }
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Profile {
    gamma: Vec<f64>,
    phi: Vec<f64>,
    gamma_star: f64,
    phi_min: f64,
}

/// Cutting angle as a function of the unseen pursuer's bearing, with the
/// worst-case bearing marked.
pub fn phi_profile_json(mu: f64, range: f64, radial: f64, traveled: f64, samples: usize) -> Result<String, String> {
    let samples = samples.clamp(2, 4000);
    let p = CuttingParams::new(mu, range, radial, traveled);
    let worst = cutting::phi_max_l2(&p).map_err(|e| e.to_string())?;
    let mut profile = Profile {
        gamma: Vec::with_capacity(samples + 1),
        phi: Vec::with_capacity(samples + 1),
        gamma_star: worst.gamma_star.unwrap_or(f64::NAN),
        phi_min: worst.phi_max,
    };
    for i in 0..=samples {
        let g = std::f64::consts::PI * i as f64 / samples as f64;
        profile.gamma.push(g);
        profile
            .phi
            .push(cutting::phi_of_gamma(&p, g).map_err(|e| e.to_string())?.phi_max);
    }
    serde_json::to_string(&profile).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn simulate(scenario: &str) -> Result<String, JsValue> {
    simulate_json(scenario).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cutting_curves(mu: f64, range: f64, traveled: f64, samples: usize) -> Result<String, JsValue> {
    cutting_curves_json(mu, range, traveled, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn phi_profile(mu: f64, range: f64, radial: f64, traveled: f64, samples: usize) -> Result<String, JsValue> {
    phi_profile_json(mu, range, radial, traveled, samples).map_err(|e| JsValue::from_str(&e))
}

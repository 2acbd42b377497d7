//! Independent checks on the closed-form results and on simulated runs.
//!
//! Nothing here feeds back into the evader's decisions: the γ grid, the
//! closed-form disk detour and the trajectory replays are computed by
//! separate routes from the ones [`crate::cutting`] and
//! [`crate::engine`] use.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::agents::{self, PursuerState};
use crate::cutting::{self, CuttingParams};
use crate::engine::{is_capture, steer_pursuer, EventKind, GuidanceLaw, RunLevel, SimConfig, SimResult};
use crate::error::{NavError, Result};
use crate::geometry::{self, Point2};

/// Minimum of the γ-parameterized cutting angle over a uniform grid on
/// [0, π]. Returns `(phi_min, gamma_at_min)`.
pub fn brute_min_phi(params: &CuttingParams, grid_size: usize) -> Result<(f64, f64)> {
    if grid_size < 100 {
        return Err(NavError::Contract("γ grid needs at least 100 points"));
    }
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=grid_size {
        let gamma = PI * i as f64 / grid_size as f64;
        let phi = cutting::phi_of_gamma(params, gamma)?.phi_max;
        if phi < best.0 {
            best = (phi, gamma);
        }
    }
    Ok(best)
}

/// Length of the shortest path from `(−R, 0)` to `(q, 0)` that stays out of
/// the open disk of radius `R` at the origin.
pub fn l1_length_closed_form(range: f64, q: f64) -> Result<f64> {
    if q < range {
        return Err(NavError::Infeasible("target inside reachability region"));
    }
    Ok(range * (PI - (range / q).acos()) + (q * q - range * range).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum AuditGrid {
    #[default]
    Coarse,
    Fine,
}

impl AuditGrid {
    fn launch_points(self) -> usize {
        match self {
            AuditGrid::Coarse => 24,
            AuditGrid::Fine => 120,
        }
    }

    pub fn laws(self) -> Vec<GuidanceLaw> {
        let mut laws: Vec<GuidanceLaw> = [3.0, 4.0, 5.0, 6.0].map(|gain| GuidanceLaw::ProNav { gain }).to_vec();
        laws.push(GuidanceLaw::CollisionCourse);
        laws.push(GuidanceLaw::PurePursuit);
        laws
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub launch_time: f64,
    pub law: GuidanceLaw,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} launched at t={:.4}", self.law, self.launch_time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub scenario: String,
    pub strategies_tested: usize,
    pub captures: usize,
    pub min_separation: f64,
    pub worst_strategy: Option<Strategy>,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.captures == 0
    }

    fn empty(scenario: String) -> Self {
        AuditReport {
            scenario,
            strategies_tested: 0,
            captures: 0,
            min_separation: f64::INFINITY,
            worst_strategy: None,
            violations: Vec::new(),
        }
    }

    fn absorb(&mut self, strategy: Strategy, replay: Replay) {
        self.strategies_tested += 1;
        if replay.min_separation < self.min_separation {
            self.min_separation = replay.min_separation;
            self.worst_strategy = Some(strategy);
        }
        if let Some(t) = replay.capture_time {
            self.captures += 1;
            self.violations.push(format!("{strategy}: capture at t={t:.4}"));
        }
    }
}

impl std::fmt::Display for AuditReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        writeln!(f, "strategies tested: {}", self.strategies_tested)?;
        writeln!(f, "captures: {}", self.captures)?;
        writeln!(f, "min separation: {:.6}", self.min_separation)?;
        match &self.worst_strategy {
            Some(s) => writeln!(f, "worst strategy: {s}")?,
            None => writeln!(f, "worst strategy: -")?,
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

struct Replay {
    min_separation: f64,
    capture_time: Option<f64>,
}

/// Flies one pursuer from the region center against a recorded evader
/// trajectory. The evader does not react.
fn replay(result: &SimResult, strategy: Strategy) -> Result<Replay> {
    let sp = &result.config.scenario;
    let v_p = sp.v_pursuer();
    let eps = result.config.capture_eps;
    let traj = &result.trajectory;
    let mut out = Replay {
        min_separation: f64::INFINITY,
        capture_time: None,
    };

    let Some(first) = traj.iter().position(|s| s.t >= strategy.launch_time - 1e-12) else {
        return Ok(out);
    };
    let launch_t = traj[first].t;
    let mut p = PursuerState::launched(0, sp.rr().center, launch_t);
    for w in traj[first..].windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        steer_pursuer(&mut p, strategy.law, a.position, a.heading, sp.mu, dt)?;
        let s_next = p.traveled_at(b.t, v_p, sp.range);
        let next = p.position + Point2::unit(p.heading) * (s_next - p.traveled);
        if agents::is_spent(s_next, sp.range) {
            break;
        }
        let sep = geometry::min_moving_distance(a.position, b.position, p.position, next);
        out.min_separation = out.min_separation.min(sep);
        if is_capture(sep, eps, a.position, a.heading, &p, sp) {
            out.capture_time = Some(b.t);
            break;
        }
        p.position = next;
        p.traveled = s_next;
    }
    Ok(out)
}

/// Launch instants the audit tries against a recorded run.
///
/// Levels 2 and 3 are only safe against pursuers whose launches the evader
/// saw, so those keep the recorded launch times and vary guidance. Level 1
/// and the naive policy are audited over a launch-time grid as well.
pub fn audit_launch_times(result: &SimResult, grid: AuditGrid) -> Vec<f64> {
    let mut times = result.launch_times();
    if matches!(result.config.level, RunLevel::L1 | RunLevel::Naive) {
        let n = grid.launch_points();
        let end = result.end_time();
        times.extend((0..n).map(|i| end * i as f64 / n as f64));
        times.sort_by(f64::total_cmp);
        times.dedup();
    }
    times
}

/// Re-runs the whole engagement with every pursuer flying `law`. A level-3
/// evader reacts to where pursuers actually are, so replaying its recorded
/// path against a different pursuer would test a path it never chose.
fn closed_loop(result: &SimResult, law: GuidanceLaw) -> Result<Replay> {
    let mut cfg = result.config.with_law(law);
    cfg.time_limit = cfg.time_limit.max(result.end_time());
    let rerun = crate::engine::run(&cfg)?;
    let capture_time = rerun.events.iter().find_map(|e| match e.kind {
        EventKind::Capture { .. } => Some(e.t),
        _ => None,
    });
    Ok(Replay {
        min_separation: rerun.min_separation,
        capture_time,
    })
}

/// Tries every gridded pursuer behavior against a run. Levels 1 and 2 and the
/// naive policy are replayed open loop against the recorded path; level 3 is
/// re-simulated closed loop.
pub fn safety_audit(result: &SimResult, scenario: &str, grid: AuditGrid) -> Result<AuditReport> {
    let mut report = AuditReport::empty(scenario.to_string());
    if result.config.level == RunLevel::L3 {
        for law in grid.laws() {
            let launch_time = result.launch_times().first().copied().unwrap_or(f64::NAN);
            report.absorb(Strategy { launch_time, law }, closed_loop(result, law)?);
        }
        return Ok(report);
    }
    for launch_time in audit_launch_times(result, grid) {
        for law in grid.laws() {
            let strategy = Strategy { launch_time, law };
            report.absorb(strategy, replay(result, strategy)?);
        }
    }
    Ok(report)
}

/// Largest |ψ̇| over samples with `t0 < t < t1`, by central differences of
/// the recorded heading. Fails if an event falls inside the window.
pub fn heading_rate_check(result: &SimResult, t0: f64, t1: f64) -> Result<f64> {
    if result
        .events
        .iter()
        .any(|e| e.t > t0 && e.t < t1 && !matches!(e.kind, EventKind::Arrival))
    {
        return Err(NavError::Contract("heading-rate window contains an event"));
    }
    let inside: Vec<_> = result.trajectory.iter().filter(|s| s.t > t0 && s.t < t1).collect();
    Ok(inside
        .windows(3)
        .map(|w| w[2].heading.diff(w[0].heading).abs() / (w[2].t - w[0].t))
        .fold(0.0, f64::max))
}

/// Event-free windows of a run, each trimmed by `trim` at both ends.
pub fn event_windows(result: &SimResult, trim: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = std::iter::once(0.0)
        .chain(result.events.iter().map(|e| e.t))
        .chain(std::iter::once(result.end_time()))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| w[1] - w[0] > 2.0 * trim)
        .map(|w| (w[0] + trim, w[1] - trim))
        .collect()
}

/// Re-runs `config` at a different step size.
pub fn rerun_with_dt(config: &SimConfig, dt: f64) -> Result<SimResult> {
    crate::engine::run(&config.with_dt(dt))
}

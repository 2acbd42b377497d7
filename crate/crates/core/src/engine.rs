//! Deterministic fixed-step closed-loop simulation of one evader crossing
//! the reachability region shared by a stream of pursuers.

use serde::{Deserialize, Serialize};

use crate::agents::{
    self, ConstraintSource, EvaderState, HeadingChoice, HeadingMode, KnowledgeLevel, LaunchScheduler, PursuerState,
    PursuerStatus, ScenarioParams,
};
use crate::error::{NavError, Result};
use crate::geometry::{self, Angle, Point2};

/// What the evader knows, plus two reference policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RunLevel {
    L1,
    L2,
    L3,
    /// Level-2 policy with no pursuer ever launching.
    IdealNoLaunch,
    /// Ignores every pursuer and flies straight at the target. Unsafe; used
    /// to check that the safety audit detects captures.
    Naive,
}

impl RunLevel {
    pub fn label(self) -> &'static str {
        match self {
            RunLevel::L1 => "L1",
            RunLevel::L2 => "L2",
            RunLevel::L3 => "L3",
            RunLevel::IdealNoLaunch => "Ideal",
            RunLevel::Naive => "Naive",
        }
    }

    pub fn knowledge(self) -> Option<KnowledgeLevel> {
        match self {
            RunLevel::L1 => Some(KnowledgeLevel::L1),
            RunLevel::L2 | RunLevel::IdealNoLaunch => Some(KnowledgeLevel::L2),
            RunLevel::L3 => Some(KnowledgeLevel::L3),
            RunLevel::Naive => None,
        }
    }

    pub fn launches(self) -> bool {
        self != RunLevel::IdealNoLaunch
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Guidance {
    /// Proportional navigation with the scenario gain.
    ProNav,
    /// Re-solve the intercept triangle every step.
    CollisionCourse,
    PurePursuit,
    /// Fly the launch heading unchanged.
    None,
}

/// A fully specified guidance law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuidanceLaw {
    ProNav { gain: f64 },
    CollisionCourse,
    PurePursuit,
    Straight,
}

impl std::fmt::Display for GuidanceLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GuidanceLaw::ProNav { gain } => write!(f, "ProNav(N={gain})"),
            GuidanceLaw::CollisionCourse => f.write_str("CollisionCourse"),
            GuidanceLaw::PurePursuit => f.write_str("PurePursuit"),
            GuidanceLaw::Straight => f.write_str("Straight"),
        }
    }
}

/// Updates a pursuer's heading for the coming step.
pub fn steer_pursuer(
    p: &mut PursuerState,
    law: GuidanceLaw,
    evader: Point2,
    evader_heading: Angle,
    mu: f64,
    dt: f64,
) -> Result<()> {
    if p.position == evader {
        return Ok(());
    }
    match law {
        GuidanceLaw::ProNav { gain } => {
            let los = geometry::los_angle(p.position, evader)?;
            let prev = p.prev_los.unwrap_or(los);
            p.heading = agents::pro_nav_step(p, evader, prev, dt, gain)?;
            p.prev_los = Some(los);
        }
        GuidanceLaw::CollisionCourse => {
            p.heading = agents::collision_course_heading(p.position, evader, evader_heading, mu)?;
        }
        GuidanceLaw::PurePursuit => p.heading = agents::pure_pursuit_heading(p.position, evader)?,
        GuidanceLaw::Straight => {}
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub scenario: ScenarioParams,
    pub level: RunLevel,
    pub guidance: Guidance,
    pub dt: f64,
    pub capture_eps: f64,
    pub arrive_eps: f64,
    pub time_limit: f64,
    /// Launch the first pursuer the instant the evader enters, rather than
    /// one period later.
    pub first_launch_at_entry: bool,
}

impl SimConfig {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_CAPTURE_EPS: f64 = 1e-3;
    pub const DEFAULT_ARRIVE_EPS: f64 = 1e-3;

    pub fn new(scenario: ScenarioParams, level: RunLevel) -> Self {
        SimConfig {
            scenario,
            level,
            guidance: Guidance::ProNav,
            dt: Self::DEFAULT_DT,
            capture_eps: Self::DEFAULT_CAPTURE_EPS,
            arrive_eps: Self::DEFAULT_ARRIVE_EPS,
            time_limit: Self::default_time_limit(&scenario),
            first_launch_at_entry: false,
        }
    }

    pub fn default_time_limit(scenario: &ScenarioParams) -> f64 {
        10.0 * (scenario.target_q + 2.0 * scenario.range) / scenario.v_evader
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn guidance_law(&self) -> GuidanceLaw {
        match self.guidance {
            Guidance::ProNav => GuidanceLaw::ProNav {
                gain: self.scenario.pn_gain,
            },
            Guidance::CollisionCourse => GuidanceLaw::CollisionCourse,
            Guidance::PurePursuit => GuidanceLaw::PurePursuit,
            Guidance::None => GuidanceLaw::Straight,
        }
    }

    /// The same run with every pursuer flying `law`.
    pub fn with_law(&self, law: GuidanceLaw) -> Self {
        let mut cfg = *self;
        cfg.guidance = match law {
            GuidanceLaw::ProNav { gain } => {
                cfg.scenario.pn_gain = gain;
                Guidance::ProNav
            }
            GuidanceLaw::CollisionCourse => Guidance::CollisionCourse,
            GuidanceLaw::PurePursuit => Guidance::PurePursuit,
            GuidanceLaw::Straight => Guidance::None,
        };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        for (name, v) in [
            ("dt", self.dt),
            ("capture_eps", self.capture_eps),
            ("arrive_eps", self.arrive_eps),
            ("time_limit", self.time_limit),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NavError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub position: Point2,
    /// Heading flown from this sample to the next.
    pub heading: Angle,
    pub mode: HeadingMode,
    pub binding: Option<ConstraintSource>,
    pub n_active: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuerSample {
    pub t: f64,
    pub position: Point2,
    pub heading: Angle,
    pub traveled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuerTrack {
    pub id: usize,
    pub launch_time: f64,
    pub expiry_time: Option<f64>,
    pub samples: Vec<PursuerSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Launch {
        id: usize,
    },
    Expiry {
        id: usize,
    },
    /// Evader moved strictly inside the reachability region.
    BoundaryEntry,
    BoundaryExit,
    Arrival,
    Capture {
        id: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Arrived,
    Captured,
    TimedOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub trajectory: Vec<Sample>,
    pub pursuer_tracks: Vec<PursuerTrack>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub path_length: f64,
    /// Closest approach of any live pursuer, over all steps.
    pub min_separation: f64,
    pub entry_time: Option<f64>,
}

impl SimResult {
    pub fn end_time(&self) -> f64 {
        self.trajectory.last().map_or(0.0, |s| s.t)
    }

    pub fn launch_times(&self) -> Vec<f64> {
        self.pursuer_tracks.iter().map(|t| t.launch_time).collect()
    }
}

/// Sum of inter-sample distances.
pub fn path_length(trajectory: &[Sample]) -> f64 {
    trajectory
        .windows(2)
        .map(|w| w[0].position.distance(w[1].position))
        .sum()
}

fn evader_choice(config: &SimConfig, position: Point2, pursuers: &[PursuerState], now: f64) -> Result<HeadingChoice> {
    let sp = &config.scenario;
    let rr = sp.rr();
    let target = sp.target();
    let knowledge = match config.level.knowledge() {
        Some(k) => k,
        None => {
            return Ok(HeadingChoice {
                heading: geometry::los_angle(position, target)?,
                mode: HeadingMode::StraightToTarget,
                binding: None,
            })
        }
    };
    let evader = EvaderState {
        position,
        heading: Angle::ZERO,
        knowledge,
    };
    let constraints = match knowledge {
        KnowledgeLevel::L1 => return agents::l1_policy(position, target, &rr, sp.side),
        KnowledgeLevel::L2 => agents::constraints_l2(&evader, pursuers, rr.center, sp, now)?,
        KnowledgeLevel::L3 => agents::constraints_l3(&evader, pursuers, rr.center, sp, now)?,
    };
    agents::select_heading(&constraints, position, target, sp.side)
}

fn diverged(t: f64, detail: impl Into<String>) -> NavError {
    NavError::NumericalDivergence {
        t,
        detail: detail.into(),
    }
}

/// Runs one engagement from `(−R, 0)` to `(q, 0)` with the pursuers'
/// common initial location at the origin.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let sp = config.scenario;
    let rr = sp.rr();
    let target = sp.target();
    let v_p = sp.v_pursuer();
    let dt = config.dt;
    let law = config.guidance_law();

    let mut pos = sp.evader_start();
    let mut pursuers: Vec<PursuerState> = Vec::new();
    let mut tracks: Vec<PursuerTrack> = Vec::new();
    let mut events = Vec::new();
    let mut trajectory = Vec::new();
    let mut scheduler = config
        .level
        .launches()
        .then(|| LaunchScheduler::new(sp.launch_period, config.first_launch_at_entry));
    let mut entry_time: Option<f64> = None;
    let mut inside = rr.contains_open(pos);
    let mut min_separation = f64::INFINITY;

    let finish = |trajectory: Vec<Sample>, tracks, events, outcome, min_separation, entry_time| {
        let path_length = path_length(&trajectory);
        SimResult {
            config: *config,
            trajectory,
            pursuer_tracks: tracks,
            events,
            outcome,
            path_length,
            min_separation,
            entry_time,
        }
    };

    if pos.distance(target) <= config.arrive_eps {
        trajectory.push(Sample {
            t: 0.0,
            position: pos,
            heading: Angle::ZERO,
            mode: HeadingMode::StraightToTarget,
            binding: None,
            n_active: 0,
        });
        events.push(Event {
            t: 0.0,
            kind: EventKind::Arrival,
        });
        return Ok(finish(
            trajectory,
            tracks,
            events,
            Outcome::Arrived,
            min_separation,
            entry_time,
        ));
    }

    let mut step: u64 = 0;
    loop {
        let now = step as f64 * dt;
        let mut choice = evader_choice(config, pos, &pursuers, now)?;

        if now > config.time_limit {
            trajectory.push(sample(now, pos, &choice, &pursuers));
            return Ok(finish(
                trajectory,
                tracks,
                events,
                Outcome::TimedOut,
                min_separation,
                entry_time,
            ));
        }

        // entry: the evader is inside, or this step takes it inside
        if entry_time.is_none()
            && (rr.contains_open(pos) || rr.contains_open(pos + Point2::unit(choice.heading) * (sp.v_evader * dt)))
        {
            entry_time = Some(now);
        }

        if let (Some(sched), Some(entry)) = (scheduler.as_mut(), entry_time) {
            let evader_inside = rr.contains_open(pos) || now == entry;
            if sched.poll(now, entry, evader_inside).is_some() {
                let id = pursuers.len();
                let p = PursuerState::launched(id, rr.center, now);
                tracks.push(PursuerTrack {
                    id,
                    launch_time: now,
                    expiry_time: None,
                    samples: vec![PursuerSample {
                        t: now,
                        position: p.position,
                        heading: p.heading,
                        traveled: 0.0,
                    }],
                });
                pursuers.push(p);
                events.push(Event {
                    t: now,
                    kind: EventKind::Launch { id },
                });
                choice = evader_choice(config, pos, &pursuers, now)?;
            }
        }

        trajectory.push(sample(now, pos, &choice, &pursuers));

        let to_target = pos.distance(target);
        let full = sp.v_evader * dt;
        let (t_next, next_pos) = if choice.mode == HeadingMode::StraightToTarget && to_target <= full {
            (now + to_target / sp.v_evader, target)
        } else {
            (now + dt, pos + Point2::unit(choice.heading) * full)
        };
        if !next_pos.is_finite() {
            return Err(diverged(
                now,
                format!("evader position {next_pos:?} heading {}", choice.heading),
            ));
        }

        let mut captured_by = None;
        for (p, track) in pursuers.iter_mut().zip(tracks.iter_mut()) {
            if p.status != PursuerStatus::Active {
                continue;
            }
            steer_pursuer(p, law, pos, choice.heading, sp.mu, dt)?;
            let s_next = p.traveled_at(t_next, v_p, sp.range);
            let next_p = p.position + Point2::unit(p.heading) * (s_next - p.traveled);
            if !next_p.is_finite() {
                return Err(diverged(now, format!("pursuer {} position {next_p:?}", p.id)));
            }
            let spent = agents::is_spent(s_next, sp.range);
            // expiry is resolved before capture: max-range interceptions are neglected
            if !spent {
                let sep = geometry::min_moving_distance(pos, next_pos, p.position, next_p);
                min_separation = min_separation.min(sep);
                let contact = is_capture(sep, config.capture_eps, pos, choice.heading, p, &sp);
                if contact && captured_by.is_none() {
                    captured_by = Some(p.id);
                }
            }
            p.position = next_p;
            p.traveled = s_next;
            track.samples.push(PursuerSample {
                t: t_next,
                position: next_p,
                heading: p.heading,
                traveled: s_next,
            });
            if spent {
                p.status = PursuerStatus::Expired;
                track.expiry_time = Some(t_next);
                events.push(Event {
                    t: t_next,
                    kind: EventKind::Expiry { id: p.id },
                });
            }
        }

        pos = next_pos;
        let now_inside = rr.contains_open(pos);
        if now_inside != inside {
            let kind = if now_inside {
                EventKind::BoundaryEntry
            } else {
                EventKind::BoundaryExit
            };
            events.push(Event { t: t_next, kind });
            inside = now_inside;
        }

        let arrived = pos.distance(target) <= config.arrive_eps;
        if let Some(id) = captured_by {
            trajectory.push(Sample {
                t: t_next,
                position: pos,
                ..choice_sample(&choice, &pursuers)
            });
            events.push(Event {
                t: t_next,
                kind: EventKind::Capture { id },
            });
            return Ok(finish(
                trajectory,
                tracks,
                events,
                Outcome::Captured,
                min_separation,
                entry_time,
            ));
        }
        if arrived {
            trajectory.push(Sample {
                t: t_next,
                position: pos,
                ..choice_sample(&choice, &pursuers)
            });
            events.push(Event {
                t: t_next,
                kind: EventKind::Arrival,
            });
            return Ok(finish(
                trajectory,
                tracks,
                events,
                Outcome::Arrived,
                min_separation,
                entry_time,
            ));
        }
        step += 1;
    }
}

/// A pursuer within `capture_eps` of the evader only captures it if the
/// evader is strictly inside that pursuer's engagement zone at the start of
/// the step. Contacts made on the zone boundary are max-range interceptions,
/// which are neglected.
pub fn is_capture(
    separation: f64,
    capture_eps: f64,
    evader: Point2,
    evader_heading: Angle,
    pursuer: &PursuerState,
    scenario: &ScenarioParams,
) -> bool {
    let remaining = scenario.range - pursuer.traveled;
    separation <= capture_eps
        && geometry::in_engagement_zone(evader, pursuer.position, evader_heading, scenario.mu, remaining)
}

fn sample(t: f64, position: Point2, choice: &HeadingChoice, pursuers: &[PursuerState]) -> Sample {
    Sample {
        t,
        position,
        ..choice_sample(choice, pursuers)
    }
}

fn choice_sample(choice: &HeadingChoice, pursuers: &[PursuerState]) -> Sample {
    Sample {
        t: 0.0,
        position: Point2::ORIGIN,
        heading: choice.heading,
        mode: choice.mode,
        binding: choice.binding,
        n_active: pursuers.iter().filter(|p| p.is_active()).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovementRow {
    pub level: RunLevel,
    pub length: f64,
    /// Percent shorter than the level-1 path; `None` for level 1 itself.
    pub improvement_pct: Option<f64>,
}

impl std::fmt::Display for ImprovementRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.improvement_pct {
            Some(p) => write!(f, "{} {:.3} {:.2}%", self.level.label(), self.length, p),
            None => write!(f, "{} {:.3} -", self.level.label(), self.length),
        }
    }
}

/// Path lengths and percent improvement over level 1.
pub fn improvement_table(lengths: &[(RunLevel, f64)]) -> Result<Vec<ImprovementRow>> {
    let l1 = lengths
        .iter()
        .find(|(level, _)| *level == RunLevel::L1)
        .map(|&(_, len)| len)
        .ok_or(NavError::Contract("improvement table needs an L1 length"))?;
    Ok(lengths
        .iter()
        .map(|&(level, length)| ImprovementRow {
            level,
            length,
            improvement_pct: (level != RunLevel::L1).then(|| 100.0 * (l1 - length) / l1),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn baseline(level: RunLevel) -> SimConfig {
        SimConfig::new(ScenarioParams::default(), level)
    }

    #[test]
    fn path_length_of_samples() {
        let mk = |x: f64, y: f64| Sample {
            t: 0.0,
            position: Point2::new(x, y),
            heading: Angle::ZERO,
            mode: HeadingMode::MaxCut,
            binding: None,
            n_active: 0,
        };
        assert_eq!(path_length(&[mk(0.0, 0.0), mk(3.0, 4.0)]), 5.0);
        let line: Vec<_> = (0..=1000).map(|i| mk(i as f64 * 1e-3, 0.0)).collect();
        assert_abs_diff_eq!(path_length(&line), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn improvement_percentages() {
        let rows = improvement_table(&[
            (RunLevel::L1, 5.812),
            (RunLevel::L2, 5.636),
            (RunLevel::L3, 5.444),
            (RunLevel::IdealNoLaunch, 4.977),
        ])
        .unwrap();
        let pct: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2}", r.improvement_pct.unwrap_or(0.0)))
            .collect();
        assert_eq!(pct, ["0.00", "3.03", "6.33", "14.37"]);
        assert_eq!(rows[1].to_string(), "L2 5.636 3.03%");
        assert!(improvement_table(&[(RunLevel::L2, 5.0)]).is_err());
    }

    #[test]
    fn ideal_run_arrives_with_constant_speed() {
        let res = run(&baseline(RunLevel::IdealNoLaunch)).unwrap();
        assert_eq!(res.outcome, Outcome::Arrived);
        assert!(res.pursuer_tracks.is_empty());
        assert_abs_diff_eq!(res.path_length, res.end_time(), epsilon = 1e-9);
        let n = res.trajectory.len();
        for w in res.trajectory[..n - 1].windows(2) {
            let step = w[0].position.distance(w[1].position);
            assert!((step - 1e-3).abs() <= 1e-12 * 1e-3 + 1e-15, "step {step}");
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn straight_through_is_captured() {
        let mut cfg = baseline(RunLevel::Naive);
        cfg.first_launch_at_entry = true;
        let res = run(&cfg).unwrap();
        assert_eq!(res.outcome, Outcome::Captured);
        assert!(matches!(res.events.last().unwrap().kind, EventKind::Capture { id: 0 }));
    }

    #[test]
    fn start_on_target_arrives_immediately() {
        let mut cfg = baseline(RunLevel::L2);
        cfg.scenario.target_q = cfg.scenario.range;
        cfg.arrive_eps = 3.5;
        let res = run(&cfg).unwrap();
        assert_eq!(res.outcome, Outcome::Arrived);
        assert_eq!(res.trajectory.len(), 1);
        assert_eq!(res.path_length, 0.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = baseline(RunLevel::L1);
        cfg.dt = 0.0;
        assert!(matches!(run(&cfg), Err(NavError::InvalidConfig(_))));
        let mut cfg = baseline(RunLevel::L1);
        cfg.scenario.target_q = 1.0;
        assert_eq!(
            run(&cfg).unwrap_err(),
            NavError::InvalidConfig("target inside reachability region".into())
        );
    }

    #[test]
    fn timeout_reported() {
        let mut cfg = baseline(RunLevel::L1);
        cfg.time_limit = 0.5;
        let res = run(&cfg).unwrap();
        assert_eq!(res.outcome, Outcome::TimedOut);
    }

    #[test]
    fn pursuer_budget_respected() {
        let res = run(&baseline(RunLevel::L2)).unwrap();
        let sp = ScenarioParams::default();
        for track in &res.pursuer_tracks {
            for s in &track.samples {
                assert!(s.traveled <= sp.range + sp.v_pursuer() * 1e-3);
            }
        }
    }
}

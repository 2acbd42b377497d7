//! Evader heading policies, pursuer guidance laws and the launch schedule.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::cutting::{self, CuttingParams, Regime};
use crate::error::{NavError, Result};
use crate::geometry::{self, Angle, Disk, Point2, Side, GEOM_TOL};

/// Admissibility slack for heading comparisons, in radians.
const HEADING_TOL: f64 = 1e-12;

/// Engagement constants shared by every agent in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Speed ratio `v_E / v_P`.
    pub mu: f64,
    pub v_evader: f64,
    /// Pursuer reach `R = v_P * t_max`.
    pub range: f64,
    /// Target sits at `(q, 0)`.
    pub target_q: f64,
    pub launch_period: f64,
    pub pn_gain: f64,
    pub side: Side,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            mu: 0.85,
            v_evader: 1.0,
            range: 1.7,
            target_q: 2.55,
            launch_period: 0.7,
            pn_gain: 6.0,
            side: Side::Ccw,
        }
    }
}

impl ScenarioParams {
    pub fn v_pursuer(&self) -> f64 {
        self.v_evader / self.mu
    }

    pub fn t_max(&self) -> f64 {
        self.range / self.v_pursuer()
    }

    pub fn rr(&self) -> Disk {
        Disk {
            center: Point2::ORIGIN,
            radius: self.range,
        }
    }

    pub fn evader_start(&self) -> Point2 {
        Point2::new(-self.range, 0.0)
    }

    pub fn target(&self) -> Point2 {
        Point2::new(self.target_q, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(NavError::InvalidConfig(msg));
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return bad(format!("mu must lie in (0, 1], got {}", self.mu));
        }
        if !(self.v_evader > 0.0 && self.v_evader.is_finite()) {
            return bad(format!("v_E must be positive, got {}", self.v_evader));
        }
        if !(self.range > 0.0 && self.range.is_finite()) {
            return bad(format!("R must be positive, got {}", self.range));
        }
        if !self.target_q.is_finite() || self.target_q < self.range {
            return bad("target inside reachability region".into());
        }
        if !(self.launch_period > 0.0) {
            return bad(format!("t_L must be positive, got {}", self.launch_period));
        }
        if !(self.pn_gain >= 0.0 && self.pn_gain.is_finite()) {
            return bad(format!("N must be nonnegative, got {}", self.pn_gain));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnowledgeLevel {
    /// Initial locations and motion parameters only.
    L1,
    /// Plus launch instants.
    L2,
    /// Plus positions of launched pursuers.
    L3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PursuerStatus {
    Unlaunched,
    Active,
    Expired,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuerState {
    pub id: usize,
    pub status: PursuerStatus,
    pub launch_time: f64,
    pub position: Point2,
    pub heading: Angle,
    pub traveled: f64,
    /// Line of sight at the previous guidance update.
    pub prev_los: Option<Angle>,
}

impl PursuerState {
    pub fn unlaunched(id: usize, center: Point2) -> Self {
        PursuerState {
            id,
            status: PursuerStatus::Unlaunched,
            launch_time: f64::NAN,
            position: center,
            heading: Angle::new(PI),
            traveled: 0.0,
            prev_los: None,
        }
    }

    /// A pursuer leaving `center` at `now`, initially pointed along −x̂.
    pub fn launched(id: usize, center: Point2, now: f64) -> Self {
        PursuerState {
            status: PursuerStatus::Active,
            launch_time: now,
            ..Self::unlaunched(id, center)
        }
    }

    pub fn is_active(&self) -> bool {
        self.status == PursuerStatus::Active
    }

    /// Distance flown by `now` along a straight-line budget, capped at `range`.
    pub fn traveled_at(&self, now: f64, v_pursuer: f64, range: f64) -> f64 {
        (v_pursuer * (now - self.launch_time)).clamp(0.0, range)
    }
}

/// Whether a pursuer with `traveled` flown of `range` has used up its budget.
pub fn is_spent(traveled: f64, range: f64) -> bool {
    range - traveled <= GEOM_TOL * range.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaderState {
    pub position: Point2,
    pub heading: Angle,
    pub knowledge: KnowledgeLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintSource {
    /// The not-yet-launched pursuer still waiting at the center.
    Virtual,
    Pursuer(usize),
}

impl std::fmt::Display for ConstraintSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintSource::Virtual => f.write_str("V"),
            ConstraintSource::Pursuer(k) => write!(f, "P{k}"),
        }
    }
}

/// A safe-heading bound. Admissible headings form a cone about the line of
/// sight `lambda` (reference → evader) with half-width `π/2 + phi_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingConstraint {
    pub reference: Point2,
    pub lambda: Angle,
    pub phi_max: f64,
    pub regime: Regime,
    pub source: ConstraintSource,
}

impl HeadingConstraint {
    /// Most aggressive admissible heading on `side`.
    pub fn bound(&self, side: Side) -> Angle {
        cutting::heading_from_cutting(self.lambda, self.phi_max, side)
    }

    pub fn half_width(&self) -> f64 {
        match self.regime {
            Regime::UnconstrainedAllHeadings => PI,
            Regime::OnlyRetreatSafe => 0.0,
            Regime::Interior => FRAC_PI_2 + self.phi_max,
        }
    }

    /// Positive inside the admissible cone, negative outside.
    pub fn margin(&self, psi: Angle) -> f64 {
        self.half_width() - psi.diff(self.lambda).abs()
    }

    pub fn admits(&self, psi: Angle) -> bool {
        self.margin(psi) >= -HEADING_TOL
    }
}

fn virtual_constraint(evader: Point2, rr_center: Point2, params: &ScenarioParams) -> Result<HeadingConstraint> {
    let lambda = geometry::los_angle(rr_center, evader)?;
    let sol = cutting::phi_max_static(params.mu, params.range, evader.distance(rr_center))?;
    Ok(HeadingConstraint {
        reference: rr_center,
        lambda,
        phi_max: sol.phi_max,
        regime: sol.regime,
        source: ConstraintSource::Virtual,
    })
}

fn live_traveled(p: &PursuerState, params: &ScenarioParams, now: f64) -> Option<f64> {
    if !p.is_active() {
        return None;
    }
    let s = p.traveled_at(now, params.v_pursuer(), params.range);
    (!is_spent(s, params.range)).then_some(s)
}

/// Constraints for an evader that knows launch instants but not positions:
/// the unlaunched pursuer at the center plus one worst-case bound per live
/// launched pursuer.
pub fn constraints_l2(
    evader: &EvaderState,
    pursuers: &[PursuerState],
    rr_center: Point2,
    params: &ScenarioParams,
    now: f64,
) -> Result<Vec<HeadingConstraint>> {
    let virt = virtual_constraint(evader.position, rr_center, params)?;
    let radial = evader.position.distance(rr_center);
    let mut out = vec![virt];
    for p in pursuers {
        let Some(s) = live_traveled(p, params, now) else {
            continue;
        };
        let sol = cutting::phi_max_l2(&CuttingParams::new(params.mu, params.range, radial, s))?;
        out.push(HeadingConstraint {
            reference: rr_center,
            lambda: virt.lambda,
            phi_max: sol.phi_max,
            regime: sol.regime,
            source: ConstraintSource::Pursuer(p.id),
        });
    }
    Ok(out)
}

/// Constraints for an evader that sees every launched pursuer.
pub fn constraints_l3(
    evader: &EvaderState,
    pursuers: &[PursuerState],
    rr_center: Point2,
    params: &ScenarioParams,
    now: f64,
) -> Result<Vec<HeadingConstraint>> {
    let mut out = vec![virtual_constraint(evader.position, rr_center, params)?];
    let radial = evader.position.distance(rr_center);
    for p in pursuers {
        let Some(s) = live_traveled(p, params, now) else {
            continue;
        };
        let d = p.position.distance(evader.position);
        if d <= GEOM_TOL {
            return Err(NavError::DegenerateGeometry("pursuer coincides with evader"));
        }
        let lambda = geometry::los_angle(p.position, evader.position)?;
        let sol = cutting::phi_max_l3(&CuttingParams::new(params.mu, params.range, radial, s).with_separation(d))?;
        out.push(HeadingConstraint {
            reference: p.position,
            lambda,
            phi_max: sol.phi_max,
            regime: sol.regime,
            source: ConstraintSource::Pursuer(p.id),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeadingMode {
    MaxCut,
    StraightToTarget,
    RetreatOnly,
    /// Following the disk-avoiding path around the reachability region.
    Circumnavigate,
}

impl HeadingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HeadingMode::MaxCut => "MaxCut",
            HeadingMode::StraightToTarget => "StraightToTarget",
            HeadingMode::RetreatOnly => "RetreatOnly",
            HeadingMode::Circumnavigate => "Circumnavigate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingChoice {
    pub heading: Angle,
    pub mode: HeadingMode,
    pub binding: Option<ConstraintSource>,
}

/// The cutting-angle heuristic: head straight at the target when every
/// constraint allows it, otherwise take the most aggressive heading on
/// `side` that all constraints admit.
pub fn select_heading(
    constraints: &[HeadingConstraint],
    evader: Point2,
    target: Point2,
    side: Side,
) -> Result<HeadingChoice> {
    if constraints.is_empty() {
        return Err(NavError::Contract("select_heading needs at least one constraint"));
    }
    let to_target = geometry::los_angle(evader, target)?;
    if constraints.iter().all(|c| c.admits(to_target)) {
        return Ok(HeadingChoice {
            heading: to_target,
            mode: HeadingMode::StraightToTarget,
            binding: None,
        });
    }
    if let Some(c) = constraints.iter().find(|c| c.regime == Regime::OnlyRetreatSafe) {
        return Ok(HeadingChoice {
            heading: c.lambda,
            mode: HeadingMode::RetreatOnly,
            binding: Some(c.source),
        });
    }

    let worst_margin = |psi: Angle| constraints.iter().map(|c| c.margin(psi)).fold(f64::INFINITY, f64::min);

    // The intersection of the cones is an arc whose `side` end is one of
    // the per-constraint bounds; it is the bound every other cone admits.
    // Exact ties go to the narrowest cone.
    let mut best: Option<(&HeadingConstraint, Angle)> = None;
    for c in constraints.iter().filter(|c| c.regime == Regime::Interior) {
        let psi = c.bound(side);
        if worst_margin(psi) < -HEADING_TOL {
            continue;
        }
        if best.is_none_or(|(b, _)| c.half_width() < b.half_width()) {
            best = Some((c, psi));
        }
    }
    if best.is_none() {
        // Empty intersection: fall back to the least-violating bound.
        best = constraints
            .iter()
            .filter(|c| c.regime == Regime::Interior)
            .map(|c| (c, c.bound(side)))
            .max_by(|a, b| worst_margin(a.1).total_cmp(&worst_margin(b.1)));
    }
    let (c, psi) = best.ok_or(NavError::Contract("no bounded constraint"))?;
    Ok(HeadingChoice {
        heading: psi,
        mode: HeadingMode::MaxCut,
        binding: Some(c.source),
    })
}

/// Knowledge-level-1 heading: never enter the reachability region.
pub fn l1_policy(evader: Point2, target: Point2, rr: &Disk, side: Side) -> Result<HeadingChoice> {
    let path = geometry::circumnavigation_path_on_side(evader, target, rr, side)?;
    let mode = if path.is_direct() {
        HeadingMode::StraightToTarget
    } else {
        HeadingMode::Circumnavigate
    };
    Ok(HeadingChoice {
        heading: path.initial_heading(rr)?,
        mode,
        binding: None,
    })
}

/// Proportional navigation: turn at `gain` times the line-of-sight rate,
/// estimated by a backward difference over `dt`.
pub fn pro_nav_step(pursuer: &PursuerState, evader: Point2, prev_los: Angle, dt: f64, gain: f64) -> Result<Angle> {
    let los = geometry::los_angle(pursuer.position, evader)?;
    let los_rate = los.diff(prev_los) / dt;
    Ok(pursuer.heading.offset(gain * los_rate * dt))
}

/// Heading that closes on a constant-velocity evader along the intercept
/// triangle.
pub fn collision_course_heading(pursuer: Point2, evader: Point2, evader_heading: Angle, mu: f64) -> Result<Angle> {
    let los = geometry::los_angle(pursuer, evader)?;
    let aspect = evader_heading.diff(los);
    let lead = (mu * aspect.sin()).clamp(-1.0, 1.0).asin();
    Ok(los.offset(lead))
}

pub fn pure_pursuit_heading(pursuer: Point2, evader: Point2) -> Result<Angle> {
    geometry::los_angle(pursuer, evader)
}

/// Launches one pursuer every `period` after the evader enters the region.
/// A launch whose instant finds the evader outside is dropped, not deferred.
#[derive(Debug, Clone, PartialEq)]
pub struct LaunchScheduler {
    period: f64,
    first_at_entry: bool,
    next_index: u64,
}

impl LaunchScheduler {
    pub fn new(period: f64, first_at_entry: bool) -> Self {
        LaunchScheduler {
            period,
            first_at_entry,
            next_index: 0,
        }
    }

    /// Returns the schedule slot launched at `now`, if any. At most one
    /// launch per call.
    pub fn poll(&mut self, now: f64, entry_time: f64, evader_inside: bool) -> Option<u64> {
        if now < entry_time {
            return None;
        }
        let ticks = ((now - entry_time) / self.period + 1e-9).floor() as i64;
        let due = ticks - if self.first_at_entry { 0 } else { 1 };
        if due < 0 || (due as u64) < self.next_index {
            return None;
        }
        self.next_index = due as u64 + 1;
        evader_inside.then_some(due as u64)
    }

    /// Scheduled instant of slot `k`.
    pub fn slot_time(&self, entry_time: f64, k: u64) -> f64 {
        entry_time + (k as f64 + if self.first_at_entry { 0.0 } else { 1.0 }) * self.period
    }
}

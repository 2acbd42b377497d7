//! Planar primitives: points, wrapped angles, disks, engagement-zone
//! membership, and the shortest path around a disk.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};

/// Absolute tolerance for geometric predicates, in units of the range `R`.
/// Every scenario length is O(1), so it is applied as an absolute value.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn unit(angle: Angle) -> Self {
        let (s, c) = angle.radians().sin_cos();
        Point2 { x: c, y: s }
    }

    pub fn from_polar(radius: f64, angle: Angle) -> Self {
        Self::unit(angle) * radius
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Wraps an angle in radians into (−π, π].
pub fn wrap(radians: f64) -> f64 {
    let w = radians.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// An angle in radians, always normalized to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        Angle(wrap(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Signed smallest rotation taking `other` onto `self`, in (−π, π].
    pub fn diff(self, other: Angle) -> f64 {
        wrap(self.0 - other.0)
    }

    pub fn offset(self, radians: f64) -> Angle {
        Angle::new(self.0 + radians)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which way the evader goes around a reachability region.
///
/// `Ccw` is the convention `ψ = λ − φ − π/2`: starting from the left edge
/// of a disk it sweeps through the upper half-plane with the disk center on
/// its right. `Cw` is the mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Side {
    #[default]
    #[serde(rename = "CCW")]
    Ccw,
    #[serde(rename = "CW")]
    Cw,
}

impl Side {
    /// +1 for `Ccw`, −1 for `Cw`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Ccw => 1.0,
            Side::Cw => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Ccw => "CCW",
            Side::Cw => "CW",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(NavError::Domain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    /// Strictly inside, with the boundary band counted as outside.
    pub fn contains_open(&self, p: Point2) -> bool {
        self.center.distance(p) < self.radius - GEOM_TOL
    }

    /// Distance from the disk center to the segment `a`–`b`.
    pub fn segment_clearance(&self, a: Point2, b: Point2) -> f64 {
        segment_point_distance(a, b, self.center)
    }
}

pub fn segment_point_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a.distance(p);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * t).distance(p)
}

/// Minimum distance between two points moving linearly over the same
/// interval: `a0 → a1` and `b0 → b1`.
pub fn min_moving_distance(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> f64 {
    let d0 = b0 - a0;
    let dv = (b1 - a1) - d0;
    let v2 = dv.norm_squared();
    let tau = if v2 == 0.0 {
        0.0
    } else {
        (-d0.dot(dv) / v2).clamp(0.0, 1.0)
    };
    (d0 + dv * tau).norm()
}

/// Line-of-sight angle of `to` as seen from `from`.
pub fn los_angle(from: Point2, to: Point2) -> Result<Angle> {
    let v = to - from;
    if v.x == 0.0 && v.y == 0.0 {
        return Err(NavError::DegenerateGeometry("line of sight between coincident points"));
    }
    Ok(Angle::new(v.y.atan2(v.x)))
}

/// Center of a simple-motion pursuer's engagement zone: the pursuer's reach
/// disk shifted `mu * range_remaining` against the evader's heading.
pub fn ez_center(pursuer: Point2, evader_heading: Angle, mu: f64, range_remaining: f64) -> Point2 {
    pursuer - Point2::unit(evader_heading) * (mu * range_remaining)
}

/// Whether an evader holding `evader_heading` can be intercepted. Points on
/// the zone boundary are outside: max-range interceptions are neglected.
pub fn in_engagement_zone(
    evader: Point2,
    pursuer: Point2,
    evader_heading: Angle,
    mu: f64,
    range_remaining: f64,
) -> bool {
    let c = ez_center(pursuer, evader_heading, mu, range_remaining);
    evader.distance(c) < range_remaining - GEOM_TOL
}

/// Shortest path from `start` to `target` that never enters an open disk:
/// an optional tangent leg onto the circle, an arc, and a tangent leg off it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDescription {
    pub start: Point2,
    pub target: Point2,
    pub side: Side,
    /// Point where the path first touches the circle.
    pub arc_start: Point2,
    /// Point where the path leaves the circle toward the target.
    pub arc_end: Point2,
    /// Swept arc angle, in [0, 2π).
    pub arc_angle: f64,
    pub approach_length: f64,
    pub arc_length: f64,
    pub departure_length: f64,
}

impl PathDescription {
    pub fn length(&self) -> f64 {
        self.approach_length + self.arc_length + self.departure_length
    }

    pub fn is_direct(&self) -> bool {
        self.arc_length == 0.0 && self.approach_length == 0.0
    }

    /// Heading to adopt at `start` to follow the path.
    pub fn initial_heading(&self, rr: &Disk) -> Result<Angle> {
        if self.is_direct() {
            return los_angle(self.start, self.target);
        }
        if self.approach_length > GEOM_TOL {
            return los_angle(self.start, self.arc_start);
        }
        let lambda = los_angle(rr.center, self.start)?;
        Ok(lambda.offset(-self.side.sign() * FRAC_PI_2))
    }
}

/// Shortest disk-avoiding path, choosing the shorter way around
/// (ties go to [`Side::Ccw`]).
pub fn circumnavigation_path(start: Point2, target: Point2, rr: &Disk) -> Result<PathDescription> {
    let ccw = circumnavigation_path_on_side(start, target, rr, Side::Ccw)?;
    let cw = circumnavigation_path_on_side(start, target, rr, Side::Cw)?;
    Ok(if cw.length() < ccw.length() - GEOM_TOL { cw } else { ccw })
}

/// Disk-avoiding path that goes around on a fixed `side`.
pub fn circumnavigation_path_on_side(start: Point2, target: Point2, rr: &Disk, side: Side) -> Result<PathDescription> {
    let rel_target = target - rr.center;
    let rel_start = start - rr.center;
    if rel_target.norm() < rr.radius - GEOM_TOL {
        return Err(NavError::Infeasible("target inside reachability region"));
    }
    if rel_start.norm() < rr.radius - GEOM_TOL {
        return Err(NavError::Infeasible("start inside reachability region"));
    }

    if rr.segment_clearance(start, target) >= rr.radius - GEOM_TOL {
        return Ok(PathDescription {
            start,
            target,
            side,
            arc_start: start,
            arc_end: start,
            arc_angle: 0.0,
            approach_length: 0.0,
            arc_length: 0.0,
            departure_length: start.distance(target),
        });
    }

    let sign = side.sign();
    let r_start = rel_start.norm().max(rr.radius);
    let r_target = rel_target.norm().max(rr.radius);
    let beta_start = (rr.radius / r_start).min(1.0).acos();
    let beta_target = (rr.radius / r_target).min(1.0).acos();
    let lam_start = rel_start.y.atan2(rel_start.x);
    let lam_target = rel_target.y.atan2(rel_target.x);

    let a1 = lam_start - sign * beta_start;
    let a2 = lam_target + sign * beta_target;
    let mut arc_angle = ((a1 - a2) * sign).rem_euclid(TAU);
    if arc_angle > TAU - GEOM_TOL {
        arc_angle = 0.0;
    }
    let arc_start = rr.center + Point2::from_polar(rr.radius, Angle::new(a1));
    let arc_end = rr.center + Point2::from_polar(rr.radius, Angle::new(a2));

    Ok(PathDescription {
        start,
        target,
        side,
        arc_start,
        arc_end,
        arc_angle,
        approach_length: (r_start * r_start - rr.radius * rr.radius).max(0.0).sqrt(),
        arc_length: rr.radius * arc_angle,
        departure_length: (r_target * r_target - rr.radius * rr.radius).max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    fn rr(radius: f64) -> Disk {
        Disk::new(Point2::ORIGIN, radius).unwrap()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert_abs_diff_eq!(wrap(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap(-7.0), -7.0 + TAU, epsilon = 1e-15);
    }

    #[test]
    fn los_cardinal_directions() {
        let o = Point2::ORIGIN;
        assert_eq!(los_angle(o, Point2::new(1.0, 0.0)).unwrap().radians(), 0.0);
        assert_abs_diff_eq!(los_angle(o, Point2::new(0.0, 1.0)).unwrap().radians(), FRAC_PI_2);
        assert_abs_diff_eq!(los_angle(o, Point2::new(-1.0, 0.0)).unwrap().radians(), PI);
        assert!(matches!(los_angle(o, o), Err(NavError::DegenerateGeometry(_))));
    }

    #[test]
    fn ez_center_shift() {
        let c = ez_center(Point2::ORIGIN, Angle::ZERO, 0.85, 1.7);
        assert_abs_diff_eq!(c.x, -1.445, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y, 0.0);
        let p = Point2::new(0.3, -0.2);
        assert_eq!(ez_center(p, Angle::new(1.0), 0.85, 0.0), p);
        let c = ez_center(Point2::ORIGIN, Angle::new(FRAC_PI_2), 1.0, 2.0);
        assert_abs_diff_eq!(c.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.y, -2.0);
    }

    #[test]
    fn ez_membership() {
        let (mu, range) = (0.85, 1.7);
        let heading = Angle::ZERO;
        let c = ez_center(Point2::ORIGIN, heading, mu, range);
        // boundary point
        let on = c + Point2::new(0.0, range);
        assert!(!in_engagement_zone(on, Point2::ORIGIN, heading, mu, range));
        assert!(in_engagement_zone(c, Point2::ORIGIN, heading, mu, range));
        let far = c + Point2::new(2.0 * range, 0.0);
        assert!(!in_engagement_zone(far, Point2::ORIGIN, heading, mu, range));
    }

    #[test]
    fn canonical_circumnavigation() {
        let p = circumnavigation_path(Point2::new(-1.7, 0.0), Point2::new(2.55, 0.0), &rr(1.7)).unwrap();
        let expected = 1.7 * (PI - (1.7f64 / 2.55).acos()) + (2.55f64 * 2.55 - 1.7 * 1.7).sqrt();
        assert_abs_diff_eq!(p.length(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(p.length(), 5.811549, epsilon = 1e-6);
        assert_eq!(p.approach_length, 0.0);
        assert_abs_diff_eq!(p.arc_end.norm(), 1.7, epsilon = 1e-12);
        assert!(p.arc_end.y > 0.0);
    }

    #[test]
    fn unit_radius_circumnavigation() {
        let p = circumnavigation_path(Point2::new(-1.0, 0.0), Point2::new(2.0, 0.0), &rr(1.0)).unwrap();
        assert_abs_diff_eq!(p.length(), 2.0 * FRAC_PI_3 + 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn target_behind_is_direct() {
        let p = circumnavigation_path(Point2::new(-1.7, 0.0), Point2::new(-3.4, 0.0), &rr(1.7)).unwrap();
        assert!(p.is_direct());
        assert_abs_diff_eq!(p.length(), 1.7, epsilon = 1e-12);
    }

    #[test]
    fn target_inside_is_infeasible() {
        let err = circumnavigation_path(Point2::new(-1.7, 0.0), Point2::new(0.5, 0.0), &rr(1.7)).unwrap_err();
        assert_eq!(err, NavError::Infeasible("target inside reachability region"));
    }

    #[test]
    fn sides_mirror() {
        let start = Point2::new(-3.0, 0.4);
        let target = Point2::new(3.0, 0.1);
        let ccw = circumnavigation_path_on_side(start, target, &rr(1.0), Side::Ccw).unwrap();
        let cw = circumnavigation_path_on_side(start, target, &rr(1.0), Side::Cw).unwrap();
        assert!(ccw.arc_start.y > 0.0 && cw.arc_start.y < 0.0);
        // the start sits above the axis, so going over the top is shorter
        assert!(ccw.length() < cw.length());
        assert_eq!(circumnavigation_path(start, target, &rr(1.0)).unwrap().side, Side::Ccw);
    }

    #[test]
    fn initial_heading_on_boundary_is_tangential() {
        let disk = rr(1.7);
        let p =
            circumnavigation_path_on_side(Point2::new(-1.7, 0.0), Point2::new(2.55, 0.0), &disk, Side::Ccw).unwrap();
        assert_abs_diff_eq!(p.initial_heading(&disk).unwrap().radians(), FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn moving_distance_head_on() {
        let d = min_moving_distance(
            Point2::new(-1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.1),
            Point2::new(-1.0, 0.1),
        );
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-15);
    }
}

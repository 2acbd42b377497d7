//! Maximum safe cutting angles.
//!
//! A cutting angle is a heading offset measured from the local perpendicular
//! of the line joining a reference point to the evader. Positive values cut
//! toward the reference point. Each solver returns the largest cutting angle
//! that keeps the evader outside the relevant engagement zone:
//!
//! * [`phi_max_static`]: pursuer still sitting at its initial location.
//! * [`phi_max_l2`]: pursuer launched `s / v_P` ago at an unknown bearing;
//!   the worst case over that bearing.
//! * [`phi_max_l3`]: launched pursuer whose position is known.
//!
//! Arcsin arguments outside [−1, 1] saturate to ±π/2 and carry a
//! [`Regime`] tag so callers can tell saturation apart from an interior
//! solution.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::geometry::{Angle, Side};

/// Arguments this close to ±1 are treated as saturated.
const SATURATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Interior,
    /// Every heading, including straight at the reference point, is safe.
    UnconstrainedAllHeadings,
    /// Only heading directly away from the reference point is safe.
    OnlyRetreatSafe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingParams {
    pub mu: f64,
    pub range: f64,
    /// Evader distance from the reachability-region center.
    pub radial: f64,
    /// Distance the pursuer has flown since launch.
    pub traveled: f64,
    /// True pursuer–evader distance, when known.
    pub separation: Option<f64>,
}

impl CuttingParams {
    pub fn new(mu: f64, range: f64, radial: f64, traveled: f64) -> Self {
        CuttingParams {
            mu,
            range,
            radial,
            traveled,
            separation: None,
        }
    }

    pub fn with_separation(mut self, d: f64) -> Self {
        self.separation = Some(d);
        self
    }

    /// Range the pursuer has left, `R − s`.
    pub fn remaining(&self) -> f64 {
        self.range - self.traveled
    }

    fn check_common(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(NavError::Domain(format!(
                "speed ratio must lie in (0, 1], got {}",
                self.mu
            )));
        }
        if !(self.range > 0.0) {
            return Err(NavError::Domain(format!("range must be positive, got {}", self.range)));
        }
        if !(self.traveled >= 0.0) {
            return Err(NavError::Domain(format!(
                "traveled distance must be nonnegative, got {}",
                self.traveled
            )));
        }
        if self.traveled >= self.range {
            return Err(NavError::ExpiredPursuer {
                traveled: self.traveled,
                range: self.range,
            });
        }
        Ok(())
    }

    fn check_radial(&self) -> Result<()> {
        if !(self.radial > 0.0) {
            return Err(NavError::Domain(format!(
                "radial distance must be positive, got {}",
                self.radial
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingSolution {
    pub phi_max: f64,
    pub regime: Regime,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub gamma_star: Option<f64>,
}

impl CuttingSolution {
    fn from_arg(arg: f64) -> Self {
        let (phi_max, regime) = saturating_asin(arg);
        CuttingSolution {
            phi_max,
            regime,
            alpha: None,
            delta: None,
            gamma_star: None,
        }
    }
}

fn saturating_asin(arg: f64) -> (f64, Regime) {
    if arg.is_nan() {
        // 0/0 only arises when the evader sits on the pursuer
        (-FRAC_PI_2, Regime::OnlyRetreatSafe)
    } else if arg >= 1.0 - SATURATION_TOL {
        (FRAC_PI_2, Regime::UnconstrainedAllHeadings)
    } else if arg <= -1.0 + SATURATION_TOL {
        (-FRAC_PI_2, Regime::OnlyRetreatSafe)
    } else {
        (arg.asin(), Regime::Interior)
    }
}

/// Cutting-angle bound against a reach of `range` centered at distance
/// `dist` from the evader: arcsin(((μ²−1)ρ² + d²) / (2μdρ)).
fn shifted_circle_arg(mu: f64, range: f64, dist: f64) -> f64 {
    ((mu * mu - 1.0) * range * range + dist * dist) / (2.0 * mu * dist * range)
}

/// Maximum cutting angle against an unlaunched pursuer at distance
/// `radial` with full range `range`. On the reach boundary this is
/// `asin(mu / 2)`.
pub fn phi_max_static(mu: f64, range: f64, radial: f64) -> Result<CuttingSolution> {
    let p = CuttingParams::new(mu, range, radial, 0.0);
    p.check_common()?;
    p.check_radial()?;
    Ok(CuttingSolution::from_arg(shifted_circle_arg(mu, range, radial)))
}

/// Distance from the evader to a pursuer at bearing `gamma` on the circle
/// of radius `traveled` about the reachability-region center.
pub fn d_of_gamma(radial: f64, traveled: f64, gamma: f64) -> f64 {
    (radial * radial - 2.0 * radial * traveled * gamma.cos() + traveled * traveled)
        .max(0.0)
        .sqrt()
}

/// Cutting angle against a pursuer at bearing `gamma`, re-expressed in the
/// reachability-region center frame. The result is not clamped to
/// [−π/2, π/2] after the frame correction, except that a pursuer position
/// that leaves every heading safe reports π/2 in any frame.
pub fn phi_of_gamma(params: &CuttingParams, gamma: f64) -> Result<CuttingSolution> {
    params.check_common()?;
    params.check_radial()?;
    let rho = params.remaining();
    let s = params.traveled;
    let r = params.radial;
    let d = d_of_gamma(r, s, gamma);
    let (alpha, regime) = if d <= f64::EPSILON * r {
        (-FRAC_PI_2, Regime::OnlyRetreatSafe)
    } else {
        saturating_asin(shifted_circle_arg(params.mu, rho, d))
    };
    let delta = (s * gamma.sin()).atan2(r - s * gamma.cos());
    let phi_max = if regime == Regime::UnconstrainedAllHeadings {
        FRAC_PI_2
    } else {
        alpha - delta
    };
    Ok(CuttingSolution {
        phi_max,
        regime,
        alpha: Some(alpha),
        delta: Some(delta),
        gamma_star: None,
    })
}

/// Bearing of the worst-case launched-pursuer position, in [0, π].
pub fn gamma_star(params: &CuttingParams) -> f64 {
    let CuttingParams { mu, range, radial, .. } = *params;
    let rho = params.remaining();
    let arg = (range * range + radial * radial - mu * mu * rho * rho) / (2.0 * radial * range);
    arg.clamp(-1.0, 1.0).acos()
}

/// Worst-case maximum cutting angle against a pursuer launched
/// `traveled / v_P` ago whose current position is unknown. Measured from
/// the normal of the center→evader line.
pub fn phi_max_l2(params: &CuttingParams) -> Result<CuttingSolution> {
    params.check_common()?;
    params.check_radial()?;
    let CuttingParams { mu, range, radial, .. } = *params;
    let rho = params.remaining();
    let arg = (mu * mu * rho * rho + radial * radial - range * range) / (2.0 * mu * radial * rho);
    let mut sol = CuttingSolution::from_arg(arg);
    sol.gamma_star = Some(gamma_star(params));
    Ok(sol)
}

/// Maximum cutting angle against a launched pursuer at known distance
/// `separation`. Measured from the normal of the pursuer→evader line.
pub fn phi_max_l3(params: &CuttingParams) -> Result<CuttingSolution> {
    params.check_common()?;
    let d = match params.separation {
        Some(d) if d > 0.0 => d,
        Some(d) => return Err(NavError::Domain(format!("separation must be positive, got {d}"))),
        None => return Err(NavError::Domain("separation required for a known pursuer".into())),
    };
    let mut sol = CuttingSolution::from_arg(shifted_circle_arg(params.mu, params.remaining(), d));
    sol.alpha = Some(sol.phi_max);
    Ok(sol)
}

/// Absolute heading for cutting angle `phi` off the perpendicular of a line
/// of sight with angle `lambda`.
pub fn heading_from_cutting(lambda: Angle, phi: f64, side: Side) -> Angle {
    lambda.offset(-side.sign() * (phi + FRAC_PI_2))
}

/// Inverse of [`heading_from_cutting`], wrapped to (−π, π].
pub fn cutting_from_heading(lambda: Angle, psi: Angle, side: Side) -> f64 {
    crate::geometry::wrap(side.sign() * lambda.diff(psi) - FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_6, PI};

    const MU: f64 = 0.85;
    const R: f64 = 1.7;

    fn s_tl() -> f64 {
        0.7 * R / (R * MU)
    }

    #[test]
    fn static_boundary_value() {
        let sol = phi_max_static(MU, R, R).unwrap();
        assert_abs_diff_eq!(sol.phi_max, (MU / 2.0).asin(), epsilon = 1e-15);
        assert_abs_diff_eq!(sol.phi_max, 0.438962, epsilon = 1e-6);
        assert_eq!(sol.regime, Regime::Interior);
        assert_abs_diff_eq!(
            phi_max_static(1.0, 2.0, 2.0).unwrap().phi_max,
            FRAC_PI_6,
            epsilon = 1e-15
        );
    }

    #[test]
    fn static_saturation_limits() {
        let lo = phi_max_static(MU, R, (1.0 - MU) * R).unwrap();
        assert_eq!(lo.regime, Regime::OnlyRetreatSafe);
        assert_eq!(lo.phi_max, -FRAC_PI_2);
        let hi = phi_max_static(MU, R, (1.0 + MU) * R).unwrap();
        assert_eq!(hi.regime, Regime::UnconstrainedAllHeadings);
        assert_eq!(hi.phi_max, FRAC_PI_2);
    }

    #[test]
    fn static_rejects_nonpositive_radius() {
        assert!(matches!(phi_max_static(MU, R, 0.0), Err(NavError::Domain(_))));
        assert!(matches!(phi_max_static(MU, R, -1.0), Err(NavError::Domain(_))));
    }

    #[test]
    fn d_of_gamma_collinear_and_quadrature() {
        assert_abs_diff_eq!(d_of_gamma(1.7, 0.8, 0.0), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(d_of_gamma(1.7, 0.8, PI), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d_of_gamma(1.7, 0.8, PI / 2.0), 1.878829, epsilon = 1e-6);
    }

    #[test]
    fn phi_of_gamma_reduces_without_travel() {
        let p = CuttingParams::new(MU, R, 1.3, 0.0);
        let base = phi_max_static(MU, R, 1.3).unwrap().phi_max;
        for g in [0.0, 0.4, 1.5, 3.0] {
            let sol = phi_of_gamma(&p, g).unwrap();
            assert_abs_diff_eq!(sol.phi_max, base, epsilon = 1e-14);
            assert_eq!(sol.delta, Some(0.0));
        }
    }

    #[test]
    fn phi_of_gamma_collinear() {
        let p = CuttingParams::new(MU, R, 1.7, 0.5);
        let sol = phi_of_gamma(&p, 0.0).unwrap();
        assert_eq!(sol.delta, Some(0.0));
        let expected = phi_max_static(MU, R - 0.5, 1.2).unwrap().phi_max;
        assert_abs_diff_eq!(sol.phi_max, expected, epsilon = 1e-14);
    }

    #[test]
    fn gamma_star_and_l2_at_first_launch() {
        let p = CuttingParams::new(MU, R, R, s_tl());
        let g = gamma_star(&p);
        assert_abs_diff_eq!(g, 0.441820, epsilon = 1e-6);
        let l2 = phi_max_l2(&p).unwrap();
        assert_abs_diff_eq!(l2.phi_max, 0.21911764705882358f64.asin(), epsilon = 1e-12);
        assert_abs_diff_eq!(l2.phi_max, 0.22091, epsilon = 1e-5);
        assert_eq!(l2.gamma_star, Some(g));
        assert_abs_diff_eq!(phi_of_gamma(&p, g).unwrap().phi_max, l2.phi_max, epsilon = 1e-9);
    }

    #[test]
    fn gamma_star_clamps_to_collinear() {
        let p = CuttingParams::new(1e-9, R, R, 0.0);
        assert_eq!(gamma_star(&p), 0.0);
        // remaining range tiny and evader far out: argument exceeds 1
        let p = CuttingParams::new(MU, R, 3.0, 1.69);
        assert_eq!(gamma_star(&p), 0.0);
    }

    #[test]
    fn expired_pursuer_rejected() {
        let p = CuttingParams::new(MU, R, 1.0, R);
        assert!(matches!(phi_max_l2(&p), Err(NavError::ExpiredPursuer { .. })));
        assert!(matches!(phi_of_gamma(&p, 0.1), Err(NavError::ExpiredPursuer { .. })));
        assert!(matches!(
            phi_max_l3(&p.with_separation(1.0)),
            Err(NavError::ExpiredPursuer { .. })
        ));
    }

    #[test]
    fn l3_values() {
        let p = CuttingParams::new(MU, R, 1.0, 0.85).with_separation(1.0);
        let sol = phi_max_l3(&p).unwrap();
        assert_abs_diff_eq!(sol.phi_max, 0.5532915224913495f64.asin(), epsilon = 1e-12);
        assert_abs_diff_eq!(sol.phi_max, 0.586311, epsilon = 1e-6);

        let rho = R - 0.85;
        let edge = CuttingParams::new(MU, R, 1.0, 0.85).with_separation((1.0 + MU) * rho);
        let sol = phi_max_l3(&edge).unwrap();
        assert_eq!(sol.regime, Regime::UnconstrainedAllHeadings);
        assert_eq!(sol.phi_max, FRAC_PI_2);

        assert!(phi_max_l3(&CuttingParams::new(MU, R, 1.0, 0.2)).is_err());
    }

    #[test]
    fn heading_conversions() {
        let pi = Angle::new(PI);
        assert_abs_diff_eq!(
            heading_from_cutting(pi, 0.0, Side::Ccw).radians(),
            PI / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            heading_from_cutting(pi, PI / 2.0, Side::Ccw).radians(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            heading_from_cutting(pi, 0.438962, Side::Ccw).radians(),
            1.131834,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            cutting_from_heading(pi, Angle::ZERO, Side::Ccw),
            PI / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            cutting_from_heading(Angle::new(PI / 2.0), Angle::new(PI / 2.0), Side::Ccw),
            -PI / 2.0,
            epsilon = 1e-15
        );
        // CW mirrors CCW across the line of sight
        assert_abs_diff_eq!(
            heading_from_cutting(pi, 0.3, Side::Cw).radians(),
            -(PI / 2.0 - 0.3),
            epsilon = 1e-15
        );
    }
}

//! Bit-stable CSV and SVG renderings of a [`SimResult`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::engine::{PursuerTrack, SimResult};
use crate::geometry::Point2;

pub const TRAJECTORY_HEADER: &str = "t,x_e,y_e,psi,mode,binding,n_active_pursuers";
pub const PURSUER_HEADER: &str = "t,x,y,psi,s";

/// Formats `x` with 6 significant digits, `%g` style.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = trim_zeros(&s);
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn trajectory_csv(result: &SimResult) -> String {
    let mut out = String::with_capacity(48 * (result.trajectory.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &result.trajectory {
        let binding = s.binding.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig6(s.t),
            sig6(s.position.x),
            sig6(s.position.y),
            sig6(s.heading.radians()),
            s.mode.as_str(),
            binding,
            s.n_active
        );
    }
    out
}

pub fn pursuer_csv(track: &PursuerTrack) -> String {
    let mut out = String::with_capacity(40 * (track.samples.len() + 1));
    out.push_str(PURSUER_HEADER);
    out.push('\n');
    for s in &track.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig6(s.t),
            sig6(s.position.x),
            sig6(s.position.y),
            sig6(s.heading.radians()),
            sig6(s.traveled)
        );
    }
    out
}

/// Writes `trajectory.csv` and one `pursuer_<k>.csv` per launched pursuer
/// into `dir`, returning the paths written.
pub fn write_csvs(result: &SimResult, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("trajectory.csv");
    std::fs::write(&path, trajectory_csv(result))?;
    written.push(path);
    for track in &result.pursuer_tracks {
        let path = dir.join(format!("pursuer_{}.csv", track.id));
        std::fs::write(&path, pursuer_csv(track))?;
        written.push(path);
    }
    Ok(written)
}

fn svg_point(p: Point2) -> String {
    // SVG y grows downward
    format!("{},{}", sig6(p.x), sig6(-p.y))
}

fn polyline(points: impl Iterator<Item = Point2>) -> String {
    points.map(svg_point).collect::<Vec<_>>().join(" ")
}

/// Plot of the reachability region, the evader path, every pursuer track and
/// the target. A run with no motion renders the target marker alone.
pub fn svg(result: &SimResult) -> String {
    let sp = &result.config.scenario;
    let rr = sp.rr();
    let target = sp.target();
    let moved = result.trajectory.len() >= 2;

    let mut lo = Point2::new(target.x, target.y);
    let mut hi = lo;
    let mut grow = |p: Point2| {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    };
    if moved {
        grow(rr.center - Point2::new(rr.radius, rr.radius));
        grow(rr.center + Point2::new(rr.radius, rr.radius));
        result.trajectory.iter().for_each(|s| grow(s.position));
        for track in &result.pursuer_tracks {
            track.samples.iter().for_each(|s| grow(s.position));
        }
    }
    let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let (x0, y0) = (lo.x - pad, -hi.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let stroke = sig6(0.004 * w.max(h));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        sig6(x0),
        sig6(y0),
        sig6(w),
        sig6(h),
        (800.0 * h / w).round()
    );
    if moved {
        let _ = writeln!(
            out,
            r#"<circle class="rr" cx="{}" cy="{}" r="{}" fill="none" stroke="gray" stroke-width="{stroke}"/>"#,
            sig6(rr.center.x),
            sig6(-rr.center.y),
            sig6(rr.radius)
        );
        for track in &result.pursuer_tracks {
            let _ = writeln!(
                out,
                r#"<polyline class="pursuer" data-id="{}" points="{}" fill="none" stroke="firebrick" stroke-width="{stroke}"/>"#,
                track.id,
                polyline(track.samples.iter().map(|s| s.position))
            );
        }
        let _ = writeln!(
            out,
            r#"<polyline class="evader" points="{}" fill="none" stroke="navy" stroke-width="{stroke}"/>"#,
            polyline(result.trajectory.iter().map(|s| s.position))
        );
    }
    let _ = writeln!(
        out,
        r#"<circle class="target" cx="{}" cy="{}" r="{}" fill="green"/>"#,
        sig6(target.x),
        sig6(-target.y),
        sig6(0.015 * w.max(h))
    );
    out.push_str("</svg>\n");
    out
}

//! Deterministic SVG diagrams of branch points and loops.
//!
//! Byte-identical output for identical input: coordinates are formatted at
//! fixed precision and elements are emitted in a canonical order (branch
//! points in curve order, loops in input order).

use crate::curve::HyperellipticCurve;
use crate::path::LoopPath;
use std::fmt::Write;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Renders the branch points (crosses with dashed clearance discs) and the
/// loops (closed polylines).
pub fn emit_svg(curve: &HyperellipticCurve, loops: &[LoopPath]) -> String {
    // bounds over branch points and loop vertices; y flipped for SVG
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut points: Vec<(f64, f64)> = curve.branch_points().iter().map(|b| (b.re, -b.im)).collect();
    for l in loops {
        points.extend(l.vertices().iter().map(|v| (v.re, -v.im)));
    }
    if points.is_empty() {
        points.push((-1.0, -1.0));
        points.push((1.0, 1.0));
    }
    for (x, y) in &points {
        min_x = min_x.min(*x);
        max_x = max_x.max(*x);
        min_y = min_y.min(*y);
        max_y = max_y.max(*y);
    }
    let pad = 0.1 * ((max_x - min_x).max(max_y - min_y).max(1.0));
    let (x0, y0) = (min_x - pad, min_y - pad);
    let (w, h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
    let stroke = 0.004 * w.max(h);
    let marker = 2.5 * stroke;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        fmt(x0),
        fmt(y0),
        fmt(w),
        fmt(h)
    );

    let clearance = loops
        .iter()
        .map(|l| l.clearance())
        .fold(f64::INFINITY, f64::min);
    let disc = if clearance.is_finite() {
        clearance
    } else {
        0.1 * curve.min_branch_gap()
    };

    for b in curve.branch_points() {
        let (cx, cy) = (b.re, -b.im);
        let _ = writeln!(
            out,
            r##"  <circle cx="{}" cy="{}" r="{}" fill="none" stroke="#999999" stroke-width="{}" stroke-dasharray="{} {}"/>"##,
            fmt(cx),
            fmt(cy),
            fmt(disc),
            fmt(0.5 * stroke),
            fmt(2.0 * stroke),
            fmt(2.0 * stroke)
        );
        let _ = writeln!(
            out,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-width="{}"/>"##,
            fmt(cx - marker),
            fmt(cy - marker),
            fmt(cx + marker),
            fmt(cy + marker),
            fmt(stroke)
        );
        let _ = writeln!(
            out,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-width="{}"/>"##,
            fmt(cx - marker),
            fmt(cy + marker),
            fmt(cx + marker),
            fmt(cy - marker),
            fmt(stroke)
        );
    }

    for (k, l) in loops.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, v) in l.vertices().iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd} {} {} ", fmt(v.re), fmt(-v.im));
        }
        d.push('Z');
        let _ = writeln!(
            out,
            r#"  <path d="{d}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
            fmt(stroke)
        );
        // basepoint dot
        let b = l.base_point();
        let _ = writeln!(
            out,
            r##"  <circle cx="{}" cy="{}" r="{}" fill="{color}"/>"##,
            fmt(b.re),
            fmt(-b.im),
            fmt(1.5 * stroke)
        );
    }

    out.push_str("</svg>\n");
    out
}

//! Static SVG rendering of plan results: waypoints, field-of-view wedges,
//! the relaxed (lower-bounding) path dashed, and the feasible path solid.

use crate::result_doc::{seg_from_doc, ResultDoc};
use rsfov_core::error::Result;
use rsfov_core::geom::{integrate_path, Pose, RsPath};
use std::fmt::Write;

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.scale,
            // SVG y grows downward.
            MARGIN + VIEW - (y - self.y0) * self.scale,
        )
    }
}

fn polyline(out: &mut String, frame: &Frame, pts: &[Pose], style: &str) {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = frame.map(p.x, p.y);
        let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    let _ = writeln!(out, "    <path d=\"{}\" fill=\"none\" {} />", d.trim_end(), style);
}

/// Render a result document to an SVG string.
pub fn render(doc: &ResultDoc) -> Result<String> {
    let xs: Vec<f64> = doc.waypoints.iter().map(|w| w.x).collect();
    let ys: Vec<f64> = doc.waypoints.iter().map(|w| w.y).collect();
    let pad = 2.0 * doc.rho;
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
    );
    let (ymin, ymax) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
    );
    let span = (xmax - xmin).max(ymax - ymin).max(1e-9);
    let frame = Frame {
        x0: xmin,
        y0: ymin,
        scale: VIEW / span,
    };
    let total = VIEW + 2.0 * MARGIN;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"0 0 {total:.0} {total:.0}\" width=\"{total:.0}\" height=\"{total:.0}\">"
    );
    let _ = writeln!(s, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    // Field-of-view wedges.
    let wedge_r = (0.045 * span).max(doc.rho * 0.35);
    let _ = writeln!(s, "  <g id=\"fov-wedges\">");
    for w in &doc.waypoints {
        let (cx, cy) = frame.map(w.x, w.y);
        let r = wedge_r * frame.scale;
        let a0 = w.theta_min;
        let a1 = w.theta_max;
        let (p0x, p0y) = frame.map(w.x + wedge_r * a0.cos(), w.y + wedge_r * a0.sin());
        let (p1x, p1y) = frame.map(w.x + wedge_r * a1.cos(), w.y + wedge_r * a1.sin());
        let large = if a1 - a0 > std::f64::consts::PI { 1 } else { 0 };
        // Counterclockwise in world coordinates is sweep=0 after the y flip.
        let _ = writeln!(
            s,
            "    <path class=\"fov\" d=\"M{cx:.2},{cy:.2} L{p0x:.2},{p0y:.2} \
             A{r:.2},{r:.2} 0 {large} 0 {p1x:.2},{p1y:.2} Z\" \
             fill=\"#ffd480\" fill-opacity=\"0.55\" stroke=\"#c8941a\" stroke-width=\"1\"/>"
        );
    }
    let _ = writeln!(s, "  </g>");

    // Lower-bounding path: dashed, heading-discontinuous at waypoints.
    let _ = writeln!(
        s,
        "  <g id=\"lower-bound\" stroke=\"#1f77b4\" stroke-width=\"2\" \
         stroke-dasharray=\"7,5\">"
    );
    for leg in &doc.lb_legs {
        let from = doc
            .waypoints
            .iter()
            .find(|w| w.id == leg.from)
            .expect("leg endpoints exist");
        let segs = leg
            .segments
            .iter()
            .map(seg_from_doc)
            .collect::<Result<Vec<_>>>()?;
        let path = RsPath::new(segs, doc.rho);
        let pts = integrate_path(&path, Pose::new(from.x, from.y, leg.theta_dep), 24);
        polyline(&mut s, &frame, &pts, "");
    }
    let _ = writeln!(s, "  </g>");

    // Feasible path: solid.
    let _ = writeln!(s, "  <g id=\"feasible\" stroke=\"#d62728\" stroke-width=\"2\">");
    for leg in &doc.legs {
        let from = doc
            .waypoints
            .iter()
            .find(|w| w.id == leg.from)
            .expect("leg endpoints exist");
        let segs = leg
            .segments
            .iter()
            .map(seg_from_doc)
            .collect::<Result<Vec<_>>>()?;
        let path = RsPath::new(segs, doc.rho);
        let pts = integrate_path(&path, Pose::new(from.x, from.y, leg.theta_dep), 24);
        polyline(&mut s, &frame, &pts, "");
    }
    let _ = writeln!(s, "  </g>");

    // Waypoints and ids.
    let _ = writeln!(s, "  <g id=\"waypoints\">");
    for w in &doc.waypoints {
        let (cx, cy) = frame.map(w.x, w.y);
        let _ = writeln!(
            s,
            "    <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"#222\"/>"
        );
        let _ = writeln!(
            s,
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" fill=\"#222\">{}</text>",
            cx + 6.0,
            cy - 6.0,
            w.id
        );
    }
    let _ = writeln!(s, "  </g>");

    // Legend.
    let bound_label = if doc.certified {
        "lower bound (relaxed headings)"
    } else {
        "relaxation value (not certified)"
    };
    let _ = writeln!(s, "  <g id=\"legend\" font-size=\"15\" fill=\"#222\">");
    let _ = writeln!(
        s,
        "    <line x1=\"{0:.0}\" y1=\"24\" x2=\"{1:.0}\" y2=\"24\" stroke=\"#1f77b4\" \
         stroke-width=\"2\" stroke-dasharray=\"7,5\"/>\n    <text x=\"{2:.0}\" y=\"29\">{3}: \
         {4:.2}</text>",
        MARGIN,
        MARGIN + 40.0,
        MARGIN + 48.0,
        bound_label,
        doc.lower_bound
    );
    let _ = writeln!(
        s,
        "    <line x1=\"{0:.0}\" y1=\"46\" x2=\"{1:.0}\" y2=\"46\" stroke=\"#d62728\" \
         stroke-width=\"2\"/>\n    <text x=\"{2:.0}\" y=\"51\">feasible path: {3:.2} \
         (deviation {4:.2}%)</text>",
        MARGIN,
        MARGIN + 40.0,
        MARGIN + 48.0,
        doc.feasible_length,
        doc.deviation_pct
    );
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

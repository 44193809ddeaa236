//! Serialization formats: receiver lists and polynomials as JSON carrying
//! exact rational strings, curve samples as CSV, and an SVG rendering of the
//! sampled curve with receivers and asymptotes.

use serde::{Deserialize, Serialize};

use crate::bifurcation::{asymptotes, AffineLine, CurveArc};
use crate::error::Error;
use crate::geometry::{make_config, RationalPoint, ReceiverConfig, Vec2};
use crate::poly::{BivariatePoly, TermRecord};
use crate::rational::{format_rational, parse_rational};

// ---- receivers file ----

/// On-disk receiver list: coordinate pairs as exact rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceiversFile {
    pub receivers: Vec<[String; 2]>,
}

/// Parses a receivers JSON document into a validated configuration.
pub fn receivers_from_json(text: &str) -> Result<ReceiverConfig, Error> {
    let file: ReceiversFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("receivers JSON: {e}")))?;
    config_from_file(&file)
}

/// Validates a parsed receivers file; exactly three non-collinear receivers.
pub fn config_from_file(file: &ReceiversFile) -> Result<ReceiverConfig, Error> {
    if file.receivers.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "expected exactly 3 receivers, got {}",
            file.receivers.len()
        )));
    }
    let mut pts = Vec::with_capacity(3);
    for pair in &file.receivers {
        pts.push(RationalPoint::new(
            parse_rational(&pair[0])?,
            parse_rational(&pair[1])?,
        ));
    }
    let [m0, m1, m2]: [RationalPoint; 3] = pts.try_into().expect("length checked");
    make_config(m0, m1, m2)
}

/// Serializes a configuration back to the receivers JSON document.
pub fn receivers_to_json(config: &ReceiverConfig) -> String {
    let file = ReceiversFile {
        receivers: config
            .receivers_exact()
            .iter()
            .map(|p| [format_rational(&p.x), format_rational(&p.y)])
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("receivers serialize")
}

// ---- polynomial JSON ----

/// Serializes a polynomial as a JSON array of `{i, j, c}` term records.
pub fn poly_to_json(p: &BivariatePoly) -> String {
    serde_json::to_string_pretty(&p.to_terms()).expect("polynomial serialize")
}

/// Parses a polynomial from its term-record array; round-trips exactly.
pub fn poly_from_json(text: &str) -> Result<BivariatePoly, Error> {
    let records: Vec<TermRecord> = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("polynomial JSON: {e}")))?;
    BivariatePoly::from_terms(&records)
}

// ---- curve sample CSV ----

/// Writes curve arcs as CSV rows `arc_id,theta,x,y`.
///
/// Floats use the shortest representation that parses back to the same value.
pub fn arcs_to_csv(arcs: &[CurveArc]) -> String {
    let mut out = String::from("arc_id,theta,x,y\n");
    for (id, arc) in arcs.iter().enumerate() {
        for s in &arc.samples {
            out.push_str(&format!("{},{},{},{}\n", id, s.theta, s.point.x, s.point.y));
        }
    }
    out
}

// ---- SVG rendering ----

/// Stroke palette cycled over arcs.
const ARC_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Renders arcs, receiver markers, and clipped asymptotes as standalone SVG.
///
/// The viewport is the bounding box of all arc samples (receivers included,
/// so an empty sampling still draws) padded by 10 percent per side. The
/// world y axis points up; coordinates are emitted with y negated.
pub fn render_svg(config: &ReceiverConfig, arcs: &[CurveArc]) -> String {
    let mut pts: Vec<Vec2> = config.receivers().to_vec();
    for arc in arcs {
        pts.extend(arc.samples.iter().map(|s| s.point));
    }
    let (mut min, mut max) = (pts[0], pts[0]);
    for p in &pts {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let w = (max.x - min.x).max(1e-9);
    let h = (max.y - min.y).max(1e-9);
    let (x0, y0, x1, y1) = (min.x - 0.1 * w, min.y - 0.1 * h, max.x + 0.1 * w, max.y + 0.1 * h);
    let (bw, bh) = (x1 - x0, y1 - y0);
    let sw = 0.004 * bw.max(bh);
    let rr = 0.012 * bw.max(bh);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
        x0,
        -y1,
        bw,
        bh,
        (800.0 * bh / bw).round()
    );
    for line in asymptotes(config) {
        if let Some((p, q)) = clip_line_to_box(&line, x0, y0, x1, y1) {
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" \
                 stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>\n",
                p.x,
                -p.y,
                q.x,
                -q.y,
                sw,
                3.0 * sw,
                3.0 * sw
            ));
        }
    }
    for (k, arc) in arcs.iter().enumerate() {
        if arc.samples.len() < 2 {
            continue;
        }
        let coords: Vec<String> = arc
            .samples
            .iter()
            .map(|s| format!("{},{}", s.point.x, -s.point.y))
            .collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
            ARC_COLORS[k % ARC_COLORS.len()],
            1.5 * sw,
            coords.join(" ")
        ));
    }
    for m in config.receivers() {
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#000000\"/>\n",
            m.x, -m.y, rr
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Clips an infinite line to an axis-aligned box; `None` when it misses.
fn clip_line_to_box(
    line: &AffineLine,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
) -> Option<(Vec2, Vec2)> {
    let eps = 1e-9 * (x1 - x0).max(y1 - y0);
    let mut hits: Vec<Vec2> = Vec::new();
    if line.b != 0.0 {
        for x in [x0, x1] {
            let y = -(line.a * x + line.c) / line.b;
            if (y0 - eps..=y1 + eps).contains(&y) {
                hits.push(Vec2::new(x, y));
            }
        }
    }
    if line.a != 0.0 {
        for y in [y0, y1] {
            let x = -(line.b * y + line.c) / line.a;
            if (x0 - eps..=x1 + eps).contains(&x) {
                hits.push(Vec2::new(x, y));
            }
        }
    }
    // The farthest pair absorbs duplicate corner hits.
    let mut best: Option<(Vec2, Vec2, f64)> = None;
    for i in 0..hits.len() {
        for j in i + 1..hits.len() {
            let d = hits[i].dist(hits[j]);
            if best.as_ref().is_none_or(|b| d > b.2) {
                best = Some((hits[i], hits[j], d));
            }
        }
    }
    match best {
        Some((p, q, d)) if d > eps => Some((p, q)),
        _ => None,
    }
}

// ---- tests ----

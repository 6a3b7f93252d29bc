//! Graphviz DOT and standalone SVG renderings.

use std::fmt::Write;

use num_complex::Complex64;

use crate::balance::OrientedMap;
use crate::cubic::{CubicModel, Traced};

fn label_of(labels: Option<&[String]>, v: usize) -> String {
    labels.and_then(|l| l.get(v).cloned()).unwrap_or_else(|| v.to_string())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A directed multigraph in DOT, one edge per forward dart, tail to head.
/// Corners are drawn as filled circles.
pub fn to_dot(om: &OrientedMap, labels: Option<&[String]>) -> String {
    let map = &om.map;
    let mut s = String::from("digraph balanced {\n  node [shape=circle];\n");
    for v in 0..map.vertex_count() {
        let style = if map.degree(v) >= 3 { ", style=filled, fillcolor=lightgray" } else { "" };
        writeln!(s, "  v{v} [label=\"{}\"{style}];", label_of(labels, v).replace('"', "\\\"")).unwrap();
    }
    for d in 0..map.dart_count() {
        if om.is_forward(d) {
            let (u, w) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
            writeln!(s, "  v{u} -> v{w} [label=\"e{}\"];", map.edge_of(d)).unwrap();
        }
    }
    s.push_str("}\n");
    s
}

const SIZE: f64 = 480.0;

fn svg_header(s: &mut String) {
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    s.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n",
    );
    writeln!(s, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>").unwrap();
}

fn svg_vertex(s: &mut String, x: f64, y: f64, text: &str, corner: bool) {
    let r = if corner { 6.0 } else { 4.0 };
    writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"black\"/>").unwrap();
    writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" font-family=\"sans-serif\">{}</text>", x + 8.0, y - 8.0, escape(text))
        .unwrap();
}

/// Vertices on a circle and each directed edge as a curve, bent apart when parallel.
pub fn to_svg_circular(om: &OrientedMap, labels: Option<&[String]>) -> String {
    let map = &om.map;
    let n = map.vertex_count().max(1);
    let center = SIZE / 2.0;
    let radius = SIZE * 0.38;
    let pos = |v: usize| {
        let t = std::f64::consts::TAU * v as f64 / n as f64 - std::f64::consts::FRAC_PI_2;
        (center + radius * t.cos(), center + radius * t.sin())
    };
    let mut s = String::new();
    svg_header(&mut s);
    let mut seen = std::collections::HashMap::<(usize, usize), usize>::new();
    for d in 0..map.dart_count() {
        if !om.is_forward(d) {
            continue;
        }
        let (u, w) = (map.vertex_of(d), map.vertex_of(map.alpha(d)));
        let key = (u.min(w), u.max(w));
        let k = *seen.entry(key).and_modify(|c| *c += 1).or_insert(0);
        let ((x1, y1), (x2, y2)) = (pos(u), pos(w));
        let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt().max(1.0);
        let sign = if u <= w { 1.0 } else { -1.0 };
        let bend = sign * 28.0 * (k as f64 + 0.5);
        let (cx, cy) = (mx - dy / len * bend, my + dx / len * bend);
        if u == w {
            writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"14\" fill=\"none\" stroke=\"black\"/>", x1, y1 - 14.0).unwrap();
        } else {
            writeln!(
                s,
                "<path d=\"M{x1:.2},{y1:.2} Q{cx:.2},{cy:.2} {x2:.2},{y2:.2}\" fill=\"none\" stroke=\"black\" marker-end=\"url(#arrow)\"/>"
            )
            .unwrap();
        }
    }
    for v in 0..map.vertex_count() {
        let (x, y) = pos(v);
        svg_vertex(&mut s, x, y, &label_of(labels, v), map.degree(v) >= 3);
    }
    s.push_str("</svg>\n");
    s
}

/// A cubic model with its vertices labeled by critical point.
pub fn model_to_svg(model: &CubicModel) -> String {
    let labels: Vec<String> = model.labels.iter().map(|l| l.to_string()).collect();
    to_svg_circular(&model.om, Some(&labels))
}

/// The traced zero set in the plane, with the lower half by conjugation and
/// the real axis drawn across the box.
pub fn traced_to_svg(traced: &Traced, critical: &[(String, f64)]) -> String {
    let extent = critical.iter().map(|(_, x)| x.abs()).fold(1.0, f64::max) * 1.5;
    let to_px = |z: Complex64| (SIZE / 2.0 + z.re / extent * SIZE / 2.0, SIZE / 2.0 - z.im / extent * SIZE / 2.0);
    let inside = |z: Complex64| z.re.abs() <= extent && z.im.abs() <= extent && z.re.is_finite() && z.im.is_finite();
    let mut s = String::new();
    svg_header(&mut s);
    writeln!(s, "<line x1=\"0\" y1=\"{0}\" x2=\"{SIZE}\" y2=\"{0}\" stroke=\"black\"/>", SIZE / 2.0).unwrap();
    for seg in &traced.segments {
        for conj in [false, true] {
            let (p, q) = if conj { (seg[0].conj(), seg[1].conj()) } else { (seg[0], seg[1]) };
            if inside(p) && inside(q) {
                let ((x1, y1), (x2, y2)) = (to_px(p), to_px(q));
                writeln!(s, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"steelblue\"/>").unwrap();
            }
        }
    }
    for (name, x) in critical {
        let (px, py) = to_px(Complex64::new(*x, 0.0));
        svg_vertex(&mut s, px, py, name, true);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_map::examples;

    #[test]
    fn dot_lists_every_edge_once() {
        let om = OrientedMap::from_map(examples::cycle(3)).unwrap();
        let dot = to_dot(&om, None);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(to_svg_circular(&om, None).starts_with("<svg"));
    }
}

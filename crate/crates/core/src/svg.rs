//! Minimal SVG plots: closed or open polylines, point markers and a legend.
//! Coordinates are written with 9 significant digits so output is stable.

use std::fmt::Write;

use crate::geom::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Path { points: Vec<Vec2>, closed: bool },
    Markers(Vec<Vec2>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub label: String,
    pub color: String,
    pub shape: Shape,
    pub dashed: bool,
}

impl Layer {
    pub fn path(label: &str, color: &str, points: Vec<Vec2>) -> Layer {
        Layer {
            label: label.into(),
            color: color.into(),
            shape: Shape::Path { points, closed: true },
            dashed: false,
        }
    }

    pub fn markers(label: &str, color: &str, points: Vec<Vec2>) -> Layer {
        Layer {
            label: label.into(),
            color: color.into(),
            shape: Shape::Markers(points),
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Layer {
        self.dashed = true;
        self
    }

    /// A closed path, or a single marker when the points collapse to one
    /// location relative to `scale`.
    pub fn curve_or_point(label: &str, color: &str, points: Vec<Vec2>, scale: f64) -> Layer {
        if crate::geom::spread(&points) <= 1e-9 * scale {
            let c = points[0];
            Layer::markers(label, color, vec![c])
        } else {
            Layer::path(label, color, points)
        }
    }

    fn points(&self) -> &[Vec2] {
        match &self.shape {
            Shape::Path { points, .. } | Shape::Markers(points) => points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plot {
    pub title: String,
    pub layers: Vec<Layer>,
}

/// 9 significant digits, shortest form.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{r}")
}

impl Plot {
    pub fn new(title: &str) -> Plot {
        Plot {
            title: title.into(),
            layers: Vec::new(),
        }
    }

    pub fn layer(mut self, layer: Layer) -> Plot {
        self.layers.push(layer);
        self
    }

    pub fn render(&self) -> String {
        const SIZE: f64 = 600.0;
        const MARGIN: f64 = 30.0;
        let all: Vec<Vec2> = self.layers.iter().flat_map(|l| l.points().iter().copied()).collect();
        let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &all {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if all.is_empty() {
            lo = Vec2::new(-1.0, -1.0);
            hi = Vec2::new(1.0, 1.0);
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let s = (SIZE - 2.0 * MARGIN) / extent;
        // y grows downward in SVG
        let map = |p: Vec2| Vec2::new(MARGIN + (p.x - lo.x) * s, SIZE - MARGIN - (p.y - lo.y) * s);
        let legend_h = 18.0 * self.layers.len() as f64 + 10.0;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = num(SIZE + 200.0),
            h = num(SIZE.max(legend_h)),
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, num(SIZE + 200.0), num(SIZE));
        for layer in &self.layers {
            let dash = if layer.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(out, r#"<g id="{}">"#, escape(&id(&layer.label)));
            match &layer.shape {
                Shape::Path { points, closed } if !points.is_empty() => {
                    let mut d = String::new();
                    for (k, p) in points.iter().enumerate() {
                        let q = map(*p);
                        let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, num(q.x), num(q.y));
                    }
                    if *closed {
                        d.push('Z');
                    }
                    let _ = writeln!(
                        out,
                        r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                        d.trim_end(),
                        layer.color
                    );
                }
                Shape::Path { .. } => {}
                Shape::Markers(points) => {
                    for p in points {
                        let q = map(*p);
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{}" cy="{}" r="3" fill="{}"/>"#,
                            num(q.x),
                            num(q.y),
                            layer.color
                        );
                    }
                }
            }
            let _ = writeln!(out, "</g>");
        }
        let _ = writeln!(out, r#"<g id="legend" font-family="sans-serif" font-size="13">"#);
        for (k, layer) in self.layers.iter().enumerate() {
            let y = 20.0 + 18.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                num(SIZE + 10.0),
                num(y - 10.0),
                layer.color,
                num(SIZE + 28.0),
                num(y),
                escape(&layer.label)
            );
        }
        let _ = writeln!(out, "</g>");
        out.push_str("</svg>\n");
        out
    }
}

fn id(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(num(1.0 / 3.0), "0.333333333");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-123456789012.0), "-123456789000");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn renders_layers_and_legend() {
        let sq = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let svg = Plot::new("a & b")
            .layer(Layer::path("γ", "#1f77b4", sq.clone()))
            .layer(Layer::curve_or_point("WC", "#d62728", vec![Vec2::new(0.5, 0.5); 4], 1.0))
            .render();
        assert!(svg.contains("<path d=\"M30 570 L570 570"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("a &amp; b"));
        assert!(svg.contains(">WC</text>"));
        assert_eq!(svg.matches("<g").count(), svg.matches("</g>").count());
    }
}

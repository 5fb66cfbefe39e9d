#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use normplane::curve::{CurveDoc, ExplicitPiece};
use normplane::{builtin_ball, curve_from_explicit, curve_from_radius, AdmissibleCurve, BuiltinParams, RadiusFunction, UnitBall, Vec2};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn ball(name: &str) -> Arc<UnitBall> {
    Arc::new(builtin_ball(name, &BuiltinParams::default()).unwrap())
}

pub fn curve(ball_name: &str, radius: &[&str], base: Vec2) -> AdmissibleCurve {
    curve_from_radius(ball(ball_name), RadiusFunction::parse(radius).unwrap(), base).unwrap()
}

pub fn load_curve(name: &str) -> AdmissibleCurve {
    let text = std::fs::read_to_string(data(name)).unwrap();
    let doc: CurveDoc = serde_json::from_str(&text).unwrap();
    doc.build(&Default::default()).unwrap()
}

pub const EX22_RADIUS: [&str; 4] = [
    "1",
    "16/sqrt((15*cos(pi/2*t)^2+1)^3)",
    "4",
    "16/sqrt((15*sin(pi/2*t)^2+1)^3)",
];

/// The worked example on the mixed ball, from its curvature radius.
pub fn example22() -> AdmissibleCurve {
    curve("mixed_example21", &EX22_RADIUS, Vec2::new(2.0, 1.0))
}

pub const EX22_EXPLICIT: [[&str; 2]; 4] = [
    ["2-t", "1+t"],
    ["16*cos(pi/2*t)/sqrt(15*cos(pi/2*t)^2+1)+1", "sin(pi/2*t)/sqrt(15*cos(pi/2*t)^2+1)+1"],
    ["-11+4*t", "9-4*t"],
    ["cos(pi/2*t)/sqrt(15*sin(pi/2*t)^2+1)+1", "16*sin(pi/2*t)/sqrt(15*sin(pi/2*t)^2+1)+1"],
];

pub fn example22_explicit_pieces() -> Vec<ExplicitPiece> {
    EX22_EXPLICIT
        .iter()
        .enumerate()
        .map(|(i, [x, y])| ExplicitPiece {
            x: normplane::expr::parse(x).unwrap(),
            y: normplane::expr::parse(y).unwrap(),
            t0: i as f64,
            t1: i as f64 + 1.0,
        })
        .collect()
}

pub fn example22_explicit() -> AdmissibleCurve {
    curve_from_explicit(ball("mixed_example21"), &example22_explicit_pieces(), 1e-9).unwrap()
}

pub fn rectangle(a: f64, b: f64, base: Vec2) -> AdmissibleCurve {
    let (a, b) = (a.to_string(), b.to_string());
    curve("square", &[&b, &a, &b, &a], base)
}

pub fn rel_close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

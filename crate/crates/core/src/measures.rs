//! Dual length, mixed and signed areas, mean width and the width/symmetry
//! predicates of admissible curves.

use serde::Serialize;
use thiserror::Error;

use crate::curve::AdmissibleCurve;
use crate::geom::Vec2;
use crate::quad::{self, QuadError, Span};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("MismatchedBalls: curves live on different unit balls")]
    MismatchedBalls,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Default relative tolerance of the width and symmetry predicates.
pub const PREDICATE_TOL: f64 = 1e-8;

// Rounding floor for predicates evaluated on (nearly) point curves.
const ROUNDING: f64 = 1e3 * f64::EPSILON;

/// `L*(γ) = ∮ r [u, u'] dt`.
pub fn dual_length(curve: &AdmissibleCurve) -> Result<f64, QuadError> {
    let ball = curve.ball();
    let floor = curve.radius_floor() * ball.diameter() * curve.max_speed();
    quad::integrate_spans_floor(&ball.spans(), &curve.config().quad, floor, |i, t| {
        let p = ball.piece(i);
        curve.radius().value(i, t) * p.u(t).cross(p.u_prime(t))
    })
}

/// `∮ |r [u, u']| dt`, the natural scale of the dual length. The integrand
/// has kinks where `r` changes sign, so a fixed rule per piece is used; a
/// scale needs no more accuracy.
pub fn dual_length_scale(curve: &AdmissibleCurve) -> f64 {
    let ball = curve.ball();
    let rule = curve.config().quad.rule();
    ball.spans()
        .iter()
        .map(|s| {
            let p = ball.piece(s.piece);
            rule.integrate(s.a, s.b, |t| curve.radius().value(s.piece, t) * p.u(t).cross(p.u_prime(t)))
                .1
        })
        .sum()
}

/// `A(γ₁, γ₂) = ½ ∮ [γ₁, γ₂'] dt`.
pub fn mixed_area(c1: &AdmissibleCurve, c2: &AdmissibleCurve) -> Result<f64, MeasureError> {
    if !c1.same_ball(c2) {
        return Err(MeasureError::MismatchedBalls);
    }
    let spans = panel_spans(c1);
    // [γ₁, γ₂'] carries the rounding of both factors.
    let r1 = c1.radius_floor() / (64.0 * f64::EPSILON);
    let r2 = c2.radius_floor() / (64.0 * f64::EPSILON);
    let floor = c1.max_speed()
        * (c1.magnitude() * c2.radius_floor() + 64.0 * f64::EPSILON * c1.magnitude() * r2.max(r1));
    let v = quad::integrate_spans_floor(&spans, &c1.config().quad, floor, |i, t| {
        c1.gamma_on(i, t).cross(c2.velocity_on(i, t))
    })?;
    Ok(0.5 * v)
}

// The first curve's cumulative panels, so γ₁ is evaluated inside a panel
// whose quadrature already converged.
fn panel_spans(c: &AdmissibleCurve) -> Vec<Span> {
    let ball = c.ball();
    let mut spans = Vec::new();
    for (i, p) in ball.pieces().iter().enumerate() {
        let mut cuts: Vec<f64> = c
            .panel_starts(i)
            .into_iter()
            .filter(|&a| a > p.t0() && a < p.t1())
            .collect();
        cuts.insert(0, p.t0());
        cuts.push(p.t1());
        spans.extend(cuts.windows(2).map(|w| Span { piece: i, a: w[0], b: w[1] }));
    }
    spans
}

/// `A(γ) = A(γ, γ)`; the enclosed area for convex curves.
pub fn signed_area(curve: &AdmissibleCurve) -> Result<f64, QuadError> {
    mixed_area(curve, curve).map_err(|e| match e {
        MeasureError::Quadrature(q) => q,
        MeasureError::MismatchedBalls => unreachable!("a curve shares its own ball"),
    })
}

/// `w_γ = L*(γ) / A(U)`.
pub fn mean_width(curve: &AdmissibleCurve) -> Result<f64, QuadError> {
    Ok(dual_length(curve)? / curve.ball().area())
}

/// `[γ(t), v(t)]`, the support value in the dual direction at `t`.
pub fn support_value(curve: &AdmissibleCurve, t: f64) -> f64 {
    let (i, s) = curve.ball().locate(t);
    support_on(curve, i, s, Vec2::ZERO)
}

fn support_on(curve: &AdmissibleCurve, piece: usize, t: f64, origin: Vec2) -> f64 {
    (curve.gamma_on(piece, t) - origin).cross(curve.ball().dual_on(piece, t))
}

/// A sample of `t ↦ [γ,v](t) + [γ,v](t+T)` over the first half period.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthProfile {
    pub samples: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
    /// Magnitude of the summed support terms (after re-centering).
    pub scale: f64,
    /// Magnitude before re-centering; sets the rounding floor.
    pub raw_scale: f64,
    /// Largest `|v|` met.
    pub dual_norm: f64,
}

pub fn width_profile(curve: &AdmissibleCurve) -> WidthProfile {
    let ball = curve.ball();
    let n = ball.num_pieces() / 2;
    let params: Vec<(usize, f64)> = curve.sample_params().into_iter().filter(|&(i, _)| i < n).collect();
    let center = centroid(curve);
    let mut samples = Vec::with_capacity(params.len());
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut scale, mut raw_scale, mut dual_norm) = (0.0f64, 0.0f64, 0.0f64);
    for (i, t) in params {
        let j = ball.antipode(i);
        let s = t + ball.antipode_shift(i);
        let a = support_on(curve, i, t, center);
        let b = support_on(curve, j, s, center);
        let raw = support_on(curve, i, t, Vec2::ZERO).abs() + support_on(curve, j, s, Vec2::ZERO).abs();
        let h = a + b;
        samples.push((t, h));
        min = min.min(h);
        max = max.max(h);
        scale = scale.max(a.abs() + b.abs());
        raw_scale = raw_scale.max(raw);
        dual_norm = dual_norm.max(ball.dual_on(i, t).norm());
    }
    WidthProfile {
        samples,
        min,
        max,
        scale,
        raw_scale,
        dual_norm,
    }
}

fn centroid(curve: &AdmissibleCurve) -> Vec2 {
    let params = curve.sample_params();
    let mut c = Vec2::ZERO;
    for &(i, t) in &params {
        c += curve.gamma_on(i, t);
    }
    c * (1.0 / params.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WidthVerdict {
    Constant { width: f64 },
    NotConstant { t: f64, spread: f64 },
}

impl WidthVerdict {
    pub fn is_constant(&self) -> bool {
        matches!(self, WidthVerdict::Constant { .. })
    }
}

/// Constant width test: the profile must vary by less than `tol` times the
/// size of the support terms.
pub fn is_constant_width(curve: &AdmissibleCurve, tol: f64) -> WidthVerdict {
    let p = width_profile(curve);
    let spread = p.max - p.min;
    let noise = ROUNDING * p.raw_scale + 2.0 * curve.position_noise() * p.dual_norm;
    if spread <= tol * p.scale + noise {
        WidthVerdict::Constant {
            width: 0.5 * (p.max + p.min),
        }
    } else {
        let mid = 0.5 * (p.max + p.min);
        let (t, _) = p
            .samples
            .iter()
            .copied()
            .max_by(|a, b| (a.1 - mid).abs().total_cmp(&(b.1 - mid).abs()))
            .unwrap();
        WidthVerdict::NotConstant { t, spread }
    }
}

/// Symmetry defect: `max_t |γ(t) + γ(t+T) - 2c|` where `c` is the mean of
/// the Wigner caustic samples (the candidate center). On segment pieces
/// only the vertices are compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryDefect {
    pub defect: f64,
    pub center: Vec2,
    pub t: f64,
}

pub fn symmetry_defect(curve: &AdmissibleCurve) -> SymmetryDefect {
    let ball = curve.ball();
    let n = ball.num_pieces() / 2;
    // Along a segment only the endpoints are geometric: the speed there is
    // an arbitrary reparameterization.
    let mids: Vec<(f64, Vec2)> = curve
        .sample_params()
        .into_iter()
        .filter(|&(i, t)| {
            let p = ball.piece(i);
            i < n && (!p.is_segment() || t == p.t0() || t == p.t1())
        })
        .map(|(i, t)| {
            let j = ball.antipode(i);
            let s = t + ball.antipode_shift(i);
            (t, curve.gamma_on(i, t) + curve.gamma_on(j, s))
        })
        .collect();
    let mut c = Vec2::ZERO;
    for (_, m) in &mids {
        c += *m;
    }
    let c = c * (1.0 / mids.len() as f64);
    let (t, defect) = mids
        .iter()
        .map(|(t, m)| (*t, (*m - c).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    SymmetryDefect {
        defect,
        center: c * 0.5,
        t,
    }
}

/// True when `γ` is centrally symmetric about some point.
pub fn is_symmetric(curve: &AdmissibleCurve, tol: f64) -> bool {
    let d = symmetry_defect(curve);
    let magnitude = curve
        .sample_params()
        .into_iter()
        .map(|(i, t)| curve.gamma_on(i, t).norm())
        .fold(0.0, f64::max);
    d.defect <= tol * curve.diameter() + ROUNDING * magnitude + 2.0 * curve.position_noise()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub dual_length: f64,
    pub signed_area: f64,
    pub ball_area: f64,
    pub mean_width: f64,
    pub width: WidthVerdict,
    pub width_profile_min: f64,
    pub width_profile_max: f64,
    pub is_symmetric: bool,
    pub symmetry_center: Vec2,
    pub is_constant_width: bool,
    pub predicate_tol: f64,
}

pub fn measure_report(curve: &AdmissibleCurve) -> Result<MeasureReport, QuadError> {
    let l = dual_length(curve)?;
    let a_u = curve.ball().area();
    let width = is_constant_width(curve, PREDICATE_TOL);
    let profile = width_profile(curve);
    Ok(MeasureReport {
        dual_length: l,
        signed_area: signed_area(curve)?,
        ball_area: a_u,
        mean_width: l / a_u,
        width,
        width_profile_min: profile.min,
        width_profile_max: profile.max,
        is_symmetric: is_symmetric(curve, PREDICATE_TOL),
        symmetry_center: symmetry_defect(curve).center,
        is_constant_width: width.is_constant(),
        predicate_tol: PREDICATE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{builtin_ball, BuiltinParams, UnitBall};
    use crate::curve::{curve_from_radius, RadiusFunction};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn ball(name: &str) -> Arc<UnitBall> {
        Arc::new(builtin_ball(name, &BuiltinParams::default()).unwrap())
    }

    fn rectangle(a: f64, b: f64) -> AdmissibleCurve {
        // square ball sides: right, top, left, bottom
        let r = RadiusFunction::new(vec![
            crate::expr::Expr::Num(b),
            crate::expr::Expr::Num(a),
            crate::expr::Expr::Num(b),
            crate::expr::Expr::Num(a),
        ]);
        curve_from_radius(ball("square"), r, Vec2::new(a, -b)).unwrap()
    }

    #[test]
    fn circle_measures() {
        let r = 1.7;
        let c = curve_from_radius(ball("euclidean"), RadiusFunction::constant(4, r), Vec2::new(r, 0.0)).unwrap();
        assert!((dual_length(&c).unwrap() - 2.0 * PI * r).abs() < 1e-10);
        assert!((signed_area(&c).unwrap() - PI * r * r).abs() < 1e-10);
        assert!((mean_width(&c).unwrap() - 2.0 * r).abs() < 1e-10);
        for t in [0.1, 1.3, 2.9] {
            assert!((support_value(&c, t) - r).abs() < 1e-12);
        }
        match is_constant_width(&c, PREDICATE_TOL) {
            WidthVerdict::Constant { width } => assert!((width - 2.0 * r).abs() < 1e-10),
            v => panic!("{v:?}"),
        }
        assert!(is_symmetric(&c, PREDICATE_TOL));
    }

    #[test]
    fn rectangle_measures() {
        let (a, b) = (2.0, 0.5);
        let c = rectangle(a, b);
        assert!((dual_length(&c).unwrap() - 4.0 * (a + b)).abs() < 1e-12);
        assert!((signed_area(&c).unwrap() - 4.0 * a * b).abs() < 1e-12);
        assert!((mean_width(&c).unwrap() - (a + b)).abs() < 1e-12);
        assert!(!is_constant_width(&c, PREDICATE_TOL).is_constant());
        let p = width_profile(&c);
        assert!((p.min - 2.0 * a).abs() < 1e-12 || (p.min - 2.0 * b).abs() < 1e-12);
        assert!((p.max - p.min - 2.0 * (a - b).abs()).abs() < 1e-12);
        assert!(is_symmetric(&c, PREDICATE_TOL));
        assert!(is_symmetric(&c.translated(Vec2::new(5.0, -3.0)), PREDICATE_TOL));
        // square ball, γ = u, right side
        let u = rectangle(1.0, 1.0);
        assert!((support_value(&u, 0.4) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn support_values_pair_up_antipodally() {
        let b = ball("mixed_example21");
        let c = curve_from_radius(b, RadiusFunction::constant(4, 2.0), Vec2::new(2.0, 0.0)).unwrap();
        for t in [0.2, 0.7, 1.4] {
            assert!((support_value(&c, t) - support_value(&c, t + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_balls() {
        let a = rectangle(1.0, 2.0);
        let b = curve_from_radius(ball("euclidean"), RadiusFunction::constant(4, 1.0), Vec2::ZERO).unwrap();
        assert_eq!(mixed_area(&a, &b), Err(MeasureError::MismatchedBalls));
    }

    #[test]
    fn dual_length_is_twice_mixed_area_with_ball() {
        let b = ball("mixed_example21");
        let r = RadiusFunction::parse(&["1+t", "2+sin(pi*t)", "1+(t-2)", "2+sin(pi*t)"]).unwrap();
        let c = curve_from_radius(b.clone(), r, Vec2::new(0.3, 0.1)).unwrap();
        let u = curve_from_radius(b.clone(), RadiusFunction::constant(4, 1.0), b.u(0.0)).unwrap();
        let l = dual_length(&c).unwrap();
        let m = mixed_area(&u, &c).unwrap();
        assert!((l - 2.0 * m).abs() < 1e-9 * l.abs());
        let m2 = mixed_area(&c, &u).unwrap();
        assert!((m - m2).abs() < 1e-9 * m.abs());
    }
}

//! Wigner caustic, constant-width measure set and the decomposition
//! `γ = WC + CWMS + (w/2) u`.

use serde::Serialize;
use thiserror::Error;

use crate::curve::{curve_from_radius_with, AdmissibleCurve, CurveConfig, CurveError, RadiusFunction};
use crate::expr::{self, Expr};
use crate::geom::Vec2;
use crate::measures;
use crate::quad::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    #[error("DecompositionResidual: reconstruction misses by {residual:e} (tolerance {tol:e}) at t = {t}")]
    Residual { residual: f64, tol: f64, t: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl DecompError {
    pub fn kind(&self) -> &'static str {
        match self {
            DecompError::Residual { .. } => "DecompositionResidual",
            DecompError::Curve(e) => e.kind(),
            DecompError::Quadrature(_) => "QuadratureError",
        }
    }
}

// `r_j(t + shift)` for the antipodal piece of every piece.
fn antipodal_radius(curve: &AdmissibleCurve) -> Vec<Expr> {
    let ball = curve.ball();
    (0..ball.num_pieces())
        .map(|i| curve.radius().exprs()[ball.antipode(i)].shifted(ball.antipode_shift(i)))
        .collect()
}

// Radius rounding of `½(r(t) ± r(t+T) - w)`.
fn combined_config(curve: &AdmissibleCurve, w: f64) -> CurveConfig {
    CurveConfig {
        radius_noise: curve.radius_floor() + 64.0 * f64::EPSILON * w.abs(),
        ..*curve.config()
    }
}

fn opposite_basepoint(curve: &AdmissibleCurve) -> Vec2 {
    let ball = curve.ball();
    let n = ball.num_pieces() / 2;
    curve.gamma_on(n, ball.piece(n).t0())
}

/// `WC(t) = ½(γ(t) + γ(t+T))`, radius `½(r(t) - r(t+T))`.
pub fn wigner_caustic(curve: &AdmissibleCurve) -> Result<AdmissibleCurve, CurveError> {
    let radius = curve
        .radius()
        .exprs()
        .iter()
        .zip(antipodal_radius(curve))
        .map(|(r, s)| expr::mul(Expr::Num(0.5), expr::sub(r.clone(), s)))
        .collect();
    let base = (curve.basepoint() + opposite_basepoint(curve)) * 0.5;
    let config = combined_config(curve, 0.0);
    curve_from_radius_with(curve.ball().clone(), RadiusFunction::new(radius), base, &config)
}

/// `CWMS(t) = ½(γ(t) - γ(t+T) - w u(t))`, radius `½(r(t) + r(t+T) - w)`.
pub fn cwms(curve: &AdmissibleCurve) -> Result<AdmissibleCurve, DecompError> {
    let w = measures::mean_width(curve)?;
    Ok(cwms_with_width(curve, w)?)
}

fn cwms_with_width(curve: &AdmissibleCurve, w: f64) -> Result<AdmissibleCurve, CurveError> {
    let ball = curve.ball();
    let radius = curve
        .radius()
        .exprs()
        .iter()
        .zip(antipodal_radius(curve))
        .map(|(r, s)| expr::mul(Expr::Num(0.5), expr::sub(expr::add(r.clone(), s), Expr::Num(w))))
        .collect();
    let u0 = ball.piece(0).u(ball.t_start());
    let base = (curve.basepoint() - opposite_basepoint(curve) - u0 * w) * 0.5;
    curve_from_radius_with(ball.clone(), RadiusFunction::new(radius), base, &combined_config(curve, w))
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub wc: AdmissibleCurve,
    pub cwms: AdmissibleCurve,
    pub mean_width: f64,
    pub residual: Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max: f64,
    pub tol: f64,
    pub t: f64,
}

/// `max_t |γ - WC - CWMS - (w/2) u|` over the check nodes of every piece.
pub fn reconstruction_residual(
    curve: &AdmissibleCurve,
    wc: &AdmissibleCurve,
    cwms: &AdmissibleCurve,
    w: f64,
) -> Residual {
    let ball = curve.ball();
    let (mut max, mut at, mut magnitude) = (0.0f64, ball.t_start(), 0.0f64);
    for (i, t) in curve.sample_params() {
        let g = curve.gamma_on(i, t);
        let d = (g - wc.gamma_on(i, t) - cwms.gamma_on(i, t) - ball.piece(i).u(t) * (0.5 * w)).norm();
        magnitude = magnitude.max(g.norm());
        if d > max {
            max = d;
            at = t;
        }
    }
    Residual {
        max,
        tol: curve.tol_close().max(1e3 * f64::EPSILON * magnitude),
        t: at,
    }
}

pub fn decompose(curve: &AdmissibleCurve) -> Result<Decomposition, DecompError> {
    let w = measures::mean_width(curve)?;
    let wc = wigner_caustic(curve)?;
    let cw = cwms_with_width(curve, w)?;
    let residual = reconstruction_residual(curve, &wc, &cw, w);
    if !(residual.max <= residual.tol) {
        return Err(DecompError::Residual {
            residual: residual.max,
            tol: residual.tol,
            t: residual.t,
        });
    }
    Ok(Decomposition {
        wc,
        cwms: cw,
        mean_width: w,
        residual,
    })
}

/// Signed area of the Wigner caustic counted once around: the caustic
/// traverses its image twice over a full period, so the full-period area
/// is halved.
pub fn wc_area_once(wc: &AdmissibleCurve) -> Result<f64, QuadError> {
    Ok(0.5 * measures::signed_area(wc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{builtin_ball, BuiltinParams, UnitBall};
    use crate::measures::{is_constant_width, is_symmetric, WidthVerdict, PREDICATE_TOL};
    use std::sync::Arc;

    fn ball(name: &str) -> Arc<UnitBall> {
        Arc::new(builtin_ball(name, &BuiltinParams::default()).unwrap())
    }

    fn curve(name: &str, texts: &[&str], base: Vec2) -> AdmissibleCurve {
        crate::curve::curve_from_radius(ball(name), RadiusFunction::parse(texts).unwrap(), base).unwrap()
    }

    #[test]
    fn rectangle_decomposition() {
        let (a, b) = (3.0, 1.0);
        let bs = b.to_string();
        let as_ = a.to_string();
        let g = curve("square", &[&bs, &as_, &bs, &as_], Vec2::new(a, -b));
        let d = decompose(&g).unwrap();
        assert!((d.mean_width - (a + b)).abs() < 1e-12);
        // symmetric: WC collapses to the center
        assert!(d.wc.radius().exprs().iter().all(|e| e.value(0.0) == 0.0));
        assert!(d.wc.basepoint().norm() < 1e-14);
        let expect = [(a - b) / 2.0, -(a - b) / 2.0, (a - b) / 2.0, -(a - b) / 2.0];
        for (i, r) in expect.iter().enumerate() {
            assert!((d.cwms.radius().value(i, i as f64 + 0.5) + r).abs() < 1e-12 || (d.cwms.radius().value(i, i as f64 + 0.5) - r).abs() < 1e-12);
        }
        let a_cwms = measures::signed_area(&d.cwms).unwrap();
        assert!((a_cwms + (a - b) * (a - b)).abs() < 1e-12);
        assert!(d.residual.max < 1e-12);
    }

    #[test]
    fn circle_has_trivial_parts() {
        let g = curve("euclidean", &["2", "2", "2", "2"], Vec2::new(2.0, 0.0));
        let d = decompose(&g).unwrap();
        assert!((d.mean_width - 4.0).abs() < 1e-10);
        assert!(d.cwms.diameter() < 1e-9);
        assert!(d.wc.diameter() < 1e-9);
    }

    #[test]
    fn wc_is_constant_width_and_cwms_symmetric() {
        let g = curve(
            "mixed_example21",
            &[
                "1",
                "16/sqrt((15*cos(pi/2*t)^2+1)^3)",
                "4",
                "16/sqrt((15*sin(pi/2*t)^2+1)^3)",
            ],
            Vec2::new(2.0, 1.0),
        );
        let d = decompose(&g).unwrap();
        match is_constant_width(&d.wc, PREDICATE_TOL) {
            WidthVerdict::Constant { width } => assert!(width.abs() < 1e-9),
            v => panic!("{v:?}"),
        }
        assert!(is_symmetric(&d.cwms, PREDICATE_TOL));
        assert!(!is_symmetric(&g, PREDICATE_TOL));
        assert!(d.residual.max <= d.residual.tol);
    }

    #[test]
    fn sign_flipped_cwms_is_caught() {
        let g = curve(
            "euclidean",
            &["2+cos(pi*t)", "2+cos(pi*t)", "2+cos(pi*t)", "2+cos(pi*t)"],
            Vec2::new(0.0, 0.0),
        );
        let d = decompose(&g).unwrap();
        let bad = d.cwms.scaled(-1.0).unwrap();
        let r = reconstruction_residual(&g, &d.wc, &bad, d.mean_width);
        assert!(r.max > r.tol);
    }
}

//! Admissible curves: closed curves with `γ'(t) = r(t) u'(t)` on every piece
//! of the ball's partition, where `r` is the curvature radius.
//!
//! The sign of `r` follows the ball's counterclockwise orientation, so a
//! convex curve traversed counterclockwise has `r >= 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{BallError, BallSource, UnitBall};
use crate::expr::{self, DomainError, Expr, SyntaxError};
use crate::geom::{self, Vec2};
use crate::quad::{self, GaussLegendre, QuadError, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("NotClosed: closing gap {gap:e} exceeds tolerance {tol:e}")]
    NotClosed { gap: f64, tol: f64 },
    #[error("NotAdmissible: γ' is not parallel to u' on piece {piece} at t = {t} (relative residual {residual:e})")]
    NotAdmissible { piece: usize, t: f64, residual: f64 },
    #[error("MismatchedBalls: curves live on different unit balls")]
    MismatchedBalls,
    #[error("InvalidRadius: {0}")]
    InvalidRadius(String),
    #[error("piece {piece}: cannot evaluate at t = {t}: {source}")]
    Eval { piece: usize, t: f64, source: DomainError },
    #[error("piece {piece}: {source}")]
    Syntax { piece: usize, source: SyntaxError },
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl CurveError {
    pub fn kind(&self) -> &'static str {
        match self {
            CurveError::NotClosed { .. } => "NotClosed",
            CurveError::NotAdmissible { .. } => "NotAdmissible",
            CurveError::MismatchedBalls => "MismatchedBalls",
            CurveError::InvalidRadius(_) => "InvalidRadius",
            CurveError::Eval { .. } => "DomainError",
            CurveError::Syntax { .. } => "SyntaxError",
            CurveError::Ball(b) => b.kind(),
            CurveError::Quadrature(_) => "Quadrature",
        }
    }
}

/// Per-piece curvature radius. Continuity across pieces is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusFunction {
    pieces: Vec<Expr>,
}

impl RadiusFunction {
    pub fn new(pieces: Vec<Expr>) -> Self {
        RadiusFunction { pieces }
    }

    pub fn constant(num_pieces: usize, c: f64) -> Self {
        RadiusFunction {
            pieces: vec![Expr::Num(c); num_pieces],
        }
    }

    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self, CurveError> {
        let pieces = texts
            .iter()
            .enumerate()
            .map(|(piece, s)| expr::parse(s.as_ref()).map_err(|source| CurveError::Syntax { piece, source }))
            .collect::<Result<_, _>>()?;
        Ok(RadiusFunction { pieces })
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    #[inline]
    pub fn value(&self, piece: usize, t: f64) -> f64 {
        self.pieces[piece].value(t)
    }

    fn zip_with(&self, other: &RadiusFunction, f: impl Fn(Expr, Expr) -> Expr) -> RadiusFunction {
        RadiusFunction {
            pieces: self
                .pieces
                .iter()
                .zip(&other.pieces)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Expr) -> Expr) -> RadiusFunction {
        RadiusFunction {
            pieces: self.pieces.iter().cloned().map(f).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConfig {
    pub quad: QuadratureConfig,
    /// Closing gap allowed, relative to the curve's size.
    pub tol_close_rel: f64,
    /// Absolute rounding level of the radius expressions, for radii built
    /// from cancelling terms.
    pub radius_noise: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            quad: QuadratureConfig::default(),
            tol_close_rel: 1e-8,
            radius_noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Panel {
    a: f64,
    b: f64,
    start: Vec2,
}

/// A validated closed curve in the class tied to a unit ball.
#[derive(Debug, Clone)]
pub struct AdmissibleCurve {
    ball: Arc<UnitBall>,
    radius: RadiusFunction,
    basepoint: Vec2,
    config: CurveConfig,
    // Accepted quadrature panels of each piece with γ at each panel start.
    panels: Vec<Vec<Panel>>,
    closure: Vec2,
    diameter: f64,
    length: f64,
    magnitude: f64,
    max_speed: f64,
    floor: f64,
}

pub fn curve_from_radius(
    ball: Arc<UnitBall>,
    radius: RadiusFunction,
    basepoint: Vec2,
) -> Result<AdmissibleCurve, CurveError> {
    let config = CurveConfig {
        quad: *ball.quad(),
        ..Default::default()
    };
    curve_from_radius_with(ball, radius, basepoint, &config)
}

pub fn curve_from_radius_with(
    ball: Arc<UnitBall>,
    radius: RadiusFunction,
    basepoint: Vec2,
    config: &CurveConfig,
) -> Result<AdmissibleCurve, CurveError> {
    if radius.len() != ball.num_pieces() {
        return Err(CurveError::InvalidRadius(format!(
            "{} radius pieces for a ball with {} pieces",
            radius.len(),
            ball.num_pieces()
        )));
    }
    if !basepoint.is_finite() {
        return Err(CurveError::InvalidRadius("basepoint is not finite".into()));
    }
    let (mut max_r, mut max_speed) = (0.0f64, 0.0f64);
    for (i, p) in ball.pieces().iter().enumerate() {
        for t in p.check_params(&config.quad) {
            let r = radius.exprs()[i]
                .eval(t)
                .map_err(|source| CurveError::Eval { piece: i, t, source })?;
            max_r = max_r.max(r.abs());
            max_speed = max_speed.max(p.u_prime(t).norm());
        }
    }
    let floor = 64.0 * f64::EPSILON * max_r + config.radius_noise;

    let spans = ball.spans();
    let leaves = quad::adaptive_leaves_floor(&spans, &config.quad, floor * max_speed, |i, t| {
        ball.piece(i).u_prime(t) * radius.value(i, t)
    })?;
    let rule = config.quad.rule();
    let mut panels = Vec::with_capacity(leaves.len());
    let mut point = basepoint;
    let mut length = 0.0;
    let mut corners = Vec::new();
    for (i, piece_leaves) in leaves.iter().enumerate() {
        let mut ps = Vec::with_capacity(piece_leaves.len());
        for leaf in piece_leaves {
            ps.push(Panel {
                a: leaf.a,
                b: leaf.b,
                start: point,
            });
            corners.push(point);
            point += leaf.value;
            let (l, _) = rule.integrate(leaf.a, leaf.b, |t| {
                (ball.piece(i).u_prime(t) * radius.value(i, t)).norm()
            });
            length += l;
        }
        panels.push(ps);
    }
    let closure = point - basepoint;
    let diameter = geom::spread(&corners);
    let magnitude = corners.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let tol = config.tol_close_rel * diameter.max(length) + floor * max_speed * ball.period();
    if !(closure.norm() <= tol) {
        return Err(CurveError::NotClosed {
            gap: closure.norm(),
            tol,
        });
    }
    Ok(AdmissibleCurve {
        ball,
        radius,
        basepoint,
        config: *config,
        panels,
        closure,
        diameter,
        length,
        magnitude,
        max_speed,
        floor,
    })
}

/// One piece of an explicitly parameterized curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitPiece {
    pub x: Expr,
    pub y: Expr,
    pub t0: f64,
    pub t1: f64,
}

/// Recovers the curvature radius of an explicit curve as
/// `<γ', u'> / <u', u'>`, rejecting curves whose tangent is not parallel
/// to `u'` at the check nodes.
pub fn curve_from_explicit(
    ball: Arc<UnitBall>,
    pieces: &[ExplicitPiece],
    tol: f64,
) -> Result<AdmissibleCurve, CurveError> {
    if pieces.len() != ball.num_pieces() {
        return Err(CurveError::InvalidRadius(format!(
            "{} explicit pieces for a ball with {} pieces",
            pieces.len(),
            ball.num_pieces()
        )));
    }
    let quad_cfg = *ball.quad();
    let mut radii = Vec::with_capacity(pieces.len());
    for (i, (ep, bp)) in pieces.iter().zip(ball.pieces()).enumerate() {
        let scale = bp.t1().abs().max(1.0);
        if (ep.t0 - bp.t0()).abs() > 1e-12 * scale || (ep.t1 - bp.t1()).abs() > 1e-12 * scale {
            return Err(CurveError::InvalidRadius(format!(
                "explicit piece {i} covers [{}, {}] but the ball piece is [{}, {}]",
                ep.t0,
                ep.t1,
                bp.t0(),
                bp.t1()
            )));
        }
        let (dx, dy) = (ep.x.differentiate(), ep.y.differentiate());
        let [ux, uy] = bp.u_prime_exprs();
        let r = expr::div(
            expr::add(expr::mul(dx.clone(), ux.clone()), expr::mul(dy.clone(), uy.clone())),
            expr::add(
                expr::pow_expr(ux, Expr::Num(2.0)),
                expr::pow_expr(uy, Expr::Num(2.0)),
            ),
        );
        for t in bp.check_params(&quad_cfg) {
            let ev = |e: &Expr| e.eval(t).map_err(|source| CurveError::Eval { piece: i, t, source });
            let g = Vec2::new(ev(&dx)?, ev(&dy)?);
            let rv = ev(&r)?;
            let residual = (g - bp.u_prime(t) * rv).norm();
            if residual > tol * g.norm() {
                return Err(CurveError::NotAdmissible {
                    piece: i,
                    t,
                    residual: residual / g.norm(),
                });
            }
        }
        radii.push(r);
    }

    let at = |i: usize, t: f64| -> Result<Vec2, CurveError> {
        let ep = &pieces[i];
        let ev = |e: &Expr| e.eval(t).map_err(|source| CurveError::Eval { piece: i, t, source });
        Ok(Vec2::new(ev(&ep.x)?, ev(&ep.y)?))
    };
    let basepoint = at(0, pieces[0].t0)?;
    let config = CurveConfig {
        quad: quad_cfg,
        ..Default::default()
    };
    let curve = curve_from_radius_with(ball, RadiusFunction::new(radii), basepoint, &config)?;
    // Explicit pieces must meet end to end, including across the seam.
    let size = curve.diameter.max(curve.length);
    let n = pieces.len();
    for i in 0..n {
        let gap = (at(i, pieces[i].t1)? - at((i + 1) % n, pieces[(i + 1) % n].t0)?).norm();
        if gap > config.tol_close_rel * size {
            return Err(CurveError::NotClosed {
                gap,
                tol: config.tol_close_rel * size,
            });
        }
    }
    Ok(curve)
}

/// Outcome of the convexity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convexity {
    /// `+1` for `r >= 0`, `-1` for `r <= 0`.
    Convex(i8),
    /// `r` changes sign near `t`.
    NonConvex { t: f64 },
}

impl AdmissibleCurve {
    pub fn ball(&self) -> &Arc<UnitBall> {
        &self.ball
    }

    pub fn radius(&self) -> &RadiusFunction {
        &self.radius
    }

    pub fn basepoint(&self) -> Vec2 {
        self.basepoint
    }

    pub fn config(&self) -> &CurveConfig {
        &self.config
    }

    /// Largest extent of the curve (up to a factor of two).
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Euclidean length `∫ |r| |u'| dt`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `γ(t_0 + 2T) - γ(t_0)` as integrated.
    pub fn closure_gap(&self) -> Vec2 {
        self.closure
    }

    /// Closing tolerance `tol_close`.
    pub fn tol_close(&self) -> f64 {
        self.config.tol_close_rel * self.diameter.max(self.length) + self.position_noise()
    }

    /// Rounding level of positions: the radius floor integrated over a
    /// period.
    pub fn position_noise(&self) -> f64 {
        self.floor * self.max_speed * self.ball.period()
    }

    /// Largest `|γ|` over the panel corners.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Largest `|u'|` over the check nodes.
    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    /// Absolute rounding level of the radius.
    pub fn radius_floor(&self) -> f64 {
        self.floor
    }

    pub fn same_ball(&self, other: &AdmissibleCurve) -> bool {
        Arc::ptr_eq(&self.ball, &other.ball) || *self.ball == *other.ball
    }

    /// `γ(t)`, with `t` reduced modulo the period; vertices use the piece
    /// to the right.
    pub fn evaluate_gamma(&self, t: f64) -> Vec2 {
        let (i, s) = self.ball.locate(t);
        self.gamma_on(i, s)
    }

    /// `γ(t)` computed on piece `piece`.
    pub fn gamma_on(&self, piece: usize, t: f64) -> Vec2 {
        let panels = &self.panels[piece];
        let k = panels.partition_point(|p| p.a <= t).saturating_sub(1);
        let p = &panels[k];
        if t == p.a {
            return p.start;
        }
        let bp = self.ball.piece(piece);
        let (d, _) = self
            .config
            .quad
            .rule()
            .integrate(p.a, t, |s| bp.u_prime(s) * self.radius.value(piece, s));
        p.start + d
    }

    /// Left ends of the accepted quadrature panels of a piece.
    pub fn panel_starts(&self, piece: usize) -> Vec<f64> {
        self.panels[piece].iter().map(|p| p.a).collect()
    }

    /// `γ'(t) = r(t) u'(t)` on piece `piece`.
    #[inline]
    pub fn velocity_on(&self, piece: usize, t: f64) -> Vec2 {
        self.ball.piece(piece).u_prime(t) * self.radius.value(piece, t)
    }

    /// Check parameters `(piece, t)` of every piece: endpoints (one-sided)
    /// and quadrature nodes.
    pub fn sample_params(&self) -> Vec<(usize, f64)> {
        self.ball
            .pieces()
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.check_params(&self.config.quad).into_iter().map(move |t| (i, t)))
            .collect()
    }

    pub fn is_convex(&self) -> Convexity {
        let samples: Vec<(usize, f64, f64)> = self
            .sample_params()
            .into_iter()
            .map(|(i, t)| (i, t, self.radius.value(i, t)))
            .collect();
        let max_r = samples.iter().map(|s| s.2.abs()).fold(0.0, f64::max);
        let eps = 1e-10 * max_r;
        let mut prev: Option<(usize, f64, f64)> = None;
        let mut sign = 0.0;
        for &(i, t, r) in &samples {
            if r.abs() <= eps {
                continue;
            }
            if sign != 0.0 && r.signum() != sign {
                let (pi, pt, _) = prev.unwrap();
                let witness = if pi == i {
                    self.bisect_sign_change(i, pt, t)
                } else {
                    self.ball.piece(i).t0()
                };
                return Convexity::NonConvex { t: witness };
            }
            sign = r.signum();
            prev = Some((i, t, r));
        }
        if sign < 0.0 {
            Convexity::Convex(-1)
        } else {
            Convexity::Convex(1)
        }
    }

    fn bisect_sign_change(&self, piece: usize, mut a: f64, mut b: f64) -> f64 {
        let fa = self.radius.value(piece, a).signum();
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if self.radius.value(piece, m).signum() == fa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Smallest `K >= 0` such that `γ + K u` has non-negative radius: the
    /// sampled minimum of `r`, polished by golden-section search between
    /// the neighbouring nodes.
    pub fn convexifying_shift(&self) -> f64 {
        let mut best = (f64::INFINITY, 0usize, 0.0f64, 0.0f64);
        for (i, p) in self.ball.pieces().iter().enumerate() {
            let ts = p.check_params(&self.config.quad);
            for (k, &t) in ts.iter().enumerate() {
                let r = self.radius.value(i, t);
                if r < best.0 {
                    let lo = ts[k.saturating_sub(1)];
                    let hi = ts[(k + 1).min(ts.len() - 1)];
                    best = (r, i, lo, hi);
                }
            }
        }
        let (mut min_r, piece, mut a, mut b) = best;
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |t: f64| self.radius.value(piece, t);
        for _ in 0..80 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let r = f(0.5 * (a + b));
        if r.is_finite() {
            min_r = min_r.min(r);
        }
        (-min_r).max(0.0)
    }

    fn rebuild(&self, radius: RadiusFunction, basepoint: Vec2) -> Result<AdmissibleCurve, CurveError> {
        curve_from_radius_with(self.ball.clone(), radius, basepoint, &self.config)
    }

    /// The curve `γ + K u`.
    pub fn shifted(&self, k: f64) -> Result<AdmissibleCurve, CurveError> {
        let u0 = self.ball.piece(0).u(self.ball.t_start());
        self.rebuild(
            self.radius.map(|r| expr::add(r, Expr::Num(k))),
            self.basepoint + u0 * k,
        )
    }

    /// The curve `c γ` (scaling about the origin).
    pub fn scaled(&self, c: f64) -> Result<AdmissibleCurve, CurveError> {
        self.rebuild(
            self.radius.map(|r| expr::mul(Expr::Num(c), r)),
            self.basepoint * c,
        )
    }

    /// Same radius `c r` but the same basepoint.
    pub fn radius_scaled(&self, c: f64) -> Result<AdmissibleCurve, CurveError> {
        self.rebuild(self.radius.map(|r| expr::mul(Expr::Num(c), r)), self.basepoint)
    }

    pub fn translated(&self, v: Vec2) -> AdmissibleCurve {
        let mut out = self.clone();
        out.basepoint += v;
        let mut magnitude = 0.0f64;
        for ps in &mut out.panels {
            for p in ps {
                p.start += v;
                magnitude = magnitude.max(p.start.norm());
            }
        }
        out.magnitude = magnitude;
        out
    }

    /// Pointwise sum of two curves on the same ball.
    pub fn add(&self, other: &AdmissibleCurve) -> Result<AdmissibleCurve, CurveError> {
        self.combine(1.0, other, 1.0)
    }

    /// `a γ₁ + b γ₂`.
    pub fn combine(&self, a: f64, other: &AdmissibleCurve, b: f64) -> Result<AdmissibleCurve, CurveError> {
        if !self.same_ball(other) {
            return Err(CurveError::MismatchedBalls);
        }
        let radius = self.radius.zip_with(&other.radius, |x, y| {
            expr::add(expr::mul(Expr::Num(a), x), expr::mul(Expr::Num(b), y))
        });
        self.rebuild(radius, self.basepoint * a + other.basepoint * b)
    }

    /// `Some(c)` when `γ` is a translate of `c u`, within `rel`: the radius
    /// is constant on arcs, and on segments (where the speed is an
    /// arbitrary reparameterization) its mean is.
    pub fn is_multiple_of_ball(&self, rel: f64) -> Option<f64> {
        let rule = self.config.quad.rule();
        let mut vals = Vec::new();
        for (i, p) in self.ball.pieces().iter().enumerate() {
            if p.is_segment() {
                let (int, _) = rule.integrate(p.t0(), p.t1(), |t| self.radius.value(i, t));
                vals.push(int / (p.t1() - p.t0()));
            } else {
                vals.extend(p.check_params(&self.config.quad).into_iter().map(|t| self.radius.value(i, t)));
            }
        }
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = max.abs().max(min.abs());
        (max - min <= rel * scale).then_some(0.5 * (max + min))
    }

    /// Dense polyline through the curve, `per_piece` points per piece.
    pub fn polyline(&self, per_piece: usize) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(per_piece * self.ball.num_pieces());
        for (i, p) in self.ball.pieces().iter().enumerate() {
            for k in 0..per_piece {
                let t = p.t0() + (p.t1() - p.t0()) * k as f64 / per_piece as f64;
                pts.push(self.gamma_on(i, t));
            }
        }
        pts
    }

    /// `per_piece` equally spaced points per piece, integrated from point
    /// to point so dense samplings stay cheap.
    pub fn dense_polyline(&self, per_piece: usize) -> Vec<Vec2> {
        let rule = GaussLegendre::cached(8);
        let mut pts = Vec::with_capacity(per_piece * self.ball.num_pieces());
        for (i, piece) in self.ball.pieces().iter().enumerate() {
            let panels = &self.panels[i];
            let mut k = 0;
            let (mut t_prev, mut g) = (panels[0].a, panels[0].start);
            for j in 0..per_piece {
                let t = piece.t0() + (piece.t1() - piece.t0()) * j as f64 / per_piece as f64;
                while k + 1 < panels.len() && panels[k + 1].a <= t {
                    k += 1;
                    t_prev = panels[k].a;
                    g = panels[k].start;
                }
                let (d, _) = rule.integrate(t_prev, t, |s| self.velocity_on(i, s));
                g += d;
                t_prev = t;
                pts.push(g);
            }
        }
        pts
    }

    pub fn to_doc(&self) -> CurveDoc {
        CurveDoc {
            ball: BallSource::Inline(self.ball.to_doc()),
            basepoint: Some(self.basepoint),
            radius: Some(
                self.radius
                    .exprs()
                    .iter()
                    .enumerate()
                    .map(|(piece, e)| RadiusEntry {
                        expr: e.to_string(),
                        piece,
                    })
                    .collect(),
            ),
            explicit: None,
            tol: None,
        }
    }
}

// JSON curve document.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEntry {
    pub expr: String,
    pub piece: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitDoc {
    pub x: String,
    pub y: String,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub ball: BallSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Vec<RadiusEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<ExplicitDoc>>,
    /// Parallelism tolerance for explicit curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl CurveDoc {
    pub fn build(&self, quad: &QuadratureConfig) -> Result<AdmissibleCurve, CurveError> {
        let ball = Arc::new(self.ball.build(quad)?);
        match (&self.radius, &self.explicit) {
            (Some(entries), None) => {
                let n = ball.num_pieces();
                let mut texts: Vec<Option<&str>> = vec![None; n];
                for e in entries {
                    if e.piece >= n {
                        return Err(CurveError::InvalidRadius(format!(
                            "radius given for piece {} but the ball has {n} pieces",
                            e.piece
                        )));
                    }
                    if texts[e.piece].replace(&e.expr).is_some() {
                        return Err(CurveError::InvalidRadius(format!("piece {} has two radii", e.piece)));
                    }
                }
                let texts = texts
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| t.ok_or_else(|| CurveError::InvalidRadius(format!("no radius for piece {i}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let radius = RadiusFunction::parse(&texts)?;
                curve_from_radius(ball, radius, self.basepoint.unwrap_or(Vec2::ZERO))
            }
            (None, Some(pieces)) => {
                let mut eps = Vec::with_capacity(pieces.len());
                for (piece, p) in pieces.iter().enumerate() {
                    let syn = |source| CurveError::Syntax { piece, source };
                    eps.push(ExplicitPiece {
                        x: expr::parse(&p.x).map_err(syn)?,
                        y: expr::parse(&p.y).map_err(syn)?,
                        t0: p.t0,
                        t1: p.t1,
                    });
                }
                curve_from_explicit(ball, &eps, self.tol.unwrap_or(1e-9))
            }
            _ => Err(CurveError::InvalidRadius(
                "a curve document needs exactly one of \"radius\" or \"explicit\"".into(),
            )),
        }
    }
}

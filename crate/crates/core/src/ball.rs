//! Origin-symmetric unit balls whose boundary is made of strictly convex
//! smooth arcs and straight segments.
//!
//! The boundary `u` is parameterized over `[t_0, t_0 + 2T]` by `2n` pieces,
//! with piece `i + n` equal to the negation of piece `i` shifted by `T`.
//! Nothing requires unit speed; only `u' != 0` is checked.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, DomainError, Expr, SyntaxError};
use crate::geom::Vec2;
use crate::quad::{self, QuadError, QuadratureConfig, Span};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BallError {
    #[error("NotClosed: boundary has a gap of {gap:e} at t = {t}")]
    NotClosed { t: f64, gap: f64 },
    #[error("NotSymmetric: {0}")]
    NotSymmetric(String),
    #[error("NotConvex: {0}")]
    NotConvex(String),
    #[error("DegeneratePiece: |u'| = {speed:e} on piece {piece} at t = {t}")]
    DegeneratePiece { piece: usize, t: f64, speed: f64 },
    #[error("DegenerateDual: [u, u'] = {value:e} at t = {t}")]
    DegenerateDual { t: f64, value: f64 },
    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),
    #[error("UnknownBuiltin: {0}")]
    UnknownBuiltin(String),
    #[error("piece {piece}: cannot evaluate at t = {t}: {source}")]
    Eval { piece: usize, t: f64, source: DomainError },
    #[error("piece {piece}: {source}")]
    Syntax { piece: usize, source: SyntaxError },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl BallError {
    /// Short machine-readable name of the failed check.
    pub fn kind(&self) -> &'static str {
        match self {
            BallError::NotClosed { .. } => "NotClosed",
            BallError::NotSymmetric(_) => "NotSymmetric",
            BallError::NotConvex(_) => "NotConvex",
            BallError::DegeneratePiece { .. } => "DegeneratePiece",
            BallError::DegenerateDual { .. } => "DegenerateDual",
            BallError::InvalidPartition(_) => "InvalidPartition",
            BallError::UnknownBuiltin(_) => "UnknownBuiltin",
            BallError::Eval { .. } => "DomainError",
            BallError::Syntax { .. } => "SyntaxError",
            BallError::Quadrature(_) => "Quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    Arc { x: Expr, y: Expr },
    Segment { p0: Vec2, p1: Vec2 },
}

/// One boundary piece on the parameter interval `[t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    kind: PieceKind,
    t0: f64,
    t1: f64,
    // u' and u'' for arcs; empty for segments.
    first: Option<[Expr; 2]>,
    second: Option<[Expr; 2]>,
}

impl Piece {
    pub fn arc(x: Expr, y: Expr, t0: f64, t1: f64) -> Piece {
        let first = [x.differentiate(), y.differentiate()];
        let second = [first[0].differentiate(), first[1].differentiate()];
        Piece {
            kind: PieceKind::Arc { x, y },
            t0,
            t1,
            first: Some(first),
            second: Some(second),
        }
    }

    pub fn segment(p0: Vec2, p1: Vec2, t0: f64, t1: f64) -> Piece {
        Piece {
            kind: PieceKind::Segment { p0, p1 },
            t0,
            t1,
            first: None,
            second: None,
        }
    }

    pub fn kind(&self) -> &PieceKind {
        &self.kind
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn is_segment(&self) -> bool {
        matches!(self.kind, PieceKind::Segment { .. })
    }

    pub fn try_u(&self, t: f64) -> Result<Vec2, DomainError> {
        match &self.kind {
            PieceKind::Arc { x, y } => Ok(Vec2::new(x.eval(t)?, y.eval(t)?)),
            PieceKind::Segment { p0, p1 } => {
                let s = (t - self.t0) / (self.t1 - self.t0);
                Ok(*p0 + (*p1 - *p0) * s)
            }
        }
    }

    pub fn try_u_prime(&self, t: f64) -> Result<Vec2, DomainError> {
        match (&self.kind, &self.first) {
            (PieceKind::Arc { .. }, Some([dx, dy])) => Ok(Vec2::new(dx.eval(t)?, dy.eval(t)?)),
            (PieceKind::Segment { p0, p1 }, _) => Ok((*p1 - *p0) * (1.0 / (self.t1 - self.t0))),
            _ => unreachable!("arc derivatives are built with the piece"),
        }
    }

    pub fn try_u_second(&self, t: f64) -> Result<Vec2, DomainError> {
        match (&self.kind, &self.second) {
            (PieceKind::Arc { .. }, Some([ddx, ddy])) => Ok(Vec2::new(ddx.eval(t)?, ddy.eval(t)?)),
            (PieceKind::Segment { .. }, _) => Ok(Vec2::ZERO),
            _ => unreachable!("arc derivatives are built with the piece"),
        }
    }

    pub fn u(&self, t: f64) -> Vec2 {
        self.try_u(t).unwrap_or(Vec2::new(f64::NAN, f64::NAN))
    }

    pub fn u_prime(&self, t: f64) -> Vec2 {
        self.try_u_prime(t).unwrap_or(Vec2::new(f64::NAN, f64::NAN))
    }

    pub fn u_second(&self, t: f64) -> Vec2 {
        self.try_u_second(t).unwrap_or(Vec2::new(f64::NAN, f64::NAN))
    }

    /// Symbolic `u'` components.
    pub fn u_prime_exprs(&self) -> [Expr; 2] {
        match (&self.kind, &self.first) {
            (PieceKind::Arc { .. }, Some(first)) => first.clone(),
            (PieceKind::Segment { p0, p1 }, _) => {
                let d = (*p1 - *p0) * (1.0 / (self.t1 - self.t0));
                [Expr::Num(d.x), Expr::Num(d.y)]
            }
            _ => unreachable!("arc derivatives are built with the piece"),
        }
    }

    /// `-u(t - dt)` on `[t0 + dt, t1 + dt]`.
    pub fn antipodal(&self, dt: f64) -> Piece {
        match &self.kind {
            PieceKind::Arc { x, y } => Piece::arc(
                expr::neg(x.shifted(-dt)),
                expr::neg(y.shifted(-dt)),
                self.t0 + dt,
                self.t1 + dt,
            ),
            PieceKind::Segment { p0, p1 } => Piece::segment(-*p0, -*p1, self.t0 + dt, self.t1 + dt),
        }
    }

    pub fn scaled(&self, c: f64) -> Piece {
        match &self.kind {
            PieceKind::Arc { x, y } => Piece::arc(
                expr::mul(Expr::Num(c), x.clone()),
                expr::mul(Expr::Num(c), y.clone()),
                self.t0,
                self.t1,
            ),
            PieceKind::Segment { p0, p1 } => Piece::segment(*p0 * c, *p1 * c, self.t0, self.t1),
        }
    }

    /// Check parameters: the endpoints and the rule's interior nodes, sorted.
    pub(crate) fn check_params(&self, quad: &QuadratureConfig) -> Vec<f64> {
        let rule = quad.rule();
        let mut ts = Vec::with_capacity(rule.len() + 2);
        ts.push(self.t0);
        ts.extend(rule.mapped(self.t0, self.t1));
        ts.push(self.t1);
        ts
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BallConfig {
    pub quad: QuadratureConfig,
    /// Pieces cover only the first half period; append the negated copies.
    pub auto_symmetrize: bool,
    /// Expected half period; inferred from the partition when absent.
    pub half_period: Option<f64>,
}

/// A validated unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitBall {
    pieces: Vec<Piece>,
    half_period: f64,
    diameter: f64,
    area: f64,
    quad: QuadratureConfig,
}

const REL_GEOM: f64 = 1e-9;

pub fn build_ball(pieces: Vec<Piece>, config: &BallConfig) -> Result<UnitBall, BallError> {
    config.quad.validate()?;
    let mut pieces = pieces;
    check_partition(&pieces)?;
    if config.auto_symmetrize {
        let half = pieces.last().unwrap().t1 - pieces[0].t0;
        let mirrored: Vec<Piece> = pieces.iter().map(|p| p.antipodal(half)).collect();
        pieces.extend(mirrored);
    }
    let n2 = pieces.len();
    if n2 % 2 != 0 {
        return Err(BallError::InvalidPartition(format!(
            "a symmetric ball needs an even number of pieces, got {n2}"
        )));
    }
    let t_start = pieces[0].t0;
    let half_period = 0.5 * (pieces[n2 - 1].t1 - t_start);
    let t_scale = half_period.abs().max(t_start.abs()).max(1.0);
    if let Some(expected) = config.half_period {
        if (expected - half_period).abs() > 1e-12 * t_scale {
            return Err(BallError::InvalidPartition(format!(
                "declared T = {expected} but the pieces span 2T = {}",
                2.0 * half_period
            )));
        }
    }

    // Sample everything once; domain errors surface here.
    let mut samples = Vec::with_capacity(n2);
    for (i, p) in pieces.iter().enumerate() {
        let mut rows = Vec::new();
        for t in p.check_params(&config.quad) {
            let eval = |r: Result<Vec2, DomainError>| r.map_err(|source| BallError::Eval { piece: i, t, source });
            rows.push((t, eval(p.try_u(t))?, eval(p.try_u_prime(t))?, eval(p.try_u_second(t))?));
        }
        samples.push(rows);
    }
    let diameter = 2.0
        * samples
            .iter()
            .flatten()
            .map(|s| s.1.norm())
            .fold(0.0, f64::max);
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(BallError::NotConvex("boundary collapses to the origin".into()));
    }
    let eps_reg = REL_GEOM * diameter;
    let tol_geom = REL_GEOM * diameter;

    for (i, rows) in samples.iter().enumerate() {
        for &(t, _, du, _) in rows {
            if du.norm() < eps_reg {
                return Err(BallError::DegeneratePiece { piece: i, t, speed: du.norm() });
            }
        }
    }

    // Continuity at every vertex, including the seam at t_0 + 2T.
    for i in 0..n2 {
        let end = samples[i].last().unwrap().1;
        let next = samples[(i + 1) % n2][0].1;
        let gap = (end - next).norm();
        if !(gap <= tol_geom) {
            return Err(BallError::NotClosed { t: pieces[i].t1, gap });
        }
    }

    let n = n2 / 2;
    for i in 0..n {
        let (a, b) = (&pieces[i], &pieces[i + n]);
        if (b.t0 - (a.t0 + half_period)).abs() > 1e-12 * t_scale
            || (b.t1 - (a.t1 + half_period)).abs() > 1e-12 * t_scale
        {
            return Err(BallError::NotSymmetric(format!(
                "piece {} interval [{}, {}] is not piece {i} shifted by T = {half_period}",
                i + n,
                b.t0,
                b.t1
            )));
        }
        for &(t, ua, _, _) in &samples[i] {
            let ub = b.try_u(t + half_period).map_err(|source| BallError::Eval {
                piece: i + n,
                t: t + half_period,
                source,
            })?;
            let dev = (ua + ub).norm();
            if !(dev <= tol_geom) {
                return Err(BallError::NotSymmetric(format!(
                    "u(t + T) + u(t) = {dev:e} at t = {t} (pieces {i} and {})",
                    i + n
                )));
            }
        }
    }

    check_convexity(&pieces, &samples, tol_geom)?;

    let spans = spans_of(&pieces);
    let area = 0.5
        * quad::integrate_spans(&spans, &config.quad, |i, t| {
            let p = &pieces[i];
            p.u(t).cross(p.u_prime(t))
        })?;

    Ok(UnitBall {
        pieces,
        half_period,
        diameter,
        area,
        quad: config.quad,
    })
}

type Sample = (f64, Vec2, Vec2, Vec2);

fn check_partition(pieces: &[Piece]) -> Result<(), BallError> {
    if pieces.is_empty() {
        return Err(BallError::InvalidPartition("no pieces".into()));
    }
    for (i, p) in pieces.iter().enumerate() {
        if !(p.t0.is_finite() && p.t1.is_finite() && p.t0 < p.t1) {
            return Err(BallError::InvalidPartition(format!(
                "piece {i} has interval [{}, {}]",
                p.t0, p.t1
            )));
        }
        if i > 0 {
            let prev = pieces[i - 1].t1;
            if (p.t0 - prev).abs() > 1e-12 * prev.abs().max(1.0) {
                return Err(BallError::InvalidPartition(format!(
                    "piece {i} starts at {} but piece {} ends at {prev}",
                    p.t0,
                    i - 1
                )));
            }
        }
    }
    Ok(())
}

fn check_convexity(pieces: &[Piece], samples: &[Vec<Sample>], tol_geom: f64) -> Result<(), BallError> {
    let mut turning = 0.0;
    for (i, (p, rows)) in pieces.iter().zip(samples).enumerate() {
        for &(t, u, du, ddu) in rows {
            let support = u.cross(du) / du.norm();
            if !(support > tol_geom) {
                return Err(BallError::NotConvex(format!(
                    "[u, u'] = {:e} at t = {t} on piece {i}: origin not strictly inside or orientation is clockwise",
                    u.cross(du)
                )));
            }
            if !p.is_segment() && !(du.cross(ddu) > 0.0) {
                return Err(BallError::NotConvex(format!(
                    "[u', u''] = {:e} at t = {t} on arc {i}: arc is not strictly convex",
                    du.cross(ddu)
                )));
            }
        }
        for w in rows.windows(2) {
            turning += angle_between(w[0].2, w[1].2);
        }
        let out = rows.last().unwrap().2;
        let next = samples[(i + 1) % samples.len()][0].2;
        let cross = out.cross(next);
        let dot = out.dot(next);
        let scale = out.norm() * next.norm();
        if cross < -1e-9 * scale || (cross <= 1e-9 * scale && dot < 0.0) {
            return Err(BallError::NotConvex(format!(
                "tangent turns clockwise or reverses at vertex t = {}",
                pieces[i].t1
            )));
        }
        turning += angle_between(out, next);
    }
    if (turning - 2.0 * PI).abs() > 1e-6 {
        return Err(BallError::NotConvex(format!(
            "tangent turns by {turning} instead of 2*pi"
        )));
    }
    Ok(())
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

fn spans_of(pieces: &[Piece]) -> Vec<Span> {
    pieces
        .iter()
        .enumerate()
        .map(|(piece, p)| Span { piece, a: p.t0, b: p.t1 })
        .collect()
}

impl UnitBall {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &Piece {
        &self.pieces[i]
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn t_start(&self) -> f64 {
        self.pieces[0].t0
    }

    pub fn t_end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t1
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bp: Vec<f64> = self.pieces.iter().map(|p| p.t0).collect();
        bp.push(self.t_end());
        bp
    }

    pub fn spans(&self) -> Vec<Span> {
        spans_of(&self.pieces)
    }

    /// Index of the piece opposite to piece `i`.
    pub fn antipode(&self, i: usize) -> usize {
        let n = self.pieces.len() / 2;
        (i + n) % (2 * n)
    }

    /// Parameter shift taking piece `i` onto its antipodal piece.
    pub fn antipode_shift(&self, i: usize) -> f64 {
        if i < self.pieces.len() / 2 {
            self.half_period
        } else {
            -self.half_period
        }
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn eps_reg(&self) -> f64 {
        REL_GEOM * self.diameter
    }

    pub fn tol_geom(&self) -> f64 {
        REL_GEOM * self.diameter
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// Signed area enclosed by the boundary.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Reduces `t` modulo the period and picks the piece containing it; at a
    /// vertex the piece to the right is chosen.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let start = self.t_start();
        let mut s = (t - start).rem_euclid(self.period()) + start;
        if s >= self.t_end() {
            s = start;
        }
        let i = self.pieces.partition_point(|p| p.t0 <= s).saturating_sub(1);
        (i, s)
    }

    pub fn u(&self, t: f64) -> Vec2 {
        let (i, s) = self.locate(t);
        self.pieces[i].u(s)
    }

    pub fn u_prime(&self, t: f64) -> Vec2 {
        let (i, s) = self.locate(t);
        self.pieces[i].u_prime(s)
    }

    pub fn u_second(&self, t: f64) -> Vec2 {
        let (i, s) = self.locate(t);
        self.pieces[i].u_second(s)
    }

    /// The dual-ball point `v = u' / [u, u']`, representing the functional
    /// `x -> [x, v]` that supports the ball at `u(t)`.
    pub fn dual_point(&self, t: f64) -> Result<Vec2, BallError> {
        let (i, s) = self.locate(t);
        self.dual_point_on(i, s)
    }

    pub fn dual_point_on(&self, piece: usize, t: f64) -> Result<Vec2, BallError> {
        let p = &self.pieces[piece];
        let (u, du) = (p.u(t), p.u_prime(t));
        let det = u.cross(du);
        if !(det.abs() >= self.eps_reg()) {
            return Err(BallError::DegenerateDual { t, value: det });
        }
        Ok(du * (1.0 / det))
    }

    /// Unchecked dual point for integrands; NaN where undefined.
    pub(crate) fn dual_on(&self, piece: usize, t: f64) -> Vec2 {
        let p = &self.pieces[piece];
        let du = p.u_prime(t);
        du * (1.0 / p.u(t).cross(du))
    }

    /// The ball `c * U` with the same parameterization.
    pub fn scaled(&self, c: f64) -> Result<UnitBall, BallError> {
        let pieces = self.pieces.iter().map(|p| p.scaled(c)).collect();
        build_ball(
            pieces,
            &BallConfig {
                quad: self.quad,
                ..Default::default()
            },
        )
    }

    pub fn with_quad(&self, quad: QuadratureConfig) -> Result<UnitBall, BallError> {
        build_ball(
            self.pieces.clone(),
            &BallConfig {
                quad,
                ..Default::default()
            },
        )
    }
}

/// Parameters for [`builtin_ball`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BuiltinParams {
    /// Half the number of sides of `regular_2k_gon`.
    pub k: Option<usize>,
}

pub const BUILTIN_NAMES: [&str; 4] = ["euclidean", "square", "regular_2k_gon", "mixed_example21"];

pub fn builtin_ball(name: &str, params: &BuiltinParams) -> Result<UnitBall, BallError> {
    builtin_ball_with(name, params, &QuadratureConfig::default())
}

pub fn builtin_ball_with(name: &str, params: &BuiltinParams, quad: &QuadratureConfig) -> Result<UnitBall, BallError> {
    let p = |s: &str| expr::parse(s).expect("builtin formula parses");
    let pieces = match name {
        "euclidean" => (0..4)
            .map(|i| Piece::arc(p("cos(pi/2*t)"), p("sin(pi/2*t)"), i as f64, i as f64 + 1.0))
            .collect(),
        "square" => {
            let v = [[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]].map(Vec2::from);
            (0..4)
                .map(|j| Piece::segment(v[j], v[(j + 1) % 4], j as f64, j as f64 + 1.0))
                .collect()
        }
        "regular_2k_gon" => {
            let k = params.k.unwrap_or(3);
            if k < 2 {
                return Err(BallError::InvalidPartition(format!("regular_2k_gon needs k >= 2, got {k}")));
            }
            regular_polygon_pieces(k)
        }
        "mixed_example21" => vec![
            Piece::segment(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 0.0, 1.0),
            Piece::arc(p("cos(pi/2*t)"), p("sin(pi/2*t)"), 1.0, 2.0),
            Piece::segment(Vec2::new(-1.0, 0.0), Vec2::new(0.0, -1.0), 2.0, 3.0),
            Piece::arc(p("cos(pi/2*t)"), p("sin(pi/2*t)"), 3.0, 4.0),
        ],
        other => return Err(BallError::UnknownBuiltin(other.to_string())),
    };
    build_ball(
        pieces,
        &BallConfig {
            quad: *quad,
            ..Default::default()
        },
    )
}

/// Regular 2k-gon with apothem 1 and a vertical right side; `k = 2` is the
/// square with vertices (±1, ±1).
fn regular_polygon_pieces(k: usize) -> Vec<Piece> {
    let m = 2 * k;
    let circum = 1.0 / (PI / m as f64).cos();
    let vertex = |j: usize| {
        let th = (2.0 * j as f64 - 1.0) * PI / m as f64;
        if j % k == 0 {
            // exact antipodes for j and j + k
            let s = if j == 0 { 1.0 } else { -1.0 };
            return Vec2::new(s * 1.0, -s * (PI / m as f64).tan());
        }
        Vec2::new(circum * th.cos(), circum * th.sin())
    };
    let half: Vec<Piece> = (0..k)
        .map(|j| Piece::segment(vertex(j), vertex(j + 1), j as f64, j as f64 + 1.0))
        .collect();
    let mut pieces = half.clone();
    pieces.extend(half.iter().map(|p| p.antipodal(k as f64)));
    pieces
}

// JSON ball document.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PieceDoc {
    Arc { x: String, y: String, t0: f64, t1: f64 },
    Segment { p0: Vec2, p1: Vec2, t0: f64, t1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDoc {
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub half_period: Option<f64>,
    #[serde(default)]
    pub auto_symmetrize: bool,
    pub pieces: Vec<PieceDoc>,
}

/// A ball given inline, as a builtin reference, or by builtin name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BallSource {
    Name(String),
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    Inline(BallDoc),
}

impl BallDoc {
    pub fn build(&self, quad: &QuadratureConfig) -> Result<UnitBall, BallError> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, doc) in self.pieces.iter().enumerate() {
            let syn = |source| BallError::Syntax { piece: i, source };
            pieces.push(match doc {
                PieceDoc::Arc { x, y, t0, t1 } => {
                    Piece::arc(expr::parse(x).map_err(syn)?, expr::parse(y).map_err(syn)?, *t0, *t1)
                }
                PieceDoc::Segment { p0, p1, t0, t1 } => Piece::segment(*p0, *p1, *t0, *t1),
            });
        }
        build_ball(
            pieces,
            &BallConfig {
                quad: *quad,
                auto_symmetrize: self.auto_symmetrize,
                half_period: self.half_period,
            },
        )
    }
}

impl BallSource {
    pub fn build(&self, quad: &QuadratureConfig) -> Result<UnitBall, BallError> {
        match self {
            BallSource::Name(name) => builtin_ball_with(name, &BuiltinParams::default(), quad),
            BallSource::Builtin { builtin, k } => builtin_ball_with(builtin, &BuiltinParams { k: *k }, quad),
            BallSource::Inline(doc) => doc.build(quad),
        }
    }
}

impl UnitBall {
    /// The ball as a JSON document (full piece list).
    pub fn to_doc(&self) -> BallDoc {
        BallDoc {
            half_period: Some(self.half_period),
            auto_symmetrize: false,
            pieces: self
                .pieces
                .iter()
                .map(|p| match &p.kind {
                    PieceKind::Arc { x, y } => PieceDoc::Arc {
                        x: x.to_string(),
                        y: y.to_string(),
                        t0: p.t0,
                        t1: p.t1,
                    },
                    PieceKind::Segment { p0, p1 } => PieceDoc::Segment {
                        p0: *p0,
                        p1: *p1,
                        t0: p.t0,
                        t1: p.t1,
                    },
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(name: &str) -> UnitBall {
        builtin_ball(name, &BuiltinParams::default()).unwrap()
    }

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn euclidean_ball() {
        let b = builtin("euclidean");
        assert_eq!(b.half_period(), 2.0);
        assert!(close(b.u(1.0), Vec2::new(0.0, 1.0), 1e-15));
        assert!((b.area() - PI).abs() < 1e-10);
        let v = b.dual_point(0.5).unwrap();
        let th = PI / 4.0;
        assert!(close(v, Vec2::new(-th.sin(), th.cos()), 1e-14));
    }

    #[test]
    fn mixed_ball_values() {
        let b = builtin("mixed_example21");
        assert_eq!(b.half_period(), 2.0);
        assert!(close(b.u(0.5), Vec2::new(0.5, 0.5), 1e-15));
        for t in [0.1, 0.5, 0.9] {
            assert!(close(b.dual_point(t).unwrap(), Vec2::new(-1.0, 1.0), 1e-14));
            assert!(close(b.dual_point(t + 2.0).unwrap(), Vec2::new(1.0, -1.0), 1e-14));
        }
        let t = 1.3;
        let th = PI / 2.0 * t;
        assert!(close(b.dual_point(t).unwrap(), Vec2::new(-th.sin(), th.cos()), 1e-14));
        assert!((b.area() - (PI / 2.0 + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn square_ball() {
        let b = builtin("square");
        assert!(close(b.u(0.0), Vec2::new(1.0, -1.0), 1e-15));
        assert!(close(b.u(1.0), Vec2::new(1.0, 1.0), 1e-15));
        assert!(close(b.dual_point(0.3).unwrap(), Vec2::new(0.0, 1.0), 1e-15));
        assert!((b.area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hexagon_ball() {
        let b = builtin_ball("regular_2k_gon", &BuiltinParams { k: Some(3) }).unwrap();
        assert_eq!(b.num_pieces(), 6);
        assert_eq!(b.half_period(), 3.0);
        // apothem 1: area = 6 * tan(pi/6) * 1
        assert!((b.area() - 6.0 * (PI / 6.0).tan()).abs() < 1e-12);
        let sq = builtin_ball("regular_2k_gon", &BuiltinParams { k: Some(2) }).unwrap();
        assert!((sq.area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(
            builtin_ball("circle", &BuiltinParams::default()),
            Err(BallError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn vertex_evaluation_takes_right_piece() {
        let b = builtin("mixed_example21");
        assert_eq!(b.locate(1.0).0, 1);
        assert_eq!(b.locate(4.0), (0, 0.0));
        assert_eq!(b.locate(-1.0).0, 3);
        assert!(close(b.u_prime(1.0), Vec2::new(-PI / 2.0, 0.0), 1e-14));
    }

    #[test]
    fn auto_symmetrize_appends_negated_half() {
        let p = |s: &str| expr::parse(s).unwrap();
        let half = vec![
            Piece::arc(p("cos(pi/2*t)"), p("sin(pi/2*t)"), 0.0, 1.0),
            Piece::arc(p("cos(pi/2*t)"), p("sin(pi/2*t)"), 1.0, 2.0),
        ];
        let b = build_ball(half, &BallConfig { auto_symmetrize: true, ..Default::default() }).unwrap();
        assert_eq!(b.num_pieces(), 4);
        assert!((b.area() - PI).abs() < 1e-10);
        assert!(close(b.u(2.5), -b.u(0.5), 1e-14));
    }

    #[test]
    fn rejects_broken_balls() {
        let seg = |a: [f64; 2], b: [f64; 2], t0: f64| Piece::segment(a.into(), b.into(), t0, t0 + 1.0);
        // gap between pieces
        let gap = vec![
            seg([1., -1.], [1., 1.], 0.),
            seg([-1., 1.2], [-1., -1.], 1.),
            seg([-1., 1.], [-1., -1.], 2.),
            seg([-1., -1.], [1., -1.], 3.),
        ];
        assert!(matches!(build_ball(gap, &BallConfig::default()), Err(BallError::NotClosed { .. })));
        // closed but not centrally symmetric
        let skew = vec![
            seg([1., -1.], [1., 1.], 0.),
            seg([1., 1.], [-1., 1.], 1.),
            seg([-1., 1.], [-1., -2.], 2.),
            seg([-1., -2.], [1., -1.], 3.),
        ];
        assert!(matches!(build_ball(skew, &BallConfig::default()), Err(BallError::NotSymmetric(_))));
        // clockwise square
        let cw = vec![
            seg([1., 1.], [1., -1.], 0.),
            seg([1., -1.], [-1., -1.], 1.),
            seg([-1., -1.], [-1., 1.], 2.),
            seg([-1., 1.], [1., 1.], 3.),
        ];
        assert!(matches!(build_ball(cw, &BallConfig::default()), Err(BallError::NotConvex(_))));
        // odd count
        let odd = vec![seg([1., -1.], [1., 1.], 0.)];
        assert!(matches!(build_ball(odd, &BallConfig::default()), Err(BallError::InvalidPartition(_))));
    }

    #[test]
    fn rejects_degenerate_and_concave_arcs() {
        let p = |s: &str| expr::parse(s).unwrap();
        // u' vanishes at t = 0
        let degenerate = vec![Piece::arc(p("cos(pi/2*t^2)"), p("sin(pi/2*t^2)"), 0.0, 1.0)];
        let err = build_ball(degenerate, &BallConfig { auto_symmetrize: true, ..Default::default() });
        assert!(matches!(err, Err(BallError::DegeneratePiece { .. })), "{err:?}");
        // a star-shaped but non-convex boundary: r = 1 + 0.3 cos(4 theta)
        let r = "(1+0.3*cos(2*pi*t))";
        let th = "(pi/2*t)";
        let star: Vec<Piece> = (0..4)
            .map(|i| {
                Piece::arc(
                    p(&format!("{r}*cos({th})")),
                    p(&format!("{r}*sin({th})")),
                    i as f64,
                    i as f64 + 1.0,
                )
            })
            .collect();
        let err = build_ball(star, &BallConfig::default());
        assert!(matches!(err, Err(BallError::NotConvex(_))), "{err:?}");
    }

    #[test]
    fn declared_half_period_must_match() {
        let doc: BallDoc = serde_json::from_str(
            r#"{"T": 3, "auto_symmetrize": true, "pieces": [
                {"kind":"segment","p0":[1,-1],"p1":[1,1],"t0":0,"t1":1},
                {"kind":"segment","p0":[1,1],"p1":[-1,1],"t0":1,"t1":2}]}"#,
        )
        .unwrap();
        assert!(matches!(doc.build(&QuadratureConfig::default()), Err(BallError::InvalidPartition(_))));
        let ok = BallDoc { half_period: Some(2.0), ..doc };
        assert!((ok.build(&QuadratureConfig::default()).unwrap().area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn doc_round_trip() {
        let b = builtin("mixed_example21");
        let json = serde_json::to_string(&b.to_doc()).unwrap();
        let back: BallDoc = serde_json::from_str(&json).unwrap();
        let rebuilt = back.build(&QuadratureConfig::default()).unwrap();
        assert!((rebuilt.area() - b.area()).abs() < 1e-14);
        let src: BallSource = serde_json::from_str(r#"{"builtin":"regular_2k_gon","k":4}"#).unwrap();
        assert_eq!(src.build(&QuadratureConfig::default()).unwrap().num_pieces(), 8);
        let src: BallSource = serde_json::from_str(r#""square""#).unwrap();
        assert_eq!(src.build(&QuadratureConfig::default()).unwrap().num_pieces(), 4);
    }

    #[test]
    fn area_scales_quadratically() {
        for name in ["euclidean", "mixed_example21", "square"] {
            let b = builtin(name);
            for c in [0.5, 2.0, 3.0] {
                let s = b.scaled(c).unwrap();
                assert!((s.area() - c * c * b.area()).abs() < 1e-10 * c * c * b.area());
            }
        }
    }

    #[test]
    fn dual_point_is_constant_on_segments() {
        let b = builtin("mixed_example21");
        let v0 = b.dual_point_on(2, 2.0).unwrap();
        for k in 0..=100 {
            let v = b.dual_point_on(2, 2.0 + k as f64 / 100.0).unwrap();
            assert!((v - v0).norm() < 1e-12);
        }
    }
}

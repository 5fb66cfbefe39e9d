//! Minkowski-type inequality, the isoperimetric ledger and the polygonal
//! Lhuilier construction.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ball::{build_ball, BallConfig, BallError, Piece, UnitBall};
use crate::curve::{curve_from_radius_with, AdmissibleCurve, Convexity, CurveConfig, CurveError, RadiusFunction};
use crate::decomp::{self, DecompError};
use crate::expr::Expr;
use crate::geom::{shoelace_area, Vec2};
use crate::measures;
use crate::quad::{QuadError, QuadratureConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("NotConvexInput: curvature radius changes sign near t = {t}")]
    NotConvexInput { t: f64 },
    #[error("InvalidPolygon: {0}")]
    InvalidPolygon(String),
    #[error("DegenerateIntersection: {0}")]
    DegenerateIntersection(String),
    #[error("EmbeddingFailed: {0}")]
    EmbeddingFailed(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl InequalityError {
    pub fn kind(&self) -> &'static str {
        match self {
            InequalityError::NotConvexInput { .. } => "NotConvexInput",
            InequalityError::InvalidPolygon(_) => "InvalidPolygon",
            InequalityError::DegenerateIntersection(_) => "DegenerateIntersection",
            InequalityError::EmbeddingFailed(_) => "EmbeddingFailed",
            InequalityError::Decomp(e) => e.kind(),
            InequalityError::Curve(e) => e.kind(),
            InequalityError::Ball(e) => e.kind(),
            InequalityError::Quadrature(_) => "QuadratureError",
        }
    }
}

/// Relative tolerance of inequality verdicts.
pub const GAP_TOL: f64 = 1e-9;

/// `L*² - 4 A(γ) A(U)` with its natural scale `L*² + 4 |A(γ)| A(U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinkowskiGap {
    pub gap: f64,
    pub scale: f64,
}

impl MinkowskiGap {
    pub fn holds(&self) -> bool {
        self.gap >= -GAP_TOL * self.scale
    }
}

pub fn minkowski_gap(curve: &AdmissibleCurve) -> Result<MinkowskiGap, QuadError> {
    let l = measures::dual_length(curve)?;
    let a = measures::signed_area(curve)?;
    let a_u = curve.ball().area();
    Ok(MinkowskiGap {
        gap: l * l - 4.0 * a * a_u,
        scale: l * l + 4.0 * a.abs() * a_u,
    })
}

/// Every term of the isoperimetric identity
/// `L*²/(4A_U) = A_γ - 2A_WC - A_CWMS` and the gaps of its weakenings.
/// `a_wc` is the once-around area of the Wigner caustic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoLedger {
    pub l_star: f64,
    pub a_u: f64,
    pub a_gamma: f64,
    pub a_wc: f64,
    pub a_wc_full_period: f64,
    pub a_cwms: f64,
    pub mean_width: f64,
    pub lhs: f64,
    pub identity_residual: f64,
    pub gap_sym: f64,
    pub gap_cw: f64,
    pub gap_busemann: f64,
    pub minkowski_gap: f64,
    pub minkowski_scale: f64,
    pub scale: f64,
    pub tol: f64,
}

impl IsoLedger {
    /// Human-readable violations: negative gaps beyond tolerance and an
    /// identity residual above `1e-8 lhs`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.identity_residual.abs() > 1e-8 * self.lhs.abs() {
            out.push(format!(
                "identity residual {:e} exceeds 1e-8 lhs ({:e})",
                self.identity_residual,
                1e-8 * self.lhs.abs()
            ));
        }
        for (name, gap) in [
            ("gap_sym", self.gap_sym),
            ("gap_cw", self.gap_cw),
            ("gap_busemann", self.gap_busemann),
        ] {
            if gap < -self.tol {
                out.push(format!("{name} = {gap:e} below -{:e}", self.tol));
            }
        }
        if self.minkowski_gap < -GAP_TOL * self.minkowski_scale {
            out.push(format!("minkowski gap {:e} is negative", self.minkowski_gap));
        }
        out
    }

    pub fn equality_sym(&self) -> bool {
        self.gap_sym.abs() <= 10.0 * self.tol
    }

    pub fn equality_cw(&self) -> bool {
        self.gap_cw.abs() <= 10.0 * self.tol
    }

    pub fn equality_busemann(&self) -> bool {
        self.gap_busemann.abs() <= 10.0 * self.tol
    }
}

pub fn iso_ledger(curve: &AdmissibleCurve) -> Result<IsoLedger, InequalityError> {
    if let Convexity::NonConvex { t } = curve.is_convex() {
        return Err(InequalityError::NotConvexInput { t });
    }
    let d = decomp::decompose(curve)?;
    ledger_from_parts(curve, &d.wc, &d.cwms)
}

/// The ledger with given Wigner caustic and CWMS curves; used by the
/// corpus harness to audit its own decomposition.
pub fn ledger_from_parts(
    curve: &AdmissibleCurve,
    wc: &AdmissibleCurve,
    cwms: &AdmissibleCurve,
) -> Result<IsoLedger, InequalityError> {
    let l_star = measures::dual_length(curve)?;
    let a_u = curve.ball().area();
    let a_gamma = measures::signed_area(curve)?;
    let a_wc_full_period = measures::signed_area(wc)?;
    let a_wc = 0.5 * a_wc_full_period;
    let a_cwms = measures::signed_area(cwms)?;
    let lhs = l_star * l_star / (4.0 * a_u);
    let scale = lhs.abs().max(a_gamma.abs());
    Ok(IsoLedger {
        l_star,
        a_u,
        a_gamma,
        a_wc,
        a_wc_full_period,
        a_cwms,
        mean_width: l_star / a_u,
        lhs,
        identity_residual: lhs - (a_gamma - 2.0 * a_wc - a_cwms),
        gap_sym: lhs - (a_gamma - a_cwms),
        gap_cw: lhs - (a_gamma - 2.0 * a_wc),
        gap_busemann: lhs - a_gamma,
        minkowski_gap: l_star * l_star - 4.0 * a_gamma * a_u,
        minkowski_scale: l_star * l_star + 4.0 * a_gamma.abs() * a_u,
        scale,
        tol: GAP_TOL * scale,
    })
}

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Accepts either orientation; clockwise input is reversed.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Polygon, InequalityError> {
        if vertices.len() < 3 {
            return Err(InequalityError::InvalidPolygon(format!(
                "{} vertices; at least 3 needed",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(InequalityError::InvalidPolygon("non-finite vertex".into()));
        }
        if shoelace_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if e0.norm() == 0.0 {
                return Err(InequalityError::InvalidPolygon(format!("repeated vertex {i}")));
            }
            if !(e0.cross(e1) > 0.0) {
                return Err(InequalityError::InvalidPolygon(format!(
                    "not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        // A strictly convex polygon turns exactly once.
        let turning: f64 = (0..n)
            .map(|i| {
                let e0 = vertices[(i + 1) % n] - vertices[i];
                let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                e0.cross(e1).atan2(e0.dot(e1))
            })
            .sum();
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(InequalityError::InvalidPolygon("edges wind more than once".into()));
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        shoelace_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Edges `(start, end)` in counterclockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Unit outward normals of the edges.
    pub fn normals(&self) -> Vec<Vec2> {
        self.edges()
            .map(|(a, b)| {
                let d = (b - a).perp_cw();
                d * (1.0 / d.norm())
            })
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn translated(&self, d: Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.edges().all(|(a, b)| (b - a).cross(-a) > 0.0)
    }
}

/// Intersection of the halfplanes `<n_i, x> <= h_i` (all `h_i > 0`), by
/// polar duality: the constraints that matter are the vertices of the
/// convex hull of `n_i / h_i`.
pub fn intersect_halfplanes(constraints: &[(Vec2, f64)]) -> Result<Polygon, InequalityError> {
    if constraints.iter().any(|&(n, h)| !(h > 0.0) || !n.is_finite() || n.norm() == 0.0) {
        return Err(InequalityError::DegenerateIntersection(
            "the origin must lie strictly inside every halfplane".into(),
        ));
    }
    let dual: Vec<Vec2> = constraints.iter().map(|&(n, h)| n * (1.0 / h)).collect();
    let hull = convex_hull(&dual);
    if hull.len() < 3 {
        return Err(InequalityError::DegenerateIntersection("unbounded intersection".into()));
    }
    let m = hull.len();
    let mut vertices = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (hull[k], hull[(k + 1) % m]);
        let det = a.cross(b);
        if !(det > 0.0) {
            return Err(InequalityError::DegenerateIntersection("unbounded intersection".into()));
        }
        vertices.push(Vec2::new(b.y - a.y, a.x - b.x) * (1.0 / det));
    }
    Polygon::new(vertices)
}

/// Counterclockwise hull, dropping duplicate and collinear points.
fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| (*a - *b).norm() <= 1e-12 * scale);
    if pts.len() < 3 {
        return pts;
    }
    let eps = 1e-14 * scale * scale;
    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `K₁ = ∩ {x : <n_i, x> <= 1}` over the unit outward edge normals of `K`.
pub fn circumscribed_parallel_polygon(k: &Polygon) -> Result<Polygon, InequalityError> {
    let constraints: Vec<(Vec2, f64)> = k.normals().into_iter().map(|n| (n, 1.0)).collect();
    intersect_halfplanes(&constraints)
}

/// `K₁ ∩ (-K₁)`; `K₁` must contain the origin in its interior.
pub fn symmetrize_polygon(k1: &Polygon) -> Result<Polygon, InequalityError> {
    if !k1.contains_origin() {
        return Err(InequalityError::DegenerateIntersection(
            "the polygon does not contain the origin".into(),
        ));
    }
    let mut constraints = Vec::with_capacity(2 * k1.len());
    for ((a, _), n) in k1.edges().zip(k1.normals()) {
        let h = n.dot(a);
        constraints.push((n, h));
        constraints.push((-n, h));
    }
    let out = intersect_halfplanes(&constraints)?;
    // Start at a canonical vertex so equal polygons compare vertex for vertex.
    let vs = out.vertices();
    let start = (0..vs.len())
        .min_by(|&i, &j| angle(vs[i]).total_cmp(&angle(vs[j])))
        .unwrap();
    let mut rotated = vs[start..].to_vec();
    rotated.extend_from_slice(&vs[..start]);
    Ok(Polygon { vertices: rotated })
}

fn angle(v: Vec2) -> f64 {
    v.y.atan2(v.x).rem_euclid(std::f64::consts::TAU)
}

/// The unit ball whose boundary is the symmetric polygon `q` (an even
/// number of vertices, `q[j + m] = -q[j]`), one unit of parameter per edge.
pub fn polygon_ball(q: &Polygon, quad: &QuadratureConfig) -> Result<UnitBall, BallError> {
    let vs = q.vertices();
    let m = vs.len() / 2;
    let pieces = (0..m)
        .map(|j| Piece::segment(vs[j], vs[j + 1], j as f64, (j + 1) as f64))
        .collect();
    build_ball(
        pieces,
        &BallConfig {
            quad: *quad,
            auto_symmetrize: true,
            half_period: None,
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct LhuilierReport {
    #[serde(rename = "K")]
    pub k: Polygon,
    #[serde(rename = "K1")]
    pub k1: Polygon,
    #[serde(rename = "K1_0")]
    pub k1_0: Polygon,
    #[serde(rename = "L_star")]
    pub l_star: f64,
    #[serde(rename = "A_K")]
    pub a_k: f64,
    #[serde(rename = "A_K1_0")]
    pub a_k1_0: f64,
    pub gap: f64,
    pub scale: f64,
    pub tol: f64,
    pub equality: bool,
    /// Radius of each edge of `K₁⁰` in the embedding of `K`.
    pub radii: Vec<f64>,
}

impl LhuilierReport {
    pub fn holds(&self) -> bool {
        self.gap >= -self.tol
    }
}

/// Builds `K₁`, `K₁⁰`, embeds `K` as an admissible curve of the ball
/// `K₁⁰` and evaluates `L*(K)² / (4A(K₁⁰)) - A(K)`.
pub fn lhuilier_check(k: &Polygon, quad: &QuadratureConfig) -> Result<LhuilierReport, InequalityError> {
    let k1 = circumscribed_parallel_polygon(k)?;
    let k1_0 = symmetrize_polygon(&k1)?;
    let (curve, radii) = embed_polygon(k, &k1_0, quad)?;
    let l_star = measures::dual_length(&curve)?;
    let a_k = measures::signed_area(&curve)?;
    let a_k1_0 = curve.ball().area();
    let lhs = l_star * l_star / (4.0 * a_k1_0);
    let scale = lhs.abs().max(a_k.abs());
    Ok(LhuilierReport {
        k: k.clone(),
        k1,
        k1_0,
        l_star,
        a_k,
        a_k1_0,
        gap: lhs - a_k,
        scale,
        tol: GAP_TOL * scale,
        equality: curve.is_multiple_of_ball(1e-8).is_some(),
        radii,
    })
}

/// `K` as a curve of `𝒞(q)`: each edge of `K` rides the edge of `q` with
/// the same outward normal; the remaining edges of `q` get radius 0.
pub fn embed_polygon(
    k: &Polygon,
    q: &Polygon,
    quad: &QuadratureConfig,
) -> Result<(AdmissibleCurve, Vec<f64>), InequalityError> {
    let ball = Arc::new(polygon_ball(q, quad)?);
    let k_normals = k.normals();
    let k_edges: Vec<(Vec2, Vec2)> = k.edges().collect();
    let mut used = vec![false; k_edges.len()];
    let mut radii = Vec::with_capacity(q.len());
    let mut base: Option<Vec2> = None;
    for ((a, b), nu) in q.edges().zip(q.normals()) {
        let hit = k_normals
            .iter()
            .position(|n| n.cross(nu).abs() <= 1e-9 && n.dot(nu) > 0.0);
        match hit {
            Some(e) => {
                if used[e] {
                    return Err(InequalityError::EmbeddingFailed(format!("edge {e} of K matched twice")));
                }
                used[e] = true;
                let (p0, p1) = k_edges[e];
                radii.push((p1 - p0).norm() / (b - a).norm());
                base.get_or_insert(p0);
            }
            None => radii.push(0.0),
        }
    }
    if let Some(e) = used.iter().position(|u| !u) {
        return Err(InequalityError::EmbeddingFailed(format!(
            "edge {e} of K is parallel to no edge of the symmetrization"
        )));
    }
    let config = CurveConfig {
        quad: *quad,
        ..Default::default()
    };
    let radius = RadiusFunction::new(radii.iter().map(|&r| Expr::Num(r)).collect());
    let curve = curve_from_radius_with(ball, radius, base.unwrap_or(Vec2::ZERO), &config)?;
    Ok((curve, radii))
}

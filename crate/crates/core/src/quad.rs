//! Piecewise adaptive Gauss–Legendre quadrature.
//!
//! Integrals are always split at the breakpoints of a partition (the vertex
//! parameters of a unit ball), so each panel sees a smooth integrand. Every
//! panel is compared against the sum of its two halves; a panel is accepted
//! once the difference is below `rel_tol` relative to either its own
//! absolute integral or its share of the whole absolute integral.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge on piece {piece} panel [{a}, {b}] (error estimate {error:e})")]
    NoConvergence { piece: usize, a: f64, b: f64, error: f64 },
    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub nodes_per_panel: usize,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            nodes_per_panel: 32,
            rel_tol: 1e-10,
            max_depth: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        if self.nodes_per_panel < 2 {
            return Err(QuadError::InvalidConfig("nodes_per_panel must be at least 2".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::InvalidConfig("rel_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn rule(&self) -> Arc<GaussLegendre> {
        GaussLegendre::cached(self.nodes_per_panel)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(rule) = cache.read().unwrap().get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(GaussLegendre::new(n));
        cache.write().unwrap().entry(n).or_insert(rule).clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
        self.nodes.iter().map(move |x| c + h * x)
    }

    /// Fixed-rule integral of `f` over [a, b]; also returns the integral of |f|.
    pub fn integrate<V: QuadValue>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> V) -> (V, f64) {
        let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
        let mut sum = V::zero();
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(c + h * x);
            sum = sum + v * *w;
            abs += w * v.magnitude();
        }
        (sum * h, abs * h.abs())
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values that can be integrated: scalars and plane vectors.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Vec2 {
    fn zero() -> Self {
        Vec2::ZERO
    }
    fn magnitude(self) -> f64 {
        self.x.abs() + self.y.abs()
    }
}

/// A parameter interval tagged with the partition piece it belongs to, so
/// integrands can evaluate one-sided at shared endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub piece: usize,
    pub a: f64,
    pub b: f64,
}

/// An accepted panel of the adaptive subdivision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf<V> {
    pub a: f64,
    pub b: f64,
    pub value: V,
}

/// Adaptively integrates over each span and returns the accepted panels of
/// every span, in order.
pub fn adaptive_leaves<V, F>(spans: &[Span], cfg: &QuadratureConfig, f: F) -> Result<Vec<Vec<Leaf<V>>>, QuadError>
where
    V: QuadValue,
    F: Fn(usize, f64) -> V,
{
    adaptive_leaves_floor(spans, cfg, 0.0, f)
}

/// As [`adaptive_leaves`], but a panel is also accepted once its error
/// drops below `floor` times its length: the absolute rounding level of an
/// integrand that cancels to noise.
pub fn adaptive_leaves_floor<V, F>(
    spans: &[Span],
    cfg: &QuadratureConfig,
    floor: f64,
    f: F,
) -> Result<Vec<Vec<Leaf<V>>>, QuadError>
where
    V: QuadValue,
    F: Fn(usize, f64) -> V,
{
    cfg.validate()?;
    let rule = cfg.rule();
    let total_len: f64 = spans.iter().map(|s| (s.b - s.a).abs()).sum();
    let mut coarse = Vec::with_capacity(spans.len());
    let mut abs_total = 0.0;
    for s in spans {
        let (v, abs) = rule.integrate(s.a, s.b, |t| f(s.piece, t));
        check_finite(v, abs, s)?;
        abs_total += abs;
        coarse.push(v);
    }
    let mut worst: Option<(usize, f64, f64, f64)> = None;
    let mut out = Vec::with_capacity(spans.len());
    for (s, whole) in spans.iter().zip(coarse) {
        let mut ctx = Ctx {
            rule: &rule,
            cfg,
            piece: s.piece,
            f: &f,
            density: if total_len > 0.0 { abs_total / total_len } else { 0.0 },
            floor,
            leaves: Vec::new(),
            worst: &mut worst,
        };
        ctx.refine(s.a, s.b, whole, 0)?;
        out.push(ctx.leaves);
    }
    if let Some((piece, a, b, error)) = worst {
        return Err(QuadError::NoConvergence { piece, a, b, error });
    }
    Ok(out)
}

fn check_finite<V: QuadValue>(v: V, abs: f64, s: &Span) -> Result<(), QuadError> {
    if !(v.magnitude().is_finite() && abs.is_finite()) {
        return Err(QuadError::NonFinite { t: 0.5 * (s.a + s.b) });
    }
    Ok(())
}

struct Ctx<'a, V, F> {
    rule: &'a GaussLegendre,
    cfg: &'a QuadratureConfig,
    piece: usize,
    f: &'a F,
    density: f64,
    floor: f64,
    leaves: Vec<Leaf<V>>,
    worst: &'a mut Option<(usize, f64, f64, f64)>,
}

impl<V: QuadValue, F: Fn(usize, f64) -> V> Ctx<'_, V, F> {
    fn refine(&mut self, a: f64, b: f64, whole: V, depth: usize) -> Result<(), QuadError> {
        let m = 0.5 * (a + b);
        let piece = self.piece;
        let f = self.f;
        let (l, labs) = self.rule.integrate(a, m, |t| f(piece, t));
        let (r, rabs) = self.rule.integrate(m, b, |t| f(piece, t));
        check_finite(l + r, labs + rabs, &Span { piece, a, b })?;
        let err = (l + r - whole).magnitude();
        let allowed = (self.cfg.rel_tol * (labs + rabs).max(self.density * (b - a).abs())).max(self.floor * (b - a).abs());
        if err <= allowed || err == 0.0 {
            self.leaves.push(Leaf { a, b: m, value: l });
            self.leaves.push(Leaf { a: m, b, value: r });
            return Ok(());
        }
        if depth >= self.cfg.max_depth {
            if self.worst.is_none_or(|w| err > w.3) {
                *self.worst = Some((piece, a, b, err));
            }
            self.leaves.push(Leaf { a, b: m, value: l });
            self.leaves.push(Leaf { a: m, b, value: r });
            return Ok(());
        }
        self.refine(a, m, l, depth + 1)?;
        self.refine(m, b, r, depth + 1)
    }
}

/// Adaptive integral over spans, summed in span order.
pub fn integrate_spans<V, F>(spans: &[Span], cfg: &QuadratureConfig, f: F) -> Result<V, QuadError>
where
    V: QuadValue,
    F: Fn(usize, f64) -> V,
{
    integrate_spans_floor(spans, cfg, 0.0, f)
}

pub fn integrate_spans_floor<V, F>(spans: &[Span], cfg: &QuadratureConfig, floor: f64, f: F) -> Result<V, QuadError>
where
    V: QuadValue,
    F: Fn(usize, f64) -> V,
{
    let leaves = adaptive_leaves_floor(spans, cfg, floor, f)?;
    Ok(leaves
        .iter()
        .flatten()
        .fold(V::zero(), |acc, leaf| acc + leaf.value))
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`, splitting at
/// every breakpoint.
pub fn integrate_piecewise<F>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    let spans: Vec<Span> = breakpoints
        .windows(2)
        .enumerate()
        .map(|(piece, w)| Span { piece, a: w[0], b: w[1] })
        .collect();
    integrate_spans(&spans, cfg, |_, t| f(t))
}

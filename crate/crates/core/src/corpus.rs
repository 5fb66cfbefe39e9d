//! Random balls, curves and expressions for the property suites, and the
//! property-check runner behind `normplane corpus`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{builtin_ball_with, BuiltinParams, UnitBall};
use crate::curve::{curve_from_radius, AdmissibleCurve, CurveError, RadiusFunction};
use crate::decomp;
use crate::expr::{self, BinOp, Expr, Func};
use crate::geom::{shoelace_area, Vec2};
use crate::inequalities::{self, Polygon, GAP_TOL};
use crate::measures::{self, PREDICATE_TOL};
use crate::quad::{GaussLegendre, QuadratureConfig};

/// The balls every corpus cycles through.
pub const CORPUS_BALLS: [(&str, Option<usize>); 4] = [
    ("euclidean", None),
    ("square", None),
    ("regular_2k_gon", Some(3)),
    ("mixed_example21", None),
];

pub fn corpus_balls(quad: &QuadratureConfig) -> Vec<(String, Arc<UnitBall>)> {
    CORPUS_BALLS
        .iter()
        .map(|&(name, k)| {
            let ball = builtin_ball_with(name, &BuiltinParams { k }, quad).expect("builtin balls are valid");
            let label = match k {
                Some(k) => format!("{name}(k={k})"),
                None => name.to_string(),
            };
            (label, Arc::new(ball))
        })
        .collect()
}

/// A deterministic generator for instance `index` of a run seeded `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const BASIS: usize = 5;

// 1, τ, τ², τ³, sin(πτ) with τ = (t - t0)/h.
fn basis_value(k: usize, tau: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => tau,
        2 => tau * tau,
        3 => tau * tau * tau,
        _ => (std::f64::consts::PI * tau).sin(),
    }
}

fn basis_expr(coeffs: &[f64], t0: f64, h: f64) -> Expr {
    let tau = || expr::div(expr::sub(Expr::Var, Expr::Num(t0)), Expr::Num(h));
    let mut e = Expr::Num(coeffs[0]);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        if c == 0.0 {
            continue;
        }
        let term = match k {
            1 => tau(),
            2 | 3 => expr::pow_expr(tau(), Expr::Num(k as f64)),
            _ => expr::call(Func::Sin, expr::mul(Expr::Pi, tau())),
        };
        e = expr::add(e, expr::mul(Expr::Num(c), term));
    }
    e
}

/// Coefficients of a radius over the first half of the partition; the
/// second half follows from the parity.
#[derive(Debug, Clone, PartialEq)]
struct HalfCoeffs(Vec<[f64; BASIS]>);

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> HalfCoeffs {
    HalfCoeffs(
        (0..n)
            .map(|_| std::array::from_fn(|_| amp * rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

// ∫ φ_k(τ(t)) g(t) dt over the first-half pieces, one column per
// coefficient.
fn moments<V: crate::quad::QuadValue>(ball: &UnitBall, g: impl Fn(usize, f64) -> V) -> Vec<[V; BASIS]> {
    let rule = GaussLegendre::cached(64);
    (0..ball.num_pieces() / 2)
        .map(|i| {
            let p = ball.piece(i);
            let (t0, h) = (p.t0(), p.t1() - p.t0());
            std::array::from_fn(|k| rule.integrate(t0, p.t1(), |t| g(i, t) * basis_value(k, (t - t0) / h)).0)
        })
        .collect()
}

/// Removes the closing defect `∫₀ᵀ a u'` of an antisymmetric radius.
fn project_closing(ball: &UnitBall, c: &mut HalfCoeffs) {
    let m = moments(ball, |i, t| ball.piece(i).u_prime(t));
    let (mut g, mut mc) = ([[0.0; 2]; 2], [0.0; 2]);
    for (row, ci) in m.iter().zip(&c.0) {
        for k in 0..BASIS {
            let v = [row[k].x, row[k].y];
            for a in 0..2 {
                mc[a] += v[a] * ci[k];
                for b in 0..2 {
                    g[a][b] += v[a] * v[b];
                }
            }
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let lam = [
        (g[1][1] * mc[0] - g[0][1] * mc[1]) / det,
        (g[0][0] * mc[1] - g[1][0] * mc[0]) / det,
    ];
    for (row, ci) in m.iter().zip(&mut c.0) {
        for k in 0..BASIS {
            ci[k] -= row[k].x * lam[0] + row[k].y * lam[1];
        }
    }
}

/// Removes the dual length `∫₀ᵀ s [u,u']` of a symmetric radius.
fn project_dual_length(ball: &UnitBall, c: &mut HalfCoeffs) {
    let m = moments(ball, |i, t| {
        let p = ball.piece(i);
        p.u(t).cross(p.u_prime(t))
    });
    let (mut mm, mut mc) = (0.0, 0.0);
    for (row, ci) in m.iter().zip(&c.0) {
        for k in 0..BASIS {
            mm += row[k] * row[k];
            mc += row[k] * ci[k];
        }
    }
    for (row, ci) in m.iter().zip(&mut c.0) {
        for k in 0..BASIS {
            ci[k] -= row[k] * mc / mm;
        }
    }
}

/// Radius `s + a + k` with `s` symmetric, `a` antisymmetric.
fn assemble(ball: &UnitBall, sym: Option<&HalfCoeffs>, anti: Option<&HalfCoeffs>, k: f64) -> Vec<Expr> {
    let n = ball.num_pieces() / 2;
    let half_t = ball.half_period();
    (0..2 * n)
        .map(|i| {
            let (j, sign, shift) = if i < n { (i, 1.0, 0.0) } else { (i - n, -1.0, half_t) };
            let p = ball.piece(j);
            let h = p.t1() - p.t0();
            let mut c = [0.0; BASIS];
            if let Some(s) = sym {
                for k in 0..BASIS {
                    c[k] += s.0[j][k];
                }
            }
            if let Some(a) = anti {
                for k in 0..BASIS {
                    c[k] += sign * a.0[j][k];
                }
            }
            c[0] += k;
            basis_expr(&c, p.t0() + shift, h)
        })
        .collect()
}

// Minimum of the radius over a fine grid of every piece.
fn grid_min(ball: &UnitBall, radius: &RadiusFunction) -> f64 {
    let mut min = f64::INFINITY;
    for (i, p) in ball.pieces().iter().enumerate() {
        for k in 0..=256 {
            let t = p.t0() + (p.t1() - p.t0()) * k as f64 / 256.0;
            min = min.min(radius.value(i, t));
        }
    }
    min
}

/// Kinds of random convex curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    General,
    Symmetric,
    ConstantWidth,
    MultipleOfBall,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::General,
        CurveKind::Symmetric,
        CurveKind::ConstantWidth,
        CurveKind::MultipleOfBall,
    ];
}

fn random_basepoint(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
}

/// A random convex curve of the given kind; strictly positive radius.
pub fn random_convex_curve(
    ball: &Arc<UnitBall>,
    kind: CurveKind,
    rng: &mut ChaCha8Rng,
) -> Result<AdmissibleCurve, CurveError> {
    let n = ball.num_pieces() / 2;
    let sym = random_coeffs(rng, n, 1.0);
    let amp = rng.gen_range(0.3..1.5);
    let mut anti = random_coeffs(rng, n, amp);
    project_closing(ball, &mut anti);
    let margin = rng.gen_range(0.1..1.0);
    let radius = match kind {
        CurveKind::General => assemble(ball, Some(&sym), Some(&anti), 0.0),
        CurveKind::Symmetric => assemble(ball, Some(&sym), None, 0.0),
        CurveKind::ConstantWidth => assemble(ball, None, Some(&anti), 0.0),
        CurveKind::MultipleOfBall => vec![Expr::Num(0.0); 2 * n],
    };
    let radius = RadiusFunction::new(radius);
    let k = -grid_min(ball, &radius) + margin;
    let radius = radius.map(|e| expr::add(e, Expr::Num(k)));
    curve_from_radius(ball.clone(), radius, random_basepoint(rng))
}

/// A symmetric curve with zero dual length (not convex in general).
pub fn random_sigma(ball: &Arc<UnitBall>, rng: &mut ChaCha8Rng) -> Result<AdmissibleCurve, CurveError> {
    let mut sym = random_coeffs(rng, ball.num_pieces() / 2, 1.0);
    project_dual_length(ball, &mut sym);
    let radius = RadiusFunction::new(assemble(ball, Some(&sym), None, 0.0));
    curve_from_radius(ball.clone(), radius, random_basepoint(rng))
}

/// A constant width curve with zero dual length.
pub fn random_kappa(ball: &Arc<UnitBall>, rng: &mut ChaCha8Rng) -> Result<AdmissibleCurve, CurveError> {
    let mut anti = random_coeffs(rng, ball.num_pieces() / 2, 1.0);
    project_closing(ball, &mut anti);
    let radius = RadiusFunction::new(assemble(ball, None, Some(&anti), 0.0));
    curve_from_radius(ball.clone(), radius, random_basepoint(rng))
}

fn ellipse_points(rng: &mut ChaCha8Rng, angles: &[f64]) -> Vec<Vec2> {
    let (a, b) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
    let rot = rng.gen_range(0.0..std::f64::consts::TAU);
    let (c, s) = (rot.cos(), rot.sin());
    angles
        .iter()
        .map(|th| {
            let (x, y) = (a * th.cos(), b * th.sin());
            Vec2::new(c * x - s * y, s * x + c * y)
        })
        .collect()
}

fn sorted_angles(rng: &mut ChaCha8Rng, m: usize, range: f64) -> Vec<f64> {
    // keep neighbours apart so no edge is tiny
    loop {
        let mut th: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..range)).collect();
        th.sort_by(f64::total_cmp);
        let gaps_ok = th.windows(2).all(|w| w[1] - w[0] > 1e-3 * range)
            && range - (th[m - 1] - th[0]) > 1e-3 * range;
        if gaps_ok {
            return th;
        }
    }
}

/// A random strictly convex polygon with `m` vertices inscribed in a
/// random ellipse, randomly translated.
pub fn random_convex_polygon(rng: &mut ChaCha8Rng, m: usize) -> Polygon {
    let th = sorted_angles(rng, m, std::f64::consts::TAU);
    let shift = random_basepoint(rng);
    let pts = ellipse_points(rng, &th).into_iter().map(|p| p + shift).collect();
    Polygon::new(pts).expect("points on an ellipse are in convex position")
}

/// A random centrally symmetric polygon with `2m` vertices (opposite
/// sides parallel), randomly translated.
pub fn random_symmetric_polygon(rng: &mut ChaCha8Rng, m: usize) -> Polygon {
    let mut th = sorted_angles(rng, m, std::f64::consts::PI);
    th.extend(th.clone().iter().map(|t| t + std::f64::consts::PI));
    let shift = random_basepoint(rng);
    let pts = ellipse_points(rng, &th).into_iter().map(|p| p + shift).collect();
    Polygon::new(pts).expect("points on an ellipse are in convex position")
}

/// A random expression in `t` built from the whole grammar.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Expr::Pi,
            1 => Expr::Num((rng.gen_range(-4.0f64..4.0) * 8.0).round() / 8.0),
            _ => Expr::Var,
        };
    }
    match rng.gen_range(0..6) {
        0 => Expr::Neg(Box::new(random_expr(rng, depth - 1))),
        1 | 2 | 3 => {
            let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div].choose(rng).unwrap();
            Expr::Bin(op, Box::new(random_expr(rng, depth - 1)), Box::new(random_expr(rng, depth - 1)))
        }
        4 => {
            // small integer or half-integer exponents
            let e = *[2.0, 3.0, 0.5, -1.0, 1.5].choose(rng).unwrap();
            Expr::Bin(BinOp::Pow, Box::new(random_expr(rng, depth - 1)), Box::new(Expr::Num(e)))
        }
        _ => {
            let f = *Func::ALL.choose(rng).unwrap();
            Expr::Call(f, Box::new(random_expr(rng, depth - 1)))
        }
    }
}

/// One symbolic-versus-finite-difference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeProbe {
    pub expr: Expr,
    pub t: f64,
    pub symbolic: f64,
    pub numeric: f64,
}

impl DerivativeProbe {
    pub fn error(&self) -> f64 {
        (self.symbolic - self.numeric).abs() / self.symbolic.abs().max(1.0)
    }
}

// Richardson-extrapolated central difference.
fn central_difference(e: &Expr, t: f64) -> Option<f64> {
    let h = 1e-3 * t.abs().max(1.0);
    let d = |h: f64| Some((e.eval(t + h).ok()? - e.eval(t - h).ok()?) / (2.0 * h));
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Some((4.0 * d2 - d1) / 3.0)
}

/// Draws a well-conditioned probe: `f` defined near `t`, `|f| <= 1e3`,
/// and `|f'''|, |f^(5)| <= 1e3` so the difference quotient is reliable.
pub fn random_probe(rng: &mut ChaCha8Rng) -> DerivativeProbe {
    loop {
        let e = random_expr(rng, 4);
        if e.is_constant() {
            continue;
        }
        let t: f64 = rng.gen_range(-3.0..3.0);
        let d1 = e.differentiate();
        let d3 = d1.differentiate().differentiate();
        let d5 = d3.differentiate().differentiate();
        let ok = |x: Result<f64, _>, bound: f64| matches!(x, Ok(v) if v.abs() <= bound);
        let h = 1e-3 * f64::max(t.abs(), 1.0);
        let near = [t - h, t, t + h];
        if !near.iter().all(|&s| ok(e.eval(s), 1e3) && ok(d3.eval(s), 1e3) && ok(d5.eval(s), 1e3)) {
            continue;
        }
        let (Ok(symbolic), Some(numeric)) = (d1.eval(t), central_difference(&e, t)) else {
            continue;
        };
        return DerivativeProbe {
            expr: e,
            t,
            symbolic,
            numeric,
        };
    }
}

/// Signed area of the polygon through `points` samples of the curve.
pub fn shoelace_oracle(curve: &AdmissibleCurve, points: usize) -> f64 {
    let per_piece = points.div_ceil(curve.ball().num_pieces());
    shoelace_area(&curve.dense_polyline(per_piece))
}

/// Deliberate bugs the harness must catch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Negates the constant-width measure set.
    CwmsSign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusOptions {
    pub seed: u64,
    pub n: usize,
    pub quad: QuadratureConfig,
    /// Relative tolerance of the equality-case checks.
    pub rel_tol: f64,
    pub fault: Option<Fault>,
    pub shoelace_points: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            seed: 42,
            n: 100,
            quad: QuadratureConfig::default(),
            rel_tol: 1e-8,
            fault: None,
            shoelace_points: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub ball: String,
    pub kind: CurveKind,
    pub l_star: f64,
    pub a_gamma: f64,
    /// `max(L*²/(4A_U), |A_γ|)`, the scale of the gaps.
    pub ledger_scale: f64,
    pub identity_residual_rel: f64,
    pub gap_sym: f64,
    pub gap_cw: f64,
    pub gap_busemann: f64,
    pub decomposition_residual: f64,
    pub orthogonality_rel: f64,
    pub shoelace_rel: f64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub n: usize,
    pub fault: Option<Fault>,
    pub instances: Vec<InstanceReport>,
    pub violations: usize,
    pub max_identity_residual_rel: f64,
    pub min_gap_rel: f64,
}

pub fn run_corpus(opts: &CorpusOptions) -> CorpusReport {
    let balls = corpus_balls(&opts.quad);
    let instances: Vec<InstanceReport> = (0..opts.n)
        .into_par_iter()
        .map(|index| check_instance(index, &balls, opts))
        .collect();
    let violations = instances.iter().map(|r| r.violations.len()).sum();
    let max_identity_residual_rel = instances.iter().map(|r| r.identity_residual_rel).fold(0.0, f64::max);
    let min_gap_rel = instances
        .iter()
        .filter(|r| r.ledger_scale > 0.0)
        .map(|r| r.gap_sym.min(r.gap_cw).min(r.gap_busemann) / r.ledger_scale)
        .fold(f64::INFINITY, f64::min);
    CorpusReport {
        seed: opts.seed,
        n: opts.n,
        fault: opts.fault,
        instances,
        violations,
        max_identity_residual_rel,
        min_gap_rel: if min_gap_rel.is_finite() { min_gap_rel } else { 0.0 },
    }
}

fn check_instance(index: usize, balls: &[(String, Arc<UnitBall>)], opts: &CorpusOptions) -> InstanceReport {
    let mut rng = instance_rng(opts.seed, index as u64);
    let (name, ball) = &balls[index % balls.len()];
    let kind = CurveKind::ALL[(index / balls.len()) % CurveKind::ALL.len()];
    let mut report = InstanceReport {
        index,
        ball: name.clone(),
        kind,
        l_star: 0.0,
        a_gamma: 0.0,
        ledger_scale: 0.0,
        identity_residual_rel: 0.0,
        gap_sym: 0.0,
        gap_cw: 0.0,
        gap_busemann: 0.0,
        decomposition_residual: 0.0,
        orthogonality_rel: 0.0,
        shoelace_rel: 0.0,
        violations: Vec::new(),
    };
    if let Err(e) = audit(&mut report, ball, kind, &mut rng, opts) {
        report.violations.push(format!("{}: {e}", e.kind()));
    }
    report
}

fn audit(
    report: &mut InstanceReport,
    ball: &Arc<UnitBall>,
    kind: CurveKind,
    rng: &mut ChaCha8Rng,
    opts: &CorpusOptions,
) -> Result<(), inequalities::InequalityError> {
    let curve = random_convex_curve(ball, kind, rng)?;
    let v = &mut report.violations;
    let w = measures::mean_width(&curve)?;
    let wc = decomp::wigner_caustic(&curve)?;
    let mut cw = decomp::cwms(&curve)?;
    if opts.fault == Some(Fault::CwmsSign) {
        cw = cw.scaled(-1.0)?;
    }
    let res = decomp::reconstruction_residual(&curve, &wc, &cw, w);
    report.decomposition_residual = res.max;
    if res.max > res.tol {
        v.push(format!("decomposition residual {:e} above {:e}", res.max, res.tol));
    }

    let ledger = inequalities::ledger_from_parts(&curve, &wc, &cw)?;
    report.l_star = ledger.l_star;
    report.a_gamma = ledger.a_gamma;
    report.ledger_scale = ledger.scale;
    report.identity_residual_rel = ledger.identity_residual.abs() / ledger.lhs.abs();
    report.gap_sym = ledger.gap_sym;
    report.gap_cw = ledger.gap_cw;
    report.gap_busemann = ledger.gap_busemann;
    v.extend(ledger.violations());

    // image properties of the two projections
    let dual_scale = measures::dual_length_scale(&curve);
    for (label, part) in [("WC", &wc), ("CWMS", &cw)] {
        let l = measures::dual_length(part)?;
        if l.abs() > opts.rel_tol * dual_scale {
            v.push(format!("dual length of {label} is {l:e}"));
        }
    }
    match measures::is_constant_width(&wc, PREDICATE_TOL) {
        measures::WidthVerdict::Constant { width } if width.abs() <= opts.rel_tol * dual_scale => {}
        other => v.push(format!("WC is not of constant width 0: {other:?}")),
    }
    if !measures::is_symmetric(&cw, PREDICATE_TOL) {
        v.push("CWMS is not symmetric".into());
    }
    if ledger.a_wc > ledger.tol || ledger.a_cwms > ledger.tol {
        v.push(format!("positive area: A_WC = {:e}, A_CWMS = {:e}", ledger.a_wc, ledger.a_cwms));
    }
    // A point curve is orthogonal to everything; its rounding noise is not.
    let point = |c: &AdmissibleCurve| c.length() <= 1e3 * f64::EPSILON * curve.length();
    if !point(&wc) && !point(&cw) {
        let ortho = measures::mixed_area(&cw, &wc).map_err(|e| match e {
            measures::MeasureError::Quadrature(q) => q,
            measures::MeasureError::MismatchedBalls => unreachable!("parts share the ball"),
        })?;
        let ortho_scale = 0.5 * cw.length() * wc.length();
        report.orthogonality_rel = ortho.abs() / ortho_scale;
        if ortho.abs() > GAP_TOL * ortho_scale {
            v.push(format!("A(CWMS, WC) = {ortho:e} is not zero"));
        }
    }

    // equality cases versus the predicates
    let tol_eq = opts.rel_tol * ledger.scale;
    let symmetric = measures::is_symmetric(&curve, PREDICATE_TOL);
    let constant = measures::is_constant_width(&curve, PREDICATE_TOL).is_constant();
    let multiple = curve.is_multiple_of_ball(1e-8).is_some();
    if symmetric != (ledger.gap_sym <= tol_eq) {
        v.push(format!("gap_sym = {:e} disagrees with symmetry = {symmetric}", ledger.gap_sym));
    }
    if constant != (ledger.gap_cw <= tol_eq) {
        v.push(format!("gap_cw = {:e} disagrees with constant width = {constant}", ledger.gap_cw));
    }
    if multiple != (ledger.gap_busemann <= tol_eq) {
        v.push(format!(
            "gap_busemann = {:e} disagrees with multiple of u = {multiple}",
            ledger.gap_busemann
        ));
    }
    // On the square ball every admissible curve is a rectangle, so only
    // the properties a kind guarantees are checked.
    let (need_sym, need_cw) = match kind {
        CurveKind::General => (false, false),
        CurveKind::Symmetric => (true, false),
        CurveKind::ConstantWidth => (false, true),
        CurveKind::MultipleOfBall => (true, true),
    };
    if (need_sym && !symmetric) || (need_cw && !constant) || (kind == CurveKind::MultipleOfBall && !multiple) {
        v.push(format!(
            "{kind:?} curve classified as symmetric = {symmetric}, constant width = {constant}"
        ));
    }

    if opts.shoelace_points > 0 {
        let oracle = shoelace_oracle(&curve, opts.shoelace_points);
        report.shoelace_rel = (oracle - ledger.a_gamma).abs() / ledger.a_gamma.abs();
        // polygon error is O(1/N²)
        let allowed = 1e-6f64.max(100.0 / (opts.shoelace_points as f64).powi(2));
        if report.shoelace_rel > allowed {
            v.push(format!("shoelace oracle off by {:e}", report.shoelace_rel));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_curves_have_their_kind() {
        let balls = corpus_balls(&QuadratureConfig::default());
        let mut rng = instance_rng(7, 0);
        for (name, ball) in &balls {
            for kind in CurveKind::ALL {
                let c = random_convex_curve(ball, kind, &mut rng).unwrap();
                assert_eq!(c.is_convex(), crate::curve::Convexity::Convex(1));
                let sym = measures::is_symmetric(&c, PREDICATE_TOL);
                let cw = measures::is_constant_width(&c, PREDICATE_TOL).is_constant();
                match kind {
                    // rectangles are always symmetric
                    CurveKind::General if name == "square" => assert!(sym && !cw),
                    CurveKind::ConstantWidth if name == "square" => assert!(sym && cw),
                    CurveKind::General => assert!(!sym && !cw, "{name} {kind:?}: {sym} {cw}"),
                    CurveKind::Symmetric => assert!(sym && !cw, "{name} {kind:?}: {sym} {cw}"),
                    CurveKind::ConstantWidth => assert!(!sym && cw, "{name} {kind:?}: {sym} {cw}"),
                    CurveKind::MultipleOfBall => assert!(sym && cw),
                }
            }
        }
    }

    #[test]
    fn sigma_and_kappa_have_zero_dual_length() {
        let balls = corpus_balls(&QuadratureConfig::default());
        let mut rng = instance_rng(11, 3);
        for (_, ball) in &balls {
            let s = random_sigma(ball, &mut rng).unwrap();
            let k = random_kappa(ball, &mut rng).unwrap();
            let scale = measures::dual_length_scale(&s);
            assert!(measures::dual_length(&s).unwrap().abs() < 1e-10 * scale);
            let scale = measures::dual_length_scale(&k);
            assert!(measures::dual_length(&k).unwrap().abs() < 1e-10 * scale);
            assert!(measures::is_symmetric(&s, PREDICATE_TOL));
            assert!(measures::is_constant_width(&k, PREDICATE_TOL).is_constant());
        }
    }

    #[test]
    fn instance_streams_are_reproducible() {
        let a = instance_rng(5, 9).gen::<u64>();
        let b = instance_rng(5, 9).gen::<u64>();
        let c = instance_rng(5, 10).gen::<u64>();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn small_corpus_is_clean_and_fault_is_caught() {
        let opts = CorpusOptions {
            n: 8,
            ..Default::default()
        };
        let clean = run_corpus(&opts);
        let found: Vec<_> = clean.instances.iter().filter(|r| !r.violations.is_empty()).collect();
        assert_eq!(clean.violations, 0, "{found:#?}");
        let bad = run_corpus(&CorpusOptions {
            fault: Some(Fault::CwmsSign),
            ..opts
        });
        assert!(bad.violations > 0);
        assert_eq!(run_corpus(&opts), clean);
    }

    #[test]
    fn probes_agree() {
        let mut rng = instance_rng(1, 0);
        for _ in 0..200 {
            let p = random_probe(&mut rng);
            assert!(p.error() < 1e-6, "{} at {}: {} vs {}", p.expr, p.t, p.symbolic, p.numeric);
        }
    }
}

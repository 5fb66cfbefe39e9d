//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use normplane::corpus::{
    corpus_balls, instance_rng, random_convex_curve, random_convex_polygon, random_kappa, random_probe, random_sigma,
    random_symmetric_polygon, shoelace_oracle, CurveKind,
};
use normplane::decomp::wc_area_once;
use normplane::inequalities::{circumscribed_parallel_polygon, symmetrize_polygon};
use normplane::measures::{self, mixed_area};
use normplane::{decompose, iso_ledger, lhuilier_check, QuadratureConfig, Vec2};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn suffix(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; {}", failures.join("; "))
    }
}

fn dual_length_of_example() -> Outcome {
    let start = Instant::now();
    // construction included: parsing, closure and convexity checks
    let l = measures::dual_length(&example22()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    check(
        (l - 13.58).abs() <= 0.05 && secs < 1.0,
        format!("L* = {l:.10} (13.58 ± 0.05) in {secs:.3}s"),
    )
}

fn decomposition_areas_of_example() -> Outcome {
    let g = example22();
    let d = decompose(&g).map_err(|e| e.to_string())?;
    let a_wc = wc_area_once(&d.wc).map_err(|e| e.to_string())?;
    let a_cwms = measures::signed_area(&d.cwms).map_err(|e| e.to_string())?;
    let l = iso_ledger(&g).map_err(|e| e.to_string())?;
    let a_u_ok = (l.a_u - (PI / 2.0 + 1.0)).abs() <= 1e-12;
    let lhs = l.l_star * l.l_star / (4.0 * (PI / 2.0 + 1.0));
    let rhs = l.a_gamma - 2.0 * l.a_wc - l.a_cwms;
    let resid = (lhs - rhs).abs();
    check(
        (a_wc + 1.33).abs() <= 0.02 && (a_cwms + 0.48).abs() <= 0.02 && a_u_ok && resid <= 1e-6 * lhs,
        format!("A_WC = {a_wc:.6}, A_CWMS = {a_cwms:.6}, A_U = {:.12}, identity residual {resid:.2e} (lhs {lhs:.6})", l.a_u),
    )
}

fn identity_over_corpus() -> Outcome {
    let balls = corpus_balls(&QuadratureConfig::default());
    let start = Instant::now();
    let (mut worst, mut count) = (0.0f64, 0usize);
    for index in 0..200u64 {
        let (name, ball) = &balls[index as usize % balls.len()];
        let kind = CurveKind::ALL[(index as usize / 4) % 4];
        let g = random_convex_curve(ball, kind, &mut instance_rng(2024, index)).map_err(|e| format!("{name}: {e}"))?;
        let l = iso_ledger(&g).map_err(|e| format!("{name} #{index}: {e}"))?;
        worst = worst.max(l.identity_residual.abs() / l.lhs.abs());
        count += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && secs < 60.0 && count >= 200,
        format!("{count} curves on {} balls, max |residual|/lhs = {worst:.2e}, {secs:.1}s", balls.len()),
    )
}

fn gaps_and_equality_cases() -> Outcome {
    let balls = corpus_balls(&QuadratureConfig::default());
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for index in 0..200u64 {
        let (name, ball) = &balls[index as usize % balls.len()];
        let kind = CurveKind::ALL[(index as usize / 4) % 4];
        let g = random_convex_curve(ball, kind, &mut instance_rng(4048, index)).map_err(|e| e.to_string())?;
        let l = iso_ledger(&g).map_err(|e| e.to_string())?;
        let min = l.gap_sym.min(l.gap_cw).min(l.gap_busemann);
        worst = worst.min(min / l.scale);
        if min < -1e-9 * l.scale {
            failures.push(format!("{name} #{index}: negative gap {min:e}"));
        }
        let equality = match kind {
            CurveKind::General => true,
            CurveKind::Symmetric => l.equality_sym(),
            CurveKind::ConstantWidth => l.equality_cw(),
            CurveKind::MultipleOfBall => l.equality_busemann() && l.equality_sym() && l.equality_cw(),
        };
        if !equality {
            failures.push(format!("{name} #{index}: {kind:?} is not an equality case"));
        }
    }
    check(
        failures.is_empty(),
        format!("200 curves, min gap/scale = {worst:.2e}, equality cases hit{}", suffix(&failures)),
    )
}

fn sigma_kappa_orthogonality() -> Outcome {
    let balls = corpus_balls(&QuadratureConfig::default());
    let mut worst = 0.0f64;
    for index in 0..520u64 {
        let ball = &balls[index as usize % balls.len()].1;
        let mut rng = instance_rng(77, index);
        let s = random_sigma(ball, &mut rng).map_err(|e| e.to_string())?;
        let k = random_kappa(ball, &mut rng).map_err(|e| e.to_string())?;
        let a = mixed_area(&s, &k).map_err(|e| e.to_string())?;
        worst = worst.max(a.abs() / (0.5 * s.length() * k.length()));
    }
    check(worst <= 1e-9, format!("520 pairs, max |A(σ,κ)| / (½ L(σ) L(κ)) = {worst:.2e}"))
}

fn rectangles() -> Outcome {
    let mut rng = instance_rng(99, 0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
        let base = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let g = rectangle(a, b, base);
        let l = iso_ledger(&g).map_err(|e| e.to_string())?;
        let d2 = (a - b) * (a - b);
        let errs = [
            (l.a_gamma - 4.0 * a * b).abs() / (4.0 * a * b),
            (l.l_star - 4.0 * (a + b)).abs() / (4.0 * (a + b)),
            l.gap_sym.abs() / l.scale,
            (l.gap_cw - d2).abs() / l.scale,
            (l.gap_busemann - d2).abs() / l.scale,
            (l.minkowski_gap - 16.0 * d2).abs() / l.minkowski_scale,
        ];
        worst = errs.iter().fold(worst, |w, e| w.max(*e));
    }
    check(worst <= 1e-10, format!("20 rectangles, max relative error {worst:.2e}"))
}

fn lhuilier() -> Outcome {
    let quad = QuadratureConfig::default();
    let mut rng = instance_rng(1234, 0);
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for i in 0..1000 {
        let m = rng.gen_range(5..=12);
        let k = random_convex_polygon(&mut rng, m);
        let r = lhuilier_check(&k, &quad).map_err(|e| format!("polygon {i}: {e}"))?;
        worst = worst.min(r.gap / r.scale);
        if !r.holds() {
            failures.push(format!("polygon {i}: gap {:e}", r.gap));
        }
    }
    let mut eq_worst = 0.0f64;
    for i in 0..50 {
        let m = rng.gen_range(5..=12);
        let k = random_convex_polygon(&mut rng, m);
        let k1_0 = symmetrize_polygon(&circumscribed_parallel_polygon(&k).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let c = rng.gen_range(0.2..4.0);
        let r = lhuilier_check(&k1_0.scaled(c).translated(Vec2::new(1.0, -2.0)), &quad).map_err(|e| e.to_string())?;
        eq_worst = eq_worst.max(r.gap.abs() / r.scale);
        if r.gap.abs() > r.tol || !r.equality {
            failures.push(format!("multiple {i}: gap {:e}", r.gap));
        }
    }
    let mut set_worst = 0.0f64;
    for _ in 0..50 {
        let m = rng.gen_range(3..=6);
        let k = random_symmetric_polygon(&mut rng, m);
        let k1 = circumscribed_parallel_polygon(&k).map_err(|e| e.to_string())?;
        let k1_0 = symmetrize_polygon(&k1).map_err(|e| e.to_string())?;
        if k1.len() != k1_0.len() {
            failures.push(format!("K1 has {} vertices, K1⁰ {}", k1.len(), k1_0.len()));
            continue;
        }
        for v in k1.vertices() {
            let d = k1_0.vertices().iter().map(|w| (*v - *w).norm()).fold(f64::INFINITY, f64::min);
            set_worst = set_worst.max(d);
        }
    }
    if set_worst > 1e-9 {
        failures.push(format!("K1⁰ differs from K1 by {set_worst:e}"));
    }
    check(
        failures.is_empty(),
        format!(
            "1000 polygons, min gap/scale = {worst:.3e}; c·K1⁰ max |gap|/scale = {eq_worst:.1e}; parallel-sided K1⁰ = K1 within {set_worst:.1e}{}",
            suffix(&failures)
        ),
    )
}

fn oracles() -> Outcome {
    let mut curves = vec![
        ("example", example22()),
        ("rectangle", rectangle(3.0, 1.0, Vec2::new(3.0, -1.0))),
        ("circle", load_curve("circle.json")),
        ("hexagon", load_curve("hexagon_curve.json")),
    ];
    let balls = corpus_balls(&QuadratureConfig::default());
    for (i, (_, ball)) in balls.iter().enumerate() {
        let g = random_convex_curve(ball, CurveKind::General, &mut instance_rng(5, i as u64)).map_err(|e| e.to_string())?;
        curves.push(("random", g));
    }
    let mut worst = 0.0f64;
    for (name, g) in &curves {
        let a = measures::signed_area(g).map_err(|e| e.to_string())?;
        let poly = shoelace_oracle(g, 100_000);
        let rel = (a - poly).abs() / a.abs();
        if rel > 1e-6 {
            return Err(format!("{name}: quadrature {a} vs shoelace {poly}"));
        }
        worst = worst.max(rel);
    }
    let mut rng = instance_rng(31, 0);
    let mut fd_worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_probe(&mut rng);
        if p.error() > 1e-6 {
            return Err(format!("d/dt {} at t = {}: {} vs {}", p.expr, p.t, p.symbolic, p.numeric));
        }
        fd_worst = fd_worst.max(p.error());
    }
    check(
        true,
        format!("{} curves, max shoelace rel error {worst:.2e}; 1000 derivative probes, max error {fd_worst:.2e}", curves.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("dual length of the worked example", dual_length_of_example),
        ("decomposition areas of the worked example", decomposition_areas_of_example),
        ("isoperimetric identity over 200 curves", identity_over_corpus),
        ("isoperimetric gaps and equality cases", gaps_and_equality_cases),
        ("orthogonality of symmetric and constant-width directions", sigma_kappa_orthogonality),
        ("rectangles on the square ball", rectangles),
        ("weak Lhuilier inequality", lhuilier),
        ("independent area and derivative oracles", oracles),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

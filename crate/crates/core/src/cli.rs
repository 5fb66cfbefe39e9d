//! The `normplane` command line.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 property violation, 3 internal
//! error. Reports go to stdout (and `--out`); diagnostics are JSON lines on
//! stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball::{BallSource, UnitBall};
use crate::corpus::{self, CorpusOptions, Fault};
use crate::curve::{AdmissibleCurve, Convexity, CurveDoc};
use crate::decomp;
use crate::geom::Vec2;
use crate::inequalities::{self, Polygon};
use crate::measures;
use crate::quad::QuadratureConfig;
use crate::svg::{Layer, Plot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "normplane", version, about = "Geometry of convex curves in normed planes")]
pub struct Cli {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, value_name = "X")]
    rel_tol: Option<f64>,
    /// Directory for report and plot files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a ball or a curve against every invariant.
    Validate {
        /// Builtin ball name or a ball JSON file.
        #[arg(long)]
        ball: Option<String>,
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Measures, decomposition summary and isoperimetric ledger of a curve.
    Analyze {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Wigner caustic and constant width measure set of a curve.
    Decompose {
        #[arg(long)]
        curve: PathBuf,
        /// Also write decompose.svg to the output directory.
        #[arg(long)]
        svg: bool,
    },
    /// The weak Lhuilier inequality for a convex polygon.
    Lhuilier {
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Property checks over random curves.
    Corpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    CwmsSign,
}

/// A failure with its exit code and diagnostic kind.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn invalid(kind: &str, message: impl ToString) -> Failure {
        Failure {
            code: EXIT_INVALID,
            kind: kind.into(),
            message: message.to_string(),
        }
    }

    fn internal(kind: &str, message: impl ToString) -> Failure {
        Failure {
            code: EXIT_INTERNAL,
            kind: kind.into(),
            message: message.to_string(),
        }
    }
}

struct Ctx<'a> {
    quad: QuadratureConfig,
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn diag(&mut self, level: &str, kind: &str, message: &str) {
        let line = json!({ "level": level, "kind": kind, "message": message });
        let _ = writeln!(self.stderr, "{line}");
    }

    /// Prints the report and writes it to `--out` as `name`.
    fn emit(&mut self, name: &str, report: &impl Serialize) -> Result<(), Failure> {
        let mut value = serde_json::to_value(report).map_err(|e| Failure::internal("Serialization", e))?;
        round_floats(&mut value);
        let text = serde_json::to_string_pretty(&value).map_err(|e| Failure::internal("Serialization", e))?;
        let _ = writeln!(self.stdout, "{text}");
        self.write_file(name, &(text + "\n"))
    }

    fn write_file(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir).map_err(|e| Failure::internal("Io", format!("{}: {e}", dir.display())))?;
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Failure::internal("Io", format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Rounds every float in a report to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = format!("{x:.11e}").parse().unwrap();
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let line = json!({ "level": "error", "kind": "Usage", "message": e.to_string().trim_end() });
            let _ = writeln!(stderr, "{line}");
            return EXIT_INVALID;
        }
    };
    let mut quad = QuadratureConfig::default();
    if let Some(tol) = cli.rel_tol {
        quad.rel_tol = tol;
    }
    let mut ctx = Ctx {
        quad,
        out: cli.out.clone(),
        stdout,
        stderr,
    };
    if let Err(e) = quad.validate() {
        ctx.diag("error", "InvalidConfig", &e.to_string());
        return EXIT_INVALID;
    }
    match dispatch(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            ctx.diag("error", &f.kind, &f.message);
            f.code
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<i32, Failure> {
    match cmd {
        Command::Validate { ball, curve } => validate(ball.as_deref(), curve.as_deref(), ctx),
        Command::Analyze { curve } => analyze(curve, ctx),
        Command::Decompose { curve, svg } => decompose(curve, *svg, ctx),
        Command::Lhuilier { polygon, svg } => lhuilier(polygon, *svg, ctx),
        Command::Corpus { seed, n, inject_fault } => run_corpus(*seed, *n, *inject_fault, ctx),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid("Json", format!("{}: {e}", path.display())))
}

fn load_ball(spec: &str, quad: &QuadratureConfig) -> Result<UnitBall, Failure> {
    let path = Path::new(spec);
    let source = if path.exists() {
        read_json::<BallSource>(path)?
    } else {
        BallSource::Name(spec.to_string())
    };
    source.build(quad).map_err(|e| Failure::invalid(e.kind(), e))
}

fn load_curve(path: &Path, quad: &QuadratureConfig) -> Result<AdmissibleCurve, Failure> {
    let doc: CurveDoc = read_json(path)?;
    doc.build(quad).map_err(|e| Failure::invalid(e.kind(), e))
}

fn convexity_label(c: Convexity) -> Value {
    match c {
        Convexity::Convex(s) => json!({ "convex": true, "sign": s }),
        Convexity::NonConvex { t } => json!({ "convex": false, "witness_t": t }),
    }
}

fn validate(ball: Option<&str>, curve: Option<&Path>, ctx: &mut Ctx) -> Result<i32, Failure> {
    let report = match (ball, curve) {
        (_, Some(path)) => {
            let c = load_curve(path, &ctx.quad)?;
            json!({
                "valid": true,
                "object": "curve",
                "pieces": c.ball().num_pieces(),
                "closure_gap": c.closure_gap().norm(),
                "tol_close": c.tol_close(),
                "convexity": convexity_label(c.is_convex()),
            })
        }
        (Some(spec), None) => {
            let b = load_ball(spec, &ctx.quad)?;
            json!({
                "valid": true,
                "object": "ball",
                "pieces": b.num_pieces(),
                "T": b.half_period(),
                "area": b.area(),
            })
        }
        (None, None) => return Err(Failure::invalid("Usage", "validate needs --ball or --curve")),
    };
    ctx.emit("validate.json", &report)?;
    Ok(EXIT_OK)
}

fn analyze(path: &Path, ctx: &mut Ctx) -> Result<i32, Failure> {
    let curve = load_curve(path, &ctx.quad)?;
    let internal = |e: &dyn std::fmt::Display, kind: &str| Failure::internal(kind, e.to_string());
    let m = measures::measure_report(&curve).map_err(|e| internal(&e, "QuadratureError"))?;
    let mink = inequalities::minkowski_gap(&curve).map_err(|e| internal(&e, "QuadratureError"))?;
    let d = decomp::decompose(&curve).map_err(|e| internal(&e, e.kind()))?;
    let a_wc_full = measures::signed_area(&d.wc).map_err(|e| internal(&e, "QuadratureError"))?;
    let a_cwms = measures::signed_area(&d.cwms).map_err(|e| internal(&e, "QuadratureError"))?;
    let mut violations: Vec<String> = Vec::new();
    if !mink.holds() {
        violations.push(format!("minkowski gap {:e} is negative", mink.gap));
    }
    let ledger = match curve.is_convex() {
        Convexity::Convex(1) => {
            let l = inequalities::ledger_from_parts(&curve, &d.wc, &d.cwms).map_err(|e| internal(&e, e.kind()))?;
            violations.extend(l.violations());
            Some(l)
        }
        c => {
            ctx.diag(
                "warning",
                "NotConvexInput",
                &format!("the isoperimetric ledger needs a convex curve: {c:?}"),
            );
            None
        }
    };
    for v in &violations {
        ctx.diag("error", "PropertyViolation", v);
    }
    let report = json!({
        "measures": m,
        "convexity": convexity_label(curve.is_convex()),
        "minkowski": mink,
        "decomposition": {
            "mean_width": d.mean_width,
            "residual": d.residual,
            "wc_area_once_around": 0.5 * a_wc_full,
            "wc_area_full_period": a_wc_full,
            "cwms_area": a_cwms,
        },
        "ledger": ledger,
        "violations": violations,
    });
    ctx.emit("analyze.json", &report)?;
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
}

fn curve_summary(c: &AdmissibleCurve) -> Result<Value, Failure> {
    let ball = c.ball();
    let area = measures::signed_area(c).map_err(|e| Failure::internal("QuadratureError", e))?;
    let samples: Vec<Value> = ball
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pts: Vec<[f64; 2]> = (0..=8)
                .map(|k| {
                    let t = p.t0() + (p.t1() - p.t0()) * k as f64 / 8.0;
                    [t, c.radius().value(i, t)]
                })
                .collect();
            json!(pts)
        })
        .collect();
    Ok(json!({
        "basepoint": c.basepoint(),
        "radius": c.radius().exprs().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "radius_samples": samples,
        "area_full_period": area,
    }))
}

const GAMMA_COLOR: &str = "#1f77b4";
const WC_COLOR: &str = "#d62728";
const CWMS_COLOR: &str = "#2ca02c";
const BALL_COLOR: &str = "#7f7f7f";
const DUAL_COLOR: &str = "#9467bd";

fn decompose(path: &Path, svg: bool, ctx: &mut Ctx) -> Result<i32, Failure> {
    let curve = load_curve(path, &ctx.quad)?;
    let d = decomp::decompose(&curve).map_err(|e| Failure::internal(e.kind(), e))?;
    let mut wc = curve_summary(&d.wc)?;
    wc["area_once_around"] = json!(wc["area_full_period"].as_f64().unwrap() * 0.5);
    let report = json!({
        "mean_width": d.mean_width,
        "residual": d.residual,
        "wc": wc,
        "cwms": curve_summary(&d.cwms)?,
    });
    ctx.emit("decompose.json", &report)?;
    if svg {
        if ctx.out.is_none() {
            ctx.diag("warning", "Usage", "--svg needs --out DIR; no plot written");
        }
        let plot = decomposition_plot(&curve, &d);
        ctx.write_file("decompose.svg", &plot.render())?;
    }
    Ok(EXIT_OK)
}

pub fn decomposition_plot(curve: &AdmissibleCurve, d: &decomp::Decomposition) -> Plot {
    const PER_PIECE: usize = 64;
    let ball: &Arc<UnitBall> = curve.ball();
    let gamma = curve.polyline(PER_PIECE);
    let scale = crate::geom::spread(&gamma).max(1.0);
    let half_u: Vec<Vec2> = ball
        .pieces()
        .iter()
        .flat_map(|p| {
            (0..PER_PIECE).map(move |k| p.u(p.t0() + (p.t1() - p.t0()) * k as f64 / PER_PIECE as f64))
        })
        .map(|u| u * (0.5 * d.mean_width))
        .collect();
    let duals: Vec<Vec2> = ball
        .pieces()
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            (0..4).map(move |k| (i, p.t0() + (p.t1() - p.t0()) * (k as f64 + 0.5) / 4.0))
        })
        .filter_map(|(i, t)| ball.dual_point_on(i, t).ok())
        .collect();
    Plot::new("curve, Wigner caustic and constant width measure set")
        .layer(Layer::path("curve", GAMMA_COLOR, gamma))
        .layer(Layer::curve_or_point("Wigner caustic", WC_COLOR, d.wc.polyline(PER_PIECE), scale))
        .layer(Layer::curve_or_point("CWMS", CWMS_COLOR, d.cwms.polyline(PER_PIECE), scale))
        .layer(Layer::path("(w/2) u", BALL_COLOR, half_u).dashed())
        .layer(Layer::markers("dual points v", DUAL_COLOR, duals))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolygonDoc {
    Wrapped { vertices: Vec<Vec2> },
    Bare(Vec<Vec2>),
}

fn lhuilier(path: &Path, svg: bool, ctx: &mut Ctx) -> Result<i32, Failure> {
    let vertices = match read_json::<PolygonDoc>(path)? {
        PolygonDoc::Wrapped { vertices } | PolygonDoc::Bare(vertices) => vertices,
    };
    let k = Polygon::new(vertices).map_err(|e| Failure::invalid(e.kind(), e))?;
    let rep = inequalities::lhuilier_check(&k, &ctx.quad).map_err(|e| Failure::internal(e.kind(), e))?;
    let holds = rep.holds();
    if !holds {
        ctx.diag(
            "error",
            "PropertyViolation",
            &format!("Lhuilier gap {:e} below -{:e}", rep.gap, rep.tol),
        );
    }
    ctx.emit("lhuilier.json", &rep)?;
    if svg {
        if ctx.out.is_none() {
            ctx.diag("warning", "Usage", "--svg needs --out DIR; no plot written");
        }
        let plot = Plot::new("K, K1 and its symmetrization")
            .layer(Layer::path("K", GAMMA_COLOR, rep.k.vertices().to_vec()))
            .layer(Layer::path("K1", WC_COLOR, rep.k1.vertices().to_vec()))
            .layer(Layer::path("K1 symmetrized", CWMS_COLOR, rep.k1_0.vertices().to_vec()).dashed());
        ctx.write_file("lhuilier.svg", &plot.render())?;
    }
    Ok(if holds { EXIT_OK } else { EXIT_VIOLATION })
}

fn run_corpus(seed: u64, n: usize, fault: Option<FaultArg>, ctx: &mut Ctx) -> Result<i32, Failure> {
    let opts = CorpusOptions {
        seed,
        n,
        quad: ctx.quad,
        fault: fault.map(|FaultArg::CwmsSign| Fault::CwmsSign),
        ..Default::default()
    };
    let report = corpus::run_corpus(&opts);
    for inst in &report.instances {
        for v in &inst.violations {
            ctx.diag("error", "PropertyViolation", &format!("instance {} ({}): {v}", inst.index, inst.ball));
        }
    }
    ctx.emit("corpus.json", &report)?;
    Ok(if report.violations == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

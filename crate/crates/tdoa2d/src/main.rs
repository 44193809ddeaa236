//! Command-line interface: measurement classification, source localization,
//! curve construction and sampling, and a self-validation battery.
//!
//! Exit codes: 0 on success, 1 on invalid input (bad flags, unreadable or
//! malformed receiver files, collinear receivers), 2 when a validation run
//! detects an internal inconsistency.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tdoa2d::bifurcation::{asymptotes, build_quintic, sample_curve, QuinticCurve};
use tdoa2d::formats::{arcs_to_csv, poly_to_json, receivers_from_json, render_svg};
use tdoa2d::geometry::{ReceiverConfig, Vec2};
use tdoa2d::localizer::localize;
use tdoa2d::oracle::{newton_cluster_localize, numeric_vs_exact_deviation, sign_map_compare};
use tdoa2d::poly::BivariatePoly;
use tdoa2d::rational::format_rational;
use tdoa2d::tdoa::{
    classify_tau, ellipse_value, polytope_vertices, tangency_points, tau2_forward, TdoaPair,
};

// ---- argument types ----

#[derive(Parser)]
#[command(
    name = "tdoa2d",
    version,
    about = "Plane TDOA localization with three receivers: feasibility, \
             closed-form inversion, and the exact unique/ambiguous boundary curve"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ReceiversArg {
    /// Receivers JSON file: {"receivers": [["x","y"], ["x","y"], ["x","y"]]},
    /// coordinates as exact rational strings.
    #[arg(long, value_name = "PATH")]
    receivers: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a measurement pair: region, expected preimages, facet slacks.
    ClassifyTau {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Measurement pair "t1,t2".
        #[arg(long, value_parser = parse_pair, value_name = "T1,T2", allow_hyphen_values = true)]
        tau: (f64, f64),
    },
    /// Recover all sources producing a measurement pair.
    Localize {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Measurement pair "t1,t2".
        #[arg(long, value_parser = parse_pair, value_name = "T1,T2", allow_hyphen_values = true)]
        tau: (f64, f64),
    },
    /// Print the boundary-curve polynomial as exact JSON term records.
    BifurcationPoly {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Divide by the eighth power of the oriented area (unit value at receivers).
        #[arg(long)]
        normalized: bool,
    },
    /// Classify a plane point against the boundary curve.
    ClassifyPoint {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Plane point "x,y".
        #[arg(long, value_parser = parse_pair, value_name = "X,Y", allow_hyphen_values = true)]
        point: (f64, f64),
    },
    /// Print the three asymptote lines, float and exact.
    Asymptotes {
        #[command(flatten)]
        recv: ReceiversArg,
    },
    /// Sample the boundary curve into angle-contiguous arcs.
    CurveSample {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Sweep resolution (samples per full ellipse turn).
        #[arg(long, default_value_t = 720)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SampleFormat::Json)]
        format: SampleFormat,
        /// Output path; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the six ellipse-facet tangency measurement pairs.
    Tangency {
        #[command(flatten)]
        recv: ReceiversArg,
    },
    /// Print the six vertices of the feasible polytope.
    Vertices {
        #[command(flatten)]
        recv: ReceiversArg,
    },
    /// Cross-check the exact construction against independent numerics.
    Validate {
        #[command(flatten)]
        recv: ReceiversArg,
        /// Larger grids and sweeps.
        #[arg(long)]
        deep: bool,
        /// Seed for every randomized check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

// ---- error-to-exit-code mapping ----

enum CliError {
    /// Exit 1: the input could not be used.
    Input(String),
    /// Exit 2: the library disagreed with an independent check.
    Validation(String),
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {t:?}"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn load_config(path: &PathBuf) -> Result<ReceiverConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    receivers_from_json(&text).map_err(|e| CliError::Input(e.to_string()))
}

/// Writes to stdout, exiting quietly when the reading end has gone away.
fn write_stdout(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(1);
    }
}

fn emit<T: Serialize>(value: &T) {
    let mut text = serde_json::to_string_pretty(value).expect("JSON output");
    text.push('\n');
    write_stdout(&text);
}

// ---- output shapes ----

#[derive(Serialize)]
struct ClassifyTauOut {
    region: String,
    expected_count: u8,
    a_value: f64,
    facet_slacks: [f64; 6],
}

#[derive(Serialize)]
struct LocalizeOut {
    sources: Vec<[f64; 2]>,
    d0: Vec<f64>,
    degenerate: bool,
}

#[derive(Serialize)]
struct ClassifyPointOut {
    region: String,
    #[serde(rename = "F_value")]
    f_value: f64,
    sampson_distance: Option<f64>,
}

#[derive(Serialize)]
struct AsymptoteOut {
    a: f64,
    b: f64,
    c: f64,
    exact: [String; 3],
}

#[derive(Serialize)]
struct SampleOut {
    theta: f64,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct ArcOut {
    arc_id: usize,
    samples: Vec<SampleOut>,
}

#[derive(Serialize)]
struct CheckOut {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct ValidateOut {
    passed: bool,
    checks: Vec<CheckOut>,
}

// ---- command bodies ----

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too and must exit 0.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::ClassifyTau { recv, tau } => {
            let config = load_config(&recv.receivers)?;
            let cl = classify_tau(&config, TdoaPair::new(tau.0, tau.1));
            emit(&ClassifyTauOut {
                region: format!("{:?}", cl.region),
                expected_count: cl.expected_preimages,
                a_value: cl.ellipse_value,
                facet_slacks: cl.facet_slacks,
            });
        }
        Command::Localize { recv, tau } => {
            let config = load_config(&recv.receivers)?;
            let result = localize(&config, TdoaPair::new(tau.0, tau.1));
            emit(&LocalizeOut {
                sources: result
                    .solutions
                    .iter()
                    .map(|s| [s.position.x, s.position.y])
                    .collect(),
                d0: result.solutions.iter().map(|s| s.d0).collect(),
                degenerate: result.degenerate_linear,
            });
        }
        Command::BifurcationPoly { recv, normalized } => {
            let config = load_config(&recv.receivers)?;
            let curve = build_quintic(&config);
            let poly: BivariatePoly = if normalized {
                curve.normalized()
            } else {
                curve.f().clone()
            };
            write_stdout(&format!("{}\n", poly_to_json(&poly)));
        }
        Command::ClassifyPoint { recv, point } => {
            let config = load_config(&recv.receivers)?;
            let curve = build_quintic(&config);
            let p = Vec2::new(point.0, point.1);
            emit(&ClassifyPointOut {
                region: format!("{:?}", curve.classify(p)),
                f_value: curve.eval(p),
                sampson_distance: curve.sampson_distance(p).ok(),
            });
        }
        Command::Asymptotes { recv } => {
            let config = load_config(&recv.receivers)?;
            let lines: Vec<AsymptoteOut> = asymptotes(&config)
                .iter()
                .map(|l| {
                    let (a, b, c) = l.exact();
                    AsymptoteOut {
                        a: l.a,
                        b: l.b,
                        c: l.c,
                        exact: [format_rational(a), format_rational(b), format_rational(c)],
                    }
                })
                .collect();
            emit(&serde_json::json!({ "asymptotes": lines }));
        }
        Command::CurveSample {
            recv,
            n,
            format,
            out,
        } => {
            let config = load_config(&recv.receivers)?;
            if n < 12 {
                return Err(CliError::Input(format!(
                    "sweep resolution must be at least 12, got {n}"
                )));
            }
            let curve = build_quintic(&config);
            let arcs = sample_curve(&curve, n);
            let text = match format {
                SampleFormat::Csv => arcs_to_csv(&arcs),
                SampleFormat::Svg => render_svg(&config, &arcs),
                SampleFormat::Json => {
                    let shaped: Vec<ArcOut> = arcs
                        .iter()
                        .enumerate()
                        .map(|(arc_id, arc)| ArcOut {
                            arc_id,
                            samples: arc
                                .samples
                                .iter()
                                .map(|s| SampleOut {
                                    theta: s.theta,
                                    x: s.point.x,
                                    y: s.point.y,
                                })
                                .collect(),
                        })
                        .collect();
                    let mut text = serde_json::to_string_pretty(&serde_json::json!({
                        "arcs": shaped
                    }))
                    .expect("JSON output");
                    text.push('\n');
                    text
                }
            };
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
                None => write_stdout(&text),
            }
        }
        Command::Tangency { recv } => {
            let config = load_config(&recv.receivers)?;
            emit(&serde_json::json!({ "tangency": tangency_points(&config) }));
        }
        Command::Vertices { recv } => {
            let config = load_config(&recv.receivers)?;
            emit(&serde_json::json!({ "vertices": polytope_vertices(&config) }));
        }
        Command::Validate { recv, deep, seed } => {
            let config = load_config(&recv.receivers)?;
            let report = run_validation(&config, deep, seed);
            emit(&report);
            if !report.passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                return Err(CliError::Validation(failed.join(", ")));
            }
        }
    }
    Ok(())
}

// ---- validation battery ----

fn run_validation(config: &ReceiverConfig, deep: bool, seed: u64) -> ValidateOut {
    let curve = build_quintic(config);
    let mut checks = Vec::new();
    checks.push(check_exact_construction(config, &curve));
    checks.push(check_float_vs_exact(config, deep, seed));
    checks.push(check_sign_map(config, deep));
    checks.push(check_newton_equivalence(config, deep, seed));
    checks.push(check_round_trip(config, deep, seed));
    ValidateOut {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Exact certificates: degree, receiver values, leading form, asymptote sum.
fn check_exact_construction(config: &ReceiverConfig, curve: &QuinticCurve) -> CheckOut {
    let mut problems = Vec::new();
    if curve.f().total_degree() != Some(5) {
        problems.push(format!("degree {:?}", curve.f().total_degree()));
    }
    for (i, m) in config.receivers_exact().iter().enumerate() {
        if &curve.eval_exact(&m.x, &m.y) != curve.w8() {
            problems.push(format!("receiver {i} value"));
        }
    }
    if !curve.verify_leading_form() {
        problems.push("leading form".to_string());
    }
    let w = config.w_exact();
    let expected_sum = BivariatePoly::constant(-w.clone());
    if tdoa2d::bifurcation::asymptote_sum(config) != expected_sum {
        problems.push("asymptote sum".to_string());
    }
    CheckOut {
        name: "exact-construction",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            "degree 5, receiver values, leading form, asymptote sum".to_string()
        } else {
            problems.join("; ")
        },
    }
}

fn check_float_vs_exact(config: &ReceiverConfig, deep: bool, seed: u64) -> CheckOut {
    let n = if deep { 400 } else { 80 };
    let dev = numeric_vs_exact_deviation(config, n, seed.wrapping_add(1));
    CheckOut {
        name: "float-vs-exact",
        passed: dev < 1e-6,
        detail: format!("max relative deviation {dev:.3e} over {n} points"),
    }
}

fn check_sign_map(config: &ReceiverConfig, deep: bool) -> CheckOut {
    let n = if deep { 200 } else { 80 };
    let c = config.centroid();
    let h = 3.0 * config.scale();
    let report = sign_map_compare(
        config,
        Vec2::new(c.x - h, c.y - h),
        Vec2::new(c.x + h, c.y + h),
        n,
    );
    CheckOut {
        name: "sign-map",
        passed: report.mismatches == 0,
        detail: format!(
            "{} mismatches over {} samples ({} band-excluded)",
            report.mismatches, report.samples, report.band_excluded
        ),
    }
}

fn check_newton_equivalence(config: &ReceiverConfig, deep: bool, seed: u64) -> CheckOut {
    let count = if deep { 400 } else { 60 };
    let w2 = config.w() * config.w();
    let c = config.centroid();
    let h = 2.5 * config.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut bad = 0usize;
    let mut checked = 0usize;
    while checked < count {
        let x = Vec2::new(
            c.x + rng.gen_range(-h..h),
            c.y + rng.gen_range(-h..h),
        );
        let tau = tau2_forward(config, x);
        let a = ellipse_value(config, tau);
        // Near the fold the far preimage leaves the oracle start box.
        if (0.0..1e-2 * w2).contains(&a) {
            continue;
        }
        let closed = localize(config, tau);
        let roots = newton_cluster_localize(config, tau, 64, seed.wrapping_add(3));
        let tol = 1e-6 * (1.0 + config.scale());
        let agree = roots.len() == closed.solutions.len()
            && closed
                .solutions
                .iter()
                .all(|s| roots.iter().any(|r| r.dist(s.position) < tol));
        if !agree {
            bad += 1;
        }
        checked += 1;
    }
    CheckOut {
        name: "newton-equivalence",
        passed: bad == 0,
        detail: format!("{bad} disagreements over {count} measurement pairs"),
    }
}

fn check_round_trip(config: &ReceiverConfig, deep: bool, seed: u64) -> CheckOut {
    let count = if deep { 2000 } else { 300 };
    let c = config.centroid();
    let h = 3.0 * config.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let mut worst = 0.0_f64;
    let mut missed = 0usize;
    for _ in 0..count {
        let x = Vec2::new(
            c.x + rng.gen_range(-h..h),
            c.y + rng.gen_range(-h..h),
        );
        let tau = tau2_forward(config, x);
        let recovered = localize(config, tau);
        match recovered
            .solutions
            .iter()
            .map(|s| s.position.dist(x))
            .min_by(f64::total_cmp)
        {
            Some(err) => worst = worst.max(err / (1.0 + x.norm())),
            None => missed += 1,
        }
    }
    CheckOut {
        name: "round-trip",
        passed: missed == 0 && worst < 1e-7,
        detail: format!("{missed} missed, worst relative error {worst:.3e} over {count} sources"),
    }
}

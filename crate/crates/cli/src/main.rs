//! `gcross`: crossing analysis of weighted gamma sums from the command line.
//!
//! Exit codes: 0 determinate result, 1 usage or invalid input, 2 undecided,
//! 3 counterexample search exhausted, 4 self-test failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gcross_core::acceptance::run_all;
use gcross_core::counterexample::{build_counterexample, verify_certificate, CounterexampleCertificate, CounterexampleOptions};
use gcross_core::crossing::{sign_profile, Classification, CrossingReport, ProfileOptions};
use gcross_core::hexfloat::{parse_float, HexF64};
use gcross_core::mixtures::{lemma3_lambda, lemma3_mixture, mode_structure};
use gcross_core::orders::{log_majorizes, majorizes, st_dominates, v_majorizes};
use gcross_core::specfun::inject_log_gamma_fault;
use gcross_core::sweep::{run_sweep, SweepConfig, CSV_HEADER};
use gcross_core::{grid, make_convolution, Error, ShapeParam, Verdict, WeightVector, ENGINE_VERSION};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_SELFTEST: u8 = 4;

/// Comma-separated numbers; each may be decimal or a hex float (0x1.8p+1).
#[derive(Debug, Clone)]
struct FloatList(Vec<f64>);

fn parse_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(|p| parse_float(p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(FloatList)
}

fn parse_num(s: &str) -> Result<f64, String> {
    parse_float(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone)]
struct CountList(Vec<usize>);

fn parse_counts(s: &str) -> Result<CountList, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("not a count: {p:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(CountList)
}

#[derive(Parser)]
#[command(name = "gcross", version, about = "Crossing analysis for CDFs of weighted gamma sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScanArgs {
    /// Scan grid size (at least 64).
    #[arg(long, default_value_t = 2048)]
    grid_size: usize,
    /// Relative peak below which a sign run is not trusted.
    #[arg(long, value_parser = parse_num, default_value = "1e-8")]
    tol: f64,
}

impl ScanArgs {
    fn profile(&self) -> ProfileOptions {
        ProfileOptions { grid_size: self.grid_size, tol: self.tol, ..ProfileOptions::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify the sign changes of F_eta − F_theta and evaluate the order predicates.
    Check {
        #[arg(long, value_parser = parse_num)]
        alpha: f64,
        #[arg(long, value_parser = parse_list)]
        theta: FloatList,
        #[arg(long, value_parser = parse_list)]
        eta: FloatList,
        #[command(flatten)]
        scan: ScanArgs,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a multiple-crossing certificate for a shape below one.
    Counterexample {
        #[arg(long, value_parser = parse_num)]
        alpha: f64,
        /// Stationary point of the bimodal mixture (default: middle of its window).
        #[arg(long, value_parser = parse_num)]
        x0: Option<f64>,
        /// Number of epsilon halvings to try.
        #[arg(long, default_value_t = 40)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate at doubled resolution.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        /// Margins at or below this make the crossing clause undecided.
        #[arg(long, value_parser = parse_num, default_value = "1e-12")]
        strict_tol: f64,
    },
    /// Seeded classification sweep written as CSV.
    ///
    /// Columns: id,alpha,n,theta,eta,classification,k,crossings,margins,seed.
    /// Floats are hex; list cells are ';'-separated; k is empty when undecided.
    Sweep {
        #[arg(long, value_parser = parse_list)]
        alpha: FloatList,
        #[arg(long, value_parser = parse_counts)]
        n: CountList,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Sample around a certified counterexample instead of random majorized pairs.
        #[arg(long)]
        near_counterexample: bool,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mode structure of (lambda g_{1+alpha} + g_alpha)/(1 + lambda).
    Mixture {
        #[arg(long, value_parser = parse_num)]
        alpha: f64,
        #[arg(long, value_parser = parse_num, conflicts_with = "x0", required_unless_present = "x0")]
        lambda: Option<f64>,
        /// Pick lambda so that the mixture is stationary here.
        #[arg(long, value_parser = parse_num)]
        x0: Option<f64>,
        #[arg(long, default_value_t = 2048)]
        grid_size: usize,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Reduced counts; finishes well under a minute.
        #[arg(long)]
        fast: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchExhausted { .. } => Fail(EXIT_EXHAUSTED, e.to_string()),
            _ => Fail(EXIT_USAGE, e.to_string()),
        }
    }
}

fn hex(v: f64) -> Value {
    json!(HexF64(v))
}

fn hex_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| hex(*x)).collect())
}

fn emit(value: &Value, out: Option<&PathBuf>) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Fail(EXIT_USAGE, e.to_string()))? + "\n";
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn report_json(r: &CrossingReport) -> Value {
    json!({
        "classification": r.classification,
        "sign_sequence": r.sign_sequence,
        "crossings": r.crossings.iter().map(|c| json!({
            "location": hex(c.location),
            "direction": c.direction,
            "margin": hex(c.margin),
        })).collect::<Vec<_>>(),
        "window": [hex(r.window.0), hex(r.window.1)],
        "error_estimate": hex(r.error_estimate),
        "grid_points": r.grid_points,
        "near_zero": r.near_zero,
        "at_infinity": r.at_infinity,
        "note": r.note,
    })
}

fn cmd_check(alpha: f64, theta: Vec<f64>, eta: Vec<f64>, scan: &ScanArgs, out: Option<&PathBuf>) -> Result<u8, Fail> {
    let a = ShapeParam::new(alpha)?;
    let t = WeightVector::new(theta)?;
    let e = WeightVector::new(eta)?;
    if t.len() != e.len() {
        return Err(Fail(EXIT_USAGE, format!("theta and eta need the same length ({} vs {})", t.len(), e.len())));
    }
    let report = sign_profile(&t, &e, a, &scan.profile())?;
    let ft = make_convolution(a, &t.strip_zeros()?, &[])?;
    let fe = make_convolution(a, &e.strip_zeros()?, &[])?;
    let lo = ft.quantile(1e-10)?.min(fe.quantile(1e-10)?);
    let hi = ft.quantile(1.0 - 1e-10)?.max(fe.quantile(1.0 - 1e-10)?);
    let g = grid::log_grid(lo, hi, 512)?;
    let orders = json!({
        "eta_majorized_by_theta": majorizes(&t, &e)?,
        "log_eta_majorized_by_log_theta": t.all_positive() && e.all_positive() && log_majorizes(&t, &e, false)?,
        "log_eta_weakly_majorized_by_log_theta": t.all_positive() && e.all_positive() && log_majorizes(&t, &e, true)?,
        "eta_v_majorized_by_theta": v_majorizes(&t, &e)?.is_some(),
        // X ≤_st Y means F_X ≥ F_Y everywhere.
        "st_theta_le_eta": st_dominates(&ft, &fe, &g, 1e-9)?,
        "st_eta_le_theta": st_dominates(&fe, &ft, &g, 1e-9)?,
    });
    let value = json!({
        "engine_version": ENGINE_VERSION,
        "command": "check",
        "alpha": hex(alpha),
        "theta": hex_vec(t.entries()),
        "eta": hex_vec(e.entries()),
        "tolerances": { "grid_size": scan.grid_size, "tol": hex(scan.tol), "st_grid": 512, "st_tol": hex(1e-9) },
        "report": report_json(&report),
        "orders": orders,
    });
    emit(&value, out)?;
    Ok(if report.classification == Classification::Undecided { EXIT_UNDECIDED } else { EXIT_OK })
}

fn cmd_counterexample(alpha: f64, x0: Option<f64>, budget: usize, out: Option<&PathBuf>) -> Result<u8, Fail> {
    if alpha >= 1.0 {
        return Err(Fail(
            EXIT_USAGE,
            format!("alpha = {alpha}: multiple crossings require alpha < 1; for alpha >= 1 majorized weights cross exactly once"),
        ));
    }
    let opts = CounterexampleOptions { x0, search_budget: budget, ..CounterexampleOptions::default() };
    let cert = build_counterexample(ShapeParam::new(alpha)?, &opts)?;
    let text = cert.to_json()? + "\n";
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}

fn cmd_verify(path: &PathBuf, strict_tol: f64) -> Result<u8, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    let cert = CounterexampleCertificate::from_json(&text)?;
    let report = verify_certificate(&cert, strict_tol);
    println!("{report}");
    match report.verdict() {
        Verdict::Pass => Ok(EXIT_OK),
        Verdict::Undecided => Ok(EXIT_UNDECIDED),
        Verdict::Fail => Err(Fail(EXIT_USAGE, "certificate does not verify".into())),
    }
}

fn cmd_sweep(cfg: SweepConfig, out: Option<&PathBuf>) -> Result<u8, Fail> {
    let (rows, failure) = run_sweep(&cfg)?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    if let Some(f) = &failure {
        text.push_str(&format!("# error: trial {} failed: {}\n", f.id, f.error));
    }
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    if let Some(f) = failure {
        return Err(Fail(EXIT_USAGE, format!("trial {} failed: {}", f.id, f.error)));
    }
    let undecided = rows.iter().any(|r| r.classification == Classification::Undecided);
    Ok(if undecided { EXIT_UNDECIDED } else { EXIT_OK })
}

fn cmd_mixture(alpha: f64, lambda: Option<f64>, x0: Option<f64>, grid_size: usize) -> Result<u8, Fail> {
    let a = ShapeParam::new(alpha)?;
    let lambda = match (lambda, x0) {
        (Some(l), _) => l,
        (None, Some(x)) => lemma3_lambda(a, x)?,
        (None, None) => return Err(Fail(EXIT_USAGE, "need --lambda or --x0".into())),
    };
    let mix = lemma3_mixture(a, lambda)?;
    let window = (
        make_convolution(a, &WeightVector::new(vec![1.0])?, &[])?.quantile(1e-10)?,
        make_convolution(ShapeParam::new(alpha + 1.0)?, &WeightVector::new(vec![1.0])?, &[])?.quantile(1.0 - 1e-10)?,
    );
    let r = mode_structure(&mix, window, grid_size)?;
    let value = json!({
        "engine_version": ENGINE_VERSION,
        "command": "mixture",
        "alpha": hex(alpha),
        "lambda": hex(lambda),
        "window": [hex(window.0), hex(window.1)],
        "tolerances": { "grid_size": grid_size },
        "points": r.points.iter().map(|p| json!({
            "location": hex(p.location),
            "kind": p.kind,
            "second_derivative": hex(p.second_derivative),
            "boundary": p.boundary,
        })).collect::<Vec<_>>(),
        "maxima": r.maxima(),
        "minima": r.minima(),
        "unimodal": r.unimodal(),
    });
    emit(&value, None)?;
    Ok(if r.is_decided() { EXIT_OK } else { EXIT_UNDECIDED })
}

fn cmd_selftest(fast: bool, inject_fault: bool) -> Result<u8, Fail> {
    if inject_fault {
        inject_log_gamma_fault(true);
    }
    let results = run_all(fast);
    for r in &results {
        println!("{r}");
    }
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(Fail(EXIT_SELFTEST, format!("selftest failed at criterion {} ({})", r.id, r.name))),
        None => {
            println!("all {} criteria passed", results.len());
            Ok(EXIT_OK)
        }
    }
}

fn configure_threads() -> Result<(), Fail> {
    if let Ok(v) = std::env::var("UCC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Fail(EXIT_USAGE, format!("UCC_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Fail> {
    configure_threads()?;
    match cli.command {
        Command::Check { alpha, theta, eta, scan, out } => cmd_check(alpha, theta.0, eta.0, &scan, out.as_ref()),
        Command::Counterexample { alpha, x0, budget, out } => cmd_counterexample(alpha, x0, budget, out.as_ref()),
        Command::Verify { cert, strict_tol } => cmd_verify(&cert, strict_tol),
        Command::Sweep { alpha, n, trials, seed, near_counterexample, scan, out } => cmd_sweep(
            SweepConfig { alphas: alpha.0, ns: n.0, trials, seed, near_counterexample, profile: scan.profile() },
            out.as_ref(),
        ),
        Command::Mixture { alpha, lambda, x0, grid_size } => cmd_mixture(alpha, lambda, x0, grid_size),
        Command::Selftest { fast, inject_fault } => cmd_selftest(fast, inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

//! `haarcmp`: tables and verification runs for single-shot comparison of
//! Haar-random channels and POVMs.
//!
//! Exit codes: 0 success, 2 usage/validation error, 3 verification or
//! statistical failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use haarcmp_core::asymmetric::{coefficients, lp_brute, lp_solve};
use haarcmp_core::choi::{
    avg_choi_channels_same, avg_choi_povm_same, diamond_bound, diff_operator,
    partial_abs_closed_form, partial_abs_numeric, verify_polar,
};
use haarcmp_core::ensembles::{stream, ComparisonDims, RngSeed, GENERATOR_ID};
use haarcmp_core::montecarlo::{
    estimate_avg_choi, estimate_error_pair, estimate_success, McReport, Mode,
};
use haarcmp_core::symmetric::{p_success, p_success_trivial_input, saturation_check};
use haarcmp_core::Kind;
use rand::Rng;

#[derive(Parser)]
#[command(
    name = "haarcmp",
    about = "Single-shot comparison of Haar-random quantum channels and POVMs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form symmetric success probabilities.
    Symmetric(SymmetricArgs),
    /// Sweep success probabilities over dimension grids (plot-ready CSV).
    Sweep(SweepArgs),
    /// Optimal type-II error tradeoff curves.
    Asymmetric(AsymmetricArgs),
    /// Monte Carlo estimation against the closed forms.
    Montecarlo(MontecarloArgs),
    /// Residual and oracle verification suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Channel,
    Povm,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Channel => Kind::Channel,
            KindArg::Povm => Kind::Povm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (defaults to standard output).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Serialize)]
struct SymmetricArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Output dimension(s): integer, comma list, or inclusive range `a:b`.
    #[arg(long, value_parser = parse_usize_list)]
    d_out: UsizeList,
    /// Environment dimension(s), same grammar.
    #[arg(long, value_parser = parse_usize_list)]
    env: UsizeList,
    /// Use the trivial-input (d_in = 1) formula.
    #[arg(long)]
    trivial_input: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, value_parser = parse_usize_list)]
    d_out: Option<UsizeList>,
    #[arg(long, value_parser = parse_usize_list)]
    env: UsizeList,
    /// Emit the asymptotic large-dimension channel values 1/2 + 1/(4s).
    #[arg(long)]
    asymptotic: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct AsymmetricArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_parser = parse_usize_list)]
    d_out: UsizeList,
    #[arg(long, value_parser = parse_usize_list)]
    env: UsizeList,
    /// Single type-I error budget in [0, 1].
    #[arg(long)]
    eps: Option<f64>,
    /// Type-I error grid `start:step:end`.
    #[arg(long, value_parser = parse_eps_grid)]
    eps_grid: Option<EpsGrid>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum McMode {
    /// Success probability of the optimal strategy.
    Success,
    /// Averaged Choi matrix, same-operation mode.
    Choi,
    /// Averaged Choi matrix, independent-operations mode.
    ChoiDiff,
    /// Type-I/type-II error pair of the LP-optimal effect (needs --eps).
    ErrorPair,
}

#[derive(Args, Serialize)]
struct MontecarloArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    d_in: usize,
    #[arg(long)]
    d_out: usize,
    #[arg(long)]
    env: usize,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "success")]
    mode: McMode,
    /// Type-I budget for --mode error-pair.
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Polar,
    Saturation,
    Lp,
    Choi,
    All,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Serialize)]
struct UsizeList(Vec<usize>);

/// `"4"`, `"2,3,5"`, or inclusive `"2:40"`.
fn parse_usize_list(s: &str) -> Result<UsizeList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        if let Some((a, b)) = part.split_once(':') {
            let a: usize = a.trim().parse().map_err(|e| format!("bad range start '{a}': {e}"))?;
            let b: usize = b.trim().parse().map_err(|e| format!("bad range end '{b}': {e}"))?;
            if a > b {
                return Err(format!("empty range {a}:{b}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.trim().parse().map_err(|e| format!("bad integer '{part}': {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(UsizeList(out))
}

#[derive(Clone, Serialize)]
struct EpsGrid(Vec<f64>);

/// `"start:step:end"`, inclusive of the endpoint up to round-off.
fn parse_eps_grid(s: &str) -> Result<EpsGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, step, end] = parts[..] else {
        return Err(format!("expected start:step:end, got '{s}'"));
    };
    let start: f64 = start.parse().map_err(|e| format!("bad start: {e}"))?;
    let step: f64 = step.parse().map_err(|e| format!("bad step: {e}"))?;
    let end: f64 = end.parse().map_err(|e| format!("bad end: {e}"))?;
    if !(step > 0.0) || end < start {
        return Err(format!("invalid grid {start}:{step}:{end}"));
    }
    let n = ((end - start) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| start + k as f64 * step).collect();
    grid.retain(|&e| e <= end + 1e-12);
    Ok(EpsGrid(grid))
}

/// Formats with 13 significant digits, enough for the CSV round-trip
/// invariant (recomputation within 1e-12) while staying plot-friendly.
fn fmt_num(x: f64) -> String {
    format!("{x:.12e}")
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn verification(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<haarcmp_core::Error> for Failure {
    fn from(e: haarcmp_core::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| Failure::usage(e.to_string()))
        }
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {path}: {e}")))
        }
    }
}

#[derive(Serialize)]
struct SymRow {
    kind: String,
    d_out: usize,
    s: usize,
    p_success: f64,
}

fn sym_rows_to_text(format: Format, config: serde_json::Value, rows: &[SymRow]) -> String {
    match format {
        Format::Csv => {
            let mut text = String::from("kind,d_out,s,p_success\n");
            for r in rows {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    r.kind,
                    r.d_out,
                    r.s,
                    fmt_num(r.p_success)
                ));
            }
            text
        }
        Format::Json => {
            let doc = json!({ "config": config, "results": rows });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    }
}

fn cmd_symmetric(args: &SymmetricArgs) -> Result<(), Failure> {
    let kind: Kind = args.kind.into();
    let mut rows = Vec::new();
    for &d_out in &args.d_out.0 {
        for &s in &args.env.0 {
            let p = if args.trivial_input {
                if d_out * s == 1 {
                    return Err(Failure::usage("degenerate ensemble: d_out = env = 1"));
                }
                p_success_trivial_input(d_out, s)
            } else {
                p_success(kind, d_out, s)?
            };
            rows.push(SymRow { kind: kind.to_string(), d_out, s, p_success: p });
        }
    }
    let config = serde_json::to_value(args).unwrap();
    emit(&args.output, &sym_rows_to_text(args.output.format, config, &rows))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    if args.asymptotic {
        let mut text = match args.output.format {
            Format::Csv => String::from("s,p_success\n"),
            Format::Json => String::new(),
        };
        let rows: Vec<serde_json::Value> = args
            .env
            .0
            .iter()
            .map(|&s| json!({ "s": s, "p_success": 0.5 + 1.0 / (4.0 * s as f64) }))
            .collect();
        match args.output.format {
            Format::Csv => {
                for &s in &args.env.0 {
                    text.push_str(&format!("{s},{}\n", fmt_num(0.5 + 1.0 / (4.0 * s as f64))));
                }
            }
            Format::Json => {
                let doc = json!({ "config": serde_json::to_value(args).unwrap(), "results": rows });
                text = format!("{}\n", serde_json::to_string_pretty(&doc).unwrap());
            }
        }
        return emit(&args.output, &text);
    }
    let kind: Kind = args
        .kind
        .ok_or_else(|| Failure::usage("--kind is required unless --asymptotic is given"))?
        .into();
    let d_out = args
        .d_out
        .as_ref()
        .ok_or_else(|| Failure::usage("--d-out is required unless --asymptotic is given"))?;
    let mut rows = Vec::new();
    for &d_o in &d_out.0 {
        for &s in &args.env.0 {
            rows.push(SymRow {
                kind: kind.to_string(),
                d_out: d_o,
                s,
                p_success: p_success(kind, d_o, s)?,
            });
        }
    }
    let config = serde_json::to_value(args).unwrap();
    emit(&args.output, &sym_rows_to_text(args.output.format, config, &rows))
}

#[derive(Serialize)]
struct AsymRow {
    kind: String,
    d_out: usize,
    s: usize,
    epsilon: f64,
    p2_star: f64,
    t_a: f64,
    t_s: f64,
    saturates_tradeoff: bool,
}

fn cmd_asymmetric(args: &AsymmetricArgs) -> Result<(), Failure> {
    let kind: Kind = args.kind.into();
    let eps_values: Vec<f64> = match (&args.eps, &args.eps_grid) {
        (Some(e), None) => vec![*e],
        (None, Some(g)) => g.0.clone(),
        (None, None) => return Err(Failure::usage("provide --eps or --eps-grid")),
        (Some(_), Some(_)) => return Err(Failure::usage("--eps and --eps-grid are exclusive")),
    };
    if eps_values.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Failure::usage("epsilon values must lie in [0, 1]"));
    }
    let mut rows = Vec::new();
    for &d_o in &args.d_out.0 {
        for &s in &args.env.0 {
            let c = coefficients(kind, d_o, s)?;
            let eps_sat = 1.0 - c.alpha;
            let mut grid = eps_values.clone();
            // always include the saturation point of the tradeoff relation
            if (0.0..=1.0).contains(&eps_sat)
                && !grid.iter().any(|e| (e - eps_sat).abs() <= 1e-12)
            {
                grid.push(eps_sat);
            }
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for eps in grid {
                let point = lp_solve(&c, eps)?;
                rows.push(AsymRow {
                    kind: kind.to_string(),
                    d_out: d_o,
                    s,
                    epsilon: eps,
                    p2_star: point.p2_star,
                    t_a: point.t_a,
                    t_s: point.t_s,
                    saturates_tradeoff: (eps - eps_sat).abs() <= 1e-12,
                });
            }
        }
    }
    let text = match args.output.format {
        Format::Csv => {
            let mut text =
                String::from("kind,d_out,s,epsilon,p2_star,t_A,t_S,saturates_tradeoff\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.kind,
                    r.d_out,
                    r.s,
                    fmt_num(r.epsilon),
                    fmt_num(r.p2_star),
                    fmt_num(r.t_a),
                    fmt_num(r.t_s),
                    r.saturates_tradeoff
                ));
            }
            text
        }
        Format::Json => {
            let doc = json!({ "config": serde_json::to_value(args).unwrap(), "results": rows });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    emit(&args.output, &text)
}

fn cmd_montecarlo(args: &MontecarloArgs) -> Result<(), Failure> {
    if args.samples < 1000 {
        return Err(Failure::usage(format!(
            "--samples {} below the minimum of 1000",
            args.samples
        )));
    }
    let kind: Kind = args.kind.into();
    let dims = ComparisonDims::new(args.d_in, args.d_out, args.env)?;
    let seed = RngSeed(args.seed);
    let report: McReport = match args.mode {
        McMode::Success => estimate_success(kind, dims, args.samples, seed)?,
        McMode::Choi => estimate_avg_choi(kind, Mode::Same, dims, args.samples, seed)?,
        McMode::ChoiDiff => estimate_avg_choi(kind, Mode::Different, dims, args.samples, seed)?,
        McMode::ErrorPair => {
            let eps = args.eps.ok_or_else(|| Failure::usage("--mode error-pair needs --eps"))?;
            if !(0.0..=1.0).contains(&eps) {
                return Err(Failure::usage("--eps must lie in [0, 1]"));
            }
            estimate_error_pair(kind, dims, eps, args.samples, seed)?
        }
    };
    let doc = json!({
        "config": serde_json::to_value(args).unwrap(),
        "results": report,
        "seed": args.seed,
        "generator_id": GENERATOR_ID,
    });
    emit(&args.output, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    if report.z_max > 4.0 {
        return Err(Failure::verification(format!(
            "statistical failure: z_max = {:.3} > 4",
            report.z_max
        )));
    }
    Ok(())
}

/// The built-in verification grid (valid triples only).
fn verify_grid() -> Vec<ComparisonDims> {
    let mut out = Vec::new();
    for d_in in [1, 2, 3] {
        for d_out in [2, 3] {
            for env in [1, 2, 3] {
                if let Ok(d) = ComparisonDims::new(d_in, d_out, env) {
                    out.push(d);
                }
            }
        }
    }
    out
}

fn suite_polar() -> Result<(f64, f64), Failure> {
    let mut worst = 0.0f64;
    for d in verify_grid() {
        worst = worst.max(verify_polar(d)?);
    }
    Ok((worst, 1e-10))
}

fn suite_saturation() -> Result<(f64, f64), Failure> {
    let mut worst = 0.0f64;
    for d in verify_grid().into_iter().filter(|d| d.d_in >= 2) {
        worst = worst.max(saturation_check(d)?.2);
    }
    Ok((worst, 1e-10))
}

fn suite_lp() -> Result<(f64, f64), Failure> {
    let grid_n = 1000;
    let mut worst = 0.0f64;
    let mut rng = stream(RngSeed(2024), 0);
    for _ in 0..200 {
        let kind = if rng.gen_bool(0.5) { Kind::Channel } else { Kind::Povm };
        let d_o = rng.gen_range(2..=6usize);
        let s = rng.gen_range(1..=4usize);
        let eps: f64 = rng.gen_range(0.0..=1.0);
        let c = coefficients(kind, d_o, s)?;
        worst = worst.max((lp_solve(&c, eps)?.p2_star - lp_brute(&c, eps, grid_n)?.p2_star).abs());
    }
    Ok((worst, 2.0 / grid_n as f64))
}

fn suite_choi() -> Result<(f64, f64), Failure> {
    let mut worst = 0.0f64;
    for d in verify_grid() {
        for kind in [Kind::Channel, Kind::Povm] {
            let avg = match kind {
                Kind::Channel => avg_choi_channels_same(d)?,
                Kind::Povm => avg_choi_povm_same(d)?,
            };
            worst = worst.max(avg.tp_defect()?);
            worst = worst.max((-avg.min_eigenvalue()?).max(0.0));
            let j = diff_operator(kind, d)?;
            let closed = partial_abs_closed_form(kind, d)?;
            let numeric = partial_abs_numeric(&j)?;
            worst = worst.max(numeric.matrix().max_abs_diff(closed.matrix()));
            let _ = diamond_bound(&j)?;
        }
    }
    Ok((worst, 1e-10))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<(&str, fn() -> Result<(f64, f64), Failure>)> = match args.suite {
        Suite::Polar => vec![("polar", suite_polar)],
        Suite::Saturation => vec![("saturation", suite_saturation)],
        Suite::Lp => vec![("lp", suite_lp)],
        Suite::Choi => vec![("choi", suite_choi)],
        Suite::All => vec![
            ("polar", suite_polar),
            ("saturation", suite_saturation),
            ("lp", suite_lp),
            ("choi", suite_choi),
        ],
    };
    let mut lines = String::new();
    let mut results = Vec::new();
    let mut ok = true;
    for (name, run) in suites {
        let (residual, tol) = run()?;
        let pass = residual <= tol;
        ok &= pass;
        lines.push_str(&format!(
            "suite {name}: max residual {residual:.3e} (tolerance {tol:.0e}) -> {}\n",
            if pass { "pass" } else { "FAIL" }
        ));
        results.push(json!({ "suite": name, "max_residual": residual, "tolerance": tol, "pass": pass }));
    }
    let text = match args.output.format {
        Format::Csv => lines,
        Format::Json => {
            let doc = json!({ "config": serde_json::to_value(args).unwrap(), "results": results });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    emit(&args.output, &text)?;
    if !ok {
        return Err(Failure::verification("one or more verification suites failed"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Symmetric(args) => cmd_symmetric(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Asymmetric(args) => cmd_asymmetric(args),
        Command::Montecarlo(args) => cmd_montecarlo(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

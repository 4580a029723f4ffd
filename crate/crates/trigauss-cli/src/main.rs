//! `trigauss`: decide between marginal independence (M0: X1 ⊥ X2) and
//! conditional independence (M1: X1 ⊥ X2 | X3) for trivariate Gaussian
//! data, from the command line.
//!
//! Subcommands: `select` runs a decision rule on a data or covariance CSV,
//! `quantile` queries envelope quantiles, `envelope-table` regenerates the
//! quantile table, and `simulate` runs the size/power studies. Exit codes:
//! 0 for a completed decision (whatever its outcome), 2 for I/O, parsing or
//! configuration problems, 3 for statistical precondition failures
//! (non-PD input, too few samples). Errors are emitted as JSON on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use trigauss::{
    build_envelope_table, condition_on, decide_interval_conditioned, decide_naive, envelope_quantile,
    lambda01, p_value, rho_hat, run_scenario, Decision, EnvelopeTable, McConfig, ModelChoice,
    RuleKind, SampleStats, ScenarioKind, ScenarioSpec, TruthSide,
};

const DEFAULT_TABLE_CSV: &str = include_str!("../data/envelope_table.csv");
const DEFAULT_TABLE_META: &str = include_str!("../data/envelope_table.meta.json");

#[derive(Parser)]
#[command(name = "trigauss", version, about = "Marginal vs. conditional independence selection for trivariate Gaussians")]
struct Cli {
    /// Worker threads for Monte Carlo and simulations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide between M0 and M1 on a dataset or covariance matrix.
    Select(SelectArgs),
    /// Print the negated envelope quantile −F̄_ρ⁻¹(α).
    Quantile(QuantileArgs),
    /// Regenerate an envelope quantile table (CSV + JSON sidecar).
    EnvelopeTable(TableArgs),
    /// Run replicated size/power studies and emit plot-ready CSV.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Adaptive,
    Uniform,
    Naive,
    Interval,
}

impl From<RuleArg> for RuleKind {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Adaptive => RuleKind::Adaptive,
            RuleArg::Uniform => RuleKind::Uniform,
            RuleArg::Naive => RuleKind::Naive,
            RuleArg::Interval => RuleKind::Interval,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    M0,
    M1,
    Both,
}

#[derive(Args)]
struct SelectArgs {
    /// CSV of n×k observations with a header row.
    #[arg(long, conflicts_with = "cov")]
    data: Option<PathBuf>,
    /// CSV of a k×k covariance (or correlation) matrix with a header row.
    #[arg(long, required_unless_present = "data")]
    cov: Option<PathBuf>,
    /// Sample size behind a covariance matrix input.
    #[arg(long)]
    n: Option<usize>,
    /// The input matrix is a correlation matrix (unit diagonal).
    #[arg(long)]
    is_correlation: bool,
    /// Subtract column means before forming the covariance (data input).
    #[arg(long)]
    center: bool,
    /// Unshielded triple A,B,C for the path A-B-C: the tested pair is
    /// (A, C) and B is the potential collider / conditioning vertex.
    /// Defaults to the first three columns read as (X1, X2, X3).
    #[arg(long, value_delimiter = ',')]
    triple: Option<Vec<String>>,
    /// Variables to condition on (Schur complement) before selection.
    #[arg(long, value_delimiter = ',')]
    condition: Option<Vec<String>>,
    #[arg(long, value_enum)]
    rule: RuleArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Envelope table CSV (defaults to $ENVELOPE_TABLE_PATH, then the
    /// built-in table).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Monte Carlo at the exact plug-in ρ̂ instead of table interpolation.
    #[arg(long)]
    exact: bool,
    /// Monte Carlo sample count for --exact and p-values.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct QuantileArgs {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Monte Carlo at the requested ρ instead of table interpolation.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct TableArgs {
    /// ρ grid as lo:hi:step.
    #[arg(long, default_value = "0:1:0.01")]
    rho_grid: String,
    /// Comma-separated levels in (0, 1/2).
    #[arg(long, default_value = "0.10,0.05,0.025,0.01", value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Local-parameter grid as lo:hi:step.
    #[arg(long, default_value = "0:10:0.05")]
    gamma_grid: String,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path; the metadata sidecar lands next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Strong-edge correlation(s) for local-ws.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    /// Local parameter value(s) for local-ws.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Local parameter sweep for local-ws as lo:hi:step.
    #[arg(long)]
    gamma_grid: Option<String>,
    /// Local parameter value(s) for local-ww.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Split exponent(s) a ∈ (0, 1/2) for local-ww.
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    split: Vec<f64>,
    /// Wishart degrees of freedom (wishart kind; error covariance of the
    /// regression kind).
    #[arg(long, value_delimiter = ',')]
    df: Vec<usize>,
    /// Covariate count(s) for the regression kind.
    #[arg(long, value_delimiter = ',')]
    p: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SideArg::Both)]
    side: SideArg,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 4000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Rules to evaluate.
    #[arg(long, value_enum, value_delimiter = ',',
          default_value = "adaptive,uniform,interval,naive")]
    rules: Vec<RuleArg>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    LocalWs,
    LocalWw,
    Wishart,
    Regression,
}

/// A failure with its exit code (2 = I/O/parse/config, 3 = statistical).
struct Failure {
    kind: &'static str,
    exit: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { kind: "config", exit: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { kind: "io", exit: 2, message: message.into() }
    }

    fn statistical(message: impl Into<String>) -> Self {
        Failure { kind: "statistical", exit: 3, message: message.into() }
    }
}

impl From<trigauss::Error> for Failure {
    fn from(e: trigauss::Error) -> Self {
        use trigauss::Error::*;
        let exit = match e {
            NotSymmetric(_) | NotPositiveDefinite(_) | TooFewSamples { .. } | RankDeficient
            | DomainError(_) | DegenerateScenario { .. } => 3,
            ConfigError(_) | UnknownAlpha(_) | BadIndices(_) | ParseError(_) => 2,
        };
        Failure {
            kind: if exit == 3 { "statistical" } else { "config" },
            exit,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // ignore failure: the pool may already be initialized in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match cli.cmd {
        Cmd::Select(args) => cmd_select(args),
        Cmd::Quantile(args) => cmd_quantile(args),
        Cmd::EnvelopeTable(args) => cmd_envelope_table(args),
        Cmd::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": f.message, "kind": f.kind })
            );
            ExitCode::from(f.exit)
        }
    }
}

// -------------------------------------------------------------------
// input handling
// -------------------------------------------------------------------

fn read_csv_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| Failure::io(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Failure::io(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row: Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        let row = row.map_err(|_| {
            Failure::config(format!("non-numeric field in {}", path.display()))
        })?;
        if row.len() != names.len() {
            return Err(Failure::config(format!(
                "row with {} fields, expected {}",
                row.len(),
                names.len()
            )));
        }
        rows.push(row);
    }
    Ok((names, rows))
}

fn resolve_selector(names: &[String], sel: &str) -> Result<usize, Failure> {
    if let Some(pos) = names.iter().position(|n| n == sel) {
        return Ok(pos);
    }
    sel.parse::<usize>()
        .ok()
        .filter(|&i| i < names.len())
        .ok_or_else(|| Failure::config(format!("unknown column {sel:?}")))
}

fn load_table(path: Option<&Path>) -> Result<EnvelopeTable, Failure> {
    let from_env = std::env::var_os("ENVELOPE_TABLE_PATH").map(PathBuf::from);
    let chosen = path.map(Path::to_path_buf).or(from_env);
    match chosen {
        None => Ok(EnvelopeTable::from_csv(DEFAULT_TABLE_CSV, Some(DEFAULT_TABLE_META))
            .expect("built-in table parses")),
        Some(p) => {
            let csv = std::fs::read_to_string(&p)
                .map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
            let meta_path = sidecar_path(&p);
            let meta = std::fs::read_to_string(&meta_path).ok();
            Ok(EnvelopeTable::from_csv(&csv, meta.as_deref())?)
        }
    }
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Failure::config(format!("alpha={alpha} outside (0, 1/2)")))
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::config(format!("grid {s:?} is not lo:hi:step")));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    let nums = nums.map_err(|_| Failure::config(format!("bad number in grid {s:?}")))?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 {
        return Err(Failure::config("grid step must be positive"));
    }
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let v = lo + i as f64 * step;
        if v > hi + 1e-9 {
            break;
        }
        out.push((v * 1e6).round() / 1e6);
        i += 1;
    }
    Ok(out)
}

// -------------------------------------------------------------------
// select
// -------------------------------------------------------------------

fn full_covariance(rows: &[Vec<f64>], k: usize, center: bool) -> DMatrix<f64> {
    let n = rows.len();
    let mut mean = vec![0.0; k];
    if center {
        for row in rows {
            for j in 0..k {
                mean[j] += row[j];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
    }
    let mut acc = DMatrix::zeros(k, k);
    for row in rows {
        for i in 0..k {
            for j in i..k {
                acc[(i, j)] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..k {
        for j in i..k {
            let v = acc[(i, j)] / n as f64;
            acc[(i, j)] = v;
            acc[(j, i)] = v;
        }
    }
    acc
}

fn cmd_select(args: SelectArgs) -> Result<(), Failure> {
    check_alpha(args.alpha)?;
    let (names, full, n) = if let Some(data_path) = &args.data {
        let (names, rows) = read_csv_rows(data_path)?;
        if rows.len() < 4 {
            return Err(Failure::statistical(format!(
                "need at least 4 observations, got {}",
                rows.len()
            )));
        }
        if let Some(n) = args.n {
            if n != rows.len() {
                return Err(Failure::config(format!(
                    "--n {n} disagrees with {} data rows",
                    rows.len()
                )));
            }
        }
        let k = names.len();
        let cov = full_covariance(&rows, k, args.center);
        let n = rows.len();
        (names, cov, n)
    } else {
        let cov_path = args.cov.as_ref().expect("clap enforces data|cov");
        let (names, rows) = read_csv_rows(cov_path)?;
        let k = names.len();
        if rows.len() != k {
            return Err(Failure::config(format!(
                "covariance matrix must be {k}×{k}, got {} rows",
                rows.len()
            )));
        }
        let n = args
            .n
            .ok_or_else(|| Failure::config("--n is required with --cov"))?;
        let full = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
        (names, full, n)
    };

    if args.is_correlation {
        for i in 0..full.nrows() {
            if (full[(i, i)] - 1.0).abs() > 1e-6 {
                return Err(Failure::config(format!(
                    "--is-correlation given but diagonal entry {i} is {}",
                    full[(i, i)]
                )));
            }
        }
    }

    let cond_idx: Vec<usize> = match &args.condition {
        None => Vec::new(),
        Some(sel) => sel
            .iter()
            .map(|s| resolve_selector(&names, s))
            .collect::<Result<_, _>>()?,
    };
    let triple_idx: [usize; 3] = match &args.triple {
        Some(sel) => {
            if sel.len() != 3 {
                return Err(Failure::config("--triple needs exactly three columns"));
            }
            let a = resolve_selector(&names, &sel[0])?;
            let b = resolve_selector(&names, &sel[1])?;
            let c = resolve_selector(&names, &sel[2])?;
            // path order A-B-C: tested pair (A, C), conditioning vertex B
            [a, c, b]
        }
        None => {
            if names.len() != 3 || !cond_idx.is_empty() {
                return Err(Failure::config(
                    "--triple is required unless the input has exactly three columns and no --condition",
                ));
            }
            [0, 1, 2]
        }
    };

    let stats = condition_on(&full, n, triple_idx, &cond_idx)?;
    let decision = decide(&args, &stats, cond_idx.len())?;
    println!(
        "{}",
        serde_json::to_string(&decision).expect("decision serializes")
    );
    Ok(())
}

fn decide(args: &SelectArgs, stats: &SampleStats, conditioners: usize) -> Result<Decision, Failure> {
    let rule: RuleKind = args.rule.into();
    match rule {
        RuleKind::Naive => Ok(decide_naive(stats)),
        RuleKind::Interval => Ok(decide_interval_conditioned(stats, args.alpha, conditioners)?),
        RuleKind::Uniform | RuleKind::Adaptive => {
            let rho = match rule {
                RuleKind::Uniform => 1.0,
                _ => rho_hat(stats).min(1.0),
            };
            let cfg = McConfig {
                samples: args.samples,
                seed: args.seed,
                ..McConfig::default()
            };
            let lambda = lambda01(stats);
            let threshold = if args.exact {
                -envelope_quantile(rho, args.alpha, &cfg)?
            } else {
                load_table(args.table.as_deref())?.neg_quantile(rho, args.alpha)?
            };
            let p = p_value(lambda, rho, &cfg)?;
            let decision = if lambda > threshold {
                ModelChoice::M0
            } else if lambda < -threshold {
                ModelChoice::M1
            } else {
                ModelChoice::Both
            };
            Ok(Decision {
                rule,
                alpha: Some(args.alpha),
                lambda,
                rho_hat: (rule == RuleKind::Adaptive).then_some(rho),
                p_value: Some(p),
                decision,
            })
        }
    }
}

// -------------------------------------------------------------------
// quantile / envelope-table
// -------------------------------------------------------------------

fn cmd_quantile(args: QuantileArgs) -> Result<(), Failure> {
    check_alpha(args.alpha)?;
    if !(0.0..=1.0).contains(&args.rho) {
        return Err(Failure::config(format!("rho={} outside [0,1]", args.rho)));
    }
    let q = if args.exact {
        let cfg = McConfig {
            samples: args.samples,
            seed: args.seed,
            ..McConfig::default()
        };
        -envelope_quantile(args.rho, args.alpha, &cfg)?
    } else {
        load_table(args.table.as_deref())?.neg_quantile(args.rho, args.alpha)?
    };
    println!("{q:.6}");
    Ok(())
}

fn cmd_envelope_table(args: TableArgs) -> Result<(), Failure> {
    let rho_grid = parse_grid(&args.rho_grid)?;
    let gamma = parse_grid(&args.gamma_grid)?;
    if gamma.is_empty() {
        return Err(Failure::config("empty gamma grid"));
    }
    let cfg = McConfig {
        gamma_lo: gamma[0],
        gamma_hi: *gamma.last().unwrap(),
        gamma_step: if gamma.len() > 1 { gamma[1] - gamma[0] } else { 0.05 },
        samples: args.samples,
        seed: args.seed,
    };
    let table = build_envelope_table(&rho_grid, &args.alphas, &cfg)?;
    std::fs::write(&args.out, table.to_csv())
        .map_err(|e| Failure::io(format!("{}: {e}", args.out.display())))?;
    let meta = sidecar_path(&args.out);
    std::fs::write(&meta, table.metadata_json())
        .map_err(|e| Failure::io(format!("{}: {e}", meta.display())))?;
    eprintln!(
        "wrote {} ({} rho × {} alpha) and {}",
        args.out.display(),
        table.rho_grid().len(),
        table.alphas().len(),
        meta.display()
    );
    Ok(())
}

// -------------------------------------------------------------------
// simulate
// -------------------------------------------------------------------

fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    check_alpha(args.alpha)?;
    if args.reps == 0 {
        return Err(Failure::config("--reps must be positive"));
    }
    let sides: Vec<TruthSide> = match args.side {
        SideArg::M0 => vec![TruthSide::UnderM0],
        SideArg::M1 => vec![TruthSide::UnderM1],
        SideArg::Both => vec![TruthSide::UnderM0, TruthSide::UnderM1],
    };
    let mut kinds: Vec<ScenarioKind> = Vec::new();
    match args.kind {
        KindArg::LocalWs => {
            if args.rho.is_empty() {
                return Err(Failure::config("--rho is required for local-ws"));
            }
            let gammas = if let Some(g) = &args.gamma_grid {
                parse_grid(g)?
            } else if !args.gamma.is_empty() {
                args.gamma.clone()
            } else {
                return Err(Failure::config("--gamma or --gamma-grid is required for local-ws"));
            };
            for &rho in &args.rho {
                for &gamma in &gammas {
                    for &side in &sides {
                        kinds.push(ScenarioKind::LocalWs { rho, gamma, side });
                    }
                }
            }
        }
        KindArg::LocalWw => {
            if args.delta.is_empty() {
                return Err(Failure::config("--delta is required for local-ww"));
            }
            for &delta in &args.delta {
                for &split in &args.split {
                    for &side in &sides {
                        kinds.push(ScenarioKind::LocalWw { delta, split, side });
                    }
                }
            }
        }
        KindArg::Wishart => {
            let dfs = if args.df.is_empty() { vec![10, 50, 200] } else { args.df.clone() };
            for &df in &dfs {
                for &side in &sides {
                    kinds.push(ScenarioKind::Wishart { df, side });
                }
            }
        }
        KindArg::Regression => {
            let ps = if args.p.is_empty() { vec![5] } else { args.p.clone() };
            let dfs = if args.df.is_empty() { vec![50] } else { args.df.clone() };
            for &covariates in &ps {
                for &wishart_df in &dfs {
                    for &side in &sides {
                        kinds.push(ScenarioKind::Regression { covariates, wishart_df, side });
                    }
                }
            }
        }
    }

    let table = load_table(args.table.as_deref())?;
    let rules: Vec<RuleKind> = args.rules.iter().map(|&r| r.into()).collect();
    let mut out = String::from(trigauss::CSV_HEADER);
    out.push('\n');
    for (idx, kind) in kinds.into_iter().enumerate() {
        let spec = ScenarioSpec {
            kind,
            n: args.n,
            reps: args.reps,
            seed: derive_seed(args.seed, idx as u64),
            rules: rules.clone(),
            alpha: args.alpha,
        };
        let rec = run_scenario(&spec, &table)?;
        trigauss::append_csv_rows(&mut out, &rec);
        if rec.retries > 0 {
            eprintln!("note: {:?} needed {} redraws", rec.spec.kind, rec.retries);
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(())
}

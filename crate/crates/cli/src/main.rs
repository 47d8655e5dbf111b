//! `hspec`: evaluate and fuzz spectral inequalities for nonnegative matrices.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hspec_core::constructions::{alpha_profile, refinement_sequence};
use hspec_core::harness::{run_campaign, EntryModel, GenConfig};
use hspec_core::io::{self, CampaignDocument, ReportDocument};
use hspec_core::laws::{self, LawReport, LawSpec, Tolerances};
use hspec_core::spectral::{self, CertifiedValue, Functional, SpectralOptions};
use hspec_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

/// `println!` that exits quietly when stdout is closed early.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

#[derive(Parser)]
#[command(name = "hspec", version, about = "Spectral inequalities for Hadamard products of nonnegative matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the inequality catalog.
    Laws,
    /// Run a randomized campaign over one law or all of them.
    Check(CheckArgs),
    /// Evaluate one law on matrices described by a JSON spec.
    Eval(EvalArgs),
    /// Evaluate one functional on a matrix.
    Rho(RhoArgs),
    /// Print the dyadic refinement sequence and its cap.
    Refine(RefineArgs),
    /// Sample the functional of S_α(K) over α ∈ [0, 1].
    Profile(ProfileArgs),
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    #[arg(long, default_value_t = 1e-10)]
    spectral_rtol: f64,
    #[arg(long, default_value_t = 1e-14)]
    spectral_atol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances, Error> {
        let t = Tolerances {
            rtol: self.rtol,
            atol: self.atol,
            spectral: SpectralOptions { rtol: self.spectral_rtol, atol: self.spectral_atol, max_iter: self.max_iter },
        };
        t.validate()?;
        if t.spectral.max_iter == 0 {
            return Err(Error::InvalidArgument("max-iter must be at least 1".into()));
        }
        Ok(t)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Uniform01,
    Loguniform,
    Smallint,
}

#[derive(Args)]
struct CheckArgs {
    /// Law id or `all`.
    #[arg(long)]
    law: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_dim: usize,
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    #[arg(long, value_enum, default_value_t = Model::Loguniform)]
    entry_model: Model,
    #[arg(long, default_value_t = 0.2)]
    zero_density: f64,
    #[arg(long, default_value_t = 0.1)]
    structured_rate: f64,
    /// Restrict to one functional (laws that do not admit it are skipped).
    #[arg(long)]
    functional: Option<String>,
    /// Worker threads; overrides HSPEC_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    law: String,
    #[arg(long)]
    input: PathBuf,
    /// Overrides the functional named in the spec.
    #[arg(long)]
    functional: Option<String>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct RhoArgs {
    #[arg(long)]
    functional: String,
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    spectral_rtol: f64,
    #[arg(long, default_value_t = 1e-14)]
    spectral_atol: f64,
}

#[derive(Args)]
struct RefineArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value = "r")]
    functional: String,
    #[arg(long, default_value_t = 21)]
    grid: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Laws => {
            laws_cmd();
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(a) => check_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Rho(a) => rho_cmd(a),
        Command::Refine(a) => refine_cmd(a),
        Command::Profile(a) => profile_cmd(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_USAGE,
    }
}

fn laws_cmd() {
    for law in laws::catalog() {
        let fs: Vec<&str> = law.functionals.iter().map(|f| f.short_name()).collect();
        let fs = if fs.is_empty() { "entrywise".to_string() } else { fs.join(", ") };
        out!("{}  {}", law.id, law.name);
        out!("    {}", law.statement);
        out!("    input: {}", law.shape);
        out!("    functionals: {fs}");
    }
}

fn workers(flag: Option<usize>) -> Result<usize, Error> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("HSPEC_WORKERS") {
            Ok(v) => {
                v.trim().parse().map_err(|_| Error::InvalidArgument(format!("HSPEC_WORKERS={v:?} is not a count")))?
            }
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    Ok(n)
}

fn restrict(law: &LawSpec, f: Functional) -> Option<LawSpec> {
    law.functionals
        .iter()
        .position(|&g| g == f)
        .map(|i| LawSpec { functionals: &law.functionals[i..=i], ..law.clone() })
}

fn check_cmd(a: CheckArgs) -> Result<ExitCode, Error> {
    let tol = a.tol.tolerances()?;
    let entry_model = match a.entry_model {
        Model::Uniform01 => EntryModel::Uniform01,
        Model::Loguniform => EntryModel::default(),
        Model::Smallint => EntryModel::SmallInt,
    };
    let cfg = GenConfig {
        seed: a.seed,
        min_dim: a.min_dim,
        max_dim: a.max_dim,
        entry_model,
        zero_density: a.zero_density,
        structured_injection_rate: a.structured_rate,
    };
    cfg.validate()?;
    let mut selected = if a.law.eq_ignore_ascii_case("all") { laws::catalog() } else { vec![laws::find_law(&a.law)?] };
    if let Some(f) = &a.functional {
        let f: Functional = f.parse()?;
        selected = selected.iter().filter_map(|l| restrict(l, f)).collect();
    }
    let report = run_campaign(&selected, a.trials, &cfg, &tol, workers(a.workers)?)?;

    out!("{:<5} {:<9} {:>7} {:>7} {:>5} {:>6} {:>12}", "law", "rho", "trials", "pass", "fail", "skip", "max slack");
    for row in &report.rows {
        let f = row.functional.map_or("-", Functional::short_name);
        out!(
            "{:<5} {:<9} {:>7} {:>7} {:>5} {:>6} {:>12.3e}",
            row.law,
            f,
            row.trials,
            row.pass,
            row.fail,
            row.skip,
            row.max_slack_consumed
        );
    }
    for c in &report.counterexamples {
        let f = c.report.functional.map_or("-", Functional::short_name);
        let link = c.report.failing_link.unwrap_or(0);
        eprintln!(
            "counterexample: {} {f} trial {} dimension {} failing link {link} after {} shrink steps",
            c.law_id,
            c.trial,
            c.input.dim(),
            c.shrink_steps
        );
    }
    let failures = report.total_failures();
    out!("{failures} counterexamples in {:.1}s", report.wall_time_secs);
    if let Some(path) = &a.json {
        io::save_campaign(&CampaignDocument::new(&report, a.trials, &cfg, &tol), path)?;
    }
    Ok(if failures > 0 { ExitCode::from(EXIT_FAIL) } else { ExitCode::SUCCESS })
}

fn print_report(rep: &LawReport) {
    let f = rep.functional.map_or("entrywise".into(), |f| f.short_name().to_string());
    out!("{} ({f})", rep.law_id);
    for (i, (label, v)) in rep.labels.iter().zip(&rep.values).enumerate() {
        out!("  [{i}] {label} = {v:.12e}  (±{:.1e})", rep.widths[i]);
    }
    for (k, l) in rep.links.iter().enumerate() {
        let mark = if l.holds { "ok" } else { "FAIL" };
        out!("  link {k}: [{}] <= [{}]  gap {:.3e}  {mark}", l.from, l.to, l.worst_gap);
    }
    out!("verdict: {:?}", rep.verdict);
}

fn eval_cmd(a: EvalArgs) -> Result<ExitCode, Error> {
    let tol = a.tol.tolerances()?;
    let mut input = io::load_eval_spec(&a.input)?;
    if let Some(f) = &a.functional {
        input.functional = Some(f.parse()?);
    }
    let rep = laws::evaluate_law(&a.law, &input, &tol)?;
    print_report(&rep);
    let (passed, converged) = (rep.passed(), rep.converged);
    if let Some(path) = &a.json {
        io::save_report(&ReportDocument::new(rep, &input, None)?, path)?;
    }
    Ok(match (passed, converged) {
        (false, _) => ExitCode::from(EXIT_FAIL),
        (true, false) => ExitCode::from(EXIT_NOT_CONVERGED),
        (true, true) => ExitCode::SUCCESS,
    })
}

fn print_value(f: Functional, v: &CertifiedValue) {
    out!("{} = {:.9}", f.short_name(), v.value);
    out!("interval = [{:?}, {:?}]", v.lo, v.hi);
    out!("width = {:.3e}", v.width());
}

fn rho_cmd(a: RhoArgs) -> Result<ExitCode, Error> {
    let f: Functional = a.functional.parse()?;
    let m = io::load_matrix(&a.matrix)?;
    let opts = SpectralOptions { rtol: a.spectral_rtol, atol: a.spectral_atol, ..SpectralOptions::default() };
    match spectral::evaluate_certified(f, &m, &opts) {
        Ok(v) => {
            print_value(f, &v);
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::NotConverged { best }) => {
            print_value(f, &best);
            eprintln!("error: bracket did not reach the requested tolerance");
            Ok(ExitCode::from(EXIT_NOT_CONVERGED))
        }
        Err(e) => Err(e),
    }
}

fn refine_cmd(a: RefineArgs) -> Result<ExitCode, Error> {
    let m = io::load_matrix(&a.matrix)?;
    let seq =
        refinement_sequence(&m, a.alpha, a.beta, a.depth, Functional::SpectralRadius, &SpectralOptions::default())?;
    for (n, b) in seq.brackets.iter().enumerate() {
        out!("rho_{n} = {:.12e}  [{:?}, {:?}]", b.value, b.lo, b.hi);
    }
    out!("cap = {:.12e}  [{:?}, {:?}]", seq.cap, seq.cap_bracket.lo, seq.cap_bracket.hi);
    if let Some(path) = &a.json {
        std::fs::write(path, io::to_sorted_json(&seq)?)?;
    }
    let converged = seq.brackets.iter().chain([&seq.cap_bracket]).all(|b| b.converged);
    Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
}

fn profile_cmd(a: ProfileArgs) -> Result<ExitCode, Error> {
    let f: Functional = a.functional.parse()?;
    let m = io::load_matrix(&a.matrix)?;
    let p = alpha_profile(&m, f, a.grid, &SpectralOptions::default())?;
    match &a.json {
        Some(path) => std::fs::write(path, io::to_sorted_json(&p)?)?,
        None => {
            for (alpha, v) in p.grid.iter().zip(&p.values) {
                out!("{alpha:.6} {v:.12e}");
            }
        }
    }
    let converged = p.brackets.iter().all(|b| b.converged);
    Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
}

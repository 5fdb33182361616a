use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlevel::exec::Execution;
use hyperlevel::holo::Polynomial;
use hyperlevel::norms::{exact_norm_pow, norm_pow, SpaceParams};
use hyperlevel_harness::config::{parse_dims, ConfigOverrides, Suite, SuiteConfig};
use hyperlevel_harness::curves::{dump_curves, CurveParams};
use hyperlevel_harness::suites::inequality_records;
use hyperlevel_harness::{exit, verify, HarnessError, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hyperlevel", version, about = "Numerical checks on the complex hyperbolic ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and write report.json, timings.json and curves/.
    Verify(VerifyArgs),
    /// Hardy or weighted Bergman norm of a polynomial.
    Norms(NormsArgs),
    /// One family of inequality checks.
    Ineq(IneqArgs),
    /// Distribution-function and rearrangement CSVs for a polynomial.
    DumpCurves(CurvesArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or a comma-separated list of suites.
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    radial_nodes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML or JSON file with the same fields; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single-threaded run (identical report).
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceKind {
    Hardy,
    Bergman,
}

#[derive(Args)]
struct NormsArgs {
    /// Polynomial JSON `{n, terms: [{exponents, re, im}]}`.
    #[arg(long)]
    f: PathBuf,
    #[arg(long, value_enum)]
    space: SpaceKind,
    #[arg(long)]
    p: f64,
    /// Weight exponent, required for `bergman`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    radial_nodes: usize,
}

#[derive(Args)]
struct IneqArgs {
    /// iso-model, iso-refined, sobolev-I..IV, hardy-weighted, kalaj or sobolev-constants.
    #[arg(long)]
    check: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Direction budget; the Sobolev battery uses a hundredth of it.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    f: PathBuf,
    /// `u = |f|^a (1-|z|^2)^b`.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Comma-separated increasing thresholds; omit for the default grid.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 4_000)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    radial_nodes: usize,
    #[arg(long, default_value = "curves")]
    out: PathBuf,
    /// File name prefix.
    #[arg(long, default_value = "curve")]
    stem: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::CONFIG } else { exit::PASS };
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Norms(a) => run_norms(a),
        Command::Ineq(a) => run_ineq(a),
        Command::DumpCurves(a) => run_curves(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG)
        }
    }
}

fn run_verify(a: VerifyArgs) -> Result<u8> {
    let file = a.config.as_deref().map(ConfigOverrides::from_file).transpose()?;
    let flags = ConfigOverrides {
        seed: a.seed,
        n_list: a.n.as_deref().map(parse_dims).transpose()?,
        samples: a.samples,
        radial_nodes: a.radial_nodes,
        suites: a.suite.as_deref().map(Suite::parse_list).transpose()?,
        output_dir: a.out,
        execution: a.sequential.then_some(Execution::Sequential),
    };
    let cfg = SuiteConfig::resolve(file, flags)?;
    let (report, code) = verify(&cfg)?;
    for r in report.records.iter().filter(|r| !r.pass) {
        println!("FAIL {} margin={:?} tolerance={:e} {}", r.id, r.margin, r.tolerance, r.notes.join("; "));
    }
    println!(
        "{} records, {} passed, {} failed; report in {}",
        report.summary.total,
        report.summary.passed,
        report.summary.failed,
        cfg.output_dir.join("report.json").display()
    );
    Ok(code)
}

fn read_poly(path: &Path) -> Result<Polynomial> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Polynomial::from_json(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn run_norms(a: NormsArgs) -> Result<u8> {
    let f = read_poly(&a.f)?;
    let params = match (a.space, a.alpha) {
        (SpaceKind::Hardy, None) => SpaceParams::hardy(f.dim(), a.p)?,
        (SpaceKind::Hardy, Some(_)) => return Err(HarnessError::Config("--alpha applies to the bergman space only".into())),
        (SpaceKind::Bergman, Some(alpha)) => SpaceParams::bergman(f.dim(), a.p, alpha)?,
        (SpaceKind::Bergman, None) => return Err(HarnessError::Config("--alpha is required for bergman".into())),
    };
    let cfg = hyperlevel::integrate::McConfig::new(a.seed, a.samples, a.radial_nodes)?;
    let pow = norm_pow(&f, &params, &cfg)?;
    let norm = pow.root(a.p);
    let exact = exact_norm_pow(&f, &params);
    let out = json!({
        "space": params.space,
        "n": f.dim(),
        "norm": norm.value,
        "norm_stderr": norm.stderr,
        "norm_pow": pow.value,
        "norm_pow_stderr": pow.stderr,
        "exact_norm": exact.map(|v| v.powf(1.0 / a.p)),
        "samples": a.samples,
        "seed": a.seed,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(exit::PASS)
}

fn run_ineq(a: IneqArgs) -> Result<u8> {
    let cfg = SuiteConfig { seed: a.seed, samples: a.samples, ..SuiteConfig::default() };
    cfg.validate()?;
    let records = inequality_records(&a.check, a.n, a.p, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&records)?);
    Ok(if records.iter().all(|r| r.pass) { exit::PASS } else { exit::FAIL })
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| HarnessError::Config(format!("bad threshold `{p}`"))))
        .collect()
}

fn run_curves(a: CurvesArgs) -> Result<u8> {
    let f = read_poly(&a.f)?;
    let params = CurveParams { a: a.a, b: a.b, t_grid: a.t_grid.as_deref().map(parse_grid).transpose()? };
    let cfg = hyperlevel::integrate::McConfig::new(a.seed, a.samples, a.radial_nodes)?;
    let (dist, rear) = dump_curves(&f, &params, &cfg, &a.out, &a.stem)?;
    println!("{}\n{}", dist.display(), rear.display());
    Ok(exit::PASS)
}

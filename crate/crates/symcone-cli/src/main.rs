//! Command line front end: sampling, log-density evaluation, the residual
//! verification suite, and the independence experiments, all reproducible
//! from a single seed.
//!
//! Exit codes: 0 on success (and for experiments regardless of their
//! statistical outcome), 1 when the verification suite reports a failing
//! check, 2 for configuration, parsing, or I/O problems.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symcone::element::{ConeElement, SymElement};
use symcone::mclab::{run_contrast, run_independence_experiment, sample_rows, ExperimentConfig};
use symcone::power::PowerParam;
use symcone::riesz::{BetaRieszParams, RieszParams};
use symcone::rng::stream_rng;
use symcone::triangular::DivisionAlgorithm;
use symcone::verify::{run_suite, VerifyConfig};

/// Environment variable consulted for the default seed.
const SEED_ENV: &str = "SYMCONE_SEED";

#[derive(Parser)]
#[command(
    name = "symcone",
    version,
    about = "Riesz distribution lab on the positive definite cone"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from the Riesz or beta-Riesz distribution.
    Sample(SampleArgs),
    /// Evaluate a log density at a point read from a matrix file.
    Density(DensityArgs),
    /// Run the residual verification suite.
    Verify(VerifyArgs),
    /// Run the quotient-independence experiments.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Riesz,
    BetaRiesz,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Cholesky,
    Quadratic,
}

impl From<Algorithm> for DivisionAlgorithm {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Cholesky => DivisionAlgorithm::Cholesky,
            Algorithm::Quadratic => DivisionAlgorithm::Quadratic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentMode {
    Independence,
    Contrast,
}

#[derive(Args)]
struct SampleArgs {
    /// Matrix rank.
    #[arg(long)]
    r: usize,
    /// Comma-separated exponent vector s of length r.
    #[arg(long)]
    s: String,
    /// Comma-separated second exponent vector (beta-riesz only).
    #[arg(long = "s-prime")]
    s_prime: Option<String>,
    #[arg(long, value_enum, default_value = "riesz")]
    dist: Dist,
    /// Scale parameter: "identity" or a matrix file path (riesz only).
    #[arg(long, default_value = "identity")]
    sigma: String,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: String,
    #[arg(long = "s-prime")]
    s_prime: Option<String>,
    #[arg(long, value_enum, default_value = "riesz")]
    dist: Dist,
    #[arg(long, default_value = "identity")]
    sigma: String,
    /// Matrix file with the evaluation point.
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Negative control: corrupt one check so the suite must fail.
    #[arg(long = "inject-fault", default_value_t = false)]
    inject_fault: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "independence")]
    mode: ExperimentMode,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: String,
    #[arg(long = "s-prime")]
    s_prime: String,
    #[arg(long, default_value = "identity")]
    sigma: String,
    #[arg(long, default_value_t = 50_000)]
    n: usize,
    #[arg(long, value_enum, default_value = "cholesky")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 399)]
    permutations: usize,
    /// Pair count for the distance correlation (at most 4000).
    #[arg(long = "dcor-subsample", default_value_t = 2000)]
    dcor_subsample: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the vectorized (U, V) samples as CSV to this path.
    #[arg(long = "dump-samples")]
    dump_samples: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Density(args) => cmd_density(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

/// Desk-scale bound; the dense operator algebra is O(r⁶).
const MAX_RANK: usize = 16;

fn validate_rank(r: usize) -> Result<(), String> {
    if r == 0 || r > MAX_RANK {
        return Err(format!("r = {r} must lie in 1..={MAX_RANK}"));
    }
    Ok(())
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| format!("{SEED_ENV} = {v:?} is not a valid seed")),
        Err(_) => Ok(0),
    }
}

fn parse_power(label: &str, raw: &str, r: usize) -> Result<PowerParam, String> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("{label} entry {tok:?} is not a number"))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != r {
        return Err(format!(
            "{label} has {} entries, expected r = {r}",
            values.len()
        ));
    }
    PowerParam::new(values).map_err(|e| format!("{label}: {e}"))
}

/// Matrix file format: the rank r followed by the r(r+1)/2 lower-triangle
/// entries in row-major order, whitespace-separated.
fn parse_matrix_text(text: &str) -> Result<SymElement, String> {
    let mut tokens = text.split_whitespace();
    let r: usize = tokens
        .next()
        .ok_or("matrix file is empty")?
        .parse()
        .map_err(|_| "matrix file must start with the rank".to_string())?;
    if r == 0 || r > 64 {
        return Err(format!("matrix rank {r} out of range 1..=64"));
    }
    let n = r * (r + 1) / 2;
    let mut values = Vec::with_capacity(n);
    for tok in tokens {
        values.push(
            tok.parse::<f64>()
                .map_err(|_| format!("matrix entry {tok:?} is not a number"))?,
        );
    }
    if values.len() != n {
        return Err(format!(
            "matrix file has {} entries, expected {n} for rank {r}",
            values.len()
        ));
    }
    let mut m = nalgebra::DMatrix::zeros(r, r);
    let mut it = values.into_iter();
    for i in 0..r {
        for j in 0..=i {
            let v = it.next().unwrap();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymElement::new(m).map_err(|e| e.to_string())
}

fn load_sigma(source: &str, r: usize) -> Result<ConeElement, String> {
    if source == "identity" {
        return Ok(ConeElement::identity(r));
    }
    let text = fs::read_to_string(source).map_err(|e| format!("sigma file {source}: {e}"))?;
    let x = parse_matrix_text(&text)?;
    if x.dim() != r {
        return Err(format!("sigma has rank {}, expected {r}", x.dim()));
    }
    ConeElement::try_new(x).map_err(|e| format!("sigma: {e}"))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => {
            let f =
                fs::File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn lower_triangle(x: &SymElement) -> Vec<f64> {
    let r = x.dim();
    let mut out = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in 0..=i {
            out.push(x.entry(i, j));
        }
    }
    out
}

fn lower_triangle_header(r: usize) -> String {
    let mut names = Vec::with_capacity(r * (r + 1) / 2);
    for i in 1..=r {
        for j in 1..=i {
            names.push(format!("x{i}_{j}"));
        }
    }
    names.join(",")
}

fn write_io(res: std::io::Result<()>) -> Result<(), String> {
    res.map_err(|e| format!("write failed: {e}"))
}

fn cmd_sample(args: SampleArgs) -> Result<i32, String> {
    validate_rank(args.r)?;
    let seed = resolve_seed(args.seed)?;
    let s = parse_power("s", &args.s, args.r)?;
    let mut rng = stream_rng(seed, 0);
    let mut out = open_output(&args.output)?;

    let emit = |x: &SymElement, out: &mut Box<dyn Write>| -> Result<(), String> {
        let tri = lower_triangle(x);
        match args.format {
            Format::Csv => {
                let row = tri
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                write_io(writeln!(out, "{row}"))
            }
            Format::Json => write_io(writeln!(
                out,
                "{}",
                serde_json::to_string(&tri).expect("serializable")
            )),
        }
    };

    if args.format == Format::Csv {
        write_io(writeln!(out, "{}", lower_triangle_header(args.r)))?;
    }
    match args.dist {
        Dist::Riesz => {
            let sigma = load_sigma(&args.sigma, args.r)?;
            let params = RieszParams::new(s, sigma).map_err(|e| e.to_string())?;
            for _ in 0..args.n {
                let x = params.sample(&mut rng);
                emit(x.as_sym(), &mut out)?;
            }
        }
        Dist::BetaRiesz => {
            let sp_raw = args
                .s_prime
                .as_ref()
                .ok_or("--s-prime is required for the beta-riesz distribution")?;
            let s_prime = parse_power("s-prime", sp_raw, args.r)?;
            let params = BetaRieszParams::new(s, s_prime).map_err(|e| e.to_string())?;
            for _ in 0..args.n {
                let x = params.sample(&mut rng);
                emit(x.as_sym(), &mut out)?;
            }
        }
    }
    write_io(out.flush())?;
    Ok(0)
}

fn cmd_density(args: DensityArgs) -> Result<i32, String> {
    validate_rank(args.r)?;
    let s = parse_power("s", &args.s, args.r)?;
    let text = fs::read_to_string(&args.point)
        .map_err(|e| format!("point file {}: {e}", args.point.display()))?;
    let x = parse_matrix_text(&text)?;
    if x.dim() != args.r {
        return Err(format!("point has rank {}, expected {}", x.dim(), args.r));
    }
    let value = match args.dist {
        Dist::Riesz => {
            let sigma = load_sigma(&args.sigma, args.r)?;
            RieszParams::new(s, sigma)
                .map_err(|e| e.to_string())?
                .log_density(&x)
        }
        Dist::BetaRiesz => {
            let sp_raw = args
                .s_prime
                .as_ref()
                .ok_or("--s-prime is required for the beta-riesz distribution")?;
            let s_prime = parse_power("s-prime", sp_raw, args.r)?;
            BetaRieszParams::new(s, s_prime)
                .map_err(|e| e.to_string())?
                .log_density(&x)
        }
    };
    let mut out = open_output(&args.output)?;
    // Debug formatting keeps a decimal point and prints -inf for the
    // out-of-support sentinel
    write_io(writeln!(out, "{value:?}"))?;
    write_io(out.flush())?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, String> {
    validate_rank(args.r)?;
    let cfg = VerifyConfig {
        r: args.r,
        trials: args.trials,
        seed: resolve_seed(args.seed)?,
        inject_fault: args.inject_fault,
    };
    let reports = run_suite(&cfg).map_err(|e| e.to_string())?;
    let mut out = open_output(&args.output)?;
    let mut all_pass = true;
    for report in &reports {
        all_pass &= report.pass;
        write_io(writeln!(
            out,
            "{}",
            serde_json::to_string(report).expect("serializable")
        ))?;
    }
    write_io(out.flush())?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32, String> {
    validate_rank(args.r)?;
    let cfg = ExperimentConfig {
        s: parse_power("s", &args.s, args.r)?,
        s_prime: parse_power("s-prime", &args.s_prime, args.r)?,
        sigma: load_sigma(&args.sigma, args.r)?,
        n_samples: args.n,
        seed: resolve_seed(args.seed)?,
        algorithm: args.algorithm.into(),
        n_permutations: args.permutations,
        dcor_subsample: args.dcor_subsample,
    };
    let results = match args.mode {
        ExperimentMode::Independence => {
            vec![run_independence_experiment(&cfg).map_err(|e| e.to_string())?]
        }
        ExperimentMode::Contrast => {
            let (chol, quad) = run_contrast(&cfg).map_err(|e| e.to_string())?;
            vec![chol, quad]
        }
    };
    if let Some(path) = &args.dump_samples {
        let (u_rows, v_rows) = sample_rows(&cfg).map_err(|e| e.to_string())?;
        let f =
            fs::File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
        let mut w = BufWriter::new(f);
        let dim = u_rows.ncols();
        let header: Vec<String> = (1..=dim)
            .map(|k| format!("u_{k}"))
            .chain((1..=dim).map(|k| format!("v_{k}")))
            .collect();
        write_io(writeln!(w, "{}", header.join(",")))?;
        for i in 0..u_rows.nrows() {
            let row: Vec<String> = (0..dim)
                .map(|j| u_rows[(i, j)].to_string())
                .chain((0..dim).map(|j| v_rows[(i, j)].to_string()))
                .collect();
            write_io(writeln!(w, "{}", row.join(",")))?;
        }
        write_io(w.flush())?;
    }
    let mut out = open_output(&args.output)?;
    for result in &results {
        write_io(writeln!(
            out,
            "{}",
            serde_json::to_string(result).expect("serializable")
        ))?;
    }
    write_io(out.flush())?;
    Ok(0)
}

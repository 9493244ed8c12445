use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bf_cert::bounds::capability::capability;
use bf_cert::bounds::dfr::{dfr_bound_girth6_for, BoundReport, DfrAnalyzer, Method};
use bf_cert::code::gamma::{all_row_profiles, distinct_row_profiles};
use bf_cert::code::search::{search_girth6_monomial, search_girth6_qc2};
use bf_cert::code::{build_monomial, build_qc2, girth, CodeSpecFile, ParityCheckMatrix};
use bf_cert::decoder::{bf_decode, BfConfig, Thresholds};
use bf_cert::keysearch::{acceptance_rate_experiment, rejection_sample_key, KeygenPolicy, ThresholdStrategy};
use bf_cert::montecarlo::{estimate_dfr, TrialPlan};
use bf_cert::pipeline::{analyzer_for, compare, table1_summary, write_csv, Metadata};
use bf_cert::subset::{compress, SubsetCounter};
use bf_cert::{Error, Result};

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(name = "bf-cert", version, about = "Certified failure-rate bounds for one-iteration bit-flipping decoding")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "BF_CERT_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, inspect or search codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Decode one error pattern.
    Decode(DecodeArgs),
    /// Count subsets of a vector whose sum exceeds a threshold.
    Count(CountArgs),
    /// Failure-rate bounds.
    Bound(BoundArgs),
    /// Monte Carlo failure-rate estimates.
    Simulate(SimulateArgs),
    /// Sample keys whose bound meets a target.
    Keygen(KeygenArgs),
    /// Bound next to simulation for a range of error weights.
    Compare(CompareArgs),
    /// One-iteration radius against the iterative-decoding guarantee.
    Table1(Table1Args),
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Validate a spec and write it in canonical form.
    Build {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print structural properties and guaranteed correction radii.
    Info {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 8)]
        girth_cutoff: usize,
    },
    /// Random girth-6 code search.
    Search {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        v: usize,
        /// Number of circulant block columns; a monomial code is searched
        /// when given.
        #[arg(long)]
        w: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    spec: String,
    /// Comma-separated error positions, or a hex string (`0x...`, bit i is
    /// position i).
    #[arg(long)]
    error: String,
    /// Threshold, or a file with one threshold per bit.
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 1)]
    iters: usize,
}

#[derive(Args)]
struct CountArgs {
    /// File with nonnegative integers separated by whitespace or commas.
    #[arg(long)]
    vector: PathBuf,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    alpha: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    spec: String,
    /// Weight, range `a..b` (inclusive) or list `a,b,c`.
    #[arg(long)]
    t: String,
    #[arg(long, conflicts_with = "optimize")]
    b: Option<usize>,
    #[arg(long)]
    optimize: bool,
    /// auto, th4, th4bis, th5 or qc.
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 100)]
    stop_failures: u64,
    #[arg(long, default_value_t = 1_000_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    t: String,
    #[arg(long)]
    b: usize,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    t: String,
    #[arg(long)]
    b: usize,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    t: u64,
    #[arg(long, allow_hyphen_values = true)]
    target_log2: i64,
    /// Certify this many independent draws instead of stopping at the
    /// first accepted one.
    #[arg(long)]
    keys: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    max_attempts: u64,
    /// Fixed threshold; optimized when absent.
    #[arg(long)]
    b: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, default_value_t = 1)]
    v_min: u64,
    #[arg(long, default_value_t = 100)]
    v_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse `{text}` as a weight, range or list"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    text.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn parse_numbers(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Config(format!("not an integer: `{x}`"))))
        .collect()
}

fn parse_error(text: &str, n: usize) -> Result<Vec<bool>> {
    let mut e = vec![false; n];
    if let Some(hex) = text.strip_prefix("0x") {
        for (k, c) in hex.chars().rev().enumerate() {
            let d = c.to_digit(16).ok_or_else(|| Error::Config(format!("bad hex digit `{c}`")))?;
            for bit in 0..4 {
                if d >> bit & 1 == 1 {
                    let i = 4 * k + bit;
                    if i >= n {
                        return Err(Error::Dimension { expected: n, got: i + 1 });
                    }
                    e[i] = true;
                }
            }
        }
    } else {
        for i in parse_list(text)? {
            if i >= n {
                return Err(Error::Dimension { expected: n, got: i + 1 });
            }
            e[i] = true;
        }
    }
    Ok(e)
}

fn parse_thresholds(text: &str) -> Result<Thresholds> {
    if let Ok(b) = text.parse::<usize>() {
        return Ok(Thresholds::Uniform(b));
    }
    let values = parse_numbers(&std::fs::read_to_string(Path::new(text))?)?;
    Ok(Thresholds::PerBit(values.into_iter().map(|x| x.max(0) as usize).collect()))
}

fn load(spec: &str) -> Result<ParityCheckMatrix> {
    CodeSpecFile::load(spec)?.build()
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.unwrap_or(0);
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    }
    match cli.command {
        Command::Code(cmd) => code_cmd(cmd),
        Command::Decode(a) => {
            let h = load(&a.spec)?;
            let e = parse_error(&a.error, h.n())?;
            let cfg = BfConfig { thresholds: parse_thresholds(&a.b)?, max_iterations: a.iters };
            let out = bf_decode(&h, &h.syndrome(&e)?, &cfg)?;
            let residual = e.iter().zip(&out.e_prime).filter(|(x, y)| x != y).count();
            out!("flips: {:?}", out.flip_set());
            out!("iterations: {}", out.iterations_run);
            out!("syndrome_zero: {}", out.syndrome_zero);
            out!("residual_weight: {residual}");
            Ok(())
        }
        Command::Count(a) => {
            let values = parse_numbers(&std::fs::read_to_string(&a.vector)?)?;
            let cv = compress(&values)?;
            let stats = SubsetCounter::new(&cv, a.m).count_detailed(a.m, a.alpha)?;
            out!("{}", stats.exceeding);
            log::info!("configurations visited: {}", stats.configurations);
            Ok(())
        }
        Command::Bound(a) => bound_cmd(a),
        Command::Simulate(a) => {
            let h = load(&a.spec)?;
            let th = Thresholds::Uniform(a.b);
            let mut rows = Vec::new();
            for t in parse_list(&a.t)? {
                let plan = TrialPlan {
                    t,
                    stop_failures: a.sim.stop_failures,
                    max_trials: a.sim.max_trials,
                    seed: a.sim.seed,
                    workers: 0,
                };
                let est = estimate_dfr(&h, &plan, &th)?;
                rows.push(SimRow { t, b: a.b, trials: est.trials, failures: est.failures, dfr: est.p_hat, stderr: est.std_err });
            }
            let meta = Metadata::new()
                .with("command", "simulate")
                .with("spec", &a.spec)
                .code(&h)
                .with("seed", a.sim.seed)
                .with("stop_failures", a.sim.stop_failures)
                .with("max_trials", a.sim.max_trials);
            write_csv(output(&a.out)?, &meta, &rows)
        }
        Command::Keygen(a) => {
            let mut policy = KeygenPolicy::new(a.p, a.v, a.t, a.target_log2, a.seed);
            policy.max_attempts = a.max_attempts;
            policy.strategy = a.b.map_or(ThresholdStrategy::Optimize, ThresholdStrategy::Fixed);
            let records = match a.keys {
                Some(k) => {
                    let rep = acceptance_rate_experiment(&policy, k)?;
                    eprintln!("accepted {} of {} ({:.1}%)", rep.accepted, k, 100.0 * rep.fraction);
                    rep.keys
                }
                None => vec![rejection_sample_key(&policy)?],
            };
            let mut out = output(&a.out)?;
            serde_json::to_writer_pretty(&mut out, &records)?;
            writeln!(out)?;
            Ok(())
        }
        Command::Compare(a) => {
            let h = load(&a.spec)?;
            let plan = TrialPlan {
                t: 0,
                stop_failures: a.sim.stop_failures,
                max_trials: a.sim.max_trials,
                seed: a.sim.seed,
                workers: 0,
            };
            let rows = compare(&h, &parse_list(&a.t)?, a.b, &plan)?;
            let meta = Metadata::new()
                .with("command", "compare")
                .with("spec", &a.spec)
                .code(&h)
                .with("b", a.b)
                .with("seed", a.sim.seed)
                .with("stop_failures", a.sim.stop_failures)
                .with("max_trials", a.sim.max_trials);
            write_csv(output(&a.out)?, &meta, &rows)
        }
        Command::Table1(a) => {
            let (rows, summary) = table1_summary(a.v_min, a.v_max);
            let mut meta = Metadata::new().with("command", "table1");
            for s in &summary {
                meta.push(
                    &format!("g={}", s.g),
                    format!("ours {} | theirs {} | improvement: {}", s.ours, s.theirs, s.range),
                );
            }
            let rows: Vec<_> = rows
                .iter()
                .map(|r| Table1Csv { g: r.g, v: r.v, ours: r.ours, theirs: r.theirs, improves: r.improves() })
                .collect();
            write_csv(output(&a.out)?, &meta, &rows)
        }
    }
}

#[derive(serde::Serialize)]
struct SimRow {
    t: usize,
    b: usize,
    trials: u64,
    failures: u64,
    dfr: f64,
    stderr: f64,
}

#[derive(serde::Serialize)]
struct BoundRow {
    t: u64,
    b: String,
    numerator_bits: u64,
    log2_bound: f64,
    method: String,
}

#[derive(serde::Serialize)]
struct Table1Csv {
    g: u64,
    v: u64,
    ours: u64,
    theirs: u64,
    improves: bool,
}

fn code_cmd(cmd: CodeCmd) -> Result<()> {
    match cmd {
        CodeCmd::Build { spec, out } => {
            let file = CodeSpecFile::load(&spec)?;
            let h = file.build()?;
            let mut canonical = CodeSpecFile::from_matrix(&h);
            canonical.name = file.name;
            let mut w = output(&out)?;
            writeln!(w, "{}", canonical.to_json()?)?;
            eprintln!("n = {}, r = {}, fingerprint {}", h.n(), h.r(), h.fingerprint());
            Ok(())
        }
        CodeCmd::Info { spec, girth_cutoff } => {
            let h = load(&spec)?;
            let cap = capability(&h);
            out!("spec: {spec}");
            out!("fingerprint: {}", h.fingerprint());
            out!("n: {}", h.n());
            out!("r: {}", h.r());
            if let Some(p) = h.block_size() {
                out!("p: {p}");
            }
            out!("design_rate: {:.6}", h.design_rate());
            out!("column_weight: {}..{}", h.min_col_weight(), h.max_col_weight());
            out!("max_row_weight: {}", h.max_row_weight());
            out!("girth: {}", girth(&h, girth_cutoff));
            out!("delta: {}", cap.delta);
            out!("t_majority: {}", cap.t_majority);
            out!("t_mu: {}", cap.t_mu);
            out!("mu: {:?}", cap.mu_values);
            if let Some(r) = cap.threshold_ranges.last() {
                out!("thresholds_at_t_mu: [{}, {}]", r.lo, r.hi);
            }
            let dups = h.duplicate_column_pairs().len();
            if dups > 0 {
                out!("duplicate_column_pairs: {dups}");
            }
            Ok(())
        }
        CodeCmd::Search { p, v, w, restarts, seed, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = match w {
                None => {
                    let (s0, s1) = search_girth6_qc2(p, v, &mut rng, restarts)?
                        .ok_or(Error::Precondition(format!("no girth-6 supports found in {restarts} restarts")))?;
                    build_qc2(p, &s0, &s1)?;
                    CodeSpecFile::qc2(p, s0, s1)
                }
                Some(w) => {
                    let shifts = search_girth6_monomial(p, v, w, &mut rng, restarts)?
                        .ok_or(Error::Precondition(format!("no girth-6 shifts found in {restarts} restarts")))?;
                    CodeSpecFile::from_matrix(&build_monomial(p, &shifts)?)
                }
            };
            let mut o = output(&out)?;
            writeln!(o, "{}", spec.to_json()?)?;
            Ok(())
        }
    }
}

fn bound_cmd(a: BoundArgs) -> Result<()> {
    let h = load(&a.spec)?;
    let ts = parse_list(&a.t)?;
    let max_t = ts.iter().copied().max().unwrap_or(0) as u64;
    let method = match a.method.as_str() {
        "auto" => None,
        m => Some(m.parse::<Method>()?),
    };
    let (analyzer, auto_method) = match method {
        None | Some(Method::Qc) => analyzer_for(&h, max_t)?,
        Some(Method::Th4) => (DfrAnalyzer::new(&all_row_profiles(&h), max_t), Method::Th4),
        Some(m) => (DfrAnalyzer::new(&distinct_row_profiles(&h), max_t), m),
    };
    if method == Some(Method::Qc) && auto_method != Method::Qc {
        return Err(Error::Precondition("qc method needs a two-block circulant code".into()));
    }
    let method = method.unwrap_or(auto_method);
    let th = match (a.b, a.optimize, method) {
        (_, _, Method::Th4bis | Method::Th5) => None,
        (Some(b), false, _) => Some(Thresholds::Uniform(b)),
        (None, true, _) => None,
        _ => return Err(Error::Config("pass --b or --optimize".into())),
    };
    let mut rows = Vec::new();
    for t in ts {
        let t = t as u64;
        let report: BoundReport = match method {
            Method::Th4bis => analyzer.th4bis(t)?,
            Method::Th5 => dfr_bound_girth6_for(&h, t)?,
            _ => match &th {
                Some(th) => analyzer.th4(t, th)?,
                None => analyzer.optimize(t)?.1,
            },
        };
        let b = match &report.thresholds {
            Thresholds::Uniform(b) => b.to_string(),
            Thresholds::PerBit(_) => "per-bit".into(),
        };
        rows.push(BoundRow {
            t,
            b,
            numerator_bits: report.numerator_bits(),
            log2_bound: report.log2_bound,
            method: method.to_string(),
        });
    }
    let meta = Metadata::new().with("command", "bound").with("spec", &a.spec).code(&h);
    write_csv(output(&a.out)?, &meta, &rows)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) => 3,
        Error::Guard(_) | Error::Precondition(_) => 4,
        Error::NoKeyFound { .. } => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

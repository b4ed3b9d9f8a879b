//! Command-line front end: path simulation, exact n-step tables, transform
//! tables and verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 runtime
//! failure (I/O, resources, quadrature).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kendall_walks::exec::map_indexed;
use kendall_walks::verify::{run_suite, Suite, SuiteConfig};
use kendall_walks::walks::{simulate_path, WalkConfig, WalkKind};
use kendall_walks::williamson::{invert_transform, nstep_cdf, nstep_pdf, WilliamsonTransform};
use kendall_walks::{parse_dist, Distribution, Error, Execution};

/// Paths simulated per parallel batch before their rows are written.
const WRITE_BATCH: usize = 1024;
const MAX_GRID: usize = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "kendall-walks", version, about = "Kendall random walks: simulation and verification")]
struct Cli {
    /// Worker threads; overrides KENDALL_WALKS_THREADS. 0 uses the default pool.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Conv {
    Kendall,
    WeakKendall,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate paths; CSV columns path_id,n,x,q,theta.
    Simulate {
        #[arg(long, value_enum)]
        conv: Conv,
        #[arg(long)]
        alpha: f64,
        /// Unit step law, e.g. dirac:1 or symdirac:1.
        #[arg(long)]
        step: String,
        /// Horizon N.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact n-step CDF and density on a grid; CSV columns x,cdf,pdf.
    Nstep {
        #[arg(long)]
        step: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: u32,
        /// lo:hi:count, with 0 < lo <= hi.
        #[arg(long)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transform table: t,phi,dphi for Φ^k, or x,cdf recovered by inversion.
    Transform {
        #[arg(long)]
        step: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        power: u32,
        /// lo:hi:count, with 0 < lo <= hi.
        #[arg(long)]
        grid: Grid,
        /// Tabulate the CDF recovered from Φ^k instead of Φ^k itself.
        #[arg(long)]
        invert: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// JSON configuration file, or "default".
        #[arg(long, default_value = "default")]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err("expected lo:hi:count".into());
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("{count:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err("need finite 0 < lo <= hi".into());
        }
        if count == 0 || count > MAX_GRID {
            return Err(format!("count must lie in 1..={MAX_GRID}"));
        }
        if count == 1 && lo != hi {
            return Err("a single point needs lo == hi".into());
        }
        Ok(Grid { lo, hi, count })
    }
}

impl Grid {
    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| {
            if self.count == 1 {
                self.lo
            } else {
                self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
            }
        })
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: Error) -> Failure {
    match e {
        Error::Parameter { .. } | Error::Parse { .. } => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Runtime(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn step_law(spec: &str) -> Result<Distribution, Failure> {
    parse_dist(spec).map_err(|e| Failure::Usage(format!("--step {spec:?}: {e}")))
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--alpha must be finite and positive, got {alpha}")))
    }
}

/// Folds `-0` into `0` so tables never print a signed zero.
fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn simulate(config: WalkConfig, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    writeln!(w, "path_id,n,x,q,theta")?;
    let mut start = 0;
    while start < config.paths {
        let len = WRITE_BATCH.min(config.paths - start);
        let batch = map_indexed(config.execution, len, |i| simulate_path(&config, start + i));
        for (i, path) in batch.into_iter().enumerate() {
            let path = path.map_err(runtime)?;
            let id = start + i;
            writeln!(w, "{id},0,{},0,1", unsigned_zero(path.states[0]))?;
            for n in 1..path.states.len() {
                let q = u8::from(path.switches[n - 1]);
                let x = unsigned_zero(path.states[n]);
                writeln!(w, "{id},{n},{x},{q},{}", path.thetas[n - 1])?;
            }
        }
        start += len;
    }
    w.flush()?;
    Ok(())
}

fn nstep(step: &Distribution, alpha: f64, n: u32, grid: Grid, exec: Execution, out: &Option<PathBuf>) -> Result<(), Failure> {
    let xs: Vec<f64> = grid.points().collect();
    let rows = map_indexed(exec, xs.len(), |i| {
        let x = xs[i];
        Ok::<_, Error>((x, nstep_cdf(step, alpha, n, x)?, nstep_pdf(step, alpha, n, x)?))
    });
    let mut w = open_out(out)?;
    writeln!(w, "x,cdf,pdf")?;
    for row in rows {
        let (x, c, p) = row.map_err(runtime)?;
        writeln!(w, "{x},{},{}", unsigned_zero(c), unsigned_zero(p))?;
    }
    w.flush()?;
    Ok(())
}

fn transform(t: &WilliamsonTransform, grid: Grid, invert: bool, exec: Execution, out: &Option<PathBuf>) -> Result<(), Failure> {
    let xs: Vec<f64> = grid.points().collect();
    let rows = map_indexed(exec, xs.len(), |i| {
        let x = xs[i];
        if invert {
            Ok::<_, Error>((x, invert_transform(t, t.alpha(), x)?, None))
        } else {
            Ok((x, t.eval(x)?, Some(t.derivative(x)?)))
        }
    });
    let mut w = open_out(out)?;
    writeln!(w, "{}", if invert { "x,cdf" } else { "t,phi,dphi" })?;
    for row in rows {
        match row.map_err(runtime)? {
            (x, v, Some(d)) => writeln!(w, "{x},{},{}", unsigned_zero(v), unsigned_zero(d))?,
            (x, v, None) => writeln!(w, "{x},{}", unsigned_zero(v))?,
        }
    }
    w.flush()?;
    Ok(())
}

fn load_config(config: &str) -> Result<SuiteConfig, Failure> {
    if config == "default" {
        return Ok(SuiteConfig::default());
    }
    let text = std::fs::read_to_string(Path::new(config))
        .map_err(|e| Failure::Usage(format!("--config {config}: {e}")))?;
    SuiteConfig::from_json(&text).map_err(|e| Failure::Usage(format!("--config {config}: {e}")))
}

/// Returns whether every gated check passed.
fn verify(suite: Suite, config: &SuiteConfig, exec: Execution, timing: bool, out: &Option<PathBuf>) -> Result<bool, Failure> {
    let started = Instant::now();
    let mut report = run_suite(suite, config, exec).map_err(runtime)?;
    if timing {
        report.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    }
    let mut w = open_out(out)?;
    writeln!(w, "{}", report.to_json())?;
    w.flush()?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    eprintln!(
        "{}: {} checks, {} failed",
        report.suite,
        report.checks.len(),
        failed.len()
    );
    for name in &failed {
        eprintln!("  FAIL {name}");
    }
    Ok(failed.is_empty())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let exec = match cli.threads {
        Some(0) => Execution::Parallel,
        Some(threads) => Execution::ParallelWith { threads },
        None => Execution::from_env(),
    };
    // every flag is validated before any computation starts
    match cli.command {
        Command::Simulate { conv, alpha, step, n, paths, seed, out } => {
            let step = step_law(&step)?;
            let kind = match conv {
                Conv::Kendall => WalkKind::Kendall,
                Conv::WeakKendall => WalkKind::WeakKendall,
            };
            let config = WalkConfig::new(kind, alpha, step, n, paths, seed)
                .map_err(usage)?
                .with_execution(exec);
            simulate(config, &out)?;
            Ok(true)
        }
        Command::Nstep { step, alpha, n, grid, out } => {
            let step = step_law(&step)?;
            check_alpha(alpha)?;
            // constructing the transform validates step, alpha and n together
            WilliamsonTransform::new(step.clone(), alpha, n).map_err(usage)?;
            nstep(&step, alpha, n, grid, exec, &out)?;
            Ok(true)
        }
        Command::Transform { step, alpha, power, grid, invert, out } => {
            let step = step_law(&step)?;
            check_alpha(alpha)?;
            let t = WilliamsonTransform::new(step, alpha, power).map_err(usage)?;
            transform(&t, grid, invert, exec, &out)?;
            Ok(true)
        }
        Command::Verify { suite, config, out, timing } => {
            let suite: Suite = suite.parse().map_err(|_| {
                Failure::Usage(format!(
                    "--suite {suite:?}: expected ks, moments, chf, envelope, axioms or all"
                ))
            })?;
            let config = load_config(&config)?;
            verify(suite, &config, exec, timing, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            log::error!("{msg}");
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

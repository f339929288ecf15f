//! `surface-kz`: run check suites and write dimension tables.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 usage or
//! configuration error, 3 I/O or runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use surface_kz::config::{RunConfig, Suite};
use surface_kz::suites::{render, run_suites, DimTables, RunSummary};
use surface_kz::Error;

const USAGE: u8 = 2;
const RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "surface-kz", version, about = "Finite-degree checks of a flat connection on a Schottky curve")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite (the default when no subcommand is given).
    Run(Overrides),
    /// Write the Hilbert table and module dimension tables as CSV and JSON.
    Dims(Overrides),
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// algebra | modules | forms | flatness | simplicial | holonomy | all
    #[arg(long)]
    suite: Option<String>,
    /// report file (run) or output directory (dims); stdout / "." if absent
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "Pmax")]
    pmax: Option<usize>,
    #[arg(long = "Qmax")]
    qmax: Option<usize>,
    #[arg(long = "N")]
    order: Option<usize>,
    #[arg(long)]
    safety: Option<f64>,
    /// leave the timestamp out of the summary
    #[arg(long)]
    no_timestamp: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn load(o: &Overrides) -> Result<RunConfig, Failure> {
    let mut c = match &o.config {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    if let Some(g) = o.g {
        c.g = g;
    }
    if let Some(n) = o.n {
        c.n = n;
    }
    if o.l.is_some() {
        c.l = o.l;
    }
    if let Some(t) = o.tol {
        c.tol = t;
    }
    if let Some(s) = &o.suite {
        c.suite = s.parse::<Suite>()?;
    }
    if o.out.is_some() {
        c.out = o.out.clone();
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    if let Some(p) = o.pmax {
        c.pmax = p;
    }
    if let Some(q) = o.qmax {
        c.qmax = q;
    }
    if let Some(k) = o.order {
        c.order = k;
    }
    if let Some(s) = o.safety {
        c.safety = s;
    }
    c.validate()?;
    Ok(c)
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SURFACE_KZ_THREADS") else { return Ok(()) };
    let k: usize = v
        .parse()
        .ok()
        .filter(|k| *k > 0)
        .ok_or_else(|| Failure::Usage(format!("SURFACE_KZ_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(o: &Overrides) -> Result<u8, Failure> {
    let config = load(o)?;
    let records = run_suites(&config)?;
    let stamp = (!o.no_timestamp).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let summary = RunSummary::new(&config, &records, stamp);
    let text = render(&records, &summary)?;
    match &config.out {
        Some(p) => fs::write(p, &text).map_err(|e| io_err(Path::new(p), e))?,
        None => print!("{text}"),
    }
    eprintln!("{}: {}/{} checks passed", config.suite, summary.passed, summary.total);
    for f in &summary.failed {
        eprintln!("FAILED {f}");
    }
    Ok(summary.exit_code as u8)
}

fn dims(o: &Overrides) -> Result<u8, Failure> {
    let config = load(o)?;
    let tables = DimTables::compute(&config)?;
    let dir = PathBuf::from(config.out.as_deref().unwrap_or("."));
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let json = |v: serde_json::Result<String>| v.map_err(|e| Failure::Runtime(e.to_string()));
    let files = [
        ("hilbert.csv", tables.hilbert.to_csv()),
        ("hilbert.json", json(serde_json::to_string_pretty(&tables.hilbert))?),
        ("modules.csv", tables.modules_csv()),
        ("modules.json", json(serde_json::to_string_pretty(&tables.modules))?),
    ];
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| io_err(&p, e))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| match &cli.command {
        Some(Command::Run(o)) => run(o),
        Some(Command::Dims(o)) => dims(o),
        None => run(&cli.run),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(RUNTIME)
        }
    }
}

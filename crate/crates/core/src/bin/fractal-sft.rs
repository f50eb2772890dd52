use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractal_sft::cli::{self, Options, Outcome, Request, EXIT_MALFORMED};
use fractal_sft::ifs_core::IfsSpec;

#[derive(Parser)]
#[command(name = "fractal-sft", version, about = "Hausdorff dimensions of fractals via subshifts of finite type")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// JSON array of requests processed in parallel
    #[arg(long, global = true)]
    sweep: Option<PathBuf>,
    /// Worker threads for --sweep
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the report to this file
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Cache directory (FRACTAL_SFT_CACHE takes precedence)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Run oracle cross-checks; exit 3 when a delta exceeds 0.05
    #[arg(long)]
    verify: bool,
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options { depth: c.depth, bound: c.bound, tol: c.tol, verify: c.verify }
    }
}

#[derive(Subcommand)]
enum Command {
    /// dim K and dim U of an exactly overlapping IFS
    IfsDim {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// dim U of an exactly overlapping IFS
    UnivoqueDim {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-type classification of the univoque shift for β
    BetaClassify {
        /// Ascending coefficients, e.g. -1,-1,-1,1
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        common: Common,
    },
    /// dim U_β
    BetaDim {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        common: Common,
    },
    /// Survivor dimension of the doubling map with hole [a, b)
    HoleDim {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        common: Common,
    },
    /// Number of codings of a point
    CountCodings {
        #[arg(long)]
        spec: PathBuf,
        /// Power-basis coefficients of the point, comma separated
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        common: Common,
    },
    /// Multiplicity report for the four-map family
    UkFamily {
        #[arg(long, default_value = "1/10")]
        lambda: String,
        #[command(flatten)]
        common: Common,
    },
    /// Oracle cross-validation of the built-in corpus
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

fn read_spec(p: &PathBuf) -> Result<IfsSpec, String> {
    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
}

fn request(c: Command) -> Result<Request, String> {
    Ok(match c {
        Command::IfsDim { spec, common } => Request::IfsDim { spec: read_spec(&spec)?, options: common.into() },
        Command::UnivoqueDim { spec, common } => Request::UnivoqueDim { spec: read_spec(&spec)?, options: common.into() },
        Command::BetaClassify { poly, common } => Request::BetaClassify { poly: cli::parse_poly_csv(&poly)?, options: common.into() },
        Command::BetaDim { poly, common } => Request::BetaDim { poly: cli::parse_poly_csv(&poly)?, options: common.into() },
        Command::HoleDim { a, b, common } => Request::HoleDim { a, b, options: common.into() },
        Command::CountCodings { spec, point, common } => Request::CountCodings {
            spec: read_spec(&spec)?,
            point: point.split(',').map(|s| s.trim().to_string()).collect(),
            options: common.into(),
        },
        Command::UkFamily { lambda, common } => Request::UkFamily { lambda, options: common.into() },
        Command::Verify { common } => Request::Verify { options: common.into() },
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    if let Some(p) = out {
        std::fs::write(p, format!("{text}\n")).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    // a closed pipe (e.g. `| head`) is not an error
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
        _ => Ok(()),
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_MALFORMED as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cache = cli::resolve_cache_dir(cli.cache_dir.clone());
    if let Some(path) = &cli.sweep {
        let reqs: Vec<Request> = match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string())) {
            Ok(r) => r,
            Err(e) => return fail(&format!("{}: {e}", path.display())),
        };
        let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        let outs = cli::run_sweep(&reqs, threads, cache.as_deref());
        let code = outs.iter().map(|o| o.code).max().unwrap_or(0);
        let reports: Vec<&serde_json::Value> = outs.iter().map(|o| &o.report).collect();
        let text = serde_json::to_string_pretty(&reports).expect("serializable");
        if let Err(e) = emit(&text, cli.json_out.as_ref()) {
            return fail(&e);
        }
        return ExitCode::from(code as u8);
    }
    let Some(command) = cli.command else {
        return fail("a subcommand or --sweep is required");
    };
    let req = match request(command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let Outcome { code, report } = cli::run_cached(&req, cache.as_deref());
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    if let Err(e) = emit(&text, cli.json_out.as_ref()) {
        return fail(&e);
    }
    ExitCode::from(code as u8)
}

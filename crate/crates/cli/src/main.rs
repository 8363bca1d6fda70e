use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use dynr_cli::config::{AlgebraChoice, CompactInvariant, SuiteConfig};
use dynr_cli::suite::{run_suite, SuiteName};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Runs a residual suite and reports per-check statistics.
///
/// Exit status: 0 pass, 1 fail, 2 configuration error, 3 internal fault.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// cdybe, momentum, groupoid, compact or all
    suite: SuiteName,
    #[arg(long)]
    algebra: Option<AlgebraChoice>,
    /// nu for sl2 / sl3
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// theta for su2 / su3 (nu = i theta)
    #[arg(long, allow_hyphen_values = true)]
    compact_theta: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    domain_radius: Option<f64>,
    #[arg(long)]
    fd_step: Option<f64>,
    /// Threshold override, repeatable: --tol pl_cdybe.k_nu=1e-9
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Invariant on the right of the compact PL-CDYBE
    #[arg(long)]
    compact_invariant: Option<CompactInvariant>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall-clock time in the report
    #[arg(long)]
    timing: bool,
}

fn config_from(args: &Args) -> Result<SuiteConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str::<SuiteConfig>(&s).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => SuiteConfig::new(args.algebra.unwrap_or(AlgebraChoice::Sl2)),
    };
    if let Some(a) = args.algebra {
        if a != cfg.algebra {
            let fresh = SuiteConfig::new(a);
            cfg.algebra = a;
            cfg.nu = fresh.nu;
            cfg.compact_theta = fresh.compact_theta;
        }
    }
    if let Some(v) = args.nu {
        cfg.nu = Some(v);
    }
    if let Some(t) = args.compact_theta {
        cfg.compact_theta = Some(t);
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.domain_radius {
        cfg.domain_radius = r;
    }
    if let Some(h) = args.fd_step {
        cfg.fd_step = h;
    }
    if let Some(k) = args.compact_invariant {
        cfg.compact_invariant = k;
    }
    for t in &args.tol {
        let (name, val) = t
            .split_once('=')
            .ok_or_else(|| format!("--tol {t:?} is not NAME=VALUE"))?;
        let v: f64 = val
            .parse()
            .map_err(|_| format!("--tol {t:?}: {val:?} is not a number"))?;
        cfg.tolerances.insert(name.to_string(), v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match config_from(&args) {
        Ok(c) => c,
        Err(m) => {
            eprintln!("configuration error: {m}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut report = match run_suite(args.suite, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if args.timing {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    let body = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("{}: {e}", p.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

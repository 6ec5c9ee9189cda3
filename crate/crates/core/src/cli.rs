//! Command-line front end. `main` only forwards to [`run_from_args`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::entropy::{jensen_bound, relative_entropy};
use crate::error::{Error, Result};
use crate::measures::{MomentPair, SpecMeasure, SYMMETRY_TOL};
use crate::numeric::{format_full, format_sig6};
use crate::tilt::{cramer_transform, witness_bound, Argmax};
use crate::verify::{
    check_proposition, evaluate_grid, require_symmetric_reference, run_suite, sweep_min_g, GridConfig, MomentGrid,
    SuiteConfig, VerificationReport,
};

pub const THREADS_ENV: &str = "ENTROBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "entrobound",
    version,
    about = "Relative entropy, Cramér transforms and the symmetric entropy bound"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print H(mu|rho), the bound F(mu) and the first two moments of mu.
    Entropy {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        rho: String,
    },
    /// Evaluate the Cramér transform I(x, y) of (Z, Z²) under rho.
    Cramer {
        #[arg(long)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Run a verification suite and write its report.
    Verify {
        /// `default` or a path to a JSON suite config.
        #[arg(long, default_value = "default")]
        suite: String,
        /// Overrides the seed of the suite config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate the proposition or G = I − x²/(2y) on a grid; writes CSV.
    Sweep {
        #[arg(long)]
        rho: String,
        #[arg(long, value_enum, default_value_t = Sweep::Proposition)]
        what: Sweep,
        #[arg(long, default_value_t = 39)]
        nx: usize,
        #[arg(long, default_value_t = 39)]
        ny: usize,
        #[arg(long, default_value_t = 0.95)]
        shrink: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Proposition,
    MinG,
}

/// Exit status for an error: 2 bad input, 3 violated precondition, 4 I/O.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Degenerate(_) | Error::Config { .. } => 2,
        Error::Domain(_) | Error::Precondition(_) => 3,
        Error::Io(_) => 4,
    }
}

/// Parse arguments, configure the thread pool and run. Errors go to stderr.
pub fn run_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| run(&cli, &mut std::io::stdout().lock()));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("entrobound: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config {
            field: THREADS_ENV.into(),
            message: format!("expected a positive integer, got `{raw}`"),
        })?;
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Execute one subcommand, writing human-readable output to `out`.
/// Returns whether every check passed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Entropy { mu, rho } => cmd_entropy(mu, rho, out).map(|()| true),
        Command::Cramer { rho, x, y } => cmd_cramer(rho, *x, *y, out).map(|()| true),
        Command::Verify {
            suite,
            seed,
            out: path,
            format,
        } => cmd_verify(suite, *seed, path.as_deref(), *format, out),
        Command::Sweep {
            rho,
            what,
            nx,
            ny,
            shrink,
            out: path,
        } => {
            let grid = GridConfig {
                nx: *nx,
                ny: *ny,
                shrink: *shrink,
            };
            cmd_sweep(rho, *what, grid, path.as_deref(), out)
        }
    }
}

fn cmd_entropy(mu: &str, rho: &str, out: &mut dyn Write) -> Result<()> {
    let mu = SpecMeasure::parse(mu)?;
    let rho = SpecMeasure::parse(rho)?;
    let f = jensen_bound(&mu)?;
    let h = relative_entropy(&mu, &rho).value;
    let m = mu.moments();
    writeln!(out, "H={}", format_sig6(h))?;
    writeln!(out, "F={}", format_sig6(f))?;
    writeln!(out, "m1={}", format_sig6(m.x))?;
    writeln!(out, "m2={}", format_sig6(m.y))?;
    Ok(())
}

fn cmd_cramer(rho: &str, x: f64, y: f64, out: &mut dyn Write) -> Result<()> {
    let rho = SpecMeasure::parse(rho)?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("point ({x}, {y}) is not finite")));
    }
    let r = cramer_transform(&rho, MomentPair::new(x, y));
    writeln!(out, "I={}", format_sig6(r.value))?;
    match r.argmax {
        Argmax::Attained(t) => writeln!(out, "argmax=({}, {})", format_sig6(t.u), format_sig6(t.v))?,
        Argmax::BoundaryDivergence => writeln!(out, "argmax=boundary")?,
    }
    writeln!(out, "iterations={}", r.iterations)?;
    writeln!(out, "converged={}", r.converged)?;
    writeln!(
        out,
        "region={}",
        serde_json::to_value(r.region)
            .expect("region serializes")
            .as_str()
            .unwrap_or("")
    )?;
    if rho.is_symmetric(SYMMETRY_TOL) && y != 0.0 {
        writeln!(out, "W={}", format_sig6(witness_bound(&rho, x, y)?))?;
    }
    Ok(())
}

fn load_suite(suite: &str) -> Result<SuiteConfig> {
    if suite == "default" {
        return Ok(SuiteConfig::default());
    }
    let text = fs::read_to_string(suite).map_err(|e| Error::Io(format!("{suite}: {e}")))?;
    SuiteConfig::from_json(&text)
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    }
}

fn cmd_verify(
    suite: &str,
    seed: Option<u64>,
    path: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<bool> {
    let mut config = load_suite(suite)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let report = run_suite(&config)?;
    write_output(path, &render(&report, format), out)?;
    eprintln!(
        "{}: {} checks, {} passed, {} failed",
        report.suite, report.summary.total, report.summary.passed, report.summary.failed
    );
    Ok(report.passed())
}

fn cmd_sweep(rho: &str, what: Sweep, g: GridConfig, path: Option<&Path>, out: &mut dyn Write) -> Result<bool> {
    let rho = SpecMeasure::parse(rho)?;
    require_symmetric_reference(&rho)?;
    if g.nx == 0 || g.ny == 0 || !(g.shrink > 0.0 && g.shrink <= 1.0) {
        return Err(Error::Config {
            field: "grid".into(),
            message: "need nx, ny ≥ 1 and shrink in (0, 1]".into(),
        });
    }
    let (grid, report) = match what {
        Sweep::Proposition => {
            let grid = MomentGrid::hull_interior(&rho, g.nx, g.ny, g.shrink);
            let report = check_proposition(&rho, &grid)?;
            (grid, report)
        }
        Sweep::MinG => {
            let grid = MomentGrid::centered_on_moments(&rho, g.nx, g.ny, g.shrink);
            let report = sweep_min_g(&rho, &grid)?;
            (grid, report)
        }
    };
    let rows = evaluate_grid(&rho, &grid);

    // margin column: the first recorded margin of the node's check
    let margin_of = |ix: usize, iy: usize| {
        let prefix = match what {
            Sweep::Proposition => "proposition",
            Sweep::MinG => "min_g",
        };
        let key = format!("{prefix}/{ix:02}_{iy:02} ");
        report
            .checks
            .iter()
            .find(|c| c.name.starts_with(&key))
            .and_then(|c| c.margins.first())
            .map_or(f64::NAN, |m| m.0)
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["x", "y", "I", "xx_over_2y", "G", "margin"])
        .map_err(csv_err)?;
    for r in &rows {
        w.write_record([r.x, r.y, r.i, r.bound, r.g, margin_of(r.ix, r.iy)].map(format_full))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write_output(path, &String::from_utf8(bytes).expect("csv output is utf-8"), out)?;

    for c in report.failures() {
        eprintln!("FAIL {}", c.name);
    }
    if let Some(c) = report.checks.iter().find(|c| c.name.starts_with("min_g/minimizer")) {
        eprintln!("{}", c.name);
    }
    Ok(report.passed())
}

//! Command-line front end for the weylpt symbolic and numeric engines.

pub mod args;
pub mod commands;
pub mod laws;
pub mod verify;

use std::fmt::Write as _;

use serde_json::json;
use weylpt_numeric::output::write_checks_csv;
use weylpt_numeric::GridSpec;

pub use args::{Cli, Command, Format, GlobalArgs, Which};
pub use commands::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadArgs(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

/// Worker count from `WEYLPT_THREADS`, if set to a positive integer.
fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("WEYLPT_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::BadArgs(format!("WEYLPT_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

fn cmd_verify(eps: f64, dim: usize, global: &GlobalArgs) -> Result<Report, CliError> {
    let params = commands::physical_params(global)?;
    if !eps.is_finite() {
        return Err(CliError::BadArgs(format!("eps must be finite, got {eps}")));
    }
    let rows = verify::verify_rows(eps, dim, params)?;
    let ok = rows.iter().all(|r| r.pass);
    let failed = rows.iter().filter(|r| !r.pass).count();
    let body = match global.format {
        Format::Text => {
            let mut s = commands::header();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{} {}: {:e} (expected {})",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.value,
                    r.expected_order
                );
            }
            let _ = writeln!(s, "{} checks, {} failed", rows.len(), failed);
            s
        }
        Format::Json => commands::json_body(
            "verify",
            json!({
                "eps": eps,
                "dim": dim,
                "all_pass": ok,
                "checks": rows.iter().map(|r| json!({
                    "name": r.name,
                    "value": r.value,
                    "expected_order": r.expected_order,
                    "pass": r.pass,
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut buf = Vec::new();
            write_checks_csv(&mut buf, &rows).map_err(commands::numeric)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    Ok(Report { body, ok })
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    let format = g.format;
    match &cli.command {
        Command::Qsolve { max_order } => commands::cmd_qsolve(*max_order, format),
        Command::Hermitian { max_order } => commands::cmd_hermitian(*max_order, format),
        Command::Observables { which, max_order } => commands::cmd_observables(*which, *max_order, format),
        Command::Classical => commands::cmd_classical(format),
        Command::Energy { n_max, eps, dim } => {
            commands::cmd_energy(*n_max, *eps, *dim, commands::physical_params(g)?, format)
        }
        Command::Spectrum { eps, dim, levels } => {
            commands::cmd_spectrum(*eps, *dim, *levels, commands::physical_params(g)?, format)
        }
        Command::Density { n, eps, xmin, xmax, points } => {
            let grid = GridSpec { x_min: *xmin, x_max: *xmax, points: *points };
            commands::cmd_density(*n, *eps, grid, commands::physical_params(g)?, format)
        }
        Command::Verify { eps, dim } => cmd_verify(*eps, *dim, g),
    }
}

/// Runs a parsed command and writes its output to stdout or `--out`.
/// Returns whether every check the command performs passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = thread_cap()? {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Compute(e.to_string()))?
    };
    let report = pool.install(|| dispatch(cli))?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, &report.body)
            .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(report.body.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Compute(e.to_string())),
                _ => {}
            }
        }
    }
    Ok(report.ok)
}

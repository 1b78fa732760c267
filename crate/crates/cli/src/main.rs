//! `tempwit`: scans of a dissipative qubit's temporal-entanglement
//! witnesses, exported as deterministic CSV/JSON tables.
//!
//! Exit codes: 0 success, 1 domain or configuration error (including bad
//! flags), 2 accuracy failure (a selfcheck miss or an integral that did not
//! converge), 3 output I/O error.

mod checks;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tempwit_core::error::CoreError;
use tempwit_core::model::BlochState;
use tempwit_core::{chsh, export, lindblad, pdm, response, witness};

use config::{OutputFormat, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "tempwit", version, about)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bloch trajectory from (1, 0, 0) over the scan window.
    Evolve,
    /// Complex heat capacity over the default frequency grid.
    Spectrum,
    /// Two-time PDM at one lag, plus the eigenvalue sweep over the window.
    Pdm {
        /// Lag of the single exported matrix.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Closed-form and spectral Bell bounds over the scan window.
    Chsh,
    /// Dissipation-witness violation region over the scan window.
    Region,
    /// All three figure tables with matching gnuplot scripts.
    Figures,
    /// Compare library values against independent oracles and report.
    Selfcheck,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => e.exit_code(),
            CliError::Io { .. } => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage errors go to stderr with code 1; help and version go to
            // stdout with code 0.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::resolve(&cli.overrides)?;
    match &cli.command {
        Command::Evolve => evolve(&cfg),
        Command::Spectrum => spectrum(&cfg),
        Command::Pdm { t } => pdm_tables(&cfg, *t),
        Command::Chsh => bell_bounds(&cfg),
        Command::Region => region(&cfg),
        Command::Figures => figures(&cfg),
        Command::Selfcheck => Ok(checks::run(&cfg.params)?),
    }
}

fn evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let times = witness::time_grid((cfg.t_min, cfg.t_max), cfg.samples)?;
    let initial = BlochState::new(1.0, 0.0, 0.0);
    let states = times
        .iter()
        .map(|&t| lindblad::evolve(&initial, &cfg.params, t))
        .collect::<Result<Vec<_>, _>>()?;
    let trajectory = lindblad::Trajectory { times, states };
    write_table(cfg, "trajectory", &export::trajectory_csv(&trajectory))
}

fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let samples = witness::default_omega_grid(&cfg.params)?
        .into_iter()
        .map(|omega| response::complex_heat_capacity(&cfg.params, omega))
        .collect::<Result<Vec<_>, _>>()?;
    write_table(cfg, "spectrum", &export::spectrum_csv(&samples))
}

fn pdm_tables(cfg: &RunConfig, t: f64) -> Result<(), CliError> {
    let single = pdm::two_time_pdm(&cfg.params, t)?;
    write_out(cfg, "pdm.json", &export::pdm_json(&single))?;
    let rows = witness::time_grid((cfg.t_min, cfg.t_max), cfg.samples)?
        .into_iter()
        .map(|t| pdm::spectrum_analytic(&cfg.params, t).map(|spectrum| (t, spectrum)))
        .collect::<Result<Vec<_>, _>>()?;
    write_table(cfg, "pdm_spectrum", &export::pdm_spectrum_csv(&rows))
}

fn bell_bounds(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = witness::time_grid((cfg.t_min, cfg.t_max), cfg.samples)?
        .into_iter()
        .map(|t| chsh::compare_bounds(&cfg.params, t))
        .collect::<Result<Vec<_>, _>>()?;
    write_table(cfg, "chsh", &export::chsh_csv(&rows))
}

fn region(cfg: &RunConfig) -> Result<(), CliError> {
    let scan = witness::figure_data(&cfg.params, 3, (cfg.t_min, cfg.t_max), cfg.samples)?;
    write_table(cfg, "region", &export::fig3_csv(&scan))?;
    let grid = witness::default_omega_grid(&cfg.params)?;
    let mapping = witness::RegionMapping::default();
    let closes = witness::region_extinction_time(
        &cfg.params,
        &mapping,
        &grid,
        (cfg.t_min, cfg.t_max),
        cfg.samples,
    )?;
    match closes {
        Some(t) => println!("region extinction time: {t}"),
        None => println!("region never closes in [{}, {}]", cfg.t_min, cfg.t_max),
    }
    Ok(())
}

fn figures(cfg: &RunConfig) -> Result<(), CliError> {
    for which in 1..=3u8 {
        let scan = witness::figure_data(&cfg.params, which, (cfg.t_min, cfg.t_max), cfg.samples)?;
        let table = match which {
            1 => export::fig1_csv(&scan),
            2 => export::fig2_csv(&scan),
            _ => export::fig3_csv(&scan),
        };
        // Figure tables stay CSV regardless of --format so the emitted
        // gnuplot scripts always find what they reference.
        write_out(cfg, &format!("fig{which}.csv"), &table)?;
        write_out(
            cfg,
            &format!("fig{which}.gp"),
            &export::figure_script(which)?,
        )?;
    }
    Ok(())
}

/// Writes `contents` under the output directory, creating it if needed.
fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let path = cfg.out.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a rendered CSV table verbatim or re-encoded as JSON, matching the
/// configured format; the file extension follows suit.
fn write_table(cfg: &RunConfig, stem: &str, csv: &str) -> Result<(), CliError> {
    match cfg.format {
        OutputFormat::Csv => write_out(cfg, &format!("{stem}.csv"), csv),
        OutputFormat::Json => write_out(cfg, &format!("{stem}.json"), &csv_to_json(csv)),
    }
}

/// Re-encodes a rendered CSV table as `{"columns": [...], "rows": [[...]]}`.
/// Non-finite cells become `null`; JSON has no NaN literal.
fn csv_to_json(csv: &str) -> String {
    let mut lines = csv.lines();
    let columns: Vec<serde_json::Value> = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(|name| serde_json::Value::String(name.to_string()))
        .collect();
    let rows: Vec<serde_json::Value> = lines
        .map(|line| {
            line.split(',')
                .map(|cell| {
                    cell.parse::<f64>()
                        .ok()
                        .and_then(serde_json::Number::from_f64)
                        .map_or(serde_json::Value::Null, serde_json::Value::Number)
                })
                .collect::<Vec<_>>()
                .into()
        })
        .collect();
    let doc = serde_json::json!({ "columns": columns, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data encodes as JSON");
    text.push('\n');
    text
}

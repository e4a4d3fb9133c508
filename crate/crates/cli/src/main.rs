//! `ep3` — command-line front end for the trap-ramp simulator.
//!
//! Subcommands emit plot-ready CSV (or JSON mirrors) for spectra,
//! trajectories, parameter sweeps, quantum-classical cross-checks, the
//! simulated measurement protocol, and the two standard figure grids.
//! Exit codes: 0 success, 2 configuration error, 3 runtime domain error.
//! Nothing is written on a nonzero exit except a diagnostic on stderr.

mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{CliArgs, CliError, Format, ResolvedCommand, RunConfig};
use ep3_core::figures;
use ep3_core::output;
use ep3_core::protocol::{run_protocol, ExperimentPlan, InitialPreparation};

fn main() -> ExitCode {
    let args = CliArgs::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(args: CliArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args)?;
    let text = render(&cfg)?;
    write_output(&cfg, &text)
}

fn render(cfg: &RunConfig) -> Result<String, CliError> {
    let consts = cfg.constants()?;
    match cfg.command {
        ResolvedCommand::Spectrum => {
            let rows = figures::spectrum_rows(&cfg.mu_list).map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::spectrum_csv(&rows),
                Format::Json => output::spectrum_json(&rows),
            })
        }
        ResolvedCommand::Evolve => {
            let record = figures::ground_trajectory(
                cfg.single_mu()?,
                cfg.omega0,
                cfg.compression_max,
                cfg.samples_per_period,
                &consts,
            )
            .map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::trajectory_csv(&record),
                Format::Json => output::trajectory_json(&record),
            })
        }
        ResolvedCommand::Sweep => {
            let reports = figures::sweep_reports(
                &cfg.mu_list,
                cfg.omega0,
                cfg.compression_max,
                cfg.samples_per_period,
                &consts,
            )
            .map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::sweep_csv(&reports),
                Format::Json => output::sweep_json(&reports),
            })
        }
        ResolvedCommand::ClassicalCheck => {
            let rows = figures::classical_check_rows(
                cfg.single_mu()?,
                cfg.omega0,
                cfg.compression_max,
                cfg.n_mc,
                cfg.seed,
                &consts,
            )
            .map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::classical_check_csv(&rows),
                Format::Json => output::classical_check_json(&rows),
            })
        }
        ResolvedCommand::Experiment => {
            // The flag set carries no dedicated trap-extreme fields: the ramp
            // runs from omega0 to omega0 * compression_max with one
            // measurement per grid sample.
            let plan = ExperimentPlan {
                omega_open: cfg.omega0,
                omega_closed: cfg.omega0 * cfg.compression_max,
                mu: cfg.single_mu()?,
                n_times: cfg.samples_per_period,
                initial: InitialPreparation::GroundState,
            };
            let records = run_protocol(&plan, &consts).map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::protocol_csv(&records),
                Format::Json => output::protocol_json(&records),
            })
        }
        ResolvedCommand::Fig1a | ResolvedCommand::Fig1b => {
            let build = if matches!(cfg.command, ResolvedCommand::Fig1a) {
                figures::fig1a_table
            } else {
                figures::fig1b_table
            };
            let table = build(
                &cfg.mu_list,
                cfg.omega0,
                cfg.compression_max,
                cfg.samples_per_period,
                &consts,
            )
            .map_err(CliError::domain)?;
            Ok(match cfg.format {
                Format::Csv => output::figure_csv(&table),
                Format::Json => {
                    let name = if matches!(cfg.command, ResolvedCommand::Fig1a) {
                        "fig1a"
                    } else {
                        "fig1b"
                    };
                    output::figure_json(name, &table)
                }
            })
        }
    }
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

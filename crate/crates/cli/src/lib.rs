//! Command-line front end for `meson-eff`: presets, parameter sweeps,
//! figure CSVs, characteristic times and cross-check runs.
//!
//! Configuration is layered: figure preset defaults, then an optional JSON
//! file (`--config`), then command-line flags.

pub mod args;
pub mod commands;
pub mod config;
pub mod csv;
pub mod parse;

use std::io::Write;

use anyhow::{Context, Result};

pub use args::{Cli, Command, GlobalArgs};
pub use commands::{
    cmd_bell, cmd_constants, cmd_times, cmd_uncertainty, cmd_verify, BellArgs, BellOutput,
    ScanVar, UncertaintyArgs, VerifyArgs, VerifyReport,
};
pub use config::{parse_config, ConfigLayer, Grid, RunConfig, SystemSpec, DEFAULT_SEED};
pub use csv::{fmt_sig, Table};
pub use parse::{
    parse_angle, parse_basis, parse_observable, parse_policy, parse_quasispin, Figure,
    ObservableSpec, ParseError, SystemPreset, TimeUnit,
};

/// Resolves the configuration for a command, honoring figure defaults.
pub fn resolve_config(global: &GlobalArgs, fig: Option<Figure>) -> Result<RunConfig> {
    let mut layer = fig.map(ConfigLayer::from_figure).unwrap_or_default();
    if let Some(path) = &global.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        layer = layer.overlay(parse_config(&text)?);
    }
    Ok(layer.overlay(global.layer()).resolve()?)
}

fn emit_table(cfg: &RunConfig, table: &Table, out: &mut dyn Write) -> Result<()> {
    let text = table.render();
    match &cfg.output_path {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {} rows to {}", table.rows(), path.display())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one parsed invocation. `Ok(false)` means a verification breach.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Constants => {
            let cfg = resolve_config(g, None)?;
            out.write_all(cmd_constants(&cfg).as_bytes())?;
        }
        Command::Times => {
            let cfg = resolve_config(g, None)?;
            out.write_all(cmd_times(&cfg)?.as_bytes())?;
        }
        Command::Uncertainty {
            fig,
            obs1,
            obs2,
            scan,
            cp_basis,
        } => {
            let cfg = resolve_config(g, *fig)?;
            let args = UncertaintyArgs {
                fig: *fig,
                obs1: *obs1,
                obs2: *obs2,
                scan: *scan,
                cp_basis: *cp_basis,
            };
            emit_table(&cfg, &cmd_uncertainty(&cfg, &args)?, out)?;
        }
        Command::Bell {
            fig,
            policy,
            n,
            m,
            n_prime,
            m_prime,
            cp_mode,
            cp_test,
        } => {
            let cfg = resolve_config(g, *fig)?;
            let quasispins = [n, m, n_prime, m_prime]
                .iter()
                .any(|q| q.is_some())
                .then(|| [*n, *m, *n_prime, *m_prime].map(|q| q.unwrap_or_else(meson_eff::Quasispin::k_zero_bar)));
            let args = BellArgs {
                fig: *fig,
                policy: *policy,
                quasispins,
                cp_mode: *cp_mode,
                cp_test: *cp_test,
            };
            match cmd_bell(&cfg, &args)? {
                BellOutput::Table(t) => emit_table(&cfg, &t, out)?,
                BellOutput::Report(r) => out.write_all(r.as_bytes())?,
            }
        }
        Command::Verify {
            trials,
            literal_bipartite_generator,
        } => {
            let cfg = resolve_config(g, None)?;
            let report = cmd_verify(
                &cfg,
                &VerifyArgs {
                    trials: *trials,
                    literal_generator: *literal_bipartite_generator,
                },
            )?;
            out.write_all(report.text.as_bytes())?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

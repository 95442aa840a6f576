use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bohrnet_cli::*;

#[derive(Parser)]
#[command(name = "bohrnet", version, about = "Exact verification of nets of algebras: locality checks, context fragments, spectrum bundles, Kochen-Specker search and descent analysis")]
struct Cli {
    /// Scenario file (JSON)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit a DOT rendering to this path (where applicable)
    #[arg(long, global = true)]
    emit_dot: Option<PathBuf>,

    /// Maximum number of contexts per fragment
    #[arg(long, global = true)]
    max_fragment: Option<usize>,

    /// Worker threads for independent covers (1 = sequential)
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's requested checks in order
    CheckNet,
    /// Analyze two-interval covers; exit 0 iff all are strongly local
    Descent {
        /// Analyze every cover of every interval (default when the
        /// scenario lists none)
        #[arg(long)]
        all_covers: bool,
    },
    /// Summarize the spectrum bundle of a fragment
    Spectrum {
        /// Fragment dump (JSON), as produced by dump-fragment
        #[arg(long)]
        fragment: Option<PathBuf>,
    },
    /// Search for a global section; exit 3 certifies absence
    KsSearch {
        #[arg(long)]
        fragment: Option<PathBuf>,
    },
    /// Boundary descent over the admissible bulk diamonds
    Boundary,
    /// Build a fragment from the scenario and dump it as JSON
    DumpFragment,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("bohrnet: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

fn require_scenario(cli: &Cli) -> CliResult<Scenario> {
    let path = cli.scenario.as_ref().ok_or_else(|| CliError {
        code: EXIT_SCHEMA,
        message: "--scenario is required for this subcommand".into(),
    })?;
    let mut scenario = load_scenario(path)?;
    if let Some(bound) = cli.max_fragment {
        scenario.max_fragment = Some(bound);
    }
    Ok(scenario)
}

/// The fragment for spectrum/ks-search: an explicit dump file wins,
/// otherwise the scenario's fragment selection.
fn resolve_fragment(cli: &Cli, fragment: &Option<PathBuf>) -> CliResult<bohrnet_core::ContextFragment> {
    if let Some(path) = fragment {
        return load_fragment_dump(path);
    }
    let scenario = require_scenario(cli)?;
    let spec = scenario.fragment.clone().ok_or_else(|| CliError {
        code: EXIT_SCHEMA,
        message: "no --fragment file and no fragment selection in the scenario".into(),
    })?;
    let bound = scenario
        .max_fragment
        .unwrap_or(bohrnet_core::fragment::DEFAULT_FRAGMENT_BOUND);
    let net = match &scenario.net {
        Some(n) => Some(build_net(n)?),
        None => None,
    };
    build_fragment_from_spec(&spec, net.as_ref(), bound)
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::CheckNet => {
            let scenario = require_scenario(cli)?;
            let output = run_scenario(&scenario, cli.threads)?;
            write_output(&output.report, cli.out.as_deref())?;
            Ok(output.exit_code)
        }
        Command::Descent { all_covers } => {
            let mut scenario = require_scenario(cli)?;
            if *all_covers {
                scenario.covers = None;
            }
            let net = build_net(scenario.net.as_ref().ok_or_else(|| CliError {
                code: EXIT_SCHEMA,
                message: "descent requires a net".into(),
            })?)?;
            let bound = scenario
                .max_fragment
                .unwrap_or(bohrnet_core::fragment::DEFAULT_FRAGMENT_BOUND);
            let reports = run_descent(&net, &scenario, bound, cli.threads)?;
            let all_strong = reports.iter().all(|r| {
                r.classification == bohrnet_core::Classification::StronglyLocalCover
            });
            let report = serde_json::json!({
                "version": env!("CARGO_PKG_VERSION"),
                "scenario_digest": scenario_digest(&scenario),
                "covers": reports,
            });
            write_output(&report, cli.out.as_deref())?;
            Ok(if all_strong { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Spectrum { fragment } => {
            let frag = resolve_fragment(cli, fragment)?;
            let output = run_spectrum(frag, cli.emit_dot.as_deref(), 1 << 20)?;
            write_output(&output.report, cli.out.as_deref())?;
            Ok(output.exit_code)
        }
        Command::KsSearch { fragment } => {
            let frag = resolve_fragment(cli, fragment)?;
            let output = run_ks_search(frag)?;
            write_output(&output.report, cli.out.as_deref())?;
            Ok(output.exit_code)
        }
        Command::Boundary => {
            let scenario = require_scenario(cli)?;
            let net = build_net(scenario.net.as_ref().ok_or_else(|| CliError {
                code: EXIT_SCHEMA,
                message: "boundary requires a net".into(),
            })?)?;
            let bound = scenario
                .max_fragment
                .unwrap_or(bohrnet_core::fragment::DEFAULT_FRAGMENT_BOUND);
            let height = scenario.boundary_height.unwrap_or(2);
            let reports = run_boundary(&net, height, &scenario, bound, cli.threads)?;
            let all_strong = reports.iter().all(|r| {
                r.classification == bohrnet_core::Classification::StronglyLocalCover
            });
            let report = serde_json::json!({
                "version": env!("CARGO_PKG_VERSION"),
                "scenario_digest": scenario_digest(&scenario),
                "diamonds": reports,
            });
            write_output(&report, cli.out.as_deref())?;
            Ok(if all_strong { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::DumpFragment => {
            let scenario = require_scenario(cli)?;
            let spec = scenario.fragment.clone().ok_or_else(|| CliError {
                code: EXIT_SCHEMA,
                message: "dump-fragment needs a fragment selection in the scenario".into(),
            })?;
            let bound = scenario
                .max_fragment
                .unwrap_or(bohrnet_core::fragment::DEFAULT_FRAGMENT_BOUND);
            let net = match &scenario.net {
                Some(n) => Some(build_net(n)?),
                None => None,
            };
            let frag = build_fragment_from_spec(&spec, net.as_ref(), bound)?;
            if let Some(path) = &cli.emit_dot {
                std::fs::write(path, frag.to_dot("fragment")).map_err(|e| CliError {
                    code: EXIT_SCHEMA,
                    message: format!("cannot write DOT: {e}"),
                })?;
            }
            let dump = serde_json::to_value(frag.dump()).expect("serializable dump");
            write_output(&dump, cli.out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

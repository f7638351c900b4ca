//! `zpinch` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zpinch::energy::ModeIndex;
use zpinch_cli::artifacts::ensure_dir;
use zpinch_cli::error::EXIT_OK;
use zpinch_cli::study::{self, Summary};
use zpinch_cli::{configure_threads, emit_plot_data, run_study, CliError, CliResult, StudyConfig};

#[derive(Parser)]
#[command(
    name = "zpinch",
    version,
    about = "Linear MHD stability studies of z-pinch equilibria"
)]
struct Cli {
    /// JSON study configuration (defaults to the built-in minimal study).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the configuration).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "ZPINCH_THREADS", value_name = "N")]
    threads: Option<usize>,

    /// Seed for random initial data.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Reject profiles that fail the strict admissibility test.
    #[arg(long, global = true)]
    strict_admissibility: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the equilibrium and write equilibrium.csv.
    Equilibrium,
    /// Scan the pointwise criteria for every m in range.
    Criteria,
    /// Solve a single mode.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        m: i32,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Solve every mode of the configured range.
    Sweep,
    /// Run the wavenumber-scaling studies.
    Scaling,
    /// Solve one mode and integrate it in time.
    Evolve {
        #[arg(long, allow_hyphen_values = true)]
        m: i32,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Write plot data from the artifacts in the output directory.
    Report,
    /// Run the full study, then write plot data.
    Run,
}

fn load_config(cli: &Cli) -> CliResult<StudyConfig> {
    let mut cfg = match &cli.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::minimal(),
    };
    if let Some(out) = &cli.out {
        cfg.output.directory = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.strict_admissibility |= cli.strict_admissibility;
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(summary: &Summary) {
    let v = &summary.verdicts;
    println!("m=0 instability found: {}", v.m0_instability_found);
    println!("unstable modes: {}", v.unstable_modes);
    if let Some(s) = v.sup_mu {
        println!("sup mu = {:.6} at (m, k) = ({}, {})", s.mu, s.m, s.k);
    }
    for c in &v.criteria {
        println!("criterion m={}: {}", c.m, c.verdict);
    }
    for s in &v.scaling {
        println!(
            "scaling alpha={}: exponent {:.4} ({:?})",
            s.alpha, s.fitted_exponent, s.verdict
        );
    }
    for d in &summary.dynamics {
        println!(
            "evolve m={} k={}: mu_fit {:.6} vs {:.6}",
            d.m, d.k, d.mu_fit, d.mu_spectral
        );
    }
    for f in &summary.failures {
        eprintln!("warning: {}: {}", f.stage, f.message);
    }
}

fn run(cli: &Cli) -> CliResult<i32> {
    let cfg = load_config(cli)?;
    configure_threads(cfg.threads);
    let dir = study::output_dir(&cfg);
    ensure_dir(&dir)?;
    let summary = match &cli.command {
        Command::Equilibrium => {
            let eq = study::build(&cfg)?;
            let adm = study::equilibrium_stage(&cfg, &eq, &dir)?;
            println!(
                "admissible: {} (relaxed: {})",
                adm.admissible, adm.relaxed_admissible
            );
            for f in &adm.failures {
                println!("  {f}");
            }
            return Ok(EXIT_OK);
        }
        Command::Criteria => {
            let eq = study::build(&cfg)?;
            let mut summary = Summary::new(&cfg);
            summary.verdicts.criteria =
                study::criteria_stage(&cfg, &eq, &dir, &mut summary.failures)?;
            summary
        }
        Command::Solve { m, k } => {
            let eq = study::build(&cfg)?;
            let report = study::solve_stage(&cfg, &eq, ModeIndex::new(*m, *k));
            study::finish_spectrum(&cfg, &report, &dir)?
        }
        Command::Sweep => {
            let eq = study::build(&cfg)?;
            let report = study::sweep_stage(&cfg, &eq);
            study::finish_spectrum(&cfg, &report, &dir)?
        }
        Command::Scaling => {
            let eq = study::build(&cfg)?;
            if cfg.scaling.is_none() {
                return Err(CliError::Config(
                    "the configuration has no scaling block".into(),
                ));
            }
            let mut summary = Summary::new(&cfg);
            let studies = study::scaling_stage(&cfg, &eq, &dir, &mut summary.failures)?;
            summary.verdicts.scaling = studies.iter().map(Into::into).collect();
            summary
        }
        Command::Evolve { m, k } => {
            let eq = study::build(&cfg)?;
            let report = study::solve_stage(&cfg, &eq, ModeIndex::new(*m, *k));
            let mut summary = study::finish_spectrum(&cfg, &report, &dir)?;
            let mut dcfg = cfg.clone();
            dcfg.dynamics = Some(cfg.dynamics.unwrap_or_default());
            dcfg.dynamics.as_mut().unwrap().max_modes = 1;
            summary.dynamics =
                study::dynamics_stage(&dcfg, &eq, &report, &dir, &mut summary.failures);
            if report.unstable().is_empty() {
                eprintln!("mode ({m}, {k}) is not unstable; nothing to integrate");
            }
            summary
        }
        Command::Report => {
            for path in emit_plot_data(&dir)? {
                println!("wrote {}", path.display());
            }
            return Ok(EXIT_OK);
        }
        Command::Run => {
            let summary = run_study(&cfg)?;
            emit_plot_data(&dir)?;
            summary
        }
    };
    print_summary(&summary);
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

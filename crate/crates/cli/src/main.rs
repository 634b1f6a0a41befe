use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use nilspec_cli::config::{parse_config, RunConfig};
use nilspec_cli::{output, radon_cmd, spectrum_cmd, suites};

/// Batch driver: build 2-step nilpotent groups from config, run named
/// verification suites, compute and compare Zeeman spectra, run dual-Radon
/// round trips, and persist deterministic reports.
#[derive(Parser)]
#[command(name = "nilspec", version, about)]
struct Cli {
    /// configuration file (sectioned key-value text or JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// output directory for report.json / rows.jsonl / spectrum.csv
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// override the global sampler seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// parallelize independent checks over this many threads
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,

    /// tolerance ledger overrides, KEY=VALUE (repeatable)
    #[arg(long = "tol-override", global = true)]
    tol_override: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured endomorphism spaces and serialize them to JSON
    GroupBuild,
    /// Run a named verification suite
    Verify {
        /// one of the named suites
        #[arg(long)]
        suite: String,
    },
    /// Compute or compare Zeeman spectra
    Spectrum {
        /// box | compare | torus
        #[arg(long)]
        mode: String,
        /// pair spec for compare, e.g. H(1,1,3):H(2,0,3)
        #[arg(long)]
        pair: Option<String>,
        /// gamma spec: e1, e1+e2, random, or a comma list
        #[arg(long, default_value = "e1")]
        gamma: String,
        /// Hermite truncation level
        #[arg(long)]
        level: Option<usize>,
        /// lattice truncation radius for torus mode
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
    },
    /// Run a dual-Radon verification mode
    Radon {
        /// dual | pairing | invert-odd | invert-even | tube-limit
        #[arg(long)]
        mode: String,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    for kv in &cli.tol_override {
        cfg.apply_override(kv)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = load_config(&cli)?;
    match &cli.command {
        Command::GroupBuild => {
            let space = cfg.group.build()?;
            let partner = cfg.group.sigma_partner().build()?;
            std::fs::create_dir_all(&cli.out)?;
            std::fs::write(
                cli.out.join("space.json"),
                serde_json::to_string_pretty(&space)? + "\n",
            )?;
            std::fs::write(
                cli.out.join("space_partner.json"),
                serde_json::to_string_pretty(&partner)? + "\n",
            )?;
            println!(
                "built {} and {} -> {}",
                cfg.group.id(),
                cfg.group.sigma_partner().id(),
                cli.out.display()
            );
            Ok(true)
        }
        Command::Verify { suite } => {
            let outcome = suites::run_suite(suite, &cfg, cli.parallel)?;
            output::write_report(&cli.out, &outcome)?;
            output::write_rows(&cli.out, &outcome.config_hash, &outcome.reports)?;
            for rep in &outcome.reports {
                println!(
                    "{} {:<32} max residual {:.3e} (tol {:.1e})",
                    if rep.passed { "PASS" } else { "FAIL" },
                    rep.check,
                    rep.max_residual,
                    rep.tolerance
                );
            }
            Ok(outcome.passed)
        }
        Command::Spectrum {
            mode,
            pair,
            gamma,
            level,
            radius,
        } => {
            if let Some(level) = level {
                cfg.level = *level;
            }
            let outcome = match mode.as_str() {
                "box" => spectrum_cmd::run_box(&cfg, gamma)?,
                "compare" => {
                    let pair = pair
                        .as_deref()
                        .context("spectrum compare needs --pair A:B")?;
                    spectrum_cmd::run_compare(&cfg, pair, gamma)?
                }
                "torus" => spectrum_cmd::run_torus(&cfg, *radius)?,
                other => anyhow::bail!("unknown spectrum mode '{other}'"),
            };
            output::write_report(&cli.out, &outcome)?;
            output::write_csv(&cli.out, &outcome.config_hash, &outcome.csv)?;
            if let Some(v) = &outcome.comparison {
                println!(
                    "{} spectra {} vs {}: max residual {:.3e} over {} eigenvalues",
                    if v.verdict { "PASS" } else { "FAIL" },
                    v.report_a,
                    v.report_b,
                    v.max_residual,
                    v.matched
                );
            } else {
                println!(
                    "wrote {} spectrum report(s) -> {}",
                    outcome.reports.len(),
                    cli.out.display()
                );
            }
            Ok(outcome.passed)
        }
        Command::Radon { mode } => {
            let outcome = match mode.as_str() {
                "dual" => radon_cmd::run_dual(&cfg)?,
                "pairing" => radon_cmd::run_pairing(&cfg)?,
                "invert-odd" => radon_cmd::run_invert_odd(&cfg)?,
                "invert-even" => radon_cmd::run_invert_even(&cfg)?,
                "tube-limit" => radon_cmd::run_tube_limit(&cfg)?,
                other => anyhow::bail!("unknown radon mode '{other}'"),
            };
            output::write_report(&cli.out, &outcome)?;
            output::write_rows(&cli.out, &outcome.config_hash, &outcome.reports)?;
            for rep in &outcome.reports {
                println!(
                    "{} {:<24} max residual {:.3e}",
                    if rep.passed { "PASS" } else { "FAIL" },
                    rep.check,
                    rep.max_residual
                );
            }
            Ok(outcome.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

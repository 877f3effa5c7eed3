//! `wlim`: run the verification battery, dump CSV grids, inspect the
//! resolved configuration.
//!
//! The `verify` subcommand prints one line per check and writes the full
//! JSON report; the process exits nonzero iff any check fails. Reports are
//! byte-identical across runs with the same configuration and seed.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use wlim_core::battery::{
    dump_exponent_csv, dump_matrix_csv, dump_weight_csv, run_battery, VerifyConfig,
};

#[derive(Parser)]
#[command(name = "wlim", version)]
#[command(about = "Numerical certificates for a weighted holomorphic-function construction")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Run the full verification battery and write the JSON report
    Verify(ConfigArgs),
    /// Write a CSV dump for external plotting
    Dump {
        #[command(subcommand)]
        what: DumpWhat,
    },
    /// Print the resolved configuration and its hash
    ShowConfig(ConfigArgs),
}

#[derive(Subcommand)]
enum DumpWhat {
    /// Angular weight ŵ_k on a uniform angle grid
    Weight {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Outer exponent h_n on a polar grid of the half-annulus
    Exponent {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Entries of the φψ matrix with error bounds
    Matrix {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Largest materialized weight/geometry index
    #[arg(long = "n-max", default_value_t = 12)]
    n_max: usize,
    /// Operator truncation for quadrature-backed checks
    #[arg(long = "trunc-N", default_value_t = 8)]
    trunc_n: usize,
    /// Deepest weight-system level
    #[arg(long = "k-max", default_value_t = 5)]
    k_max: usize,
    /// Outer-function interval truncation
    #[arg(long = "m-cut", default_value_t = 40)]
    m_cut: usize,
    /// Grading levels of the interval quadrature
    #[arg(long = "quad-levels", default_value_t = 6)]
    quad_levels: usize,
    /// Complement samples per index
    #[arg(long = "cn-samples", default_value_t = 1000)]
    cn_samples: usize,
    /// Near-boundary complement samples per index
    #[arg(long = "cn-near-samples", default_value_t = 200)]
    cn_near_samples: usize,
    /// Admissible boundary angles per index
    #[arg(long = "boundary-angles", default_value_t = 20)]
    boundary_angles: usize,
    /// Sample budget for the span-continuity battery
    #[arg(long = "psi-samples", default_value_t = 100_000)]
    psi_samples: usize,
    /// Samples for the dominating-weight certificates
    #[arg(long = "normalizer-samples", default_value_t = 10_000)]
    normalizer_samples: usize,
    /// Random probe vectors for operator checks
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// RNG seed recorded in the report
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Per-check tolerance override, repeatable: --tol <check>=<value>
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Output directory for reports and dumps
    #[arg(long = "out", default_value = "wlim-out")]
    out: String,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected <check>=<value>, got `{s}`"))?;
    let v: f64 = value.parse().map_err(|e| format!("bad tolerance `{value}`: {e}"))?;
    Ok((key.to_string(), v))
}

impl ConfigArgs {
    fn to_config(&self) -> VerifyConfig {
        VerifyConfig {
            n_max: self.n_max,
            trunc_n: self.trunc_n,
            k_max: self.k_max,
            m_cut: self.m_cut,
            quad_levels: self.quad_levels,
            cn_samples: self.cn_samples,
            cn_near_samples: self.cn_near_samples,
            boundary_angles: self.boundary_angles,
            psi_samples: self.psi_samples,
            normalizer_samples: self.normalizer_samples,
            trials: self.trials,
            seed: self.seed,
            tolerances: self.tol.iter().cloned().collect(),
            out_dir: self.out.clone(),
        }
    }
}

fn write_out(dir: &str, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output dir {dir}"))?;
    let path = Path::new(dir).join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Commands::Verify(args) => {
            let config = args.to_config();
            let report = run_battery(&config).context("running verification battery")?;
            for c in &report.checks {
                println!(
                    "{} {:<28} [{}] measured={:<12.6e} bound={:<12.6e} margin={:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.anchor,
                    match c.basis {
                        wlim_core::battery::CheckBasis::Certified => "certified",
                        wlim_core::battery::CheckBasis::Sampled => "sampled",
                    },
                    c.measured,
                    c.bound,
                    c.margin,
                );
            }
            println!(
                "{} checks: {} passed, {} failed (config {})",
                report.checks.len(),
                report.passed,
                report.failed,
                report.config_hash
            );
            let path = write_out(&config.out_dir, "report.json", &report.to_json_string())?;
            println!("report written to {}", path.display());
            if !report.all_pass() {
                std::process::exit(1);
            }
        }
        Commands::Dump { what } => match what {
            DumpWhat::Weight { k, points, cfg } => {
                let config = cfg.to_config();
                let csv = dump_weight_csv(&config, k, points)?;
                let path = write_out(&config.out_dir, &format!("weight_k{k}.csv"), &csv)?;
                println!("{}", path.display());
            }
            DumpWhat::Exponent { n, grid, cfg } => {
                let config = cfg.to_config();
                let csv = dump_exponent_csv(&config, n, grid)?;
                let path = write_out(&config.out_dir, &format!("exponent_n{n}.csv"), &csv)?;
                println!("{}", path.display());
            }
            DumpWhat::Matrix { cfg } => {
                let config = cfg.to_config();
                let csv = dump_matrix_csv(&config, config.trunc_n)?;
                let path = write_out(
                    &config.out_dir,
                    &format!("matrix_n{}.csv", config.trunc_n),
                    &csv,
                )?;
                println!("{}", path.display());
            }
        },
        Commands::ShowConfig(args) => {
            let config = args.to_config();
            config.validate().context("validating configuration")?;
            println!("{}", config.to_json_string());
            println!("hash: {}", config.hash());
        }
    }
    Ok(())
}

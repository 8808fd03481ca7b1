use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crystalquant_cli::{cmd_moment_test, cmd_render, cmd_solve, cmd_stability, cmd_table1, cmd_verify, Status};

/// Penalized quantization workbench: solve, reproduce reference energies,
/// check the numerical inequalities, and inspect lattice stability.
#[derive(Parser)]
#[command(name = "crystalquant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the generalized Lloyd solver on a JSON configuration.
    Solve {
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the nine reference energy ratios on the unit square.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check every encoded inequality; exit 0 iff all pass.
    Verify {
        #[arg(long)]
        compensated: bool,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a stored solution with the triangular lattice.
    Stability {
        result: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Draw a stored solution as SVG.
    Render {
        result: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Property check of the polygon moment inequality.
    MomentTest {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Solve { config, out } => {
            let (status, res) = cmd_solve(&config, out.as_deref())?;
            let r = &res.result;
            println!(
                "converged {} after {} iterations: N = {}, ratio = {:.12}, energy = {:e}",
                r.converged,
                r.iterations,
                r.n_final(),
                r.energy.rescaled_ratio,
                r.energy.total
            );
            println!("wrote {}", res.config.output_dir.display());
            Ok(status)
        }
        Command::Table1 { out, starts, seed } => {
            let (status, csv) = cmd_table1(out.as_deref(), starts, seed)?;
            print!("{csv}");
            Ok(status)
        }
        Command::Verify { compensated, out } => {
            let (status, report) = cmd_verify(compensated, out.as_deref())?;
            print!("{}", report.to_table());
            Ok(status)
        }
        Command::Stability { result, epsilon } => {
            let (status, r) = cmd_stability(&result, epsilon)?;
            println!(
                "N = {}, eps_hat = {:.4e}, interior {}, hexagons {} ({:.3}), vertex violations {}, edge violations {}, window pass {:.3}",
                r.n,
                r.eps_hat,
                r.interior_cells,
                r.hexagon_interior,
                r.hexagon_fraction(),
                r.vertex_violations,
                r.edge_violations,
                r.window_pass_fraction()
            );
            Ok(status)
        }
        Command::Render { result, out } => {
            let path = cmd_render(&result, out.as_deref())?;
            println!("wrote {}", path.display());
            Ok(Status::Ok)
        }
        Command::MomentTest { samples, seed } => {
            let (status, s) = cmd_moment_test(samples, seed)?;
            println!(
                "{} violations in {} samples, min slack {:.3e}, regular deviation {:.2e}",
                s.violations, s.samples, s.min_slack, s.regular_deviation
            );
            Ok(status)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

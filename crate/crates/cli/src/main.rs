//! `gbo`: command-line front end for the gBO solvers.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{Frame, Session};

#[derive(Parser)]
#[command(
    name = "gbo",
    version,
    about = "Spectral experiments for the generalized Benjamin-Ono equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// INI experiment file; built-in defaults otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Existing output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the run metadata.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn session(self) -> Result<Session> {
        Session::new(self.config.as_deref(), self.out, self.seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state Q and report Pohozaev residuals.
    GroundState(Common),
    /// Evolve initial data in the lab frame.
    Evolve(Common),
    /// Evolve in the peak-pinned comoving frame (rational grid, RK4).
    Comoving(Common),
    /// Threshold amplitudes for scaled profiles.
    Thresholds {
        #[command(flatten)]
        common: Common,
        /// Also bisect for the empirical blow-up threshold.
        #[arg(long)]
        bisect: bool,
    },
    /// Reclassify a stored evolve/comoving run.
    Fit {
        /// Directory written by `evolve` or `comoving`.
        dir: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let output = match Cli::parse().command {
        Command::GroundState(c) => commands::ground_state(&c.session()?)?,
        Command::Evolve(c) => commands::dynamics(&c.session()?, Frame::Lab)?,
        Command::Comoving(c) => commands::dynamics(&c.session()?, Frame::Comoving)?,
        Command::Thresholds { common, bisect } => commands::thresholds(&common.session()?, bisect)?,
        Command::Fit { dir } => commands::fit(&dir)?,
    };
    println!("{output}");
    Ok(())
}

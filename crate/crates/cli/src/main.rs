mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pfpart::Route;

use config::{CommonArgs, RunConfig};
use error::CliError;

/// Measures on partitions with Jack parameter 2 and their Pfaffian
/// correlation kernels.
#[derive(Parser, Debug)]
#[command(name = "pfpart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the measure over all partitions with |λ| ≤ n-cut
    Measure {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate S(x, y) on a grid
    Kernel {
        /// x range as lo:hi (inclusive) or a single value
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// y range, defaults to the x range
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Second route to compare against
        #[arg(long)]
        diff: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// ρ(X) for the listed points
    Correlate {
        /// Points of X, space or comma separated
        #[arg(allow_negative_numbers = true, value_delimiter = ',')]
        points: Vec<i64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Identity suite and Pfaffian-versus-oracle comparisons; JSON report
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_range(text: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Config(format!("range '{text}' is not lo:hi"));
    let (lo, hi) = match text.split_once(':') {
        Some((lo, hi)) => (
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v: i64 = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Measure { common } => commands::measure(&RunConfig::resolve(&common)?),
        Command::Kernel { x, y, diff, common } => {
            let cfg = RunConfig::resolve(&common)?;
            let xs = parse_range(&x)?;
            let ys = match y {
                Some(y) => parse_range(&y)?,
                None => xs.clone(),
            };
            let diff = diff
                .map(|d| d.parse::<Route>().map_err(|e| CliError::Config(e.to_string())))
                .transpose()?;
            commands::kernel(&cfg, &xs, &ys, diff)
        }
        Command::Correlate { points, common } => commands::correlate(&RunConfig::resolve(&common)?, points),
        Command::Verify { common } => commands::verify(&RunConfig::resolve(&common)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pfpart: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-2:1").unwrap(), vec![-2, -1, 0, 1]);
        assert_eq!(parse_range("3").unwrap(), vec![3]);
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("a:b").is_err());
    }
}

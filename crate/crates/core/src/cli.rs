//! Command-line surface. Exit codes: 0 success, 1 usage error, 2 I/O or
//! format error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{BoundsReport, ClusterSizeHistogram};
use crate::channel::transmit;
use crate::clusterer::cluster_pipeline;
use crate::decoder::exact_pe_from_counts;
use crate::error::{Error, Result};
use crate::experiment::{single, sweep};
use crate::generator::sample_block_matrix;
use crate::io;
use crate::model::{ChannelParams, GenerationLaw, TiePolicy};
use crate::rng::{stage_rng, Stage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "blockrec",
    version,
    about = "Block-constant matrix recovery simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Erasure probability.
    #[arg(long)]
    eps: f64,
    /// BSC crossover probability.
    #[arg(long)]
    p: f64,
}

impl ChannelArgs {
    fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.eps, self.p)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a block-constant matrix.
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m0: usize,
        #[arg(long)]
        n0: usize,
        /// Keep clusters contiguous instead of randomly permuted.
        #[arg(long)]
        no_permute: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Writes `<stem>.rows` and `<stem>.cols` label files.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Pass a dense matrix through the erasure + BSC channel.
    Channel {
        #[command(flatten)]
        ch: ChannelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Majority-decode an observation with given partitions.
    Decode {
        #[arg(long)]
        row_labels: PathBuf,
        #[arg(long)]
        col_labels: PathBuf,
        #[arg(long, default_value = "fair_coin")]
        tie: TiePolicy,
        /// Seed for fair-coin tie breaking.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster the rows and columns of an observation.
    Cluster {
        #[command(flatten)]
        ch: ChannelArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        row_out: PathBuf,
        #[arg(long)]
        col_out: PathBuf,
    },
    /// Print closed-form bounds for equal-size clusters.
    Bounds {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m0: usize,
        #[arg(long)]
        n0: usize,
        #[command(flatten)]
        ch: ChannelArgs,
        /// Slack in the undecodable-size threshold.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Exact known-cluster error probability for both tie policies.
    ExactPe {
        /// Cluster sizes, comma separated; `size:count` repeats a size.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<String>,
        #[command(flatten)]
        ch: ChannelArgs,
        #[arg(long, default_value_t = crate::decoder::DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Run a Monte Carlo experiment described by a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } | Error::SizeCapExceeded { .. } => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn parse_sizes(specs: &[String]) -> Result<Vec<(usize, usize)>> {
    let bad = |s: &str| Error::param("sizes", format!("invalid entry `{s}`"));
    specs
        .iter()
        .map(|s| {
            let (size, count) = match s.split_once(':') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s.trim(), "1"),
            };
            let size: usize = size.parse().map_err(|_| bad(s))?;
            let count: usize = count.parse().map_err(|_| bad(s))?;
            if size == 0 {
                return Err(bad(s));
            }
            Ok((size, count))
        })
        .collect()
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    let mut say = |line: String| {
        writeln!(out, "{line}").map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    };
    match command {
        Command::Generate {
            m,
            n,
            m0,
            n0,
            no_permute,
            seed,
            out: path,
            labels_out,
        } => {
            let law = GenerationLaw::new(m, n, m0, n0, !no_permute)?;
            let x = sample_block_matrix(&law, &mut stage_rng(seed, Stage::Generator))?;
            io::write_block_matrix(&x, &path)?;
            if let Some(stem) = labels_out {
                let (rows, cols) = io::label_paths(&stem);
                io::write_labels(x.row_partition(), &rows)?;
                io::write_labels(x.col_partition(), &cols)?;
            }
            say(format!("wrote {}x{} matrix to {}", m, n, path.display()))
        }
        Command::Channel {
            ch,
            seed,
            input,
            out: path,
        } => {
            let ch = ch.params()?;
            let x = io::read_dense_matrix(&input)?;
            let y = transmit(&x, &ch, &mut stage_rng(seed, Stage::Channel));
            io::write_matrix(&y, &path)?;
            say(format!("erased={}", y.erasure_count()))
        }
        Command::Decode {
            row_labels,
            col_labels,
            tie,
            seed,
            input,
            out: path,
        } => {
            let y = io::read_matrix(&input)?;
            let rows = io::read_labels(&row_labels)?;
            let cols = io::read_labels(&col_labels)?;
            let decoded = crate::decoder::majority_decode(
                &y,
                &rows,
                &cols,
                tie,
                &mut stage_rng(seed, Stage::Ties),
            )?;
            io::write_block_matrix(&decoded.estimate, &path)?;
            say(format!("tie_occurred={}", decoded.tie_occurred))
        }
        Command::Cluster {
            ch,
            input,
            row_out,
            col_out,
        } => {
            let ch = ch.params()?;
            let y = io::read_matrix(&input)?;
            let (rows, cols) = cluster_pipeline(&y, &ch)?;
            io::write_labels(&rows, &row_out)?;
            io::write_labels(&cols, &col_out)?;
            say(format!(
                "row_clusters={} col_clusters={}",
                rows.cluster_count(),
                cols.cluster_count()
            ))
        }
        Command::Bounds {
            m,
            n,
            m0,
            n0,
            ch,
            delta,
        } => {
            let ch = ch.params()?;
            let law = GenerationLaw::new(m, n, m0, n0, false)?;
            let hist = ClusterSizeHistogram::uniform(law.cluster_size(), law.r() * law.t())?;
            let report = BoundsReport::compute(&hist, m, n, &ch, delta)?;
            say(format!("cluster_size={}", law.cluster_size()))?;
            say(format!("clusters={}", law.r() * law.t()))?;
            for (name, value) in report.entries() {
                let flag = if value.valid { "" } else { " (invalid)" };
                say(format!("{name}={}{flag}", io::fmt_sig(value.value)))?;
            }
            Ok(())
        }
        Command::ExactPe { sizes, ch, cap } => {
            let ch = ch.params()?;
            let counts = parse_sizes(&sizes)?;
            for tie in [TiePolicy::FairCoin, TiePolicy::CountAsError] {
                let pe = exact_pe_from_counts(&counts, &ch, tie, cap)?;
                say(format!("{tie}={}", io::fmt_sig(pe)))?;
            }
            Ok(())
        }
        Command::Experiment {
            config,
            out: path,
            threads,
        } => {
            let file = io::read_config(&config)?;
            let run = || match &file.sweep {
                Some((axis, values)) => sweep(&file.experiment, *axis, values),
                None => single(&file.experiment),
            };
            let table = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::param("threads", e.to_string()))?
                    .install(run)?,
                None => run()?,
            };
            io::write_results_csv(&table, &path)?;
            say(format!(
                "wrote {} rows to {}",
                table.rows.len(),
                path.display()
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn size_specs() {
        let specs: Vec<String> = ["3:2", "5"].iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_sizes(&specs).unwrap(), vec![(3, 2), (5, 1)]);
        assert!(parse_sizes(&["0".to_string()]).is_err());
        assert!(parse_sizes(&["x:1".to_string()]).is_err());
    }
}

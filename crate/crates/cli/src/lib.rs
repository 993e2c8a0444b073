//! Library side of the `gccd` binary. [`run_cli`] takes an argument vector
//! and two output streams and returns the process exit code, so the whole
//! command surface can be driven in-process.
//!
//! Exit codes: `0` success (or an accepted message), `1` an error detected by
//! `verify`, `2` malformed input, bad usage or an internal failure.

#![forbid(unsafe_code)]

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gccd_core::coloring::DEFAULT_MAX_ORDER;

mod commands;
mod input;
mod render;

pub use render::Format;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DETECTED: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

/// Graph-coloring check digits: encode payloads as graphs, transmit their
/// colorings, and detect corruption.
#[derive(Debug, Parser)]
#[command(name = "gccd", version, about)]
pub struct Cli {
    /// Largest graph order the encoder will color exactly
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    pub max_order: usize,

    /// Output format (defaults depend on the subcommand)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a payload and write a wire-format message
    Encode {
        #[command(flatten)]
        payload: PayloadArgs,
        #[command(flatten)]
        padding: PaddingArgs,
        /// Destination file
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a received message (exit 0 accepted, 1 error detected)
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Corrupt the payload of a message and write the result
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Counting bounds, partition counts and the overhead table
    Analyze {
        #[command(flatten)]
        range: OrderArgs,
        /// Number of colors
        #[arg(long)]
        n: Option<usize>,
        /// Class sizes of a fixed coloring, e.g. 2,2
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Brute-force counts over every labeled graph of a small order
    Oracle {
        /// Graph order (at most 7)
        #[arg(long)]
        m: usize,
        /// Class sizes of a fixed coloring to count against
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Estimate or enumerate the undetected-error rate of a message
    Simulate {
        /// Message file; otherwise the payload flags are encoded first
        #[arg(long = "in", conflicts_with_all = ["bits", "hex", "dec"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        payload: PayloadArgs,
        #[command(flatten)]
        padding: PaddingArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Flip each bit independently with this probability
        #[arg(long, conflicts_with_all = ["flip", "random"])]
        epsilon: Option<f64>,
        /// Number of Monte Carlo trials
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Verify every possible received payload instead of sampling
        #[arg(long, conflicts_with_all = ["flip", "random", "epsilon", "seed"])]
        exhaustive: bool,
    },
}

#[derive(Debug, Args)]
pub struct PayloadArgs {
    /// Payload as a bit literal, e.g. 0110
    #[arg(long, conflicts_with_all = ["hex", "dec"])]
    pub bits: Option<String>,
    /// Payload as hexadecimal; length is 4 bits per digit unless --bits-len is given
    #[arg(long, conflicts_with = "dec")]
    pub hex: Option<String>,
    /// Payload as a decimal number; needs --bits-len
    #[arg(long)]
    pub dec: Option<String>,
    /// Declared payload length in bits
    #[arg(long)]
    pub bits_len: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Zero,
    Pin,
}

#[derive(Debug, Args)]
pub struct PaddingArgs {
    /// Padding for payloads shorter than a full triangle
    #[arg(long, value_enum, default_value_t = ModeArg::Zero)]
    pub mode: ModeArg,
    /// Clique size pinned by --mode pin
    #[arg(long)]
    pub pin_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Flip these 0-based payload positions
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    pub flip: Option<Vec<usize>>,
    /// Flip this many distinct random positions
    #[arg(long)]
    pub random: Option<usize>,
    /// Seed for randomized channels
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    /// Graph order
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<usize>,
    /// Inclusive order range A..B
    #[arg(long)]
    pub m_range: Option<String>,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns its exit code. Panics are caught and reported as failures.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_FAILURE
                }
            };
        }
    };

    match catch_unwind(AssertUnwindSafe(|| commands::dispatch(&cli, out, err))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAILURE
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_FAILURE
        }
    }
}

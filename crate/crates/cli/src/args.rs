use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qhe", version, about = "Check quantum homomorphic encryption schemes and localise data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for builders that take one and are not given `seed=` in --params.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override; `equality` is the checker threshold.
    #[arg(long = "tol", global = true, value_name = "NAME=VAL", num_args = 1..)]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Security,
    Completeness,
    Theorem1,
    All,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Scheme or problem JSON file.
    #[arg(long, alias = "problem", value_name = "FILE", conflicts_with = "builder")]
    pub scheme: Option<PathBuf>,
    /// Builder name, e.g. qotp, tag-evaluate, constructed-secure.
    #[arg(long, value_name = "NAME")]
    pub builder: Option<String>,
    /// Builder parameters such as `n=1 S=I,X`; a bare `2,2,2` sets dims.
    #[arg(long, value_name = "K=V", num_args = 1.., requires = "builder")]
    pub params: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scheme checkers.
    Check {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Build V and sigma for a localisation problem.
    Localise {
        #[command(flatten)]
        source: Source,
    },
    /// Qubit lower bound for storing one of |S| orthogonal states.
    Audit {
        /// Reversible classical circuits on n bits, |S| = (2^n)!.
        #[arg(long, conflicts_with = "set_size", required_unless_present = "set_size")]
        n: Option<u32>,
        /// Set size such as 24, 24!, 2^10 or (2^3)!.
        #[arg(long)]
        set_size: Option<String>,
    },
    /// Write a built scheme or problem as JSON.
    ExportScheme {
        #[arg(long, value_name = "NAME")]
        builder: String,
        #[arg(long, value_name = "K=V", num_args = 1..)]
        params: Vec<String>,
    },
    /// List catalog entries, optionally checking each against its expectation.
    ListCatalog {
        #[arg(long)]
        verify: bool,
    },
}

//! `lra`: build corpus indexes, run the relational analysis pipeline and
//! evaluate it on analogy questions and noun-modifier pairs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lra", version, about = "Latent relational analysis of word pairs")]
pub struct Cli {
    /// Pipeline settings as `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Accepted for compatibility; every stage is deterministic.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory for run artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = "lra-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Corpus index files.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Thesaurus files.
    #[command(subcommand)]
    Thesaurus(ThesaurusCommand),
    /// Run the pipeline and save its artifacts.
    Run(RunArgs),
    /// Relational similarity of pair comparisons listed in a file.
    Sim(SimArgs),
    /// Evaluate a similarity measure.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// The vector space baseline.
    #[command(subcommand)]
    Vsm(VsmCommand),
    /// Inspect the mined patterns of a saved run.
    #[command(subcommand)]
    Patterns(PatternsCommand),
}

#[derive(Subcommand, Debug)]
pub enum IndexCommand {
    /// Tokenize a text file or directory into an index file.
    Build {
        corpus: PathBuf,
        #[arg(short, long = "output", value_name = "FILE")]
        output: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum ThesaurusCommand {
    /// Validate a thesaurus file.
    Check { file: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct Inputs {
    /// Text file, directory of text files, or index file.
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub thesaurus: PathBuf,
}

#[derive(Args, Debug)]
#[group(id = "pair_source", required = true, multiple = true, args = ["pairs", "questions", "nm"])]
pub struct RunArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// One pair per line.
    #[arg(long, value_name = "FILE")]
    pub pairs: Option<PathBuf>,
    /// Analogy questions; all stem and choice pairs are used.
    #[arg(long, value_name = "FILE")]
    pub questions: Option<PathBuf>,
    /// Noun-modifier CSV; all modifier:head pairs are used.
    #[arg(long, value_name = "FILE")]
    pub nm: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    /// Lines of two pairs, e.g. `quart:volume mile:distance`.
    pub comparisons: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Lra,
    Vsm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
pub struct SatArgs {
    #[arg(long, value_name = "FILE")]
    pub questions: PathBuf,
    /// Text file, directory of text files, or index file.
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    /// Required for the `lra` measure.
    #[arg(long, value_name = "FILE")]
    pub thesaurus: Option<PathBuf>,
    /// Joining terms for the `vsm` measure, one per line.
    #[arg(long, value_name = "FILE")]
    pub terms: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct NmArgs {
    /// CSV `modifier,head,class30,class5`.
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub thesaurus: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub terms: Option<PathBuf>,
    /// `class30<TAB>class5` grouping used when the CSV has no class5 column.
    #[arg(long, value_name = "FILE")]
    pub classes: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// Score analogy questions.
    Sat {
        #[arg(long, value_enum, default_value = "lra")]
        measure: Measure,
        #[command(flatten)]
        args: SatArgs,
    },
    /// Leave-one-out nearest neighbour classification.
    Nm {
        #[arg(long, value_enum, default_value = "lra")]
        measure: Measure,
        #[command(flatten)]
        args: NmArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum VsmCommand {
    #[command(subcommand)]
    Eval(VsmEvalCommand),
}

#[derive(Subcommand, Debug)]
pub enum VsmEvalCommand {
    Sat(SatArgs),
    Nm(NmArgs),
}

#[derive(Subcommand, Debug)]
pub enum PatternsCommand {
    /// Print the pattern table of the run in `--out`.
    Dump {
        /// Print at most this many patterns.
        #[arg(long)]
        limit: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use aap_core::harness::{render_text, run_corpus, to_json};
use aap_core::judge::judge;
use aap_core::lexicon::{load_lexicon, seed_lexicon, Lexicon, LexiconError};

/// Judge Yemeni Arabic imperatives and show their derivations.
#[derive(Parser)]
#[command(name = "aap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Judge a single sentence.
    Judge {
        sentence: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Judge every entry of a corpus file against its expectation.
    Corpus {
        path: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Inspect the lexicon.
    Lexicon {
        #[command(subcommand)]
        action: LexiconAction,
        /// Lexicon file to use instead of the built-in one.
        #[arg(long, global = true)]
        lexicon: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LexiconAction {
    /// Print every entry in lexicon-file format.
    Dump,
}

#[derive(Args)]
struct Opts {
    /// Lexicon file to use instead of the built-in one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Show structure, chains, Agree steps and final head features.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Lexicon { path: PathBuf, source: LexiconError },
}

const EXIT_INPUT: u8 = 2;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn lexicon(path: Option<&Path>) -> Result<Lexicon, CliError> {
    match path {
        None => Ok(seed_lexicon()),
        Some(p) => load_lexicon(&read(p)?).map_err(|source| CliError::Lexicon {
            path: p.to_path_buf(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Judge { sentence, opts } => {
            let lex = lexicon(opts.lexicon.as_deref())?;
            let j = judge(&sentence, &lex);
            match opts.format {
                Format::Text => print!("{}", render_text(&j, opts.trace)),
                Format::Structured => println!("{}", pretty(&to_json(&j))),
            }
            Ok(if j.is_grammatical() {
                ExitCode::SUCCESS
            } else if j.is_input_error() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(1)
            })
        }
        Command::Corpus { path, opts } => {
            let lex = lexicon(opts.lexicon.as_deref())?;
            let report = run_corpus(&read(&path)?, &lex);
            match opts.format {
                Format::Text => print!("{}", report.render_text(opts.trace)),
                Format::Structured => println!("{}", pretty(&report.to_json())),
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Lexicon {
            action: LexiconAction::Dump,
            lexicon: path,
        } => {
            print!("{}", lexicon(path.as_deref())?.to_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hindex_cli::{cmd_compare, cmd_estimate, cmd_simulate, estimates_of, ingest, ingest_estimates};
use hindex_cli::{InputFormat, OutputFormat, Overrides};
use hindex_core::mc::Target;

#[derive(Parser)]
#[command(name = "hindex", version, about = "h-index estimates, confidence sets and scholar comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ReportArgs {
    /// Citation data, one row per paper (csv) or an object of arrays (json).
    input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    input_format: Option<InputFormat>,
    /// Error level; the confidence level is 1 - gamma.
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// `h` for the h-index, `eh` for the expected empirical h-index.
    #[arg(long, default_value = "h", value_parser = parse_target)]
    target: Target,
    /// markdown, csv or json.
    #[arg(long, default_value = "markdown")]
    format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-scholar estimate and confidence set.
    Estimate(ReportArgs),
    /// Simultaneous pairwise confidence sets and the implied ranking.
    Compare {
        #[command(flatten)]
        report: ReportArgs,
        /// Precomputed estimates (`scholar_id,n,h_hat,v_hat`) instead of citation data.
        #[arg(long, conflicts_with = "input")]
        estimates: Option<PathBuf>,
    },
    /// Run the experiment described by a key=value config file.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's worker thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: hindex_core::Error| e.to_string())
}

fn load(args: &ReportArgs) -> anyhow::Result<hindex_cli::Dataset> {
    let path = args.input.as_ref().context("missing input file")?;
    let format = match args.input_format {
        Some(f) => f,
        None => InputFormat::from_path(path)?,
    };
    Ok(ingest(path, format)?)
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let tmp = tempfile::NamedTempFile::new_in(&dir)?;
            std::fs::write(tmp.path(), text)?;
            tmp.persist(path).with_context(|| format!("{}", path.display()))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Estimate(args) => {
            let dataset = load(&args)?;
            let text = cmd_estimate(&dataset, args.gamma, args.target, args.format)?;
            emit(&text, args.out.as_ref())
        }
        Command::Compare { report, estimates } => {
            let list = match estimates {
                Some(path) => ingest_estimates(&path)?,
                None => estimates_of(&load(&report)?),
            };
            let text = cmd_compare(&list, report.gamma, report.target, report.format)?;
            emit(&text, report.out.as_ref())
        }
        Command::Simulate { config, out, seed, threads } => cmd_simulate(&config, &out, Overrides { seed, threads }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("hindex: error: {msg}");
            ExitCode::FAILURE
        }
    }
}

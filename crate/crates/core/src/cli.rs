//! Command-line interface tying the library together.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::binning::{assign_bins, ece, BinningSpec, BinningStrategy};
use crate::cumulative::{cumulative_curve, ecce, sigma_n};
use crate::dataset::{canonicalize, Dataset};
use crate::error::{Error, Result};
use crate::experiments::{bootstrap_band, sweep_bins, sweep_n, SweepNConfig, SweepResult};
use crate::io::{read_csv, write_atomic, write_csv, Provenance, ReportDocument};
use crate::plots::{cumulative_plot, reliability_diagram, sweep_plot, PlotKind, PlotSpec};
use crate::pvalues::BrownianTails;
use crate::synth::{generate, CalibrationFunction, GridKind, ScoreGrid, SynthConfig};

#[derive(Parser)]
#[command(
    name = "calibra",
    version,
    about = "Calibration assessment: binned and cumulative calibration errors with asymptotic P-values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Binned (ECE) and cumulative (ECCE) errors with P-values.
    Compute(ComputeArgs),
    /// Cumulative-difference plot and ECCE report.
    Cumulative(CumulativeArgs),
    /// Reliability diagram, optionally with a bootstrap band.
    Reliability(ReliabilityArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// ECE as a function of the number of bins.
    SweepBins(SweepBinsArgs),
    /// Metrics as a function of the sample size, averaged over
    /// realizations.
    SweepN(SweepNArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Equispaced,
    EqualCount,
}

impl From<StrategyArg> for BinningStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Equispaced => BinningStrategy::Equispaced,
            StrategyArg::EqualCount => BinningStrategy::EqualCount,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Equispaced,
    Squared,
    Sqrt,
}

impl From<GridArg> for GridKind {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Equispaced => GridKind::Equispaced,
            GridArg::Squared => GridKind::Squared,
            GridArg::Sqrt => GridKind::SquareRooted,
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    bins: usize,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Seed for randomly ordering tied scores.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CumulativeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReliabilityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    bins: usize,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Number of bootstrap curves to draw under the diagram.
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    grid: GridArg,
    /// `perfect` or `sine:amp=A,freq=W`.
    #[arg(long)]
    calibration: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepBinsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated bin counts, e.g. 8,16,32.
    #[arg(long)]
    bins: String,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepNArgs {
    /// Comma-separated sample sizes, ascending.
    #[arg(long, default_value = "8192,16384,32768,65536,131072")]
    sizes: String,
    #[arg(long, default_value_t = 9)]
    realizations: usize,
    #[arg(long, default_value_t = 16)]
    draws_per_bin: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Runs the CLI on explicit arguments. Returns the process exit code:
/// 0 on success, 1 on validation errors, 2 on I/O errors.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not failures.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Compute(args) => run_compute(args),
        Command::Cumulative(args) => run_cumulative(args),
        Command::Reliability(args) => run_reliability(args),
        Command::Synth(args) => run_synth(args),
        Command::SweepBins(args) => run_sweep_bins(args),
        Command::SweepN(args) => run_sweep_n(args),
    }
}

fn load_dataset(path: &PathBuf, seed: u64) -> Result<Dataset> {
    let pairs = read_csv(path)?;
    canonicalize(&pairs, seed)
}

fn run_compute(args: ComputeArgs) -> Result<()> {
    let ds = load_dataset(&args.input, args.seed)?;
    let report = ece(
        &ds,
        &BinningSpec {
            strategy: args.strategy.into(),
            m: args.bins,
        },
    )?;
    let (ecce_section, ecce_error) = match ecce(&ds, &BrownianTails) {
        Ok(r) => (Some(r), None),
        Err(Error::DegenerateSigma) => (None, Some(Error::DegenerateSigma.to_string())),
        Err(e) => return Err(e),
    };
    let doc = ReportDocument {
        n: ds.n(),
        ece_sections: Some(vec![(&report).into()]),
        ecce_section,
        ecce_error,
        provenance: Provenance::for_input(&args.input, Some(args.seed)),
    };
    emit_report(&doc, args.json.as_ref())
}

fn run_cumulative(args: CumulativeArgs) -> Result<()> {
    let ds = load_dataset(&args.input, args.seed)?;
    let report = ecce(&ds, &BrownianTails)?;
    let doc = ReportDocument {
        n: ds.n(),
        ece_sections: None,
        ecce_section: Some(report.clone()),
        ecce_error: None,
        provenance: Provenance::for_input(&args.input, Some(args.seed)),
    };
    if let Some(path) = &args.svg {
        let curve = cumulative_curve(&ds);
        let sigma = sigma_n(&ds)?;
        let spec = PlotSpec::new(
            PlotKind::Cumulative,
            format!("Cumulative differences (n = {})", ds.n()),
        );
        let svg = cumulative_plot(&curve, sigma, Some(&report), &spec)?;
        write_atomic(path, svg.as_bytes())?;
    }
    emit_report(&doc, args.json.as_ref())
}

fn run_reliability(args: ReliabilityArgs) -> Result<()> {
    let ds = load_dataset(&args.input, args.seed)?;
    let spec = BinningSpec {
        strategy: args.strategy.into(),
        m: args.bins,
    };
    let bins = assign_bins(&ds, &spec)?;
    let band = match args.bootstrap {
        Some(curves) => Some(bootstrap_band(&ds, &spec, curves, args.seed)?),
        None => None,
    };
    let plot_spec = PlotSpec::new(
        PlotKind::Reliability,
        format!("Reliability diagram (n = {}, m = {})", ds.n(), args.bins),
    );
    let svg = reliability_diagram(&bins, band.as_ref(), &plot_spec)?;
    match &args.svg {
        Some(path) => write_atomic(path, svg.as_bytes())?,
        None => print!("{svg}"),
    }
    Ok(())
}

/// Parses `perfect` or `sine:amp=A,freq=W`.
pub fn parse_calibration(text: &str) -> Result<CalibrationFunction> {
    if text == "perfect" {
        return Ok(CalibrationFunction::Perfect);
    }
    if let Some(params) = text.strip_prefix("sine:") {
        let mut amplitude = None;
        let mut frequency = None;
        for part in params.split(',') {
            match part.split_once('=') {
                Some(("amp", v)) => {
                    amplitude = Some(v.parse::<f64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad amplitude `{v}`"))
                    })?)
                }
                Some(("freq", v)) => {
                    frequency = Some(v.parse::<u32>().map_err(|_| {
                        Error::InvalidArgument(format!("bad frequency `{v}`"))
                    })?)
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown calibration parameter `{part}`"
                    )))
                }
            }
        }
        match (amplitude, frequency) {
            (Some(a), Some(f)) => CalibrationFunction::sine(a, f),
            _ => Err(Error::InvalidArgument(
                "sine calibration needs amp= and freq=".into(),
            )),
        }
    } else {
        Err(Error::InvalidArgument(format!(
            "unknown calibration `{text}` (expected `perfect` or `sine:amp=A,freq=W`)"
        )))
    }
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        grid: ScoreGrid {
            kind: args.grid.into(),
            n: args.n,
        },
        calibration: parse_calibration(&args.calibration)?,
        seed: args.seed,
    };
    let ds = generate(&config)?;
    write_csv(&ds.pairs(), &args.output)
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} `{s}`")))
        })
        .collect()
}

fn run_sweep_bins(args: SweepBinsArgs) -> Result<()> {
    let ds = load_dataset(&args.input, args.seed)?;
    let bins = parse_usize_list(&args.bins, "bin count")?;
    let result = sweep_bins(&ds, &bins)?;
    emit_sweep(&result, args.csv.as_ref(), args.svg.as_ref(), "ECE vs number of bins")
}

fn run_sweep_n(args: SweepNArgs) -> Result<()> {
    let config = SweepNConfig {
        sizes: parse_usize_list(&args.sizes, "size")?,
        realizations: args.realizations,
        draws_per_bin: args.draws_per_bin,
        master_seed: args.seed,
        grids: vec![GridKind::Equispaced, GridKind::Squared, GridKind::SquareRooted],
        calibrations: vec![
            CalibrationFunction::Perfect,
            CalibrationFunction::sine(0.1, 2)?,
        ],
    };
    let result = sweep_n(&config)?;
    emit_sweep(
        &result,
        args.csv.as_ref(),
        args.svg.as_ref(),
        "Calibration metrics vs sample size",
    )
}

fn sweep_to_csv(result: &SweepResult) -> String {
    let mut out = String::from("axis");
    for name in result.series.keys() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &axis) in result.axis.iter().enumerate() {
        out.push_str(&axis.to_string());
        for values in result.series.values() {
            out.push_str(&format!(",{:.16e}", values[i]));
        }
        out.push('\n');
    }
    out
}

fn emit_sweep(
    result: &SweepResult,
    csv: Option<&PathBuf>,
    svg: Option<&PathBuf>,
    title: &str,
) -> Result<()> {
    if let Some(path) = svg {
        let spec = PlotSpec::new(PlotKind::SweepLines, title);
        let doc = sweep_plot(result, &spec)?;
        write_atomic(path, doc.as_bytes())?;
    }
    let text = sweep_to_csv(result);
    match csv {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            if svg.is_none() {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn emit_report(doc: &ReportDocument, json: Option<&PathBuf>) -> Result<()> {
    let text = doc.to_json();
    if let Some(path) = json {
        write_atomic(path, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

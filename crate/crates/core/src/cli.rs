//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | internal invariant failure |
//! | 2 | usage error or invalid argument |
//! | 3 | input parse, I/O or index error |
//! | 4 | detection query not classified `WITH` |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchConfig};
use crate::detect::{build_detection_dataset, detect_segment};
use crate::dtw::DtwConfig;
use crate::error::{Error, Result};
use crate::io::{
    format_relevance, load_annotations, load_dataset, load_series, match_annotations,
    write_dataset, write_relevance, DatasetFormat,
};
use crate::knn::{classify, BoundProvider};
use crate::relevance::{compute_relevance, RelevanceConfig};
use crate::search::{find_min_deletion, Optimizations};
use crate::series::{LabeledDataset, TimeSeries};

#[derive(Debug, Parser)]
#[command(name = "dtw-explain", version, about = "Explain 1-NN DTW classifications")]
pub struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "DTW_EXPLAIN_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a query by k-NN under DTW.
    Classify(ProblemArgs),
    /// Find the shortest deletion that changes the predicted class.
    Explain(ExplainArgs),
    /// Per-point relevance of a query.
    Relevance(RelevanceArgs),
    /// Build a detection dataset or locate a segment.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Time every optimisation variant on synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ucr,
    Csv,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    /// 1-based position of the query within the query file.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub query_index: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Sakoe-Chiba band half-width.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Ucr)]
    pub format: Format,
    /// Label side file for `--format csv`, one label per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Disable every optimisation.
    #[arg(long, conflicts_with = "unsound_bounds")]
    pub naive: bool,
    /// Enable the heuristic triangle bound; flips are re-verified.
    #[arg(long)]
    pub unsound_bounds: bool,
}

#[derive(Debug, Args)]
pub struct RelevanceArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_len: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG next to `--out`.
    #[arg(long, requires = "out")]
    pub svg: bool,
    #[arg(long)]
    pub unsound_bounds: bool,
}

#[derive(Debug, Subcommand)]
pub enum DetectCommand {
    /// Write a WITH/WITHOUT dataset from annotated series.
    Build(DetectBuildArgs),
    /// Locate the segment in a query.
    Run(DetectRunArgs),
}

#[derive(Debug, Args)]
pub struct DetectBuildArgs {
    /// `series_id,start,end` lines.
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Ucr)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectRunArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub query_index: u64,
    #[arg(long, value_enum, default_value_t = Format::Ucr)]
    pub query_format: Format,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    #[arg(long, default_value_t = crate::detect::DEFAULT_THRESHOLD_MULTIPLIER)]
    pub threshold_mult: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 100, 500])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [20usize, 40, 60, 80])]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invariant(_) => 1,
        Error::Argument(_) | Error::MemoryBudgetExceeded { .. } => 2,
        Error::Parse { .. } | Error::EmptyDataset(_) | Error::Io { .. } | Error::Index(_) => 3,
        Error::WrongClass { .. } => 4,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t as usize);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let (report, result) = pool.install(|| {
        let mut buf = Vec::new();
        let r = execute(&cli.command, &mut buf);
        (buf, r)
    });
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(&report).and_then(|_| stdout.flush()) {
        eprintln!("error: <stdout>: {e}");
        return 3;
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Explain(a) => cmd_explain(a, out),
        Command::Relevance(a) => cmd_relevance(a, out),
        Command::Detect(DetectCommand::Build(a)) => cmd_detect_build(a, out),
        Command::Detect(DetectCommand::Run(a)) => cmd_detect_run(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn format_of(format: Format, labels: Option<&Path>) -> Result<DatasetFormat> {
    match (format, labels) {
        (Format::Ucr, None) => Ok(DatasetFormat::Ucr),
        (Format::Ucr, Some(_)) => Err(Error::Argument(
            "--labels only applies to --format csv".into(),
        )),
        (Format::Csv, Some(l)) => Ok(DatasetFormat::Csv {
            labels: Some(l.to_path_buf()),
        }),
        (Format::Csv, None) => Err(Error::Argument(
            "--format csv needs --labels for the dataset".into(),
        )),
    }
}

/// Query files are never required to carry a label side file.
fn query_format(format: Format) -> DatasetFormat {
    match format {
        Format::Ucr => DatasetFormat::Ucr,
        Format::Csv => DatasetFormat::Csv { labels: None },
    }
}

fn pick_query(path: &Path, format: Format, index: u64) -> Result<TimeSeries> {
    let series = load_series(path, &query_format(format))?;
    let count = series.len();
    series.into_iter().nth(index as usize - 1).ok_or_else(|| {
        Error::Argument(format!(
            "--query-index {index} but {} holds {count} series",
            path.display()
        ))
    })
}

fn dtw_config(window: Option<usize>) -> DtwConfig {
    match window {
        Some(w) => DtwConfig::with_window(w),
        None => DtwConfig::unconstrained(),
    }
}

fn load_problem(a: &ProblemArgs) -> Result<(LabeledDataset, TimeSeries)> {
    let format = format_of(a.format, a.labels.as_deref())?;
    let dataset = load_dataset(&a.dataset, &format)?;
    let query = pick_query(&a.query, a.format, a.query_index)?;
    Ok((dataset, query))
}

fn cmd_classify(a: &ProblemArgs, out: &mut dyn Write) -> Result<()> {
    let (dataset, query) = load_problem(a)?;
    let c = classify(
        &dataset,
        &query,
        a.k as usize,
        dtw_config(a.window),
        &BoundProvider::sound(),
        false,
    )?;
    writeln!(out, "label={}", c.label).map_err(stdout_err)?;
    for n in &c.neighbors {
        writeln!(
            out,
            "neighbor index={} label={} distance={}",
            n.index + 1,
            n.label,
            n.distance
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn cmd_explain(a: &ExplainArgs, out: &mut dyn Write) -> Result<()> {
    let (dataset, query) = load_problem(&a.problem)?;
    let opts = if a.naive {
        Optimizations::naive()
    } else if a.unsound_bounds {
        Optimizations::default().with_unsound_triangle()
    } else {
        Optimizations::default()
    };
    let r = find_min_deletion(
        &dataset,
        &query,
        a.problem.k as usize,
        dtw_config(a.problem.window),
        opts,
    )?;
    writeln!(out, "{}", r.outcome).map_err(stdout_err)?;
    writeln!(out, "stats {}", r.stats).map_err(stdout_err)?;
    Ok(())
}

fn cmd_relevance(a: &RelevanceArgs, out: &mut dyn Write) -> Result<()> {
    let (dataset, query) = load_problem(&a.problem)?;
    let mut rcfg = RelevanceConfig::default().with_stride(a.stride as usize);
    if let Some(m) = a.max_len {
        rcfg = rcfg.with_max_length(m as usize);
    }
    rcfg.sound_bounds_only = !a.unsound_bounds;
    let rv = compute_relevance(
        &dataset,
        &query,
        a.problem.k as usize,
        dtw_config(a.problem.window),
        rcfg,
    )?;
    match &a.out {
        Some(path) => {
            write_relevance(path, &query, &rv, a.svg)?;
            writeln!(out, "wrote {} flips={} argmax={}", path.display(), rv.flips, rv.argmax())
                .map_err(stdout_err)?;
        }
        None => out
            .write_all(format_relevance(&query, &rv)?.as_bytes())
            .map_err(stdout_err)?,
    }
    Ok(())
}

fn cmd_detect_build(a: &DetectBuildArgs, out: &mut dyn Write) -> Result<()> {
    let annotations = load_annotations(&a.annotations)?;
    let series = load_series(&a.series, &query_format(a.format))?;
    let pairs = match_annotations(&series, &annotations)?;
    let dataset = build_detection_dataset(&pairs)?;
    write_dataset(&a.out, &dataset)?;
    writeln!(out, "wrote {} instances={}", a.out.display(), dataset.len()).map_err(stdout_err)?;
    Ok(())
}

fn cmd_detect_run(a: &DetectRunArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&a.dataset, &DatasetFormat::Ucr)?;
    let query = pick_query(&a.query, a.query_format, a.query_index)?;
    let rcfg = RelevanceConfig::default().with_stride(a.stride as usize);
    let r = detect_segment(&dataset, &query, dtw_config(a.window), rcfg, a.threshold_mult)?;
    match r.segment {
        Some((s, e)) => writeln!(out, "SEGMENT start={s} end={e}"),
        None => writeln!(out, "ABSENT"),
    }
    .map_err(stdout_err)
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        lengths: a.lengths.clone(),
        seed: a.seed,
        relevance: RelevanceConfig::default().with_stride(a.stride as usize),
        ..BenchConfig::default()
    };
    let report = run_bench(&cfg)?;
    match &a.out {
        Some(path) => {
            report.write(path)?;
            writeln!(out, "wrote {} rows={}", path.display(), report.rows.len())
                .map_err(stdout_err)?;
        }
        None => out
            .write_all(report.to_csv().as_bytes())
            .map_err(stdout_err)?,
    }
    Ok(())
}

//! The `multibench` command line.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use multibench_core::coding_time::{coding_time_from_log, cumulative_coding_time, CommitEvent};
use multibench_core::stats::Metric;
use multibench_core::{KernelParams, Problem, StrategyKind};

use crate::analysis::{analyze_fixture, analyze_measurements, parse_metric};
use crate::formats::{fmt_g17, read_commit_log, read_measurements, write_measurements};
use crate::report::write_report;
use crate::runner::{run_benchmark, BenchSpec};
use crate::validate::{validate, LibraryKernels, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "multibench", version, about = "Multicore benchmark campaigns and their statistical comparison")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time kernels and write measurements.csv.
    Run(RunArgs),
    /// Compute ratings, pairwise tests, ordering graphs and diffs.
    Analyze(AnalyzeArgs),
    /// Check every strategy against the sequential kernels.
    Validate(ValidateArgs),
    /// Extract coding times from a commit log.
    CodingTime(CodingTimeArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated problems.
    #[arg(long, value_delimiter = ',')]
    pub problem: Vec<Problem>,
    /// Comma-separated strategies.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<StrategyKind>,
    /// Comma-separated thread counts.
    #[arg(long, value_delimiter = ',')]
    pub threads: Vec<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Untimed runs before each thread count's timed runs.
    #[arg(long)]
    pub warmups: Option<usize>,
    /// Sets nrows, ncols and nelts.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub percent: Option<u32>,
    #[arg(long)]
    pub seed: Option<u32>,
    /// Minimum chunk length handed to one task.
    #[arg(long)]
    pub grain: Option<usize>,
    /// Synthesize inputs in memory instead of reading <input-dir>/<problem>.in.
    #[arg(long = "is_bench")]
    pub is_bench: bool,
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Measurement CSV files.
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    pub measurements: Vec<PathBuf>,
    /// Analyze the bundled dataset instead.
    #[arg(long)]
    pub fixture: bool,
    /// Restrict to one metric: loc, coding, exec or speedup.
    #[arg(long, value_parser = metric_arg)]
    pub metric: Option<Metric>,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
}

fn metric_arg(s: &str) -> Result<Metric, String> {
    parse_metric(s).ok_or_else(|| format!("unknown metric {s:?} (expected loc, coding, exec or speedup)"))
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Largest number of rows and columns drawn.
    #[arg(long, default_value_t = 200)]
    pub size: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<StrategyKind>,
    #[arg(long, value_delimiter = ',')]
    pub threads: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct CodingTimeArgs {
    /// Lines of `ISO8601-timestamp<TAB>language-problem-variant keyword`.
    pub log: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A complete campaign plan.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub problems: Vec<Problem>,
    pub strategies: Vec<StrategyKind>,
    pub thread_counts: Vec<usize>,
    pub reps: usize,
    pub warmups: usize,
    pub size: KernelParams,
    pub grain: Option<usize>,
    pub is_bench: bool,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            problems: Problem::ALL.to_vec(),
            strategies: StrategyKind::PARADIGMS.to_vec(),
            thread_counts: vec![1, 2, 4, 8],
            reps: 30,
            warmups: 2,
            size: KernelParams::default(),
            grain: None,
            is_bench: false,
            input_dir: PathBuf::from("."),
            output_dir: PathBuf::from("results"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{}line {line}: {message}", source_name.as_deref().map(|s| format!("{s}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub source_name: Option<String>,
    pub line: usize,
    pub message: String,
}

fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}"))).collect()
}

fn scalar<T: std::str::FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
}

impl CampaignConfig {
    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { source_name: None, line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            self.set(key, value).map_err(|m| err(format!("{key}: {m}")))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "problem" | "problems" => self.problems = list(v)?,
            "strategy" | "strategies" => self.strategies = list(v)?,
            "threads" => self.thread_counts = list(v)?,
            "reps" => self.reps = scalar(v)?,
            "warmups" => self.warmups = scalar(v)?,
            "size" => {
                let n = scalar(v)?;
                self.size.nrows = n;
                self.size.ncols = n;
                self.size.nelts = n;
            }
            "nrows" => self.size.nrows = scalar(v)?,
            "ncols" => self.size.ncols = scalar(v)?,
            "nelts" => self.size.nelts = scalar(v)?,
            "percent" => self.size.percent = scalar(v)?,
            "seed" => self.size.seed = scalar(v)?,
            "grain" => self.grain = if v.is_empty() { None } else { Some(scalar(v)?) },
            "is_bench" => self.is_bench = scalar(v)?,
            "input_dir" | "input-dir" => self.input_dir = v.into(),
            "out" => self.output_dir = v.into(),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Serializes every field so that `apply_text` restores this plan.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "problems = {}\nstrategies = {}\nthreads = {}\nreps = {}\nwarmups = {}\nnrows = {}\nncols = {}\nnelts = {}\n\
             percent = {}\nseed = {}\ngrain = {}\nis_bench = {}\ninput_dir = {}\nout = {}\n",
            join(self.problems.iter().map(|p| p.to_string()).collect()),
            join(self.strategies.iter().map(|s| s.to_string()).collect()),
            join(self.thread_counts.iter().map(|t| t.to_string()).collect()),
            self.reps,
            self.warmups,
            self.size.nrows,
            self.size.ncols,
            self.size.nelts,
            self.size.percent,
            self.size.seed,
            self.grain.map(|g| g.to_string()).unwrap_or_default(),
            self.is_bench,
            self.input_dir.display(),
            self.output_dir.display(),
        )
    }

    /// Defaults, then the config file, then flags.
    pub fn from_args(args: &RunArgs) -> Result<Self, ConfigError> {
        let mut c = CampaignConfig::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                source_name: Some(path.display().to_string()),
                line: 0,
                message: e.to_string(),
            })?;
            c.apply_text(&text).map_err(|e| ConfigError { source_name: Some(path.display().to_string()), ..e })?;
        }
        if !args.problem.is_empty() {
            c.problems = args.problem.clone();
        }
        if !args.strategy.is_empty() {
            c.strategies = args.strategy.clone();
        }
        if !args.threads.is_empty() {
            c.thread_counts = args.threads.clone();
        }
        if let Some(n) = args.size {
            c.size.nrows = n;
            c.size.ncols = n;
            c.size.nelts = n;
        }
        let s = &mut c.size;
        s.percent = args.percent.unwrap_or(s.percent);
        s.seed = args.seed.unwrap_or(s.seed);
        c.reps = args.reps.unwrap_or(c.reps);
        c.warmups = args.warmups.unwrap_or(c.warmups);
        c.grain = args.grain.or(c.grain);
        c.is_bench |= args.is_bench;
        if let Some(d) = &args.input_dir {
            c.input_dir = d.clone();
        }
        if let Some(d) = &args.out {
            c.output_dir = d.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError { source_name: None, line: 0, message: m });
        if self.problems.is_empty() || self.strategies.is_empty() {
            return err("at least one problem and one strategy are required".into());
        }
        for spec in self.specs() {
            if let Err(e) = spec.validate() {
                return err(e.to_string());
            }
        }
        Ok(())
    }

    /// One spec per (problem, strategy); the sequential strategy runs on one
    /// thread only.
    pub fn specs(&self) -> Vec<BenchSpec> {
        let mut out = Vec::new();
        for &problem in &self.problems {
            for &strategy in &self.strategies {
                let threads = if strategy == StrategyKind::Sequential { vec![1] } else { self.thread_counts.clone() };
                out.push(BenchSpec {
                    grain: self.grain,
                    reps: self.reps,
                    warmups: self.warmups,
                    size: self.size,
                    is_bench: self.is_bench,
                    input_dir: self.input_dir.clone(),
                    ..BenchSpec::new(problem, strategy, threads)
                });
            }
        }
        out
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `out` and diagnostics to `err`.
pub fn run_with(
    args: impl IntoIterator<Item = String>,
    out: &mut dyn std::io::Write,
    err: &mut dyn std::io::Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Analyze(a) => cmd_analyze(&a, out, err),
        Command::Validate(a) => cmd_validate(&a, out, err),
        Command::CodingTime(a) => cmd_coding_time(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILURE
        }
    }
}

pub fn main() -> i32 {
    run_with(std::env::args(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(args: &RunArgs, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<(), Failure> {
    let config = CampaignConfig::from_args(args).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut records = Vec::new();
    for spec in config.specs() {
        for w in spec.warnings() {
            let _ = writeln!(err, "warning: {w}");
        }
        let _ = writeln!(out, "{} / {} on {:?} threads", spec.problem, spec.strategy, spec.thread_counts);
        records.extend(run_benchmark(&spec).map_err(runtime)?);
    }
    let path = config.output_dir.join("measurements.csv");
    write_file(&path, &write_measurements(&records))?;
    write_file(&config.output_dir.join("campaign.conf"), &config.to_text())?;
    let _ = writeln!(out, "wrote {} records to {}", records.len(), path.display());
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> Result<(), Failure> {
    let analysis = if args.fixture {
        analyze_fixture(args.metric).map_err(runtime)?
    } else {
        let mut records = Vec::new();
        for path in &args.measurements {
            let text =
                std::fs::read_to_string(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
            records.extend(read_measurements(&text).map_err(|e| runtime(format!("{}: {e}", path.display())))?);
        }
        analyze_measurements(&records, args.metric).map_err(runtime)?
    };
    for w in &analysis.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let files = write_report(&analysis, &args.out).map_err(runtime)?;
    for set in &analysis.report.ratings {
        let line: Vec<String> = set.ratings.iter().map(|r| format!("{} {:.1}", r.paradigm, r.rating)).collect();
        let _ = writeln!(out, "{} ({}): {}", set.metric, set.variant, line.join(", "));
    }
    let _ = writeln!(out, "wrote {} files to {}", files.len(), args.out.display());
    Ok(())
}

fn cmd_validate(
    args: &ValidateArgs,
    out: &mut dyn std::io::Write,
    err: &mut dyn std::io::Write,
) -> Result<(), Failure> {
    let defaults = ValidateOptions::default();
    let opts = ValidateOptions {
        size: args.size,
        trials: args.trials,
        seed: args.seed,
        strategies: if args.strategy.is_empty() { defaults.strategies } else { args.strategy.clone() },
        thread_counts: if args.threads.is_empty() { defaults.thread_counts } else { args.threads.clone() },
    };
    if opts.size == 0 || opts.thread_counts.contains(&0) {
        return Err(Failure::Usage("size and thread counts must be at least 1".into()));
    }
    if opts.trials == 0 {
        let _ = writeln!(err, "warning: 0 trials requested; nothing was checked");
    }
    let summary = validate(&LibraryKernels, &opts).map_err(runtime)?;
    match summary.mismatch {
        None => {
            let _ = writeln!(out, "PASS: {} checks over {} trials", summary.checks, summary.trials);
            Ok(())
        }
        Some(m) => Err(runtime(format!("mismatch: {m}"))),
    }
}

fn cmd_coding_time(args: &CodingTimeArgs, out: &mut dyn std::io::Write) -> Result<(), Failure> {
    let log = &args.log;
    let text = std::fs::read_to_string(log).map_err(|e| runtime(format!("cannot read {}: {e}", log.display())))?;
    let csv = coding_time_csv(&text).map_err(|e| runtime(format!("{}: {e}", log.display())))?;
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => out.write_all(csv.as_bytes()).map_err(runtime),
    }
}

/// Raw and cumulative minutes per (language, problem, variant) stream.
pub fn coding_time_csv(log: &str) -> Result<String, crate::formats::FormatError> {
    let lined = read_commit_log(log)?;
    let events: Vec<CommitEvent> = lined.iter().map(|(_, e)| e.clone()).collect();
    let times = coding_time_from_log(&events)
        .map_err(|e| crate::formats::FormatError { line: lined[e.index].0, message: e.reason.clone() })?;
    let cumulative = cumulative_coding_time(&times);
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to a Vec cannot fail.
    let _ = w.write_record(["language", "problem", "variant", "raw_minutes", "cumulative_minutes"]);
    for t in &times {
        let cum = cumulative
            .iter()
            .find(|c| c.language == t.language && c.problem == t.problem)
            .and_then(|c| c.get(t.variant));
        let _ = w.write_record([
            t.language.as_str(),
            t.problem.name(),
            t.variant.name(),
            &fmt_g17(t.minutes),
            &cum.map(fmt_g17).unwrap_or_default(),
        ]);
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("UTF-8 fields"))
}

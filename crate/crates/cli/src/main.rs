use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use flower_core::bench::{evaluate_accuracy, generate_database, run_benchmark, BenchError, BenchSpec, Dependency, GroundTruth};
use flower_core::config::{load_config, AnalysisConfig, ConfigError, ConfigLayer};
use flower_core::erd::{export, render_context, select_context, DiagramFormat};
use flower_core::pipeline::{analyze, AnalyzeError};
use flower_core::report::{canonical_json, RunReport};
use flower_core::sampler::{run_sse_experiment, SamplerConfig, SamplingPolicy, ValueDistribution};
use flower_core::{Dialect, TableRef};

#[derive(Parser)]
#[command(name = "flower", version, about = "Find explicit and implicit foreign keys, draw ER diagrams, prune schema context")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover dependencies in a source and write the JSON report
    Analyze(AnalyzeArgs),
    /// Compare dynamic sampling against a fixed 30000-row reservoir
    SampleEval(SampleEvalArgs),
    /// Synthetic databases with known references
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Print the schema context around some tables
    Context(ContextArgs),
}

#[derive(Args, Clone)]
struct RunFlags {
    /// TOML file with any of the settings below (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dialect: Option<Dialect>,
    /// Columns up to this many rows are read whole
    #[arg(long)]
    rows_min: Option<u64>,
    /// Inclusion threshold in [0, 1]
    #[arg(long)]
    confidence: Option<f64>,
    /// Threshold step per shared synonym; also sizes the synonym budget
    #[arg(long)]
    confidence_coeff: Option<f64>,
    /// balance, or accuracy (4x rows_min, small tables read whole)
    #[arg(long)]
    mode: Option<flower_core::inference::Mode>,
    /// literal, calibrated, fixed:N or full
    #[arg(long)]
    policy: Option<SamplingPolicy>,
    /// Histogram bins for sampling diagnostics
    #[arg(long)]
    bins: Option<usize>,
    /// Language pack code
    #[arg(long)]
    lang: Option<String>,
    /// Directory with extra <code>.pack files
    #[arg(long)]
    pack_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also pair columns within one table
    #[arg(long)]
    same_table_pairs: bool,
    /// Do not treat unique columns as keys in tables without a primary key
    #[arg(long)]
    no_key_fallback: bool,
}

impl RunFlags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            dialect: self.dialect,
            confidence: self.confidence,
            confidence_coeff: self.confidence_coeff,
            mode: self.mode,
            rows_min: self.rows_min,
            policy: self.policy,
            histogram_bins: self.bins,
            language: self.lang.clone(),
            pack_dir: self.pack_dir.clone(),
            seed: self.seed,
            same_table_pairs: self.same_table_pairs.then_some(true),
            key_fallback: self.no_key_fallback.then_some(false),
        }
    }

    fn resolve(&self) -> Result<AnalysisConfig, Failure> {
        load_config(self.config.as_deref(), &self.layer()).map_err(Failure::config)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Directory of .sql/.csv files, or an SQLite database file
    #[arg(long)]
    source: String,
    #[command(flatten)]
    run: RunFlags,
    /// Report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagram path
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Diagram format; guessed from the diagram extension when absent
    #[arg(long)]
    format: Option<DiagramFormat>,
    /// Include per-stage wall-clock times in the report
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SampleEvalArgs {
    #[arg(long)]
    rows: u64,
    /// normal, uniform or zipf
    #[arg(long, default_value = "normal")]
    dist: ValueDistribution,
    #[arg(long, default_value = "literal")]
    policy: SamplingPolicy,
    #[arg(long, default_value_t = 10)]
    launches: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = flower_core::sampler::DEFAULT_ROWS_MIN)]
    rows_min: u64,
    #[arg(long, default_value_t = flower_core::sampler::DEFAULT_BINS)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write DDL, CSV and gt.json for a spec
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a run report against a ground truth
    Evaluate {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate, analyze and score in one go
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Where the generated files go
        #[arg(long)]
        work: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ContextArgs {
    #[arg(long)]
    source: String,
    /// schema.table; repeatable
    #[arg(long = "target", required = true)]
    targets: Vec<String>,
    #[arg(long, default_value_t = 1)]
    hops: usize,
    #[command(flatten)]
    run: RunFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error and the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(e: ConfigError) -> Self {
        let error = match &e {
            ConfigError::OutOfRange { key, value, expected } => {
                anyhow!("invalid value {value} for --{}: expected {expected}", key.replace('_', "-"))
            }
            _ => anyhow!(e),
        };
        Failure { code: 2, error }
    }

    fn source(e: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: e.into() }
    }

    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: e.into() }
    }
}

impl From<AnalyzeError> for Failure {
    fn from(e: AnalyzeError) -> Self {
        match e {
            AnalyzeError::Config(c) => Failure::config(c),
            other => Failure::source(other),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Analyze(a) => a.into(),
            BenchError::Spec(_) | BenchError::Sampler(_) => Failure::usage(e),
            other => Failure::source(other),
        }
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display())).map_err(Failure::source)?;
            }
            fs::write(p, text).with_context(|| format!("cannot write {}", p.display())).map_err(Failure::source)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn guess_format(path: &Path) -> DiagramFormat {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("mmd" | "mermaid" | "md") => DiagramFormat::Mermaid,
        Some("json") => DiagramFormat::Json,
        _ => DiagramFormat::Dot,
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let config = args.run.resolve()?;
    let analysis = analyze(&args.source, &config)?;
    let report = RunReport::from_analysis(&analysis, args.timings);
    write_or_print(args.out.as_deref(), &report.to_canonical_json())?;
    if let Some(path) = &args.diagram {
        let format = args.format.unwrap_or_else(|| guess_format(path));
        write_or_print(Some(path), &export(&analysis.graph, format))?;
    }
    for w in &analysis.warnings {
        eprintln!("warning: {}: {}", w.entity, w.message);
    }
    Ok(())
}

fn cmd_sample_eval(args: SampleEvalArgs) -> Result<(), Failure> {
    let config = SamplerConfig { rows_min: args.rows_min, policy: args.policy, seed: args.seed, histogram_bins: args.bins };
    let report = run_sse_experiment(args.dist, args.rows, &config, args.launches).map_err(Failure::usage)?;
    let mut value = serde_json::to_value(&report).map_err(Failure::source)?;
    value["version"] = serde_json::json!(flower_core::report::REPORT_VERSION);
    write_or_print(args.out.as_deref(), &canonical_json(&value))
}

fn read_spec(path: &Path) -> Result<BenchSpec, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::source)?;
    let spec: BenchSpec =
        serde_json::from_str(&text).with_context(|| format!("invalid bench spec {}", path.display())).map_err(Failure::usage)?;
    spec.validate()?;
    Ok(spec)
}

fn cmd_bench(cmd: BenchCommand) -> Result<(), Failure> {
    match cmd {
        BenchCommand::Generate { spec, out } => {
            let spec = read_spec(&spec)?;
            let db = generate_database(&spec, &out)?;
            eprintln!(
                "wrote {} files to {} ({} planted references)",
                db.files.len(),
                out.display(),
                db.ground_truth.dependencies.len()
            );
            Ok(())
        }
        BenchCommand::Evaluate { run, gt, out } => {
            let text = fs::read_to_string(&run).with_context(|| format!("cannot read {}", run.display())).map_err(Failure::source)?;
            let report = RunReport::from_json(&text).with_context(|| format!("invalid run report {}", run.display())).map_err(Failure::usage)?;
            let truth = GroundTruth::load(&gt)?;
            let predicted: Vec<Dependency> = report.implicit.iter().map(Dependency::from).collect();
            let evaluation = evaluate_accuracy(&predicted, &truth);
            let mut value = serde_json::to_value(&evaluation).map_err(Failure::source)?;
            value["version"] = serde_json::json!(flower_core::report::REPORT_VERSION);
            write_or_print(out.as_deref(), &canonical_json(&value))
        }
        BenchCommand::Run { spec, work, run, out } => {
            let spec = read_spec(&spec)?;
            let config = run.resolve()?;
            let result = run_benchmark(&spec, &config, &work)?;
            write_or_print(out.as_deref(), &result.to_canonical_json())
        }
    }
}

fn cmd_context(args: ContextArgs) -> Result<(), Failure> {
    let config = args.run.resolve()?;
    let analysis = analyze(&args.source, &config)?;
    let schema = config.dialect.default_schema();
    let targets = args
        .targets
        .iter()
        .map(|t| TableRef::parse(t, schema).map_err(|e| Failure::usage(anyhow!("--target {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let selection = select_context(&analysis.graph, &targets, args.hops).map_err(Failure::usage)?;
    let full = render_context(&analysis.graph, &analysis.graph.tables());
    eprintln!(
        "context: {} tables, {} characters (full schema: {} characters)",
        selection.tables.len(),
        selection.size,
        full.chars().count()
    );
    write_or_print(args.out.as_deref(), &selection.text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::SampleEval(args) => cmd_sample_eval(args),
        Command::Bench(cmd) => cmd_bench(cmd),
        Command::Context(args) => cmd_context(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

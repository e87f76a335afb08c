use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use langscape::pipeline::{self, Overrides, PipelineConfig, PipelineError};
use langscape::scoring::CompositeMode;

#[derive(Parser)]
#[command(
    name = "langscape",
    version,
    about = "Language vitality and digitality measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identify the language of WET documents and write web.json
    Count(Common),
    /// Join inputs, score both dimensions, and write the census
    Score(Common),
    /// Fit the Invisible-Giant regression and token-share correlations
    Analyze(Common),
    /// Write the scatter plot and the GeoJSON map
    Report(Common),
    /// Run count (if WET inputs are configured), score, analyze, report
    Pipeline(Common),
    /// Train a language-ID model from `langid_corpus` into `langid_model`
    Train(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for counting WET shards
    #[arg(long)]
    threads: Option<usize>,
    /// Minimum language-ID confidence; lower-scoring documents count as `und`
    #[arg(long)]
    min_confidence: Option<f64>,
    /// gmm_rank or feature_mean
    #[arg(long, value_parser = parse_mode)]
    composite: Option<CompositeMode>,
}

fn parse_mode(s: &str) -> Result<CompositeMode, String> {
    s.parse()
}

fn load(c: &Common) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = pipeline::load_config(&c.config)?;
    cfg.apply(&Overrides {
        out: c.out.clone(),
        threads: c.threads,
        min_confidence: c.min_confidence,
        composite: c.composite,
    });
    Ok(cfg)
}

fn warn(lines: &[String]) {
    for w in lines {
        eprintln!("warning: {w}");
    }
}

fn print_count(s: &pipeline::CountSummary) {
    warn(&s.warnings);
    println!(
        "count: {} documents from {} shard(s) in {:.3} s ({:.0} docs/sec) -> {}",
        s.documents,
        s.shards,
        s.seconds,
        s.docs_per_second(),
        s.output.display()
    );
}

fn print_score(s: &pipeline::ScoreSummary) {
    warn(&s.warnings);
    let c = &s.census.counts;
    println!(
        "score: {} languages; stronghold {} / digital_echo {} / fading_voice {} / invisible_giant {}",
        s.languages, c.stronghold, c.digital_echo, c.fading_voice, c.invisible_giant
    );
}

fn print_analyze(s: &pipeline::AnalyzeSummary) {
    warn(&s.warnings);
    let r = &s.regression;
    println!(
        "analyze: logistic n={} converged={} iterations={}",
        r.n, r.converged, r.iterations
    );
    for (corpus, c) in &s.correlations {
        println!(
            "analyze: {corpus} spearman {:+.4} pearson {:+.4}",
            c.spearman, c.pearson
        );
    }
}

fn print_report(s: &pipeline::ReportSummary) {
    println!(
        "report: {} scatter points, {} map features",
        s.points, s.map_features
    );
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Count(c) => print_count(&pipeline::cmd_count(&load(&c)?)?),
        Command::Score(c) => print_score(&pipeline::cmd_score(&load(&c)?)?),
        Command::Analyze(c) => print_analyze(&pipeline::cmd_analyze(&load(&c)?)?),
        Command::Report(c) => print_report(&pipeline::cmd_report(&load(&c)?)?),
        Command::Train(c) => {
            let t = pipeline::cmd_train(&load(&c)?)?;
            println!(
                "train: {} languages from {} documents -> {}",
                t.languages,
                t.documents,
                t.output.display()
            );
        }
        Command::Pipeline(c) => {
            let cfg = load(&c)?;
            let s = pipeline::cmd_pipeline(&cfg)?;
            match &s.count {
                Some(count) => print_count(count),
                None => println!("count: skipped (no wet_dir configured)"),
            }
            print_score(&s.score);
            print_analyze(&s.analyze);
            print_report(&s.report);
            println!("outputs in {}", cfg.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::config::{ConfigError, PipelineConfig};
use crate::classify::{census, ClassifyError, QuadrantCensus};
use crate::ingest::{
    assemble, load_count_json, load_vitality_csv, parse_count_json, CountSource, CountTable,
    FileDigest, IngestError, LanguageSet, RowError,
};
use crate::langid::{self, LangIdError};
use crate::model::{LanguageId, Quadrant, ScoreVector};
use crate::report::{geojson, scatter_svg, ReportError, ReportRow};
use crate::scoring::{score_all, CompositeMode, ScoringError, ScoringOptions};
use crate::stats::{
    build_design, fit_logistic, pearson, spearman, token_share, LogisticConfig, RegressionReport,
    StatsError,
};

pub const SCORES_FILE: &str = "scores.csv";
pub const CENSUS_FILE: &str = "census.json";
pub const SENSITIVITY_FILE: &str = "sensitivity.json";
pub const ORPHANS_FILE: &str = "orphans.json";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const REGRESSION_FILE: &str = "regression.json";
pub const CORRELATIONS_FILE: &str = "correlations.json";
pub const SCATTER_FILE: &str = "scatter.svg";
pub const MAP_FILE: &str = "map.geojson";
pub const WEB_COUNTS_FILE: &str = "web.json";

/// Decimal places kept for scores written to disk. Classification runs on
/// the rounded values so every downstream reader sees the same labels.
pub const SCORE_DECIMALS: i32 = 6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{origin}: {} invalid row(s)\n{}", .rows.len(), join_rows(.rows))]
    InvalidRows { origin: String, rows: Vec<RowError> },
    #[error(transparent)]
    LangId(#[from] LangIdError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Schema { path: PathBuf, detail: String },
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(|r| format!("  {r}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl PipelineError {
    /// 2 for bad or missing input, 1 for failures while processing valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::Ingest(_)
            | PipelineError::InvalidRows { .. }
            | PipelineError::Report(_)
            | PipelineError::Schema { .. }
            | PipelineError::Classify(ClassifyError::TooFewLanguages(_))
            | PipelineError::Scoring(ScoringError::EmptySet | ScoringError::TooFewSamples { .. }) => {
                2
            }
            PipelineError::Stats(e) => match e {
                StatsError::MissingLabel(_)
                | StatsError::TooFewSamples { .. }
                | StatsError::AllZero(_) => 2,
                _ => 1,
            },
            PipelineError::LangId(e) => match e {
                LangIdError::InvalidThreshold(_)
                | LangIdError::MalformedModel(_)
                | LangIdError::MalformedCorpus { .. }
                | LangIdError::InsufficientText(_)
                | LangIdError::DuplicateLanguageLabel(_)
                | LangIdError::EmptyModel => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_output(
    cfg: &PipelineConfig,
    name: &str,
    contents: &str,
) -> Result<PathBuf, PipelineError> {
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let path = cfg.out.join(name);
    fs::write(&path, contents).map_err(io_err(&path))?;
    Ok(path)
}

fn read_input(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(io_err(path))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

#[derive(Debug, Clone)]
pub struct CountSummary {
    pub table: CountTable,
    pub documents: u64,
    pub shards: usize,
    pub seconds: f64,
    pub output: PathBuf,
    pub warnings: Vec<String>,
}

impl CountSummary {
    pub fn docs_per_second(&self) -> f64 {
        if self.seconds > 0.0 {
            self.documents as f64 / self.seconds
        } else {
            0.0
        }
    }
}

/// WET shards (`*.wet`, `*.wet.gz`) directly inside the configured directories.
pub fn list_wet_files(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = Vec::new();
    for dir in &cfg.wet_dirs {
        if !dir.is_dir() {
            return Err(ConfigError::MissingPath {
                key: "wet_dir".into(),
                path: dir.clone(),
            }
            .into());
        }
        let mut here: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io_err(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                let name = p
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                p.is_file() && (name.ends_with(".wet") || name.ends_with(".wet.gz"))
            })
            .collect();
        here.sort();
        files.extend(here);
    }
    Ok(files)
}

/// Identifies the language of every WET document and writes `web.json`.
pub fn cmd_count(cfg: &PipelineConfig) -> Result<CountSummary, PipelineError> {
    let model = langid::LangIdModel::load(cfg.require_model()?)?;
    if cfg.wet_dirs.is_empty() {
        return Err(ConfigError::MissingKey("wet_dir").into());
    }
    let files = list_wet_files(cfg)?;
    let mut warnings = Vec::new();
    if files.is_empty() {
        warnings.push("no WET files found; writing an empty web count table".to_string());
    }
    let start = Instant::now();
    let shards = langid::count_files(&model, &files, cfg.min_confidence, cfg.threads())?;
    let seconds = start.elapsed().as_secs_f64();
    let output = write_output(cfg, WEB_COUNTS_FILE, &(shards.table.to_json() + "\n"))?;
    Ok(CountSummary {
        documents: shards.documents,
        shards: shards.shards,
        table: shards.table,
        seconds,
        output,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub languages: usize,
    pub documents: usize,
    pub output: PathBuf,
}

/// Builds a language-ID model from the labeled corpus and saves it to
/// `langid_model`.
pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainSummary, PipelineError> {
    let corpus = cfg.require_corpus()?;
    let output = cfg
        .langid_model
        .clone()
        .ok_or(ConfigError::MissingKey("langid_model"))?;
    let file = fs::File::open(corpus).map_err(io_err(corpus))?;
    let pairs = langid::read_labeled_tsv(std::io::BufReader::new(file))?;
    let documents = pairs.len();
    let model = langid::train_profiles(&langid::group_corpus(pairs))?;
    if let Some(dir) = output.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    model.save(&output).map_err(io_err(&output))?;
    Ok(TrainSummary {
        languages: model.profiles().len(),
        documents,
        output,
    })
}

fn digest(cfg: &PipelineConfig, path: &Path) -> Result<FileDigest, PipelineError> {
    Ok(FileDigest::of_bytes(
        &cfg.display_path(path),
        &read_input(path)?,
    ))
}

fn load_languages(cfg: &PipelineConfig) -> Result<(LanguageSet, FileDigest), PipelineError> {
    let path = cfg.require_vitality()?;
    let load = load_vitality_csv(path)?;
    if !load.row_errors.is_empty() {
        return Err(PipelineError::InvalidRows {
            origin: cfg.display_path(path),
            rows: load.row_errors,
        });
    }
    Ok((load.set, digest(cfg, path)?))
}

/// Row of `scores.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub iso639_3: LanguageId,
    pub name: String,
    pub vitality_norm: f64,
    pub digitality_norm: f64,
    pub representation: f64,
    pub category: Quadrant,
}

fn round_score(x: f64) -> f64 {
    let scale = 10f64.powi(SCORE_DECIMALS);
    (x * scale).round() / scale
}

fn fixed(x: f64) -> String {
    let s = format!("{:.*}", SCORE_DECIMALS as usize, x);
    // never write "-0.000000"
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn rounded(scores: &[ScoreVector<f64>]) -> Vec<ScoreVector<f64>> {
    scores
        .iter()
        .map(|s| {
            ScoreVector::new(
                s.id,
                round_score(s.vitality_norm),
                round_score(s.digitality_norm),
            )
        })
        .collect()
}

fn scores_csv(set: &LanguageSet, scores: &[ScoreVector<f64>], c: &QuadrantCensus<f64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "iso639_3",
        "name",
        "vitality_norm",
        "digitality_norm",
        "representation",
        "category",
    ])
    .expect("in-memory write");
    for (s, (_, label)) in scores.iter().zip(&c.assignments) {
        w.write_record([
            s.id.as_str(),
            &set.records[&s.id].name,
            &fixed(s.vitality_norm),
            &fixed(s.digitality_norm),
            &fixed(s.representation),
            label.as_str(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone)]
pub struct ScoreSummary {
    pub languages: usize,
    pub census: QuadrantCensus<f64>,
    pub alternate: QuadrantCensus<f64>,
    pub orphans: usize,
    pub undetermined_web: u64,
    pub warnings: Vec<String>,
}

/// Joins vitality and count inputs, scores both dimensions, classifies, and
/// writes scores, census, sensitivity, orphan, and provenance files.
pub fn cmd_score(cfg: &PipelineConfig) -> Result<ScoreSummary, PipelineError> {
    let (languages, vitality_digest) = load_languages(cfg)?;
    let mut provenance = vec![vitality_digest];
    let mut tables = Vec::new();
    for source in CountSource::ALL {
        if let Some(path) = cfg.counts.get(&source) {
            tables.push(load_count_json(path, source)?);
            provenance.push(digest(cfg, path)?);
        }
    }
    let assembled = assemble(&languages, &tables)?;
    let set = &assembled.set;

    let alt_mode = match cfg.composite {
        CompositeMode::GmmRank => CompositeMode::FeatureMean,
        CompositeMode::FeatureMean => CompositeMode::GmmRank,
    };
    let primary = score_all(
        set,
        &ScoringOptions {
            mode: cfg.composite,
            ..ScoringOptions::default()
        },
    )?;
    let alternate = score_all(
        set,
        &ScoringOptions {
            mode: alt_mode,
            ..ScoringOptions::default()
        },
    )?;
    let scores = rounded(&primary.scores);
    let alt_scores = rounded(&alternate.scores);
    let main_census = census(&scores)?;
    let alt_census = census(&alt_scores)?;

    let mut warnings = Vec::new();
    for (name, fit) in [
        ("vitality", &primary.vitality),
        ("digitality", &primary.digitality),
    ] {
        if cfg.composite == CompositeMode::GmmRank && !fit.model.converged {
            warnings.push(format!(
                "{name} mixture stopped after {} iterations without meeting the tolerance",
                fit.model.iterations
            ));
        }
    }
    if !assembled.orphans.is_empty() {
        warnings.push(format!(
            "{} count entries have codes outside the vitality set (see {ORPHANS_FILE})",
            assembled.orphans.len()
        ));
    }

    write_output(cfg, SCORES_FILE, &scores_csv(set, &scores, &main_census))?;
    write_output(cfg, CENSUS_FILE, &(main_census.to_json() + "\n"))?;

    let changed: Vec<_> = main_census
        .assignments
        .iter()
        .zip(&alt_census.assignments)
        .filter(|(a, b)| a.1 != b.1)
        .map(|(a, b)| json!({"iso639_3": a.0, cfg.composite.as_str(): a.1, alt_mode.as_str(): b.1}))
        .collect();
    let rep = |s: &[ScoreVector<f64>]| s.iter().map(|v| v.representation).collect::<Vec<_>>();
    let sensitivity = json!({
        "primary": cfg.composite.as_str(),
        "modes": {
            cfg.composite.as_str(): {"medians": main_census.medians, "counts": main_census.counts},
            alt_mode.as_str(): {"medians": alt_census.medians, "counts": alt_census.counts},
        },
        "label_agreement": 1.0 - changed.len() as f64 / scores.len() as f64,
        "representation_spearman": spearman(&rep(&scores), &rep(&alt_scores)).ok(),
        "changed_labels": changed,
    });
    write_output(cfg, SENSITIVITY_FILE, &pretty(&sensitivity))?;
    write_output(cfg, ORPHANS_FILE, &pretty(&assembled.orphans))?;
    let prov = json!({
        "inputs": provenance,
        "composite": cfg.composite.as_str(),
        "score_decimals": SCORE_DECIMALS,
        "undetermined_web_documents": assembled.undetermined_web,
    });
    write_output(cfg, PROVENANCE_FILE, &pretty(&prov))?;

    Ok(ScoreSummary {
        languages: set.len(),
        census: main_census,
        alternate: alt_census,
        orphans: assembled.orphans.len(),
        undetermined_web: assembled.undetermined_web,
        warnings,
    })
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>, PipelineError> {
    let bytes = read_input(path)?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<Result<Vec<ScoreRow>, _>>()
        .map_err(|e| PipelineError::Schema {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
}

fn read_medians(path: &Path) -> Result<(f64, f64), PipelineError> {
    let bytes = read_input(path)?;
    let schema = |detail: &str| PipelineError::Schema {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let v: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| schema(&e.to_string()))?;
    let get = |k: &str| {
        v["medians"][k]
            .as_f64()
            .ok_or_else(|| schema(&format!("missing medians.{k}")))
    };
    Ok((get("vitality")?, get("digitality")?))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusCorrelation {
    pub n: usize,
    pub total_tokens: u64,
    pub spearman: f64,
    pub pearson: f64,
    /// Codes in the token file that are not scored languages.
    pub unmatched_codes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeSummary {
    pub regression: RegressionReport,
    pub correlations: BTreeMap<String, CorpusCorrelation>,
    pub warnings: Vec<String>,
}

/// Token counts for one corpus; the undetermined bucket is dropped.
fn load_tokens(path: &Path) -> Result<BTreeMap<LanguageId, u64>, PipelineError> {
    let table = parse_count_json(
        &read_input(path)?,
        CountSource::Web,
        &path.display().to_string(),
    )?;
    Ok(table
        .counts
        .into_iter()
        .filter(|(k, _)| !k.is_undetermined())
        .collect())
}

/// Logistic regression of Invisible-Giant status on the covariates, plus
/// token-share correlations with vitality for each configured corpus.
pub fn cmd_analyze(cfg: &PipelineConfig) -> Result<AnalyzeSummary, PipelineError> {
    let rows = read_scores(&cfg.out.join(SCORES_FILE))?;
    let (languages, _) = load_languages(cfg)?;
    let scored: BTreeMap<LanguageId, &ScoreRow> = rows.iter().map(|r| (r.iso639_3, r)).collect();
    let set = LanguageSet::from_records(
        languages
            .iter()
            .filter(|r| scored.contains_key(&r.id))
            .cloned(),
    );
    let labels: BTreeMap<LanguageId, bool> = scored
        .iter()
        .map(|(id, r)| (*id, r.category == Quadrant::InvisibleGiant))
        .collect();
    let (x, y) = build_design::<f64>(&set, &labels)?;
    if let Some(id) = scored.keys().find(|id| !set.records.contains_key(id)) {
        return Err(StatsError::MissingLabel(*id).into());
    }
    let fit = fit_logistic(&x, &y, &LogisticConfig::default())?;
    let mut warnings = fit.warnings.clone();
    let regression = RegressionReport::new("invisible_giant", &fit, &y);
    let report = json!({"regression": regression, "encoding": x.encoding});
    write_output(cfg, REGRESSION_FILE, &pretty(&report))?;

    let mut correlations = BTreeMap::new();
    if cfg.tokens.is_empty() {
        warnings.push("no token-count corpora configured; correlations are empty".into());
    }
    let vitality: Vec<f64> = rows.iter().map(|r| r.vitality_norm).collect();
    for (corpus, path) in &cfg.tokens {
        let tokens = load_tokens(path)?;
        let counts: BTreeMap<LanguageId, u64> = rows
            .iter()
            .map(|r| (r.iso639_3, tokens.get(&r.iso639_3).copied().unwrap_or(0)))
            .collect();
        let table = token_share::<f64>(corpus, &counts)?;
        let shares: Vec<f64> = rows.iter().map(|r| table.shares[&r.iso639_3]).collect();
        correlations.insert(
            corpus.clone(),
            CorpusCorrelation {
                n: rows.len(),
                total_tokens: table.total,
                spearman: spearman(&shares, &vitality)?,
                pearson: pearson(&shares, &vitality)?,
                unmatched_codes: tokens
                    .keys()
                    .filter(|k| !scored.contains_key(k))
                    .map(|k| k.to_string())
                    .collect(),
            },
        );
    }
    let doc = json!({
        "against": "vitality_norm",
        "primary": "spearman",
        "corpora": correlations,
    });
    write_output(cfg, CORRELATIONS_FILE, &pretty(&doc))?;
    Ok(AnalyzeSummary {
        regression,
        correlations,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub points: usize,
    pub map_features: usize,
}

/// Writes the scatter plot, then the map. A language without coordinates
/// fails the map only; the scatter is already on disk by then.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<ReportSummary, PipelineError> {
    let scores = read_scores(&cfg.out.join(SCORES_FILE))?;
    let (vm, dm) = read_medians(&cfg.out.join(CENSUS_FILE))?;
    let (languages, _) = load_languages(cfg)?;
    let rows: Vec<ReportRow> = scores
        .iter()
        .map(|s| ReportRow {
            id: s.iso639_3,
            name: s.name.clone(),
            vitality_norm: s.vitality_norm,
            digitality_norm: s.digitality_norm,
            representation: s.representation,
            category: s.category,
            location: languages
                .records
                .get(&s.iso639_3)
                .and_then(|r| r.covariates.location),
        })
        .collect();
    write_output(cfg, SCATTER_FILE, &scatter_svg(&rows, vm, dm))?;
    write_output(cfg, MAP_FILE, &geojson(&rows)?)?;
    Ok(ReportSummary {
        points: rows.len(),
        map_features: rows.len(),
    })
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub count: Option<CountSummary>,
    pub score: ScoreSummary,
    pub analyze: AnalyzeSummary,
    pub report: ReportSummary,
}

/// `count` (when WET directories are configured), then `score`, `analyze`,
/// and `report`. Freshly counted web documents replace `counts.web`.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary, PipelineError> {
    let mut cfg = cfg.clone();
    let count = if cfg.wet_dirs.is_empty() {
        None
    } else {
        let c = cmd_count(&cfg)?;
        cfg.counts.insert(CountSource::Web, c.output.clone());
        Some(c)
    };
    let score = cmd_score(&cfg)?;
    let analyze = cmd_analyze(&cfg)?;
    let report = cmd_report(&cfg)?;
    Ok(PipelineSummary {
        count,
        score,
        analyze,
        report,
    })
}

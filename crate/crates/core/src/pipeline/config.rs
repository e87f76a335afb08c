//! `key = value` configuration file, one setting per line, `#` comments.
//! Relative paths resolve against the directory holding the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ingest::CountSource;
use crate::langid::DEFAULT_MIN_CONFIDENCE;
use crate::scoring::CompositeMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {detail}")]
    InvalidValue { key: String, detail: String },
    #[error("`{0}` is required for this command")]
    MissingKey(&'static str),
    #[error("`{key}` points to {path}, which does not exist")]
    MissingPath { key: String, path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Directory relative paths were resolved against.
    pub base_dir: PathBuf,
    pub vitality: Option<PathBuf>,
    pub counts: BTreeMap<CountSource, PathBuf>,
    pub wet_dirs: Vec<PathBuf>,
    pub langid_model: Option<PathBuf>,
    /// Labeled `code<TAB>text` corpus for `train`.
    pub langid_corpus: Option<PathBuf>,
    /// Token-count JSON per training corpus, keyed by corpus name.
    pub tokens: BTreeMap<String, PathBuf>,
    pub min_confidence: f64,
    pub composite: CompositeMode,
    pub out: PathBuf,
    /// Worker count for `count`; `None` means one per logical CPU.
    pub threads: Option<usize>,
}

impl PipelineConfig {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        let base_dir = base_dir.into();
        PipelineConfig {
            out: base_dir.join("out"),
            base_dir,
            vitality: None,
            counts: BTreeMap::new(),
            wet_dirs: Vec::new(),
            langid_model: None,
            langid_corpus: None,
            tokens: BTreeMap::new(),
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            composite: CompositeMode::default(),
            threads: None,
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Path as written in reports: relative to the config directory when
    /// possible, so outputs do not depend on where the tree is checked out.
    pub fn display_path(&self, p: &Path) -> String {
        p.strip_prefix(&self.base_dir)
            .unwrap_or(p)
            .to_string_lossy()
            .replace('\\', "/")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(t) = o.threads {
            self.threads = Some(t);
        }
        if let Some(c) = o.min_confidence {
            self.min_confidence = c;
        }
        if let Some(m) = o.composite {
            self.composite = m;
        }
    }

    pub fn require_vitality(&self) -> Result<&Path, ConfigError> {
        existing("vitality", self.vitality.as_deref())
    }

    pub fn require_model(&self) -> Result<&Path, ConfigError> {
        existing("langid_model", self.langid_model.as_deref())
    }

    pub fn require_corpus(&self) -> Result<&Path, ConfigError> {
        existing("langid_corpus", self.langid_corpus.as_deref())
    }
}

fn existing<'a>(key: &'static str, p: Option<&'a Path>) -> Result<&'a Path, ConfigError> {
    let p = p.ok_or(ConfigError::MissingKey(key))?;
    if p.exists() {
        Ok(p)
    } else {
        Err(ConfigError::MissingPath {
            key: key.to_string(),
            path: p.to_path_buf(),
        })
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub min_confidence: Option<f64>,
    pub composite: Option<CompositeMode>,
}

fn invalid(key: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        detail: detail.into(),
    }
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<PipelineConfig, ConfigError> {
    let mut cfg = PipelineConfig::new(base_dir);
    let resolve = |v: &str| base_dir.join(v);
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::Syntax {
                line,
                text: raw.to_string(),
            })?;
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        }
        if key != "wet_dir" && !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        match key {
            "vitality" => cfg.vitality = Some(resolve(value)),
            "wet_dir" => cfg.wet_dirs.push(resolve(value)),
            "langid_model" => cfg.langid_model = Some(resolve(value)),
            "langid_corpus" => cfg.langid_corpus = Some(resolve(value)),
            "out" => cfg.out = resolve(value),
            "min_confidence" => {
                cfg.min_confidence = value
                    .parse()
                    .map_err(|_| invalid(key, format!("{value:?} is not a number")))?
            }
            "threads" => {
                cfg.threads = Some(
                    value
                        .parse()
                        .ok()
                        .filter(|n: &usize| *n > 0)
                        .ok_or_else(|| {
                            invalid(key, format!("{value:?} is not a positive integer"))
                        })?,
                )
            }
            "composite" => cfg.composite = value.parse().map_err(|e: String| invalid(key, e))?,
            _ => {
                if let Some(src) = key.strip_prefix("counts.") {
                    let source = CountSource::ALL
                        .into_iter()
                        .find(|s| s.as_str() == src)
                        .ok_or_else(|| ConfigError::UnknownKey {
                            line,
                            key: key.to_string(),
                        })?;
                    cfg.counts.insert(source, resolve(value));
                } else if let Some(corpus) = key.strip_prefix("tokens.").filter(|c| !c.is_empty()) {
                    cfg.tokens.insert(corpus.to_string(), resolve(value));
                } else {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    });
                }
            }
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<PipelineConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

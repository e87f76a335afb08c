//! Character n-gram language identification.
//!
//! Each language profile holds add-one smoothed n-gram probabilities for
//! n = 1..=4, extracted from lowercased text with every word padded by one
//! space on each side. A text is scored against a profile by the mean log
//! probability of its n-grams within each order, averaged over orders with
//! equal weight. N-grams that no profile in the model has ever seen carry no
//! evidence and are skipped; a text made only of such n-grams scores every
//! language equally.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CountSource, CountTable, IngestError};
use crate::model::LanguageId;
use crate::wet::{self, clean_text, WetError, WetRecord};

pub const MAX_ORDER: usize = 4;
pub const MIN_TRAINING_CHARS: usize = 20;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.5;
const MODEL_FORMAT: &str = "langscape-char-ngram";

#[derive(Debug, Error)]
pub enum LangIdError {
    #[error("insufficient training text: {0}")]
    InsufficientText(String),
    #[error("language {0} appears in more than one training group")]
    DuplicateLanguageLabel(LanguageId),
    #[error("text is empty after cleaning")]
    EmptyText,
    #[error("model has no profiles")]
    EmptyModel,
    #[error("holdout label {0} is not a model language")]
    UnknownLabel(LanguageId),
    #[error("holdout set is empty")]
    EmptyHoldout,
    #[error("invalid confidence threshold {0}")]
    InvalidThreshold(f64),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("line {line}: {detail}")]
    MalformedCorpus { line: usize, detail: String },
    #[error(transparent)]
    Wet(#[from] WetError),
    #[error("{path}: {source}")]
    Shard {
        path: PathBuf,
        #[source]
        source: Box<LangIdError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Lowercased, whitespace-collapsed text.
pub fn normalize(text: &str) -> String {
    clean_text(text).to_lowercase()
}

/// All n-grams of a normalized text, grouped by order (index 0 is n = 1).
/// The bare padding space is not a 1-gram.
pub fn extract_ngrams(normalized: &str) -> [Vec<String>; MAX_ORDER] {
    let mut out: [Vec<String>; MAX_ORDER] = Default::default();
    let mut padded: Vec<char> = Vec::new();
    for word in normalized.split(' ').filter(|w| !w.is_empty()) {
        padded.clear();
        padded.push(' ');
        padded.extend(word.chars());
        padded.push(' ');
        for n in 1..=MAX_ORDER {
            for w in padded.windows(n) {
                if n == 1 && w[0] == ' ' {
                    continue;
                }
                out[n - 1].push(w.iter().collect());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
struct OrderTable {
    counts: HashMap<String, u64>,
    total: u64,
    logprobs: HashMap<String, f64>,
    unseen_logprob: f64,
}

impl OrderTable {
    /// Add-one smoothing over the observed vocabulary plus one unseen slot.
    fn from_counts(counts: HashMap<String, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let denom = (total + counts.len() as u64 + 1) as f64;
        let logprobs = counts
            .iter()
            .map(|(g, c)| (g.clone(), ((c + 1) as f64 / denom).ln()))
            .collect();
        OrderTable {
            total,
            logprobs,
            unseen_logprob: (1.0 / denom).ln(),
            counts,
        }
    }

    fn logprob(&self, gram: &str) -> f64 {
        self.logprobs
            .get(gram)
            .copied()
            .unwrap_or(self.unseen_logprob)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangProfile {
    pub language: LanguageId,
    orders: [OrderTable; MAX_ORDER],
}

impl LangProfile {
    fn from_counts(language: LanguageId, counts: [HashMap<String, u64>; MAX_ORDER]) -> Self {
        LangProfile {
            language,
            orders: counts.map(OrderTable::from_counts),
        }
    }

    /// Smoothed log probability of `gram`; `None` for orders outside 1..=4.
    pub fn ngram_logprob(&self, gram: &str) -> Option<f64> {
        let n = gram.chars().count();
        (1..=MAX_ORDER)
            .contains(&n)
            .then(|| self.orders[n - 1].logprob(gram))
    }

    pub fn unseen_logprob(&self, order: usize) -> f64 {
        self.orders[order - 1].unseen_logprob
    }

    /// Distinct n-grams over all orders.
    pub fn vocab_size(&self) -> usize {
        self.orders.iter().map(|o| o.counts.len()).sum()
    }

    /// Training n-gram tokens over all orders.
    pub fn total_ngrams(&self) -> u64 {
        self.orders.iter().map(|o| o.total).sum()
    }

    /// Probability mass of one order: observed vocabulary plus the unseen slot.
    pub fn probability_mass(&self, order: usize) -> f64 {
        let o = &self.orders[order - 1];
        o.logprobs.values().map(|l| l.exp()).sum::<f64>() + o.unseen_logprob.exp()
    }

    /// The `k` most frequent n-grams of one order, ties broken lexically.
    pub fn top_ngrams(&self, order: usize, k: usize) -> Vec<(String, u64)> {
        let mut v: Vec<_> = self.orders[order - 1]
            .counts
            .iter()
            .map(|(g, c)| (g.clone(), *c))
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub language: LanguageId,
    /// Softmax of the per-language scores, for the winner.
    pub confidence: f64,
    /// Score gap to the second-best language; infinite with one candidate.
    pub runner_up_margin: f64,
    /// Softmax over all candidates, in model (ascending id) order.
    pub posteriors: Vec<(LanguageId, f64)>,
}

/// A trained set of profiles, kept sorted by language id.
#[derive(Debug, Clone, PartialEq)]
pub struct LangIdModel {
    profiles: Vec<LangProfile>,
    support: HashSet<String>,
}

/// Training texts grouped by language: one group per language.
pub type TrainingCorpus = Vec<(LanguageId, Vec<String>)>;

/// Groups `(language, text)` pairs in first-seen order.
pub fn group_corpus(pairs: impl IntoIterator<Item = (LanguageId, String)>) -> TrainingCorpus {
    let mut groups: Vec<(LanguageId, Vec<String>)> = Vec::new();
    let mut index: HashMap<LanguageId, usize> = HashMap::new();
    for (id, text) in pairs {
        let i = *index.entry(id).or_insert_with(|| {
            groups.push((id, Vec::new()));
            groups.len() - 1
        });
        groups[i].1.push(text);
    }
    groups
}

/// Reads `code<TAB>text` lines; blank lines and `#` comments are skipped.
pub fn read_labeled_tsv<R: BufRead>(reader: R) -> Result<Vec<(LanguageId, String)>, LangIdError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (code, text) = line
            .split_once('\t')
            .ok_or_else(|| LangIdError::MalformedCorpus {
                line: i + 1,
                detail: "expected `code<TAB>text`".into(),
            })?;
        let id = LanguageId::new(code.trim()).map_err(|e| LangIdError::MalformedCorpus {
            line: i + 1,
            detail: e.to_string(),
        })?;
        out.push((id, text.to_string()));
    }
    Ok(out)
}

pub fn train_profiles(corpus: &[(LanguageId, Vec<String>)]) -> Result<LangIdModel, LangIdError> {
    if corpus.is_empty() {
        return Err(LangIdError::InsufficientText("empty corpus".into()));
    }
    let mut seen = HashSet::new();
    let mut profiles = Vec::with_capacity(corpus.len());
    for (id, texts) in corpus {
        if !seen.insert(*id) {
            return Err(LangIdError::DuplicateLanguageLabel(*id));
        }
        if texts.is_empty() {
            return Err(LangIdError::InsufficientText(format!("{id}: no texts")));
        }
        let mut counts: [HashMap<String, u64>; MAX_ORDER] = Default::default();
        for text in texts {
            let norm = normalize(text);
            let chars = norm.chars().count();
            if chars < MIN_TRAINING_CHARS {
                return Err(LangIdError::InsufficientText(format!(
                    "{id}: text of {chars} characters (minimum {MIN_TRAINING_CHARS})"
                )));
            }
            for (order, grams) in extract_ngrams(&norm).into_iter().enumerate() {
                for g in grams {
                    *counts[order].entry(g).or_insert(0) += 1;
                }
            }
        }
        profiles.push(LangProfile::from_counts(*id, counts));
    }
    Ok(LangIdModel::from_profiles(profiles))
}

impl LangIdModel {
    fn from_profiles(mut profiles: Vec<LangProfile>) -> Self {
        profiles.sort_by_key(|p| p.language);
        let support = profiles
            .iter()
            .flat_map(|p| p.orders.iter().flat_map(|o| o.counts.keys().cloned()))
            .collect();
        LangIdModel { profiles, support }
    }

    pub fn profiles(&self) -> &[LangProfile] {
        &self.profiles
    }

    pub fn languages(&self) -> impl Iterator<Item = LanguageId> + '_ {
        self.profiles.iter().map(|p| p.language)
    }

    pub fn contains(&self, id: &LanguageId) -> bool {
        self.profiles
            .binary_search_by_key(id, |p| p.language)
            .is_ok()
    }

    /// Merges another model's profiles in; an existing language is an error.
    pub fn with_profiles(self, other: LangIdModel) -> Result<LangIdModel, LangIdError> {
        let mut all = self.profiles;
        for p in other.profiles {
            if all.iter().any(|q| q.language == p.language) {
                return Err(LangIdError::DuplicateLanguageLabel(p.language));
            }
            all.push(p);
        }
        Ok(LangIdModel::from_profiles(all))
    }

    /// Per-language mean log-likelihood of a normalized text, in model order.
    pub fn scores(&self, normalized: &str) -> Vec<f64> {
        let grams = extract_ngrams(normalized);
        let kept: Vec<Vec<&String>> = grams
            .iter()
            .map(|g| g.iter().filter(|s| self.support.contains(*s)).collect())
            .collect();
        self.profiles
            .iter()
            .map(|p| {
                let mut sum_of_means = 0.0;
                let mut orders = 0;
                for (order, g) in kept.iter().enumerate() {
                    if g.is_empty() {
                        continue;
                    }
                    let table = &p.orders[order];
                    let total: f64 = g.iter().map(|s| table.logprob(s)).sum();
                    sum_of_means += total / g.len() as f64;
                    orders += 1;
                }
                if orders == 0 {
                    0.0
                } else {
                    sum_of_means / orders as f64
                }
            })
            .collect()
    }

    pub fn classify(&self, text: &str) -> Result<Classification, LangIdError> {
        if self.profiles.is_empty() {
            return Err(LangIdError::EmptyModel);
        }
        let norm = normalize(text);
        if norm.is_empty() {
            return Err(LangIdError::EmptyText);
        }
        let scores = self.scores(&norm);

        // Ascending id order plus strict comparison keeps the lowest id on ties.
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        let runner_up = scores
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != best)
            .map(|(_, s)| *s)
            .fold(f64::NEG_INFINITY, f64::max);

        let max = scores[best];
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        let posteriors: Vec<(LanguageId, f64)> = self
            .profiles
            .iter()
            .zip(&exps)
            .map(|(p, e)| (p.language, e / z))
            .collect();
        Ok(Classification {
            language: self.profiles[best].language,
            confidence: posteriors[best].1,
            runner_up_margin: max - runner_up,
            posteriors,
        })
    }

    pub fn to_json(&self) -> String {
        let mut ngrams = Vec::new();
        for p in &self.profiles {
            for (order, table) in p.orders.iter().enumerate() {
                let mut entries: Vec<_> = table.counts.iter().collect();
                entries.sort();
                for (g, c) in entries {
                    ngrams.push(PersistedNgram {
                        language: p.language,
                        n: order + 1,
                        ngram: g.clone(),
                        count: *c,
                    });
                }
            }
        }
        let doc = PersistedModel {
            format: MODEL_FORMAT.into(),
            max_order: MAX_ORDER,
            smoothing: Smoothing {
                method: "add_one".into(),
                pseudo_count: 1,
                unseen_slots: 1,
            },
            languages: self.profiles.iter().map(|p| p.language).collect(),
            ngrams,
        };
        serde_json::to_string(&doc).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, LangIdError> {
        let doc: PersistedModel =
            serde_json::from_str(s).map_err(|e| LangIdError::MalformedModel(e.to_string()))?;
        if doc.format != MODEL_FORMAT || doc.max_order != MAX_ORDER {
            return Err(LangIdError::MalformedModel(format!(
                "unsupported format {} (max order {})",
                doc.format, doc.max_order
            )));
        }
        if doc.smoothing.method != "add_one"
            || doc.smoothing.pseudo_count != 1
            || doc.smoothing.unseen_slots != 1
        {
            return Err(LangIdError::MalformedModel("unsupported smoothing".into()));
        }
        let mut counts: BTreeMap<LanguageId, [HashMap<String, u64>; MAX_ORDER]> = doc
            .languages
            .iter()
            .map(|l| (*l, Default::default()))
            .collect();
        for e in doc.ngrams {
            if !(1..=MAX_ORDER).contains(&e.n) || e.ngram.chars().count() != e.n {
                return Err(LangIdError::MalformedModel(format!(
                    "n-gram {:?} does not have order {}",
                    e.ngram, e.n
                )));
            }
            let per = counts.get_mut(&e.language).ok_or_else(|| {
                LangIdError::MalformedModel(format!(
                    "n-gram for undeclared language {}",
                    e.language
                ))
            })?;
            per[e.n - 1].insert(e.ngram, e.count);
        }
        Ok(LangIdModel::from_profiles(
            counts
                .into_iter()
                .map(|(l, c)| LangProfile::from_counts(l, c))
                .collect(),
        ))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self, LangIdError> {
        let mut s = String::new();
        std::fs::File::open(path)?.read_to_string(&mut s)?;
        Self::from_json(&s)
    }
}

#[derive(Serialize, Deserialize)]
struct Smoothing {
    method: String,
    pseudo_count: u64,
    unseen_slots: u64,
}

#[derive(Serialize, Deserialize)]
struct PersistedNgram {
    language: LanguageId,
    n: usize,
    ngram: String,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct PersistedModel {
    format: String,
    max_order: usize,
    smoothing: Smoothing,
    languages: Vec<LanguageId>,
    ngrams: Vec<PersistedNgram>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageMetrics {
    pub support: u64,
    pub predicted: u64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub total: u64,
    pub correct: u64,
    pub accuracy: f64,
    pub per_language: BTreeMap<LanguageId, LanguageMetrics>,
    /// `confusion[truth][predicted]`.
    pub confusion: BTreeMap<LanguageId, BTreeMap<LanguageId, u64>>,
}

/// Scores the model on a labeled holdout set.
pub fn validate(
    model: &LangIdModel,
    holdout: &[(LanguageId, String)],
) -> Result<AccuracyReport, LangIdError> {
    if holdout.is_empty() {
        return Err(LangIdError::EmptyHoldout);
    }
    if let Some((id, _)) = holdout.iter().find(|(id, _)| !model.contains(id)) {
        return Err(LangIdError::UnknownLabel(*id));
    }
    let mut confusion: BTreeMap<LanguageId, BTreeMap<LanguageId, u64>> = BTreeMap::new();
    let mut correct = 0;
    for (truth, text) in holdout {
        let predicted = model.classify(text)?.language;
        *confusion
            .entry(*truth)
            .or_default()
            .entry(predicted)
            .or_insert(0) += 1;
        if predicted == *truth {
            correct += 1;
        }
    }
    let total = holdout.len() as u64;
    let mut per_language = BTreeMap::new();
    for id in model.languages() {
        let support: u64 = confusion.get(&id).map(|r| r.values().sum()).unwrap_or(0);
        let predicted: u64 = confusion
            .values()
            .map(|r| r.get(&id).copied().unwrap_or(0))
            .sum();
        let hits = confusion
            .get(&id)
            .and_then(|r| r.get(&id))
            .copied()
            .unwrap_or(0);
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        per_language.insert(
            id,
            LanguageMetrics {
                support,
                predicted,
                precision: ratio(hits, predicted),
                recall: ratio(hits, support),
            },
        );
    }
    Ok(AccuracyReport {
        total,
        correct,
        accuracy: correct as f64 / total as f64,
        per_language,
        confusion,
    })
}

/// Stratified validation sample: at most `per_language` items per label,
/// chosen by a seeded shuffle, returned in their original order.
pub fn sample_holdout(
    items: &[(LanguageId, String)],
    per_language: usize,
    seed: u64,
) -> Vec<(LanguageId, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_label: BTreeMap<LanguageId, Vec<usize>> = BTreeMap::new();
    for (i, (id, _)) in items.iter().enumerate() {
        by_label.entry(*id).or_default().push(i);
    }
    let mut keep: Vec<usize> = Vec::new();
    for idx in by_label.values_mut() {
        idx.shuffle(&mut rng);
        keep.extend(idx.iter().take(per_language));
    }
    keep.sort_unstable();
    keep.into_iter().map(|i| items[i].clone()).collect()
}

fn now_secs() -> Option<u64> {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

/// Classifies every conversion record and counts documents per language.
///
/// Records below `min_confidence`, or with no text, go to the `und` bucket.
/// Non-conversion records are skipped. Parser errors end the count.
pub fn count_by_language<I>(
    model: &LangIdModel,
    records: I,
    min_confidence: f64,
) -> Result<CountTable, LangIdError>
where
    I: IntoIterator<Item = Result<WetRecord, WetError>>,
{
    if min_confidence.is_nan() || min_confidence < 0.0 {
        return Err(LangIdError::InvalidThreshold(min_confidence));
    }
    let mut table = CountTable::new(CountSource::Web);
    for rec in records {
        let rec = rec?;
        if !rec.is_conversion() {
            continue;
        }
        let text = wet::extract_text(&rec);
        let id = match model.classify(&text) {
            Ok(c) if c.confidence >= min_confidence => c.language,
            Ok(_) | Err(LangIdError::EmptyText) => LanguageId::UNDETERMINED,
            Err(e) => return Err(e),
        };
        table.add(id, 1);
    }
    table.generated_at = now_secs();
    Ok(table)
}

/// Result of counting a set of WET shards.
#[derive(Debug, Clone)]
pub struct ShardCounts {
    pub table: CountTable,
    pub documents: u64,
    pub shards: usize,
}

/// Counts each shard on a bounded worker pool and merges the results.
/// The output equals a single pass over the concatenated shards.
pub fn count_files(
    model: &LangIdModel,
    paths: &[PathBuf],
    min_confidence: f64,
    threads: usize,
) -> Result<ShardCounts, LangIdError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| LangIdError::Io(std::io::Error::other(e)))?;
    let tables: Vec<Result<CountTable, LangIdError>> = pool.install(|| {
        paths
            .par_iter()
            .map(|p| {
                let shard = || -> Result<CountTable, LangIdError> {
                    let stream = wet::open_wet_file(p)?;
                    count_by_language(model, stream, min_confidence)
                };
                shard().map_err(|e| LangIdError::Shard {
                    path: p.clone(),
                    source: Box::new(e),
                })
            })
            .collect()
    });
    let mut merged = CountTable::new(CountSource::Web);
    for t in tables {
        merged = merged.merge(&t?)?;
    }
    Ok(ShardCounts {
        documents: merged.total(),
        shards: paths.len(),
        table: merged,
    })
}

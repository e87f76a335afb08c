//! Loading vitality rows and digitality count tables, and joining them into
//! one [`LanguageSet`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    validate_record, LanguageId, LanguageRecord, RawLanguageRecord, RecordError, CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountSource {
    Web,
    Wiki,
    MlAssets,
    Archives,
}

impl CountSource {
    pub const ALL: [CountSource; 4] = [
        CountSource::Web,
        CountSource::Wiki,
        CountSource::MlAssets,
        CountSource::Archives,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CountSource::Web => "web",
            CountSource::Wiki => "wiki",
            CountSource::MlAssets => "ml_assets",
            CountSource::Archives => "archives",
        }
    }
}

impl fmt::Display for CountSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: schema mismatch: {detail}")]
    SchemaMismatch { origin: String, detail: String },
    #[error("{origin}: negative count {value} for {code:?}")]
    NegativeCount {
        origin: String,
        code: String,
        value: i64,
    },
    #[error("{origin}: invalid language code {code:?}")]
    InvalidCode { origin: String, code: String },
    #[error("cannot merge count tables from different sources ({0} and {1})")]
    MixedSources(CountSource, CountSource),
    #[error("no count tables given")]
    NoTables,
    #[error("no count table for source `{0}`")]
    MissingSource(CountSource),
    #[error("more than one count table for source `{0}`")]
    DuplicateSource(CountSource),
}

/// Per-language document or entry counts from one digitality source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub source: CountSource,
    pub counts: BTreeMap<LanguageId, u64>,
    /// Unix seconds; merging keeps the latest.
    pub generated_at: Option<u64>,
}

impl CountTable {
    pub fn new(source: CountSource) -> Self {
        CountTable {
            source,
            counts: BTreeMap::new(),
            generated_at: None,
        }
    }

    pub fn add(&mut self, id: LanguageId, n: u64) {
        *self.counts.entry(id).or_insert(0) += n;
    }

    pub fn get(&self, id: &LanguageId) -> u64 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Pointwise sum.
    pub fn merge(mut self, other: &CountTable) -> Result<CountTable, IngestError> {
        if self.source != other.source {
            return Err(IngestError::MixedSources(self.source, other.source));
        }
        for (id, n) in &other.counts {
            self.add(*id, *n);
        }
        self.generated_at = self.generated_at.max(other.generated_at);
        Ok(self)
    }

    /// Flat `{ "<code>": <count>, ... }` JSON, keys sorted.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, u64> = self.counts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        serde_json::to_string_pretty(&map).expect("map of strings to integers serializes")
    }
}

pub fn merge_counts(tables: &[CountTable]) -> Result<CountTable, IngestError> {
    let (first, rest) = tables.split_first().ok_or(IngestError::NoTables)?;
    rest.iter().try_fold(first.clone(), |acc, t| acc.merge(t))
}

/// Parses the flat count JSON object.
pub fn parse_count_json(
    bytes: &[u8],
    source: CountSource,
    origin: &str,
) -> Result<CountTable, IngestError> {
    let schema = |detail: String| IngestError::SchemaMismatch {
        origin: origin.to_string(),
        detail,
    };
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| schema(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("expected a JSON object of code -> integer".into()))?;
    let mut table = CountTable::new(source);
    for (code, v) in obj {
        let id = LanguageId::new(code).map_err(|_| IngestError::InvalidCode {
            origin: origin.to_string(),
            code: code.clone(),
        })?;
        if id.is_undetermined() && source != CountSource::Web {
            return Err(IngestError::InvalidCode {
                origin: origin.to_string(),
                code: format!("{code} (undetermined bucket only allowed for web counts)"),
            });
        }
        let n = if let Some(n) = v.as_u64() {
            n
        } else if let Some(n) = v.as_i64() {
            return Err(IngestError::NegativeCount {
                origin: origin.to_string(),
                code: code.clone(),
                value: n,
            });
        } else {
            return Err(schema(format!("value for {code:?} is not an integer: {v}")));
        };
        table.add(id, n);
    }
    Ok(table)
}

fn read_file(path: &Path) -> Result<Vec<u8>, IngestError> {
    fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_count_json(path: &Path, source: CountSource) -> Result<CountTable, IngestError> {
    let bytes = read_file(path)?;
    let mut table = parse_count_json(&bytes, source, &path.display().to_string())?;
    table.generated_at = fs::metadata(path)
        .and_then(|m| m.modified())
        .ok()
        .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
        .map(|d| d.as_secs());
    Ok(table)
}

/// Content hash of one input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of_bytes(path: &str, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }

    pub fn of_file(path: &Path) -> Result<Self, IngestError> {
        Ok(Self::of_bytes(
            &path.display().to_string(),
            &read_file(path)?,
        ))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LanguageSet {
    pub records: BTreeMap<LanguageId, LanguageRecord>,
    pub provenance: Vec<FileDigest>,
}

impl LanguageSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LanguageRecord> {
        self.records.values()
    }

    pub fn from_records(records: impl IntoIterator<Item = LanguageRecord>) -> Self {
        LanguageSet {
            records: records.into_iter().map(|r| (r.id, r)).collect(),
            provenance: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowProblem {
    Invalid(Vec<RecordError>),
    DuplicateId { code: LanguageId, first_line: u64 },
    Malformed(String),
}

/// A rejected CSV row; `line` is the 1-based file line (the header is line 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub line: u64,
    pub problem: RowProblem,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.problem {
            RowProblem::Invalid(errs) => {
                write!(f, "row {}: ", self.line)?;
                for (i, e) in errs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            RowProblem::DuplicateId { code, first_line } => write!(
                f,
                "duplicate iso639_3 {code} on rows {first_line} and {}",
                self.line
            ),
            RowProblem::Malformed(m) => write!(f, "row {}: {m}", self.line),
        }
    }
}

/// Rows that validated, plus every row that did not.
#[derive(Debug, Clone, PartialEq)]
pub struct VitalityLoad {
    pub set: LanguageSet,
    pub row_errors: Vec<RowError>,
}

pub fn read_vitality_csv<R: Read>(reader: R, origin: &str) -> Result<VitalityLoad, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::SchemaMismatch {
            origin: origin.into(),
            detail: e.to_string(),
        })?
        .clone();
    if header.iter().map(str::trim).ne(CSV_HEADER.iter().copied()) {
        return Err(IngestError::SchemaMismatch {
            origin: origin.into(),
            detail: format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut set = LanguageSet::default();
    let mut first_seen: BTreeMap<LanguageId, u64> = BTreeMap::new();
    let mut row_errors = Vec::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                row_errors.push(RowError {
                    line,
                    problem: RowProblem::Malformed(e.to_string()),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != CSV_HEADER.len() {
            row_errors.push(RowError {
                line,
                problem: RowProblem::Malformed(format!(
                    "expected {} fields, found {}",
                    CSV_HEADER.len(),
                    row.len()
                )),
            });
            continue;
        }
        let raw: RawLanguageRecord = match row.deserialize(Some(&header)) {
            Ok(r) => r,
            Err(e) => {
                row_errors.push(RowError {
                    line,
                    problem: RowProblem::Malformed(e.to_string()),
                });
                continue;
            }
        };
        match validate_record(&raw) {
            Ok(rec) => {
                if let Some(&first_line) = first_seen.get(&rec.id) {
                    row_errors.push(RowError {
                        line,
                        problem: RowProblem::DuplicateId {
                            code: rec.id,
                            first_line,
                        },
                    });
                } else {
                    first_seen.insert(rec.id, line);
                    set.records.insert(rec.id, rec);
                }
            }
            Err(errs) => row_errors.push(RowError {
                line,
                problem: RowProblem::Invalid(errs),
            }),
        }
    }
    Ok(VitalityLoad { set, row_errors })
}

/// Loads the canonical language CSV. Row problems are collected, not fatal;
/// the file digest is recorded as provenance.
pub fn load_vitality_csv(path: &Path) -> Result<VitalityLoad, IngestError> {
    let bytes = read_file(path)?;
    let origin = path.display().to_string();
    let mut load = read_vitality_csv(bytes.as_slice(), &origin)?;
    load.set
        .provenance
        .push(FileDigest::of_bytes(&origin, &bytes));
    Ok(load)
}

/// Count-table entry whose code is not in the vitality set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orphan {
    pub code: String,
    pub source: CountSource,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub set: LanguageSet,
    pub orphans: Vec<Orphan>,
    /// Web documents in the undetermined bucket; never joined.
    pub undetermined_web: u64,
}

/// Fills every language's digitality features from exactly one table per
/// source. Languages missing from a table get zero for that feature.
pub fn assemble(vitality: &LanguageSet, tables: &[CountTable]) -> Result<Assembled, IngestError> {
    let mut by_source: BTreeMap<CountSource, &CountTable> = BTreeMap::new();
    for t in tables {
        if by_source.insert(t.source, t).is_some() {
            return Err(IngestError::DuplicateSource(t.source));
        }
    }
    if let Some(missing) = CountSource::ALL.iter().find(|s| !by_source.contains_key(s)) {
        return Err(IngestError::MissingSource(*missing));
    }

    let mut set = vitality.clone();
    for rec in set.records.values_mut() {
        let d = &mut rec.digitality;
        d.web_pages = by_source[&CountSource::Web].get(&rec.id);
        d.wiki_articles = by_source[&CountSource::Wiki].get(&rec.id);
        d.ml_assets = by_source[&CountSource::MlAssets].get(&rec.id);
        d.archive_entries = by_source[&CountSource::Archives].get(&rec.id);
    }

    let mut orphans = Vec::new();
    let mut undetermined_web = 0;
    for (source, table) in &by_source {
        for (id, n) in &table.counts {
            if id.is_undetermined() {
                undetermined_web += n;
            } else if !set.records.contains_key(id) {
                orphans.push(Orphan {
                    code: id.to_string(),
                    source: *source,
                    count: *n,
                });
            }
        }
    }
    Ok(Assembled {
        set,
        orphans,
        undetermined_web,
    })
}

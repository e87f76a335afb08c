//! Shared domain types and record validation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::Scalar;

/// ISO 639-3 code: exactly three ASCII lowercase letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageId([u8; 3]);

impl LanguageId {
    /// Bucket for documents whose language could not be determined.
    pub const UNDETERMINED: LanguageId = LanguageId(*b"und");

    pub fn new(code: &str) -> Result<Self, RecordError> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_lowercase) {
            return Err(RecordError::InvalidCode(code.to_string()));
        }
        Ok(LanguageId([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        // invariant: three ASCII lowercase bytes
        std::str::from_utf8(&self.0).unwrap()
    }

    pub fn is_undetermined(&self) -> bool {
        *self == Self::UNDETERMINED
    }
}

impl FromStr for LanguageId {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LanguageId::new(s)
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LanguageId({})", self.as_str())
    }
}

impl Serialize for LanguageId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LanguageId::new(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Africa,
    Asia,
    Europe,
    Americas,
    Pacific,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::Africa,
        Region::Asia,
        Region::Europe,
        Region::Americas,
        Region::Pacific,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Africa => "Africa",
            Region::Asia => "Asia",
            Region::Europe => "Europe",
            Region::Americas => "Americas",
            Region::Pacific => "Pacific",
        }
    }
}

impl FromStr for Region {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Region::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OfficialStatus {
    National,
    Regional,
    None,
}

impl OfficialStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OfficialStatus::National => "national",
            OfficialStatus::Regional => "regional",
            OfficialStatus::None => "none",
        }
    }
}

impl FromStr for OfficialStatus {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "national" => Ok(OfficialStatus::National),
            "regional" => Ok(OfficialStatus::Regional),
            "none" => Ok(OfficialStatus::None),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalityFeatures {
    pub speakers_l1: u64,
    /// EGIDS level, 0 (international) to 10 (extinct).
    pub egids: f64,
}

/// Parses an EGIDS level. Sublevels map 6a→6.0, 6b→6.5, 8a→8.0, 8b→8.5.
pub fn parse_egids(s: &str) -> Option<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "6a" => Some(6.0),
        "6b" => Some(6.5),
        "8a" => Some(8.0),
        "8b" => Some(8.5),
        other => other.parse::<f64>().ok(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitalityFeatures {
    pub web_pages: u64,
    pub wiki_articles: u64,
    pub ml_assets: u64,
    pub archive_entries: u64,
}

impl DigitalityFeatures {
    pub fn as_array(&self) -> [u64; 4] {
        [
            self.web_pages,
            self.wiki_articles,
            self.ml_assets,
            self.archive_entries,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoColonialCovariates {
    pub region: Region,
    pub colonized: bool,
    pub colonizer: Option<String>,
    pub colonial_duration_years: u64,
    pub official_status: OfficialStatus,
    pub unicode_support: bool,
    /// Primary locus; `None` when the input row left both coordinates empty.
    pub location: Option<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageRecord {
    pub id: LanguageId,
    pub name: String,
    pub vitality: VitalityFeatures,
    pub digitality: DigitalityFeatures,
    pub covariates: GeoColonialCovariates,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("invalid ISO 639-3 code {0:?}")]
    InvalidCode(String),
    #[error("negative count in `{field}`: {value}")]
    NegativeCount { field: &'static str, value: i64 },
    #[error("missing value for `{0}`")]
    MissingValue(&'static str),
    #[error("cannot parse `{field}` from {value:?}")]
    Unparseable { field: &'static str, value: String },
    #[error("EGIDS level {0} outside 0..=10")]
    EgidsOutOfRange(f64),
    #[error("EGIDS 10 (extinct) with {0} first-language speakers")]
    ExtinctWithSpeakers(u64),
    #[error("inconsistent covariates: {0}")]
    CovariateInconsistency(String),
    #[error("coordinate out of bounds: {0}")]
    CoordinateOutOfBounds(String),
}

/// Column order of the canonical language CSV.
pub const CSV_HEADER: [&str; 12] = [
    "iso639_3",
    "name",
    "speakers_l1",
    "egids",
    "region",
    "colonized",
    "colonizer",
    "colonial_duration_years",
    "official_status",
    "unicode_support",
    "latitude",
    "longitude",
];

/// One row of the canonical language CSV, as text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLanguageRecord {
    pub iso639_3: String,
    pub name: String,
    pub speakers_l1: String,
    pub egids: String,
    pub region: String,
    pub colonized: String,
    pub colonizer: String,
    pub colonial_duration_years: String,
    pub official_status: String,
    pub unicode_support: String,
    pub latitude: String,
    pub longitude: String,
}

fn parse_count(field: &'static str, s: &str, errors: &mut Vec<RecordError>) -> Option<u64> {
    let s = s.trim();
    if s.is_empty() {
        errors.push(RecordError::MissingValue(field));
        return None;
    }
    match s.parse::<i64>() {
        Ok(v) if v < 0 => {
            errors.push(RecordError::NegativeCount { field, value: v });
            None
        }
        Ok(v) => Some(v as u64),
        Err(_) => {
            errors.push(RecordError::Unparseable {
                field,
                value: s.to_string(),
            });
            None
        }
    }
}

fn parse_bool(field: &'static str, s: &str, errors: &mut Vec<RecordError>) -> Option<bool> {
    match s.trim() {
        "true" => Some(true),
        "false" => Some(false),
        other => {
            errors.push(RecordError::Unparseable {
                field,
                value: other.to_string(),
            });
            None
        }
    }
}

fn parse_float(field: &'static str, s: &str, errors: &mut Vec<RecordError>) -> Option<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            errors.push(RecordError::Unparseable {
                field,
                value: s.to_string(),
            });
            None
        }
    }
}

/// Parses and validates one raw row, collecting every violated invariant.
///
/// Digitality features start at zero; they are filled in by the ingest join.
pub fn validate_record(raw: &RawLanguageRecord) -> Result<LanguageRecord, Vec<RecordError>> {
    let mut errors = Vec::new();

    let id = LanguageId::new(raw.iso639_3.trim())
        .map_err(|e| errors.push(e))
        .ok();
    let speakers = parse_count("speakers_l1", &raw.speakers_l1, &mut errors);
    let egids = if raw.egids.trim().is_empty() {
        errors.push(RecordError::MissingValue("egids"));
        None
    } else {
        match parse_egids(&raw.egids) {
            Some(v) if v.is_finite() => Some(v),
            _ => {
                errors.push(RecordError::Unparseable {
                    field: "egids",
                    value: raw.egids.clone(),
                });
                None
            }
        }
    };
    let region = raw
        .region
        .parse::<Region>()
        .map_err(|_| {
            errors.push(RecordError::Unparseable {
                field: "region",
                value: raw.region.clone(),
            })
        })
        .ok();
    let colonized = parse_bool("colonized", &raw.colonized, &mut errors);
    let duration = parse_count(
        "colonial_duration_years",
        &raw.colonial_duration_years,
        &mut errors,
    );
    let official = raw
        .official_status
        .parse::<OfficialStatus>()
        .map_err(|_| {
            errors.push(RecordError::Unparseable {
                field: "official_status",
                value: raw.official_status.clone(),
            })
        })
        .ok();
    let unicode = parse_bool("unicode_support", &raw.unicode_support, &mut errors);
    let location = match (raw.latitude.trim(), raw.longitude.trim()) {
        ("", "") => Some(None),
        (lat, lon) => {
            let lat = parse_float("latitude", lat, &mut errors);
            let lon = parse_float("longitude", lon, &mut errors);
            lat.zip(lon).map(|(latitude, longitude)| {
                Some(GeoPoint {
                    latitude,
                    longitude,
                })
            })
        }
    };
    let colonizer = match raw.colonizer.trim() {
        "" => None,
        c => Some(c.to_string()),
    };

    let (
        Some(id),
        Some(speakers_l1),
        Some(egids),
        Some(region),
        Some(colonized),
        Some(colonial_duration_years),
        Some(official_status),
        Some(unicode_support),
        Some(location),
    ) = (
        id, speakers, egids, region, colonized, duration, official, unicode, location,
    )
    else {
        // Parse failures are reported together with any range violations
        // that can still be checked on the fields that did parse.
        if let Some(e) = egids.filter(|e| !(0.0..=10.0).contains(e)) {
            errors.push(RecordError::EgidsOutOfRange(e));
        }
        if colonized == Some(false) && (colonizer.is_some() || duration.is_some_and(|d| d > 0)) {
            errors.push(RecordError::CovariateInconsistency(
                "colonized=false with colonizer or duration".into(),
            ));
        }
        return Err(errors);
    };

    let record = LanguageRecord {
        id,
        name: raw.name.trim().to_string(),
        vitality: VitalityFeatures { speakers_l1, egids },
        digitality: DigitalityFeatures::default(),
        covariates: GeoColonialCovariates {
            region,
            colonized,
            colonizer,
            colonial_duration_years,
            official_status,
            unicode_support,
            location,
        },
    };
    match record.check() {
        Ok(()) => Ok(record),
        Err(mut more) => {
            errors.append(&mut more);
            Err(errors)
        }
    }
}

impl LanguageRecord {
    /// Checks the invariants that typed fields cannot encode on their own.
    pub fn check(&self) -> Result<(), Vec<RecordError>> {
        let mut errors = Vec::new();
        let egids = self.vitality.egids;
        if !(0.0..=10.0).contains(&egids) {
            errors.push(RecordError::EgidsOutOfRange(egids));
        } else if egids == 10.0 && self.vitality.speakers_l1 > 0 {
            errors.push(RecordError::ExtinctWithSpeakers(self.vitality.speakers_l1));
        }
        let cov = &self.covariates;
        if !cov.colonized && cov.colonizer.is_some() {
            errors.push(RecordError::CovariateInconsistency(
                "colonized=false but colonizer is set".into(),
            ));
        }
        if !cov.colonized && cov.colonial_duration_years > 0 {
            errors.push(RecordError::CovariateInconsistency(format!(
                "colonized=false but colonial_duration_years={}",
                cov.colonial_duration_years
            )));
        }
        if let Some(p) = cov.location {
            if !(-90.0..=90.0).contains(&p.latitude) {
                errors.push(RecordError::CoordinateOutOfBounds(format!(
                    "latitude {}",
                    p.latitude
                )));
            }
            if !(-180.0..=180.0).contains(&p.longitude) {
                errors.push(RecordError::CoordinateOutOfBounds(format!(
                    "longitude {}",
                    p.longitude
                )));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub fn to_raw(&self) -> RawLanguageRecord {
        let cov = &self.covariates;
        let (lat, lon) = match cov.location {
            Some(p) => (p.latitude.to_string(), p.longitude.to_string()),
            None => (String::new(), String::new()),
        };
        RawLanguageRecord {
            iso639_3: self.id.to_string(),
            name: self.name.clone(),
            speakers_l1: self.vitality.speakers_l1.to_string(),
            egids: self.vitality.egids.to_string(),
            region: cov.region.as_str().to_string(),
            colonized: cov.colonized.to_string(),
            colonizer: cov.colonizer.clone().unwrap_or_default(),
            colonial_duration_years: cov.colonial_duration_years.to_string(),
            official_status: cov.official_status.as_str().to_string(),
            unicode_support: cov.unicode_support.to_string(),
            latitude: lat,
            longitude: lon,
        }
    }
}

/// Writes records in the canonical language CSV layout.
pub fn write_language_csv<'a, W: Write>(
    records: impl IntoIterator<Item = &'a LanguageRecord>,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r.to_raw())?;
    }
    w.flush()?;
    Ok(())
}

/// One language's position in normalized vitality/digitality space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreVector<F> {
    pub id: LanguageId,
    pub vitality_norm: F,
    pub digitality_norm: F,
    pub representation: F,
}

impl<F: Scalar> ScoreVector<F> {
    /// Builds the vector with `representation = digitality - vitality`.
    pub fn new(id: LanguageId, vitality_norm: F, digitality_norm: F) -> Self {
        ScoreVector {
            id,
            vitality_norm,
            digitality_norm,
            representation: digitality_norm - vitality_norm,
        }
    }

    /// Vitality exceeds digitality.
    pub fn is_underrepresented(&self) -> bool {
        self.representation < F::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    Stronghold,
    DigitalEcho,
    FadingVoice,
    InvisibleGiant,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::Stronghold,
        Quadrant::DigitalEcho,
        Quadrant::FadingVoice,
        Quadrant::InvisibleGiant,
    ];

    pub fn from_sides(vitality_above: bool, digitality_above: bool) -> Self {
        match (vitality_above, digitality_above) {
            (true, true) => Quadrant::Stronghold,
            (false, true) => Quadrant::DigitalEcho,
            (false, false) => Quadrant::FadingVoice,
            (true, false) => Quadrant::InvisibleGiant,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Quadrant::Stronghold => "stronghold",
            Quadrant::DigitalEcho => "digital_echo",
            Quadrant::FadingVoice => "fading_voice",
            Quadrant::InvisibleGiant => "invisible_giant",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantCategory<F> {
    pub label: Quadrant,
    pub vitality_median: F,
    pub digitality_median: F,
}

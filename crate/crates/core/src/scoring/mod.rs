//! Normalization, mixture-based composite scores, and the representation
//! score `digitality - vitality`.

mod gmm;
mod normalize;

pub use gmm::{composite_score, fit_gmm, initial_rows, CompositeScore, GmmConfig, GmmModel};
pub use normalize::{fit_normalization, Dimension, FeatureScale, NormalizationSpec, Transform};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::LanguageSet;
use crate::model::{LanguageRecord, ScoreVector};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("cannot fit normalization on an empty language set")]
    EmptySet,
    #[error("{n} samples is too few for {k} mixture components")]
    TooFewSamples { n: usize, k: usize },
    #[error("non-finite value in mixture input")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input {0} outside [0, 1]")]
    OutOfRangeInput(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// How a dimension's normalized features collapse into one score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeMode {
    /// Posterior-weighted rank of the fitted mixture components.
    #[default]
    GmmRank,
    /// Plain mean of the normalized features.
    FeatureMean,
}

impl std::str::FromStr for CompositeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "gmm_rank" => Ok(CompositeMode::GmmRank),
            "feature_mean" => Ok(CompositeMode::FeatureMean),
            other => Err(format!(
                "unknown composite mode {other:?} (gmm_rank|feature_mean)"
            )),
        }
    }
}

impl CompositeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompositeMode::GmmRank => "gmm_rank",
            CompositeMode::FeatureMean => "feature_mean",
        }
    }
}

/// `digitality_norm - vitality_norm`; negative means underrepresented online.
pub fn representation_score<F: Scalar>(
    vitality_norm: F,
    digitality_norm: F,
) -> Result<F, ScoringError> {
    for v in [vitality_norm, digitality_norm] {
        if !(v >= F::zero() && v <= F::one()) {
            return Err(ScoringError::OutOfRangeInput(v.to_f64_lossy()));
        }
    }
    Ok(digitality_norm - vitality_norm)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit<F> {
    pub normalization: NormalizationSpec<F>,
    pub model: GmmModel<F>,
}

impl<F: Scalar> DimensionFit<F> {
    fn fit(set: &LanguageSet, dim: Dimension, gmm: &GmmConfig<F>) -> Result<Self, ScoringError> {
        let normalization = fit_normalization(set, dim)?;
        let data: Vec<Vec<F>> = set.iter().map(|r| normalization.apply(r)).collect();
        let model = fit_gmm(&data, gmm)?;
        Ok(DimensionFit {
            normalization,
            model,
        })
    }

    /// Composite score of one record under the frozen normalization and mixture.
    pub fn composite(
        &self,
        record: &LanguageRecord,
        mode: CompositeMode,
    ) -> Result<F, ScoringError> {
        let x = self.normalization.apply(record);
        match mode {
            CompositeMode::GmmRank => Ok(composite_score(&self.model, &x)?.value),
            CompositeMode::FeatureMean => Ok(x.iter().copied().sum::<F>() / F::of(x.len() as f64)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoringOptions<F> {
    pub mode: CompositeMode,
    pub gmm: GmmConfig<F>,
}

impl<F: Scalar> Default for ScoringOptions<F> {
    fn default() -> Self {
        ScoringOptions {
            mode: CompositeMode::GmmRank,
            gmm: GmmConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoringOutput<F> {
    pub mode: CompositeMode,
    pub vitality: DimensionFit<F>,
    pub digitality: DimensionFit<F>,
    /// One vector per language, in ascending id order.
    pub scores: Vec<ScoreVector<F>>,
}

impl<F: Scalar> ScoringOutput<F> {
    /// Scores a record against the frozen fits (no refitting).
    pub fn rescore(&self, record: &LanguageRecord) -> Result<ScoreVector<F>, ScoringError> {
        let v = self.vitality.composite(record, self.mode)?;
        let d = self.digitality.composite(record, self.mode)?;
        Ok(ScoreVector::new(record.id, v, d))
    }
}

/// Fits both dimensions on the set and scores every language.
pub fn score_all<F: Scalar>(
    languages: &LanguageSet,
    options: &ScoringOptions<F>,
) -> Result<ScoringOutput<F>, ScoringError> {
    let k = options.gmm.components;
    if languages.len() < k.max(3) {
        return Err(ScoringError::TooFewSamples {
            n: languages.len(),
            k: k.max(3),
        });
    }
    let vitality = DimensionFit::fit(languages, Dimension::Vitality, &options.gmm)?;
    let digitality = DimensionFit::fit(languages, Dimension::Digitality, &options.gmm)?;
    let mut out = ScoringOutput {
        mode: options.mode,
        vitality,
        digitality,
        scores: Vec::with_capacity(languages.len()),
    };
    out.scores = languages
        .iter()
        .map(|r| out.rescore(r))
        .collect::<Result<_, _>>()?;
    Ok(out)
}

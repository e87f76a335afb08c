//! Logistic regression of Invisible-Giant status on colonial covariates,
//! and rank correlation of training-corpus token shares with vitality.

mod correlation;
mod design;
pub mod linalg;
mod logistic;

pub use correlation::{average_ranks, pearson, spearman, token_share, TokenShareTable};
pub use design::{build_design, design_columns, encode_row, CategoricalEncoding, DesignMatrix};
pub use logistic::{
    fit_logistic, penalized_gradient, penalized_log_likelihood, predict_probability,
    CoefficientRow, LogisticConfig, LogisticFit, RegressionReport, DEFAULT_RIDGE,
    GRADIENT_TOLERANCE, INTERCEPT, LARGE_COEFFICIENT, MAX_ITERATIONS,
};

use thiserror::Error;

use crate::model::LanguageId;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no label for language {0}")]
    MissingLabel(LanguageId),
    #[error("{n} samples is too few for {p} parameters")]
    TooFewSamples { n: usize, p: usize },
    #[error("responses must be 0 or 1")]
    InvalidResponse,
    #[error("non-finite value in input")]
    NonFiniteInput,
    #[error("information matrix is singular")]
    SingularInformation,
    #[error(
        "IRLS did not converge after {iterations} iterations (gradient max-norm {gradient:e})"
    )]
    NotConverged { iterations: usize, gradient: f64 },
    #[error("row has {got} columns, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero rank variance")]
    DegenerateInput,
    #[error("all token counts in `{0}` are zero")]
    AllZero(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use crate::ingest::LanguageSet;
    use crate::model::{
        DigitalityFeatures, GeoColonialCovariates, LanguageRecord, OfficialStatus, Region,
        VitalityFeatures,
    };

    fn rec(
        code: &str,
        region: Region,
        colonized: bool,
        years: u64,
        status: OfficialStatus,
    ) -> LanguageRecord {
        LanguageRecord {
            id: LanguageId::new(code).unwrap(),
            name: code.to_uppercase(),
            vitality: VitalityFeatures {
                speakers_l1: 999,
                egids: 4.0,
            },
            digitality: DigitalityFeatures::default(),
            covariates: GeoColonialCovariates {
                region,
                colonized,
                colonizer: colonized.then(|| "X".to_string()),
                colonial_duration_years: years,
                official_status: status,
                unicode_support: true,
                location: None,
            },
        }
    }

    #[test]
    fn design_encoding() {
        let set = LanguageSet::from_records([
            rec("aaa", Region::Asia, true, 150, OfficialStatus::Regional),
            rec("bbb", Region::Africa, false, 0, OfficialStatus::None),
        ]);
        let labels = BTreeMap::from([
            (LanguageId::new("aaa").unwrap(), true),
            (LanguageId::new("bbb").unwrap(), false),
        ]);
        let (x, y) = build_design::<f64>(&set, &labels).unwrap();
        assert_eq!(x.p(), 11);
        assert_eq!(x.names[0], "intercept");
        let col = |name: &str| x.names.iter().position(|n| n == name).unwrap();
        assert_eq!(x.rows[0][col("colonial_duration_100y")], 1.5);
        assert_eq!(x.rows[0][col("region_asia")], 1.0);
        assert_eq!(x.rows[0][col("official_regional")], 1.0);
        assert_eq!(x.rows[0][col("official_national")], 0.0);
        assert!((x.rows[0][col("log10_speakers")] - 3.0).abs() < 1e-12);
        // Africa and "none" are reference levels: no indicator set
        let africa = &x.rows[1];
        assert_eq!(&africa[7..], &[0.0; 4]);
        assert_eq!(&africa[3..5], &[0.0; 2]);
        assert_eq!(y, vec![1.0, 0.0]);
        assert!(x.rows.iter().all(|r| r[0] == 1.0));
        assert_eq!(x.encoding[1].reference, "Africa");

        let partial = BTreeMap::from([(LanguageId::new("aaa").unwrap(), true)]);
        assert!(matches!(
            build_design::<f64>(&set, &partial),
            Err(StatsError::MissingLabel(_))
        ));
    }
}

use serde::Serialize;

use super::ScoringError;
use crate::ingest::LanguageSet;
use crate::model::LanguageRecord;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Vitality,
    Digitality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `log10(1 + x)`, then min-max scaled over the dataset.
    Log10p1MinMax,
    /// `(10 - x) / 10`; maps EGIDS 0 to 1.0 and EGIDS 10 to 0.0.
    LinearInvert,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureScale<F> {
    pub name: &'static str,
    pub transform: Transform,
    /// Extremes of the transformed values over the fitting set.
    pub min: F,
    pub max: F,
}

impl<F: Scalar> FeatureScale<F> {
    fn transformed(&self, raw: f64) -> F {
        match self.transform {
            Transform::Log10p1MinMax => F::of(raw.ln_1p() / std::f64::consts::LN_10),
            Transform::LinearInvert => F::of((10.0 - raw) / 10.0),
        }
    }

    /// Normalized value in `[0, 1]`. A degenerate feature (`min == max`)
    /// maps every input to 0.5.
    pub fn apply(&self, raw: f64) -> F {
        let t = self.transformed(raw);
        let v = match self.transform {
            Transform::LinearInvert => t,
            Transform::Log10p1MinMax if self.max == self.min => F::of(0.5),
            Transform::Log10p1MinMax => (t - self.min) / (self.max - self.min),
        };
        v.max(F::zero()).min(F::one())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationSpec<F> {
    pub dimension: Dimension,
    pub features: Vec<FeatureScale<F>>,
}

impl Dimension {
    pub fn feature_names(&self) -> &'static [&'static str] {
        match self {
            Dimension::Vitality => &["speakers_l1", "egids"],
            Dimension::Digitality => {
                &["web_pages", "wiki_articles", "ml_assets", "archive_entries"]
            }
        }
    }

    fn transforms(&self) -> &'static [Transform] {
        match self {
            Dimension::Vitality => &[Transform::Log10p1MinMax, Transform::LinearInvert],
            Dimension::Digitality => &[Transform::Log10p1MinMax; 4],
        }
    }

    /// Raw feature values of one record, in `feature_names` order.
    pub fn raw_features(&self, r: &LanguageRecord) -> Vec<f64> {
        match self {
            Dimension::Vitality => vec![r.vitality.speakers_l1 as f64, r.vitality.egids],
            Dimension::Digitality => r.digitality.as_array().iter().map(|&c| c as f64).collect(),
        }
    }
}

pub fn fit_normalization<F: Scalar>(
    languages: &LanguageSet,
    dimension: Dimension,
) -> Result<NormalizationSpec<F>, ScoringError> {
    if languages.is_empty() {
        return Err(ScoringError::EmptySet);
    }
    let mut features: Vec<FeatureScale<F>> = dimension
        .feature_names()
        .iter()
        .zip(dimension.transforms())
        .map(|(name, transform)| FeatureScale {
            name,
            transform: *transform,
            min: F::infinity(),
            max: F::neg_infinity(),
        })
        .collect();
    for rec in languages.iter() {
        for (f, raw) in features.iter_mut().zip(dimension.raw_features(rec)) {
            let t = f.transformed(raw);
            f.min = f.min.min(t);
            f.max = f.max.max(t);
        }
    }
    Ok(NormalizationSpec {
        dimension,
        features,
    })
}

impl<F: Scalar> NormalizationSpec<F> {
    pub fn apply(&self, record: &LanguageRecord) -> Vec<F> {
        self.features
            .iter()
            .zip(self.dimension.raw_features(record))
            .map(|(f, raw)| f.apply(raw))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale(min: f64, max: f64) -> FeatureScale<f64> {
        FeatureScale {
            name: "speakers_l1",
            transform: Transform::Log10p1MinMax,
            min,
            max,
        }
    }

    #[test]
    fn zero_count_at_dataset_min() {
        assert_eq!(scale(0.0, 9.0).apply(0.0), 0.0);
    }

    #[test]
    fn egids_inversion() {
        let f = FeatureScale::<f64> {
            name: "egids",
            transform: Transform::LinearInvert,
            min: 0.0,
            max: 1.0,
        };
        assert_eq!(f.apply(10.0), 0.0);
        assert_eq!(f.apply(0.0), 1.0);
        assert_eq!(f.apply(6.5), 0.35);
    }

    #[test]
    fn javanese_speakers() {
        // max is log10(1 + 1e9); oracle value log10(68000001)/9 = 0.870279..
        let f = scale(0.0, (1e9_f64 + 1.0).log10());
        let v = f.apply(68_000_000.0);
        assert!((v - 0.8703).abs() < 1e-4, "{v}");
    }

    #[test]
    fn degenerate_feature_is_half() {
        assert_eq!(scale(3.0, 3.0).apply(999.0), 0.5);
    }

    #[test]
    fn generic_over_f32() {
        let f = FeatureScale::<f32> {
            name: "x",
            transform: Transform::Log10p1MinMax,
            min: 0.0,
            max: 2.0,
        };
        assert!((f.apply(9.0) - 0.5).abs() < 1e-6);
    }
}

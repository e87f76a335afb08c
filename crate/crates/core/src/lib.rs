//! Language vitality and digitality measurement.
//!
//! The pipeline reads per-language vitality data (speaker counts, EGIDS
//! level, geographic and colonial covariates) and four digital-footprint
//! count sources, normalizes both dimensions, extracts composite scores with
//! a three-component Gaussian mixture, and computes the representation gap
//! `digitality - vitality` for every language. Languages are then split into
//! four quadrants at the population medians, and the downstream analyses
//! (logistic regression on colonial covariates, token-share rank
//! correlation) and static reports (SVG scatter, GeoJSON map) are built on
//! top of that.
//!
//! The numeric core (`scoring`, `classify`, `stats`) is generic over the
//! floating point type through [`Scalar`]; the aliases at the crate root fix
//! it to `f64`, which is what the CLI uses.

pub mod classify;
pub mod ingest;
pub mod langid;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod stats;
pub mod wet;

use std::fmt::{Debug, Display};
use std::iter::Sum;

pub use model::{
    validate_record, DigitalityFeatures, GeoColonialCovariates, GeoPoint, LanguageId,
    LanguageRecord, OfficialStatus, Quadrant, QuadrantCategory, RawLanguageRecord, RecordError,
    Region, ScoreVector, VitalityFeatures,
};

/// Floating point scalar used by the numeric modules: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and input features.
    fn of(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("f64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type Score = ScoreVector<f64>;
pub type Category = QuadrantCategory<f64>;
pub type Normalization = scoring::NormalizationSpec<f64>;
pub type Gmm = scoring::GmmModel<f64>;
pub type Composite = scoring::CompositeScore<f64>;
pub type Census = classify::QuadrantCensus<f64>;
pub type Design = stats::DesignMatrix<f64>;
pub type Logistic = stats::LogisticFit<f64>;
pub type TokenShares = stats::TokenShareTable<f64>;

use std::collections::BTreeMap;

use serde::Serialize;

use super::StatsError;
use crate::ingest::LanguageSet;
use crate::model::{LanguageId, LanguageRecord, OfficialStatus, Region};
use crate::Scalar;

/// One-hot coding of a categorical variable. The reference level has no
/// column; every other level gets an indicator in `levels` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoricalEncoding {
    pub variable: &'static str,
    pub reference: &'static str,
    pub levels: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix<F> {
    /// Row-major `n x p`; row `i` belongs to `ids[i]`.
    pub rows: Vec<Vec<F>>,
    pub names: Vec<String>,
    pub encoding: Vec<CategoricalEncoding>,
    pub ids: Vec<LanguageId>,
}

impl<F> DesignMatrix<F> {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    /// A bare matrix without categorical bookkeeping, for synthetic data.
    pub fn from_rows(names: Vec<String>, rows: Vec<Vec<F>>) -> Self {
        DesignMatrix {
            ids: Vec::new(),
            encoding: Vec::new(),
            names,
            rows,
        }
    }
}

const OFFICIAL_LEVELS: [OfficialStatus; 2] = [OfficialStatus::National, OfficialStatus::Regional];
const REGION_LEVELS: [Region; 4] = [
    Region::Asia,
    Region::Europe,
    Region::Americas,
    Region::Pacific,
];

/// Column names in design order.
pub fn design_columns() -> Vec<String> {
    let mut names = vec![
        "intercept".to_string(),
        "colonized".to_string(),
        "colonial_duration_100y".to_string(),
    ];
    names.extend(
        OFFICIAL_LEVELS
            .iter()
            .map(|l| format!("official_{}", l.as_str())),
    );
    names.push("unicode_support".into());
    names.push("log10_speakers".into());
    names.extend(
        REGION_LEVELS
            .iter()
            .map(|r| format!("region_{}", r.as_str().to_lowercase())),
    );
    names
}

pub fn encode_row<F: Scalar>(r: &LanguageRecord) -> Vec<F> {
    let c = &r.covariates;
    let flag = |b: bool| if b { F::one() } else { F::zero() };
    let mut row = vec![
        F::one(),
        flag(c.colonized),
        F::of(c.colonial_duration_years as f64 / 100.0),
    ];
    row.extend(
        OFFICIAL_LEVELS
            .iter()
            .map(|l| flag(c.official_status == *l)),
    );
    row.push(flag(c.unicode_support));
    row.push(F::of(
        (r.vitality.speakers_l1 as f64).ln_1p() / std::f64::consts::LN_10,
    ));
    row.extend(REGION_LEVELS.iter().map(|l| flag(c.region == *l)));
    row
}

/// Design matrix and 0/1 response for "is an Invisible Giant", in id order.
pub fn build_design<F: Scalar>(
    languages: &LanguageSet,
    labels: &BTreeMap<LanguageId, bool>,
) -> Result<(DesignMatrix<F>, Vec<F>), StatsError> {
    let mut rows = Vec::with_capacity(languages.len());
    let mut y = Vec::with_capacity(languages.len());
    let mut ids = Vec::with_capacity(languages.len());
    for r in languages.iter() {
        let label = *labels.get(&r.id).ok_or(StatsError::MissingLabel(r.id))?;
        rows.push(encode_row(r));
        y.push(if label { F::one() } else { F::zero() });
        ids.push(r.id);
    }
    let encoding = vec![
        CategoricalEncoding {
            variable: "official_status",
            reference: OfficialStatus::None.as_str(),
            levels: OFFICIAL_LEVELS.iter().map(|l| l.as_str()).collect(),
        },
        CategoricalEncoding {
            variable: "region",
            reference: Region::Africa.as_str(),
            levels: REGION_LEVELS.iter().map(|l| l.as_str()).collect(),
        },
    ];
    Ok((
        DesignMatrix {
            rows,
            names: design_columns(),
            encoding,
            ids,
        },
        y,
    ))
}

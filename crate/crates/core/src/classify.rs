//! Median-split quadrant classification and the category census.
//!
//! The median of n values is the lower-middle order statistic (index
//! `ceil(n/2) - 1` ascending), so the threshold is always an attained value.
//! "Above" means strictly greater; a score equal to the median is below.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::model::{LanguageId, Quadrant, QuadrantCategory, ScoreVector};
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("no scores to take a median of")]
    EmptyInput,
    #[error("census needs at least 4 languages, got {0}")]
    TooFewLanguages(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Medians<F> {
    pub vitality: F,
    pub digitality: F,
}

pub fn lower_median<F: Scalar>(values: &[F]) -> Option<F> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Some(v[(v.len() - 1) / 2])
}

pub fn compute_medians<F: Scalar>(scores: &[ScoreVector<F>]) -> Result<Medians<F>, ClassifyError> {
    let v: Vec<F> = scores.iter().map(|s| s.vitality_norm).collect();
    let d: Vec<F> = scores.iter().map(|s| s.digitality_norm).collect();
    Ok(Medians {
        vitality: lower_median(&v).ok_or(ClassifyError::EmptyInput)?,
        digitality: lower_median(&d).ok_or(ClassifyError::EmptyInput)?,
    })
}

pub fn classify_language<F: Scalar>(
    score: &ScoreVector<F>,
    medians: &Medians<F>,
) -> QuadrantCategory<F> {
    QuadrantCategory {
        label: Quadrant::from_sides(
            score.vitality_norm > medians.vitality,
            score.digitality_norm > medians.digitality,
        ),
        vitality_median: medians.vitality,
        digitality_median: medians.digitality,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QuadrantCounts {
    pub stronghold: u64,
    pub digital_echo: u64,
    pub fading_voice: u64,
    pub invisible_giant: u64,
}

impl QuadrantCounts {
    pub fn get(&self, q: Quadrant) -> u64 {
        match q {
            Quadrant::Stronghold => self.stronghold,
            Quadrant::DigitalEcho => self.digital_echo,
            Quadrant::FadingVoice => self.fading_voice,
            Quadrant::InvisibleGiant => self.invisible_giant,
        }
    }

    fn bump(&mut self, q: Quadrant) {
        *match q {
            Quadrant::Stronghold => &mut self.stronghold,
            Quadrant::DigitalEcho => &mut self.digital_echo,
            Quadrant::FadingVoice => &mut self.fading_voice,
            Quadrant::InvisibleGiant => &mut self.invisible_giant,
        } += 1;
    }

    pub fn total(&self) -> u64 {
        Quadrant::ALL.iter().map(|q| self.get(*q)).sum()
    }

    /// Counts in stronghold / digital echo / fading voice / invisible giant order.
    pub fn as_array(&self) -> [u64; 4] {
        Quadrant::ALL.map(|q| self.get(q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantPercentages<F> {
    pub stronghold: F,
    pub digital_echo: F,
    pub fading_voice: F,
    pub invisible_giant: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantCensus<F> {
    pub medians: Medians<F>,
    pub counts: QuadrantCounts,
    pub percentages: QuadrantPercentages<F>,
    /// Label per language, in input order.
    #[serde(skip)]
    pub assignments: Vec<(LanguageId, Quadrant)>,
}

pub fn census<F: Scalar>(scores: &[ScoreVector<F>]) -> Result<QuadrantCensus<F>, ClassifyError> {
    if scores.len() < 4 {
        return Err(ClassifyError::TooFewLanguages(scores.len()));
    }
    let medians = compute_medians(scores)?;
    let mut counts = QuadrantCounts::default();
    let assignments: Vec<_> = scores
        .iter()
        .map(|s| {
            let q = classify_language(s, &medians).label;
            counts.bump(q);
            (s.id, q)
        })
        .collect();
    let n = F::of(scores.len() as f64);
    let pct = |c: u64| F::of(100.0) * F::of(c as f64) / n;
    Ok(QuadrantCensus {
        medians,
        percentages: QuadrantPercentages {
            stronghold: pct(counts.stronghold),
            digital_echo: pct(counts.digital_echo),
            fading_voice: pct(counts.fading_voice),
            invisible_giant: pct(counts.invisible_giant),
        },
        counts,
        assignments,
    })
}

impl<F: Scalar + Serialize> QuadrantCensus<F> {
    /// `{medians:{vitality,digitality}, counts:{..}, percentages:{..}}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census serializes")
    }

    pub fn label_of(&self, id: &LanguageId) -> Option<Quadrant> {
        self.assignments
            .iter()
            .find(|(i, _)| i == id)
            .map(|(_, q)| *q)
    }
}

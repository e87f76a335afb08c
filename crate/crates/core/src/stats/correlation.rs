use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use super::StatsError;
use crate::model::LanguageId;
use crate::Scalar;

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks<F: Scalar>(values: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![F::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let rank = F::of((i + j + 2) as f64 / 2.0);
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn check_lengths<F>(x: &[F], y: &[F]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples { n: x.len(), p: 1 });
    }
    Ok(())
}

fn centered_correlation<F: Scalar>(x: &[F], y: &[F], mx: F, my: F) -> Result<F, StatsError> {
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (*a - mx, *b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > F::zero() && syy > F::zero()) {
        return Err(StatsError::DegenerateInput);
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-F::one()).min(F::one()))
}

pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Result<F, StatsError> {
    check_lengths(x, y)?;
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }
    let n = F::of(x.len() as f64);
    let mx = x.iter().copied().sum::<F>() / n;
    let my = y.iter().copied().sum::<F>() / n;
    centered_correlation(x, y, mx, my)
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman<F: Scalar>(x: &[F], y: &[F]) -> Result<F, StatsError> {
    check_lengths(x, y)?;
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(StatsError::NonFiniteInput);
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    // average ranks always sum to n(n+1)/2, so the mean is exact
    let mean = F::of((x.len() + 1) as f64 / 2.0);
    centered_correlation(&rx, &ry, mean, mean)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenShareTable<F> {
    pub dataset: String,
    pub counts: BTreeMap<LanguageId, u64>,
    pub shares: BTreeMap<LanguageId, F>,
    pub total: u64,
}

pub fn token_share<F: Scalar>(
    dataset: &str,
    counts: &BTreeMap<LanguageId, u64>,
) -> Result<TokenShareTable<F>, StatsError> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(StatsError::AllZero(dataset.to_string()));
    }
    let t = F::of(total as f64);
    Ok(TokenShareTable {
        dataset: dataset.to_string(),
        shares: counts
            .iter()
            .map(|(k, c)| (*k, F::of(*c as f64) / t))
            .collect(),
        counts: counts.clone(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(s: &str) -> LanguageId {
        LanguageId::new(s).unwrap()
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 30.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn exact_extremes() {
        let x = [0.3, 1.0, 7.0, 7.5, 100.0];
        assert_eq!(spearman(&x, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert_eq!(spearman(&x, &[9.0, 8.0, 3.0, -1.0, -5.0]).unwrap(), -1.0);
    }

    #[test]
    fn tie_case() {
        // ranks x = [1, 2.5, 2.5, 4]; sxy = 4.5, sxx = 4.5, syy = 5 -> 4.5 / sqrt(22.5)
        let r = spearman(&[1.0f64, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((r - 0.9487).abs() < 1e-4, "{r}");
        assert!((r - 4.5 / 22.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 1.0], &[1.0, 2.0]),
            Err(StatsError::DegenerateInput)
        ));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(matches!(
            pearson(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::DegenerateInput)
        ));
    }

    #[test]
    fn pearson_linear() {
        let r = pearson(&[1.0f64, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shares() {
        let t = token_share::<f64>("pile", &BTreeMap::from([(id("eng"), 75), (id("deu"), 25)]))
            .unwrap();
        assert_eq!(t.shares[&id("eng")], 0.75);
        assert_eq!(t.shares[&id("deu")], 0.25);
        let t = token_share::<f64>("pile", &BTreeMap::from([(id("eng"), 7)])).unwrap();
        assert_eq!(t.shares[&id("eng")], 1.0);
        assert!(matches!(
            token_share::<f64>("pile", &BTreeMap::from([(id("eng"), 0)])),
            Err(StatsError::AllZero(_))
        ));
    }

    #[test]
    fn five_language_association_sign() {
        let codes = ["aaa", "bbb", "ccc", "ddd", "eee"];
        let vitality = [0.9, 0.7, 0.5, 0.3, 0.1];
        let tokens = [5000u64, 900, 1200, 30, 2];
        let counts: BTreeMap<_, _> = codes.iter().zip(tokens).map(|(c, t)| (id(c), t)).collect();
        let table = token_share::<f64>("mc4", &counts).unwrap();
        let shares: Vec<f64> = codes.iter().map(|c| table.shares[&id(c)]).collect();
        let r = spearman(&shares, &vitality).unwrap();
        // one adjacent swap out of five: rho = 1 - 6*2/(5*24) = 0.9
        assert!((r - 0.9).abs() < 1e-12, "{r}");
    }

    proptest! {
        #[test]
        fn shares_sum_to_one(counts in proptest::collection::vec(0u64..1_000_000_000, 1..200)) {
            prop_assume!(counts.iter().any(|c| *c > 0));
            let map: BTreeMap<_, _> = counts
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let code: String = [i / 26 % 26, i % 26, 0]
                        .iter()
                        .map(|k| (b'a' + *k as u8) as char)
                        .collect();
                    (id(&code), *c)
                })
                .collect();
            let t = token_share::<f64>("x", &map).unwrap();
            let s: f64 = t.shares.values().sum();
            prop_assert!((s - 1.0).abs() < 1e-9);
        }

        #[test]
        fn monotone_transform_invariance(
            pairs in proptest::collection::vec((-50i32..50, -50i32..50), 3..40),
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let base = spearman(&x, &y);
            prop_assume!(base.is_ok());
            let fx: Vec<f64> = x.iter().map(|v| (v / 10.0).exp()).collect();
            let gy: Vec<f64> = y.iter().map(|v| v * v * v + 3.0 * v).collect();
            prop_assert_eq!(base.unwrap(), spearman(&fx, &gy).unwrap());
        }
    }
}

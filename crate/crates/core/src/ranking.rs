//! Feature ranking by information gain (over equal-frequency bins) and by
//! Pearson correlation with the numeric level.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::features::{feature_group, FeatureSet};

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankError {
    #[error("empty input")]
    EmptyInput,
    #[error("bin count must be at least 2, got {0}")]
    InvalidBins(usize),
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation undefined for constant input")]
    ConstantInput,
    #[error("need at least two points for a correlation")]
    TooFewPoints,
    #[error("feature {feature:?}: {source}")]
    Feature {
        feature: String,
        #[source]
        source: Box<RankError>,
    },
}

/// Equal-frequency discretization.
///
/// Sorted positions are split into `bins` runs whose sizes differ by at most
/// one; a group of tied values always lands in the bin of its first sorted
/// position, so ties straddling a boundary fall into the lower bin.
pub fn discretize_equal_frequency(values: &[f64], bins: usize) -> Result<Vec<usize>, RankError> {
    if bins < 2 {
        return Err(RankError::InvalidBins(bins));
    }
    if values.is_empty() {
        return Err(RankError::EmptyInput);
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut out = vec![0; n];
    let mut group_bin = 0;
    for (pos, &idx) in order.iter().enumerate() {
        let starts_group = pos == 0 || values[order[pos - 1]].total_cmp(&values[idx]) != Ordering::Equal;
        if starts_group {
            group_bin = pos * bins / n;
        }
        out[idx] = group_bin;
    }
    Ok(out)
}

fn counts<T: Eq + Hash + Copy>(items: impl IntoIterator<Item = T>) -> HashMap<T, usize> {
    let mut map = HashMap::new();
    for item in items {
        *map.entry(item).or_insert(0) += 1;
    }
    map
}

/// Shannon entropy in bits.
pub fn entropy<T: Eq + Hash + Copy>(labels: &[T]) -> Result<f64, RankError> {
    if labels.is_empty() {
        return Err(RankError::EmptyInput);
    }
    let n = labels.len() as f64;
    // sorted counts keep the float summation order stable across runs
    let mut freq: Vec<usize> = counts(labels.iter().copied()).into_values().collect();
    freq.sort_unstable();
    Ok(freq
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

/// `H(labels) - sum_b (n_b / n) H(labels | bin b)`.
pub fn information_gain(values: &[f64], labels: &[u8], bins: usize) -> Result<f64, RankError> {
    if values.len() != labels.len() {
        return Err(RankError::LengthMismatch(values.len(), labels.len()));
    }
    let binned = discretize_equal_frequency(values, bins)?;
    let n = labels.len() as f64;
    let mut per_bin: Vec<Vec<u8>> = vec![Vec::new(); bins];
    for (b, &l) in binned.iter().zip(labels) {
        per_bin[*b].push(l);
    }
    let mut conditional = 0.0;
    for members in per_bin.iter().filter(|m| !m.is_empty()) {
        conditional += members.len() as f64 / n * entropy(members)?;
    }
    Ok((entropy(labels)? - conditional).max(0.0))
}

/// Sample Pearson correlation. Constant input is an error, never 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, RankError> {
    if x.len() != y.len() {
        return Err(RankError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(RankError::TooFewPoints);
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(RankError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub feature: String,
    /// TRAD or LEX; `None` for names outside the canonical feature list.
    pub set: Option<FeatureSet>,
    pub info_gain: f64,
    /// `None` when the correlation is undefined (constant feature).
    pub pearson_rho: Option<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub bins: usize,
    pub top_k: usize,
    pub entries: Vec<RankingEntry>,
}

impl RankingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,set,info_gain,pearson_rho,rank\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.feature,
                e.set.map_or("", |s| if s == FeatureSet::Trad { "TRAD" } else { "LEX" }),
                e.info_gain,
                e.pearson_rho.map_or("undefined".to_string(), |r| r.to_string()),
                e.rank
            ));
        }
        out
    }

    /// Plain-text listing: set, feature, information gain, correlation.
    pub fn listing(&self) -> String {
        let mut out = format!("{:<5} {:<24} {:>8} {:>8}\n", "Set", "Feature", "IG", "rho");
        for e in &self.entries {
            let set = e
                .set
                .map_or("-", |s| if s == FeatureSet::Trad { "TRAD" } else { "LEX" });
            let rho = e.pearson_rho.map_or("undef".to_string(), |r| format!("{r:.3}"));
            out.push_str(&format!(
                "{:<5} {:<24} {:>8.3} {:>8}\n",
                set, e.feature, e.info_gain, rho
            ));
        }
        out
    }
}

/// Scores every feature, sorts by information gain (then |rho|, then column
/// order) and keeps the top `top_k`.
pub fn rank_features(data: &LabeledDataset, bins: usize, top_k: usize) -> Result<RankingReport, RankError> {
    if data.is_empty() {
        return Err(RankError::EmptyInput);
    }
    let levels: Vec<f64> = data.labels.iter().map(|&l| f64::from(l)).collect();
    let mut scored = Vec::with_capacity(data.dim());
    for (j, name) in data.feature_names.iter().enumerate() {
        let column = data.column(j);
        let wrap = |source: RankError| RankError::Feature {
            feature: name.clone(),
            source: Box::new(source),
        };
        let info_gain = information_gain(&column, &data.labels, bins).map_err(wrap)?;
        let pearson_rho = match pearson(&column, &levels) {
            Ok(r) => Some(r),
            Err(RankError::ConstantInput) => None,
            Err(e) => return Err(wrap(e)),
        };
        scored.push((
            j,
            RankingEntry {
                feature: name.clone(),
                set: feature_group(name),
                info_gain,
                pearson_rho,
                rank: 0,
            },
        ));
    }

    let abs_rho = |e: &RankingEntry| e.pearson_rho.map_or(-1.0, f64::abs);
    scored.sort_by(|(ja, a), (jb, b)| {
        b.info_gain
            .total_cmp(&a.info_gain)
            .then_with(|| abs_rho(b).total_cmp(&abs_rho(a)))
            .then(ja.cmp(jb))
    });

    let entries = scored
        .into_iter()
        .take(top_k)
        .enumerate()
        .map(|(i, (_, mut e))| {
            e.rank = i + 1;
            e
        })
        .collect();
    Ok(RankingReport { bins, top_k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn populations(bins: &[usize], k: usize) -> Vec<usize> {
        let mut pop = vec![0; k];
        for &b in bins {
            pop[b] += 1;
        }
        pop
    }

    #[test]
    fn equal_frequency_bins() {
        let values: Vec<f64> = (0..10).map(f64::from).rev().collect();
        assert_eq!(
            populations(&discretize_equal_frequency(&values, 2).unwrap(), 2),
            vec![5, 5]
        );
        let same = vec![3.0; 7];
        assert_eq!(
            populations(&discretize_equal_frequency(&same, 4).unwrap(), 4),
            vec![7, 0, 0, 0]
        );
        let nine: Vec<f64> = (1..=9).map(f64::from).collect();
        assert_eq!(
            populations(&discretize_equal_frequency(&nine, 3).unwrap(), 3),
            vec![3, 3, 3]
        );
        // tie across the boundary goes down
        let tied = [1.0, 2.0, 2.0, 2.0, 3.0, 4.0];
        assert_eq!(discretize_equal_frequency(&tied, 2).unwrap(), vec![0, 0, 0, 0, 1, 1]);
        assert_eq!(discretize_equal_frequency(&[], 2), Err(RankError::EmptyInput));
        assert_eq!(discretize_equal_frequency(&[1.0], 1), Err(RankError::InvalidBins(1)));
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[2u8, 2, 2]).unwrap(), 0.0);
        assert_eq!(entropy(&[1u8, 2, 1, 2]).unwrap(), 1.0);
        assert!((entropy(&[1u8, 2, 3]).unwrap() - 3f64.log2()).abs() < 1e-15);
        assert_eq!(entropy::<u8>(&[]), Err(RankError::EmptyInput));
    }

    #[test]
    fn gain_extremes() {
        let labels: Vec<u8> = (0..30).map(|i| (i % 3) as u8 + 1).collect();
        let values: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        assert!((information_gain(&values, &labels, 3).unwrap() - 3f64.log2()).abs() < 1e-9);
        assert!((information_gain(&values, &labels, 10).unwrap() - 3f64.log2()).abs() < 1e-9);
        assert_eq!(information_gain(&vec![1.0; 30], &labels, 10).unwrap(), 0.0);
    }

    #[test]
    fn correlation_values() {
        let level = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 3.0];
        let neg: Vec<f64> = level.iter().map(|l| -l).collect();
        assert_eq!(pearson(&level, &level).unwrap(), 1.0);
        assert_eq!(pearson(&neg, &level).unwrap(), -1.0);
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(RankError::ConstantInput)
        );
        assert_eq!(pearson(&[1.0], &[1.0]), Err(RankError::TooFewPoints));
    }

    #[test]
    fn planted_feature_ranks_first() {
        let labels: Vec<u8> = (0..60).map(|i| (i % 3) as u8 + 1).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| vec![((i * 7) % 11) as f64, f64::from(l), 5.0])
            .collect();
        let data = LabeledDataset::from_rows(rows, labels);
        let report = rank_features(&data, 10, 10).unwrap();
        assert_eq!(report.entries.len(), 3);
        assert_eq!(report.entries[0].feature, "f1");
        assert_eq!(report.entries[0].rank, 1);
        let constant = report.entries.iter().find(|e| e.feature == "f2").unwrap();
        assert_eq!(constant.pearson_rho, None);
        assert!(report.to_csv().contains("f2,,0,undefined,3"));
        assert_eq!(report, rank_features(&data, 10, 10).unwrap());
    }

    proptest! {
        #[test]
        fn gain_bounds(pairs in proptest::collection::vec((-50.0f64..50.0, 1u8..=3), 1..80), bins in 2usize..12) {
            let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let labels: Vec<u8> = pairs.iter().map(|p| p.1).collect();
            let ig = information_gain(&values, &labels, bins).unwrap();
            let h = entropy(&labels).unwrap();
            prop_assert!(ig >= 0.0);
            prop_assert!(ig <= h.min((bins as f64).log2()) + 1e-12);
        }

        #[test]
        fn gain_invariant_under_monotone_maps(pairs in proptest::collection::vec((-5.0f64..5.0, 1u8..=3), 2..60)) {
            let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let labels: Vec<u8> = pairs.iter().map(|p| p.1).collect();
            let mapped: Vec<f64> = values.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
            // exp can merge distinct values only below float resolution; the strategy stays far from that
            let a = information_gain(&values, &labels, 4).unwrap();
            let b = information_gain(&mapped, &labels, 4).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn pearson_affine(pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40), a in 0.1f64..5.0, b in -5.0f64..5.0, flip in proptest::bool::ANY) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let Ok(r) = pearson(&x, &y) {
                let scale = if flip { -a } else { a };
                let moved: Vec<f64> = x.iter().map(|v| scale * v + b).collect();
                let r2 = pearson(&moved, &y).unwrap();
                prop_assert!((r2 - scale.signum() * r).abs() < 1e-9);
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::features::FeatureSet;

/// Readability levels recognised by the toolkit.
pub const LEVELS: [u8; 3] = [1, 2, 3];

pub fn is_valid_level(level: u8) -> bool {
    LEVELS.contains(&level)
}

/// Feature rows paired with readability levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    /// `None` for ad-hoc feature spaces that are not a slice of the canonical 15.
    pub feature_set: Option<FeatureSet>,
    pub doc_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl LabeledDataset {
    /// Builds a dataset over an ad-hoc feature space named `f0..fN`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Self {
        assert_eq!(rows.len(), labels.len(), "rows and labels must align");
        let dim = rows.first().map_or(0, Vec::len);
        LabeledDataset {
            feature_names: (0..dim).map(|i| format!("f{i}")).collect(),
            feature_set: None,
            doc_ids: (0..rows.len()).map(|i| format!("row-{i}")).collect(),
            rows,
            labels,
        }
    }

    /// Builds a dataset from full 15-value rows, keeping only `feature_set`'s columns.
    pub fn from_full_rows(
        doc_ids: Vec<String>,
        full_rows: &[Vec<f64>],
        labels: Vec<u8>,
        feature_set: FeatureSet,
    ) -> Self {
        assert_eq!(full_rows.len(), labels.len(), "rows and labels must align");
        assert_eq!(full_rows.len(), doc_ids.len(), "rows and ids must align");
        LabeledDataset {
            feature_names: feature_set.names().iter().map(|s| s.to_string()).collect(),
            feature_set: Some(feature_set),
            doc_ids,
            rows: full_rows.iter().map(|r| feature_set.select(r)).collect(),
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<u8> {
        let mut classes = self.labels.clone();
        classes.sort_unstable();
        classes.dedup();
        classes
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            feature_names: self.feature_names.clone(),
            feature_set: self.feature_set,
            doc_ids: indices.iter().map(|&i| self.doc_ids[i].clone()).collect(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[idx]).collect()
    }
}

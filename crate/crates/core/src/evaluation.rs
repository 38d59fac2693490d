//! Stratified k-fold cross-validation and the reported metrics: accuracy,
//! macro-F1, label RMSE, probability RMSE, confusion matrices and per-class
//! correct/misclassified rates.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{ClassifierError, Hyperparams, ModelKind, TrainedModel};
use crate::dataset::{LabeledDataset, LEVELS};
use crate::features::FeatureSet;
use crate::seed::{derive_seed, rng_from_seed};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("need at least {k} rows for {k}-fold cross-validation, found {rows}")]
    TooFewRows { rows: usize, k: usize },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("empty input")]
    EmptyInput,
    #[error("prediction and label lists differ in length ({predictions} vs {labels})")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("probability vector {row} sums to {sum}, not 1")]
    UnnormalizedProbabilities { row: usize, sum: f64 },
    #[error("level {0} has no actual instances")]
    EmptyClassRow(u8),
    #[error("label {0} is outside the matrix classes")]
    UnknownLabel(u8),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
}

/// Fold index for every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub folds: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }
}

/// Stratified fold assignment.
///
/// Rows of each class (ascending level order) are shuffled with a seeded RNG
/// and dealt round-robin. The dealing position carries over from one class to
/// the next, which keeps total fold sizes within one of each other.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidFoldCount(k));
    }
    if labels.len() < k {
        return Err(EvalError::TooFewRows { rows: labels.len(), k });
    }
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let mut rng = rng_from_seed(derive_seed(seed, "stratified-kfold"));
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for rows in by_class.values_mut() {
        rows.shuffle(&mut rng);
        for &row in rows.iter() {
            folds[row] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, folds })
}

/// `counts[actual][predicted]` over an ordered class list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<u8>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<u8>) -> Self {
        let k = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; k]; k],
        }
    }

    /// Builds a matrix over levels 1..=k from literal rows.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let classes = (1..=rows.len() as u8).collect();
        ConfusionMatrix { classes, counts: rows }
    }

    pub fn from_predictions(classes: Vec<u8>, actual: &[u8], predicted: &[u8]) -> Result<Self, EvalError> {
        if actual.len() != predicted.len() {
            return Err(EvalError::LengthMismatch {
                predictions: predicted.len(),
                labels: actual.len(),
            });
        }
        let mut cm = ConfusionMatrix::new(classes);
        for (&a, &p) in actual.iter().zip(predicted) {
            cm.record(a, p)?;
        }
        Ok(cm)
    }

    fn index_of(&self, label: u8) -> Result<usize, EvalError> {
        self.classes
            .iter()
            .position(|&c| c == label)
            .ok_or(EvalError::UnknownLabel(label))
    }

    pub fn record(&mut self, actual: u8, predicted: u8) -> Result<(), EvalError> {
        let a = self.index_of(actual)?;
        let p = self.index_of(predicted)?;
        self.counts[a][p] += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.classes.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// CSV with an `actual` column followed by one column per predicted level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("actual");
        for c in &self.classes {
            out.push_str(&format!(",L{c}"));
        }
        out.push('\n');
        for (c, row) in self.classes.iter().zip(&self.counts) {
            out.push_str(&format!("L{c}"));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}", "Actual")?;
        for c in &self.classes {
            write!(f, "{:>8}", format!("L{c}"))?;
        }
        writeln!(f)?;
        for (c, row) in self.classes.iter().zip(&self.counts) {
            write!(f, "{:<8}", format!("L{c}"))?;
            for v in row {
                write!(f, "{v:>8}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok(cm.trace() as f64 / total as f64)
}

fn per_class_f1(cm: &ConfusionMatrix) -> Vec<f64> {
    let rows = cm.row_sums();
    let cols = cm.column_sums();
    (0..cm.classes.len())
        .map(|i| {
            let tp = cm.counts[i][i] as f64;
            let precision = if cols[i] == 0 { 0.0 } else { tp / cols[i] as f64 };
            let recall = if rows[i] == 0 { 0.0 } else { tp / rows[i] as f64 };
            if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            }
        })
        .collect()
}

/// Unweighted mean of per-class F1; a class with zero precision and recall
/// contributes 0.
pub fn macro_f1(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let f1 = per_class_f1(cm);
    Ok(f1.iter().sum::<f64>() / f1.len() as f64)
}

/// Per-class F1 weighted by actual class support.
pub fn weighted_f1(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let support = cm.row_sums();
    Ok(per_class_f1(cm)
        .iter()
        .zip(&support)
        .map(|(f, s)| f * *s as f64)
        .sum::<f64>()
        / total as f64)
}

/// Root mean squared difference between predicted and actual level numbers.
pub fn rmse_label(predicted: &[u8], actual: &[u8]) -> Result<f64, EvalError> {
    if predicted.len() != actual.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predicted.len(),
            labels: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let sum: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(&p, &a)| {
            let d = f64::from(p) - f64::from(a);
            d * d
        })
        .sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// Root mean squared error between probability vectors and one-hot class
/// indicators, averaged over instances and classes.
pub fn rmse_prob(probabilities: &[Vec<f64>], actual: &[u8], classes: &[u8]) -> Result<f64, EvalError> {
    if probabilities.len() != actual.len() {
        return Err(EvalError::LengthMismatch {
            predictions: probabilities.len(),
            labels: actual.len(),
        });
    }
    if probabilities.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut sum = 0.0;
    for (row, (p, &label)) in probabilities.iter().zip(actual).enumerate() {
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 || p.len() != classes.len() {
            return Err(EvalError::UnnormalizedProbabilities { row, sum: total });
        }
        if !classes.contains(&label) {
            return Err(EvalError::UnknownLabel(label));
        }
        for (pc, &c) in p.iter().zip(classes) {
            let target = if c == label { 1.0 } else { 0.0 };
            sum += (pc - target) * (pc - target);
        }
    }
    Ok((sum / (probabilities.len() * classes.len()) as f64).sqrt())
}

/// A percentage held in tenths of a percent, truncated rather than rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permille(pub u64);

impl Permille {
    /// `floor(1000 * num / den)`, computed in integers.
    pub fn truncated(num: u64, den: u64) -> Self {
        Permille(num * 1000 / den)
    }
}

impl fmt::Display for Permille {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}%", self.0 / 10, self.0 % 10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRate {
    pub level: u8,
    pub correct: Permille,
    pub misclassified: Permille,
}

impl fmt::Display for ClassRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.correct, self.misclassified)
    }
}

/// Correct and misclassified share of each actual level, each truncated to
/// one decimal independently (`9/29` gives `31.0% / 68.9%`).
pub fn per_class_rates(cm: &ConfusionMatrix) -> Result<Vec<ClassRate>, EvalError> {
    cm.classes
        .iter()
        .zip(cm.row_sums())
        .enumerate()
        .map(|(i, (&level, row))| {
            if row == 0 {
                return Err(EvalError::EmptyClassRow(level));
            }
            let hit = cm.counts[i][i];
            Ok(ClassRate {
                level,
                correct: Permille::truncated(hit, row),
                misclassified: Permille::truncated(row - hit, row),
            })
        })
        .collect()
}

/// What to train in each fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hyperparams: Hyperparams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub doc_id: String,
    pub fold: usize,
    pub actual: u8,
    pub predicted: u8,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub feature_set: Option<FeatureSet>,
    pub feature_count: usize,
    pub model_type: ModelKind,
    pub folds: usize,
    pub rows: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub rmse_label: f64,
    pub rmse_prob: f64,
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassRate>,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    pub predictions: Vec<Prediction>,
}

impl EvalReport {
    /// One summary line in the layout of a results table row. `weighted`
    /// swaps macro-F1 for class-weighted F1.
    pub fn summary_line(&self, weighted: bool) -> String {
        let (f1_name, f1) = if weighted {
            ("weighted_f1", self.weighted_f1)
        } else {
            ("macro_f1", self.macro_f1)
        };
        format!(
            "{:<6} {:<5} features={:<3} accuracy={:.3} {f1_name}={f1:.3} rmse_label={:.3} rmse_prob={:.3}",
            self.feature_set.map_or("custom", FeatureSet::as_str),
            self.model_type.to_string(),
            self.feature_count,
            self.accuracy,
            self.rmse_label,
            self.rmse_prob
        )
    }

    pub fn rates_block(&self) -> String {
        let mut out = String::from("Level   Corr / Mis\n");
        for rate in &self.per_class {
            out.push_str(&format!("L{:<6} {}\n", rate.level, rate));
        }
        out
    }
}

/// Pooled k-fold cross-validation: every row is predicted once by a model
/// trained (with its own standardizer) on the other folds.
pub fn cross_validate(data: &LabeledDataset, spec: &ModelSpec, k: usize, seed: u64) -> Result<EvalReport, EvalError> {
    let assignment = stratified_kfold(&data.labels, k, seed)?;
    let classes = data.classes();
    let mut predictions: Vec<Option<Prediction>> = vec![None; data.len()];

    for fold in 0..k {
        let train = data.subset(&assignment.train_indices(fold));
        let model = TrainedModel::train(spec.kind, &train, &spec.hyperparams)
            .map_err(|source| EvalError::Fold { fold, source })?;
        for i in assignment.test_indices(fold) {
            let (predicted, proba) = model
                .predict(&data.rows[i])
                .map_err(|source| EvalError::Fold { fold, source })?;
            // spread onto the full class list in case a class was missing from training
            let mut probabilities = vec![0.0; classes.len()];
            for (c, p) in model.classes().iter().zip(proba) {
                let idx = classes
                    .iter()
                    .position(|x| x == c)
                    .expect("training classes are a subset");
                probabilities[idx] = p;
            }
            predictions[i] = Some(Prediction {
                doc_id: data.doc_ids[i].clone(),
                fold,
                actual: data.labels[i],
                predicted,
                probabilities,
            });
        }
    }

    let predictions: Vec<Prediction> = predictions
        .into_iter()
        .map(|p| p.expect("every row belongs to exactly one fold"))
        .collect();
    let actual: Vec<u8> = predictions.iter().map(|p| p.actual).collect();
    let predicted: Vec<u8> = predictions.iter().map(|p| p.predicted).collect();
    let probs: Vec<Vec<f64>> = predictions.iter().map(|p| p.probabilities.clone()).collect();
    let confusion = ConfusionMatrix::from_predictions(classes.clone(), &actual, &predicted)?;

    Ok(EvalReport {
        feature_set: data.feature_set,
        feature_count: data.dim(),
        model_type: spec.kind,
        folds: k,
        rows: data.len(),
        accuracy: accuracy(&confusion)?,
        macro_f1: macro_f1(&confusion)?,
        weighted_f1: weighted_f1(&confusion)?,
        rmse_label: rmse_label(&predicted, &actual)?,
        rmse_prob: rmse_prob(&probs, &actual, &classes)?,
        per_class: per_class_rates(&confusion)?,
        confusion,
        seed,
        hyperparams: spec.hyperparams,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPolysyllables {
    pub level: u8,
    pub documents: usize,
    pub total: u64,
    /// `None` when the level has no documents.
    pub mean_per_document: Option<f64>,
}

/// Per-level polysyllabic totals and per-document means, for levels 1–3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolysyllabicProfile {
    pub levels: Vec<LevelPolysyllables>,
}

impl PolysyllabicProfile {
    /// Levels with no documents.
    pub fn missing_levels(&self) -> Vec<u8> {
        self.levels
            .iter()
            .filter(|l| l.documents == 0)
            .map(|l| l.level)
            .collect()
    }

    pub fn total(&self, level: u8) -> Option<u64> {
        self.levels.iter().find(|l| l.level == level).map(|l| l.total)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,documents,total,mean_per_document\n");
        for l in &self.levels {
            let mean = l.mean_per_document.map_or(String::new(), |m| m.to_string());
            out.push_str(&format!("{},{},{},{}\n", l.level, l.documents, l.total, mean));
        }
        out
    }
}

/// Builds the profile from `(level, polysyllabic_count)` pairs.
pub fn polysyllabic_profile<I>(docs: I) -> PolysyllabicProfile
where
    I: IntoIterator<Item = (u8, u64)>,
{
    let mut acc: BTreeMap<u8, (usize, u64)> = LEVELS.iter().map(|&l| (l, (0, 0))).collect();
    for (level, count) in docs {
        let entry = acc.entry(level).or_default();
        entry.0 += 1;
        entry.1 += count;
    }
    PolysyllabicProfile {
        levels: acc
            .into_iter()
            .map(|(level, (documents, total))| LevelPolysyllables {
                level,
                documents,
                total,
                mean_per_document: (documents > 0).then(|| total as f64 / documents as f64),
            })
            .collect(),
    }
}

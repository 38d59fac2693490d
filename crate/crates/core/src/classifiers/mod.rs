//! Linear level classifiers trained from scratch: multinomial logistic
//! regression and a one-vs-all linear SVM. Both standardize their inputs with
//! statistics fitted on the training rows only, and both serialize to a single
//! JSON model file.

mod logistic;
mod standardize;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::features::FeatureSet;

pub use logistic::{logistic_objective, predict_proba_lr, train_logistic, train_logistic_traced, LogisticModel};
pub use standardize::{apply_standardizer, fit_standardizer, Standardizer, STD_FLOOR};
pub use svm::{predict_pseudo_proba_svm, predict_svm, train_svm_ova, SvmModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data holds a single class")]
    SingleClassDataset,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),
    #[error("unknown model type {0:?} (expected lr or svm)")]
    UnknownModelType(String),
    #[error("malformed model file: {0}")]
    MalformedModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub l2_lambda: f64,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.1,
            max_iters: 5000,
            tolerance: 1e-8,
            l2_lambda: 1e-3,
            svm_c: 1.0,
            svm_epochs: 100,
            seed: 7,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |what: &str| Err(ClassifierError::InvalidHyperparams(what.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive");
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be non-negative");
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return bad("svm_c must be positive");
        }
        if self.svm_epochs == 0 {
            return bad("svm_epochs must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Svm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Lr => "lr",
            ModelKind::Svm => "svm",
        })
    }
}

impl FromStr for ModelKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lr" | "logistic" => Ok(ModelKind::Lr),
            "svm" => Ok(ModelKind::Svm),
            _ => Err(ClassifierError::UnknownModelType(s.to_string())),
        }
    }
}

/// Checks the preconditions shared by both trainers and returns the class list.
fn check_training_data(data: &LabeledDataset) -> Result<Vec<u8>, ClassifierError> {
    if data.is_empty() {
        return Err(ClassifierError::EmptyDataset);
    }
    let dim = data.dim();
    if let Some(row) = data.rows.iter().find(|r| r.len() != dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: dim,
            found: row.len(),
        });
    }
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClassDataset);
    }
    Ok(classes)
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the largest value; ties go to the lowest index.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// A trained model of either kind, as stored in a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "lowercase")]
pub enum TrainedModel {
    #[serde(rename = "lr")]
    Logistic(LogisticModel),
    Svm(SvmModel),
}

impl TrainedModel {
    pub fn train(kind: ModelKind, data: &LabeledDataset, hp: &Hyperparams) -> Result<Self, ClassifierError> {
        Ok(match kind {
            ModelKind::Lr => TrainedModel::Logistic(train_logistic(data, hp)?),
            ModelKind::Svm => TrainedModel::Svm(train_svm_ova(data, hp)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Logistic(_) => ModelKind::Lr,
            TrainedModel::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn classes(&self) -> &[u8] {
        match self {
            TrainedModel::Logistic(m) => &m.classes,
            TrainedModel::Svm(m) => &m.classes,
        }
    }

    pub fn feature_order(&self) -> &[String] {
        match self {
            TrainedModel::Logistic(m) => &m.feature_order,
            TrainedModel::Svm(m) => &m.feature_order,
        }
    }

    pub fn feature_set(&self) -> Option<FeatureSet> {
        match self {
            TrainedModel::Logistic(m) => m.feature_set,
            TrainedModel::Svm(m) => m.feature_set,
        }
    }

    /// Predicted level plus one probability per class (true probabilities for
    /// LR, softmax of decision values for SVM).
    pub fn predict(&self, x: &[f64]) -> Result<(u8, Vec<f64>), ClassifierError> {
        match self {
            TrainedModel::Logistic(m) => {
                let proba = predict_proba_lr(m, x)?;
                Ok((m.classes[argmax(&proba)], proba))
            }
            TrainedModel::Svm(m) => {
                let level = predict_svm(m, x)?;
                Ok((level, predict_pseudo_proba_svm(m, x)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let model: TrainedModel =
            serde_json::from_str(text).map_err(|e| ClassifierError::MalformedModel(e.to_string()))?;
        model.check_shape()?;
        Ok(model)
    }

    fn check_shape(&self) -> Result<(), ClassifierError> {
        let (classes, weights, biases, std, order) = match self {
            TrainedModel::Logistic(m) => (&m.classes, &m.weights, &m.biases, &m.standardizer, &m.feature_order),
            TrainedModel::Svm(m) => (&m.classes, &m.weights, &m.biases, &m.standardizer, &m.feature_order),
        };
        let dim = order.len();
        let ok = weights.len() == classes.len()
            && biases.len() == classes.len()
            && weights.iter().all(|w| w.len() == dim)
            && std.means.len() == dim
            && std.stddevs.len() == dim;
        if ok {
            Ok(())
        } else {
            Err(ClassifierError::MalformedModel(
                "weights, biases, standardizer and feature_order disagree in shape".into(),
            ))
        }
    }
}

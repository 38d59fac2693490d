use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{argmax, check_training_data, dot, fit_standardizer, softmax, ClassifierError, Hyperparams, Standardizer};
use crate::dataset::LabeledDataset;
use crate::features::FeatureSet;
use crate::seed::{derive_seed, rng_from_seed};

/// One-vs-all linear SVM: one separator `(w_j, b_j)` per class, prediction is
/// the class with the largest decision value `w_j · x + b_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: Vec<u8>,
    pub feature_order: Vec<String>,
    pub feature_set: Option<FeatureSet>,
    pub standardizer: Standardizer,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
}

impl SvmModel {
    /// Decision values for a raw feature row, one per class.
    pub fn decision_values(&self, x: &[f64]) -> Result<Vec<f64>, ClassifierError> {
        let z = self.standardizer.apply(x)?;
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, &z) + b)
            .collect())
    }
}

/// Trains one binary hinge-loss separator (labels +1 / -1) with Pegasos-style
/// subgradient steps of size `1 / (lambda * t)`, `lambda = 1 / (C * n)`.
///
/// The bias rides along as a weight on a constant input of 1, so it shares
/// the `1 - eta * lambda` shrinkage of the weight vector.
fn train_binary(rows: &[Vec<f64>], signs: &[f64], hp: &Hyperparams, seed: u64) -> (Vec<f64>, f64) {
    let n = rows.len();
    let dim = rows[0].len();
    let lambda = 1.0 / (hp.svm_c * n as f64);
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(seed);
    let mut t = 0u64;

    for _ in 0..hp.svm_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = signs[i] * (dot(&w, &rows[i]) + b);
            let decay = 1.0 - eta * lambda;
            w.iter_mut().for_each(|wj| *wj *= decay);
            b *= decay;
            if margin < 1.0 {
                for (wj, xj) in w.iter_mut().zip(&rows[i]) {
                    *wj += eta * signs[i] * xj;
                }
                b += eta * signs[i];
            }
        }
    }
    (w, b)
}

pub fn train_svm_ova(data: &LabeledDataset, hp: &Hyperparams) -> Result<SvmModel, ClassifierError> {
    hp.validate()?;
    let classes = check_training_data(data)?;
    let standardizer = fit_standardizer(&data.rows)?;
    let rows: Vec<Vec<f64>> = data
        .rows
        .iter()
        .map(|r| standardizer.apply(r))
        .collect::<Result<_, _>>()?;

    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for &class in &classes {
        let signs: Vec<f64> = data
            .labels
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let seed = derive_seed(hp.seed, &format!("svm-ova/{class}"));
        let (w, b) = train_binary(&rows, &signs, hp, seed);
        weights.push(w);
        biases.push(b);
    }

    Ok(SvmModel {
        classes,
        feature_order: data.feature_names.clone(),
        feature_set: data.feature_set,
        standardizer,
        weights,
        biases,
        hyperparams: *hp,
        seed: hp.seed,
    })
}

/// Class with the largest decision value; ties go to the lowest level.
pub fn predict_svm(model: &SvmModel, x: &[f64]) -> Result<u8, ClassifierError> {
    let values = model.decision_values(x)?;
    Ok(model.classes[argmax(&values)])
}

/// Softmax over the decision values. Preserves the argmax of [`predict_svm`].
pub fn predict_pseudo_proba_svm(model: &SvmModel, x: &[f64]) -> Result<Vec<f64>, ClassifierError> {
    Ok(softmax(&model.decision_values(x)?))
}

use serde::{Deserialize, Serialize};

use super::{check_training_data, dot, fit_standardizer, softmax, ClassifierError, Hyperparams, Standardizer};
use crate::dataset::LabeledDataset;
use crate::features::FeatureSet;

/// Multinomial logistic regression over standardized features:
/// `P(level = c | x) = softmax_c(bias_c + x · weights_c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub classes: Vec<u8>,
    pub feature_order: Vec<String>,
    pub feature_set: Option<FeatureSet>,
    pub standardizer: Standardizer,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub iterations: usize,
}

impl LogisticModel {
    fn scores(&self, z: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| b + dot(w, z))
            .collect()
    }
}

/// Mean cross-entropy plus `(lambda / 2) * |W|^2` and its gradient.
///
/// `targets[i]` is the class index of row `i`. Returns
/// `(loss, weight_grads, bias_grads)`; biases are not penalized.
pub fn logistic_objective(
    rows: &[Vec<f64>],
    targets: &[usize],
    weights: &[Vec<f64>],
    biases: &[f64],
    l2_lambda: f64,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let n = rows.len() as f64;
    let k = biases.len();
    let dim = weights.first().map_or(0, Vec::len);
    let mut grad_w = vec![vec![0.0; dim]; k];
    let mut grad_b = vec![0.0; k];
    let mut loss = 0.0;

    for (x, &target) in rows.iter().zip(targets) {
        let scores: Vec<f64> = weights.iter().zip(biases).map(|(w, b)| b + dot(w, x)).collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        loss += log_norm - scores[target];
        for c in 0..k {
            let residual = (scores[c] - log_norm).exp() - if c == target { 1.0 } else { 0.0 };
            grad_b[c] += residual / n;
            for (g, xj) in grad_w[c].iter_mut().zip(x) {
                *g += residual * xj / n;
            }
        }
    }
    loss /= n;

    let mut penalty = 0.0;
    for (w, g) in weights.iter().zip(grad_w.iter_mut()) {
        for (wj, gj) in w.iter().zip(g.iter_mut()) {
            penalty += wj * wj;
            *gj += l2_lambda * wj;
        }
    }
    (loss + 0.5 * l2_lambda * penalty, grad_w, grad_b)
}

pub fn train_logistic(data: &LabeledDataset, hp: &Hyperparams) -> Result<LogisticModel, ClassifierError> {
    train_logistic_traced(data, hp).map(|(model, _)| model)
}

/// Trains by full-batch gradient descent from zero weights and also returns
/// the objective value before every update and after the last one.
///
/// The L2 term is applied as a proximal (shrinkage) step, so large
/// penalties stay stable at the configured learning rate.
pub fn train_logistic_traced(
    data: &LabeledDataset,
    hp: &Hyperparams,
) -> Result<(LogisticModel, Vec<f64>), ClassifierError> {
    hp.validate()?;
    let classes = check_training_data(data)?;
    let standardizer = fit_standardizer(&data.rows)?;
    let rows: Vec<Vec<f64>> = data
        .rows
        .iter()
        .map(|r| standardizer.apply(r))
        .collect::<Result<_, _>>()?;
    let targets: Vec<usize> = data
        .labels
        .iter()
        .map(|l| {
            classes
                .iter()
                .position(|c| c == l)
                .expect("label comes from class list")
        })
        .collect();

    let k = classes.len();
    let dim = data.dim();
    let mut weights = vec![vec![0.0; dim]; k];
    let mut biases = vec![0.0; k];
    let eta = hp.learning_rate;
    let shrink = 1.0 / (1.0 + eta * hp.l2_lambda);

    let (mut loss, _, _) = logistic_objective(&rows, &targets, &weights, &biases, hp.l2_lambda);
    let mut trace = vec![loss];
    let mut iterations = 0;

    while iterations < hp.max_iters {
        let (_, grad_w, grad_b) = logistic_objective(&rows, &targets, &weights, &biases, 0.0);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            for (wj, gj) in w.iter_mut().zip(g) {
                *wj = (*wj - eta * gj) * shrink;
            }
        }
        for (b, g) in biases.iter_mut().zip(&grad_b) {
            *b -= eta * g;
        }
        iterations += 1;

        let (next, _, _) = logistic_objective(&rows, &targets, &weights, &biases, hp.l2_lambda);
        trace.push(next);
        let improvement = loss - next;
        loss = next;
        if improvement < hp.tolerance {
            break;
        }
    }

    let model = LogisticModel {
        classes,
        feature_order: data.feature_names.clone(),
        feature_set: data.feature_set,
        standardizer,
        weights,
        biases,
        hyperparams: *hp,
        seed: hp.seed,
        iterations,
    };
    Ok((model, trace))
}

/// Class probabilities for a raw (unstandardized) feature row.
pub fn predict_proba_lr(model: &LogisticModel, x: &[f64]) -> Result<Vec<f64>, ClassifierError> {
    let z = model.standardizer.apply(x)?;
    Ok(softmax(&model.scores(&z)))
}

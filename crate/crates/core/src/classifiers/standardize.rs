use serde::{Deserialize, Serialize};

use super::ClassifierError;

/// Smallest standard deviation used when scaling; constant columns map to 0.
pub const STD_FLOOR: f64 = 1e-9;

/// Per-feature z-score statistics fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

impl Standardizer {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>, ClassifierError> {
        apply_standardizer(self, row)
    }
}

/// Fits means and population standard deviations column by column.
pub fn fit_standardizer(rows: &[Vec<f64>]) -> Result<Standardizer, ClassifierError> {
    let first = rows.first().ok_or(ClassifierError::EmptyDataset)?;
    let dim = first.len();
    if let Some(row) = rows.iter().find(|r| r.len() != dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: dim,
            found: row.len(),
        });
    }
    let n = rows.len() as f64;
    let mut means = Vec::with_capacity(dim);
    let mut stddevs = Vec::with_capacity(dim);
    for j in 0..dim {
        let column = rows.iter().map(|r| r[j]);
        let constant = rows.iter().all(|r| r[j] == first[j]);
        if constant {
            // exact mean, so the column transforms to exact zeros
            means.push(first[j]);
            stddevs.push(STD_FLOOR);
            continue;
        }
        let mean = column.clone().sum::<f64>() / n;
        let var = column.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        means.push(mean);
        stddevs.push(var.sqrt().max(STD_FLOOR));
    }
    Ok(Standardizer { means, stddevs })
}

pub fn apply_standardizer(std: &Standardizer, row: &[f64]) -> Result<Vec<f64>, ClassifierError> {
    if row.len() != std.dim() {
        return Err(ClassifierError::DimensionMismatch {
            expected: std.dim(),
            found: row.len(),
        });
    }
    Ok(row
        .iter()
        .zip(std.means.iter().zip(&std.stddevs))
        .map(|(x, (m, s))| (x - m) / s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_column() {
        let std = fit_standardizer(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(std.means, vec![1.0]);
        assert_eq!(std.stddevs, vec![1.0]);
        assert_eq!(std.apply(&[2.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let rows = vec![vec![0.1, 1.0], vec![0.1, 2.0], vec![0.1, 4.0]];
        let std = fit_standardizer(&rows).unwrap();
        for row in &rows {
            assert_eq!(std.apply(row).unwrap()[0], 0.0);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(fit_standardizer(&[]), Err(ClassifierError::EmptyDataset));
        assert_eq!(
            fit_standardizer(&[vec![1.0], vec![1.0, 2.0]]),
            Err(ClassifierError::DimensionMismatch { expected: 1, found: 2 })
        );
        let std = fit_standardizer(&[vec![1.0, 2.0]]).unwrap();
        assert!(std.apply(&[1.0]).is_err());
    }

    #[test]
    fn random_matrix_is_centred_and_scaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| {
                (0..15)
                    .map(|j| rng.random_range(-10.0..10.0) * (j + 1) as f64 + j as f64 * 3.0)
                    .collect()
            })
            .collect();
        let std = fit_standardizer(&rows).unwrap();
        let z: Vec<Vec<f64>> = rows.iter().map(|r| std.apply(r).unwrap()).collect();
        for j in 0..15 {
            let mean = z.iter().map(|r| r[j]).sum::<f64>() / 100.0;
            let var = z.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / 100.0;
            assert!(mean.abs() < 1e-9, "column {j} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-9, "column {j} sd {}", var.sqrt());
        }
    }
}

//! Point-forecast error metrics over a [`PredictionBatch`].

use serde::{Deserialize, Serialize};

use crate::error::{ResnError, Result};
use crate::net::PredictionBatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub mse: f64,
    /// Percent; `None` when some target is zero.
    pub mape: Option<f64>,
}

fn non_empty(batch: &PredictionBatch) -> Result<()> {
    if batch.is_empty() {
        return Err(ResnError::Empty("prediction batch".into()));
    }
    Ok(())
}

/// Mean of `|z - y|` over every entry.
pub fn mae(batch: &PredictionBatch) -> Result<f64> {
    non_empty(batch)?;
    let sum: f64 = batch
        .predictions()
        .iter()
        .zip(batch.targets())
        .map(|(z, y)| (z - y).abs())
        .sum();
    Ok(sum / batch.len() as f64)
}

pub fn mse(batch: &PredictionBatch) -> Result<f64> {
    non_empty(batch)?;
    let sum: f64 = batch
        .predictions()
        .iter()
        .zip(batch.targets())
        .map(|(z, y)| (z - y).powi(2))
        .sum();
    Ok(sum / batch.len() as f64)
}

/// Mean absolute percentage error, in percent. Any zero target is an error.
pub fn mape(batch: &PredictionBatch) -> Result<f64> {
    non_empty(batch)?;
    let mut sum = 0.0;
    for (i, (z, y)) in batch.predictions().iter().zip(batch.targets()).enumerate() {
        if *y == 0.0 {
            return Err(ResnError::Data(format!(
                "MAPE undefined: target {i} is zero"
            )));
        }
        sum += ((z - y) / y).abs();
    }
    Ok(100.0 * sum / batch.len() as f64)
}

/// All three metrics. MAPE is left out rather than failing the whole
/// evaluation when a target is zero.
pub fn metrics(batch: &PredictionBatch) -> Result<Metrics> {
    Ok(Metrics {
        mae: mae(batch)?,
        mse: mse(batch)?,
        mape: mape(batch).ok(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use ndarray::{array, Array2};

    use super::*;

    fn batch(z: Array2<f64>, y: Array2<f64>) -> PredictionBatch {
        PredictionBatch::new(z, y).unwrap()
    }

    #[test]
    fn exact_predictions() {
        let y = array![[1.0, 2.0], [3.0, 4.0]];
        let m = metrics(&batch(y.clone(), y)).unwrap();
        assert_eq!((m.mae, m.mse, m.mape), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn hand_values() {
        assert_eq!(mape(&batch(array![[98.0]], array![[100.0]])).unwrap(), 2.0);
        let b = batch(array![[0.0], [4.0]], array![[1.0], [2.0]]);
        assert_eq!(mae(&b).unwrap(), 1.5);
        assert_eq!(mse(&b).unwrap(), 2.5);
        let half = batch(Array2::zeros((5, 1)), Array2::from_elem((5, 1), 0.5));
        assert_eq!(mae(&half).unwrap(), 0.5);
    }

    #[test]
    fn zero_prediction_on_sine_period() {
        // Brute-force mean of |sin| over one densely sampled period.
        let n = 100_000;
        let y = Array2::from_shape_fn((n, 1), |(i, _)| (2.0 * PI * i as f64 / n as f64).sin());
        let oracle: f64 = y.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        let got = mae(&batch(Array2::zeros((n, 1)), y)).unwrap();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(PredictionBatch::new(Array2::zeros((2, 1)), Array2::zeros((1, 2))).is_err());
        let empty = batch(Array2::zeros((0, 1)), Array2::zeros((0, 1)));
        assert!(mae(&empty).is_err());
        assert!(mape(&batch(array![[1.0]], array![[0.0]])).is_err());
        assert_eq!(metrics(&batch(array![[1.0]], array![[0.0]])).unwrap().mape, None);
    }
}

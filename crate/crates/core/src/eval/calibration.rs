//! RMS calibration error with adaptive (equal-count) binning.

use crate::error::{Error, Result};
use crate::eval::probe::PredictionRecord;

pub const DEFAULT_CALIBRATION_BINS: usize = 15;

/// `sqrt(sum_b (n_b / N) * (mean_conf_b - acc_b)^2)` on a `[0, 1]` scale.
///
/// Predictions are sorted by `(confidence, correct)` and split into
/// `num_bins` bins whose sizes differ by at most one, so the result does not
/// depend on input order.
pub fn rms_calibration_error(predictions: &[PredictionRecord], num_bins: usize) -> Result<f64> {
    if num_bins == 0 {
        return Err(Error::argument("num_bins must be >= 1"));
    }
    if predictions.len() < num_bins {
        return Err(Error::argument(format!(
            "{} predictions cannot fill {num_bins} bins",
            predictions.len()
        )));
    }
    if let Some(p) = predictions
        .iter()
        .find(|p| !(0.0..=1.0).contains(&p.confidence))
    {
        return Err(Error::argument(format!(
            "confidence {} outside [0, 1]",
            p.confidence
        )));
    }
    let mut sorted = predictions.to_vec();
    sorted.sort_by(|a, b| {
        a.confidence
            .total_cmp(&b.confidence)
            .then(a.correct.cmp(&b.correct))
    });
    let n = sorted.len();
    let mut sum = 0.0;
    for b in 0..num_bins {
        let bin = &sorted[b * n / num_bins..(b + 1) * n / num_bins];
        let len = bin.len() as f64;
        let conf = bin.iter().map(|p| p.confidence).sum::<f64>() / len;
        let acc = bin.iter().filter(|p| p.correct).count() as f64 / len;
        sum += len * (conf - acc).powi(2);
    }
    Ok((sum / n as f64).sqrt())
}

/// [`rms_calibration_error`] scaled to percent.
pub fn rms_calibration_error_percent(predictions: &[PredictionRecord], num_bins: usize) -> Result<f64> {
    rms_calibration_error(predictions, num_bins).map(|e| e * 100.0)
}

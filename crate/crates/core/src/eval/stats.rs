//! Empirical statistics over composed outputs.

use std::fmt;

use crate::compositor::{Composition, Pipeline};
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::parallel::{try_map_indexed, Execution};
use crate::rng::ImageStreams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsReport {
    pub samples: usize,
    /// Samples that went through YONA (and so have structure coins).
    pub composed: usize,
    /// Share of output bytes that replay exactly from the noise stream.
    pub masked_fraction_mean: f64,
    pub axis_height_frequency: f64,
    pub piece1_masked_frequency: f64,
    /// Mean absolute byte difference between input and output.
    pub mean_abs_delta: f64,
}

struct Sample {
    masked_fraction: f64,
    height: Option<bool>,
    first_masked: Option<bool>,
    abs_delta: f64,
}

/// Runs `pipeline` over `n_samples` images (cycling through `images`) and
/// summarizes the structural coins and masking.
///
/// Sample `i` uses the streams for `(seed, i)`. The masked fraction is
/// measured, not assumed: the noise stream is replayed and compared with the
/// band the compositor reports as masked.
pub fn collect_stats(
    images: &[ImageTensor],
    pipeline: &Pipeline,
    seed: u64,
    n_samples: usize,
    exec: Execution,
) -> Result<StatsReport> {
    if images.is_empty() {
        return Err(Error::argument("collect_stats needs at least one image"));
    }
    if n_samples == 0 {
        return Err(Error::argument("collect_stats needs n_samples >= 1"));
    }
    pipeline.validate()?;
    let indices: Vec<usize> = (0..n_samples).collect();
    let samples = try_map_indexed(&indices, exec, |i, _| {
        let input = &images[i % images.len()];
        let (out, trace) = pipeline.apply_traced(input, seed, i as u64)?;
        let total = out.data().len();
        let abs_delta = input
            .data()
            .iter()
            .zip(out.data())
            .map(|(&a, &b)| a.abs_diff(b) as u64)
            .sum::<u64>() as f64
            / total as f64;
        let (masked_fraction, height, first_masked) = match (&pipeline.composition, trace) {
            (Composition::Yona(cfg), Some(t)) => {
                let band = out.extract(t.axis, t.masked_start, t.masked_len)?;
                let mut noise = ImageStreams::derive(seed, i as u64).noise;
                let mut replay = vec![0u8; band.data().len()];
                cfg.noise.fill(&mut replay, &mut noise);
                let matching = replay.iter().zip(band.data()).filter(|(a, b)| a == b).count();
                (
                    matching as f64 / total as f64,
                    Some(t.axis == crate::image::Axis::Height),
                    Some(t.masked_first),
                )
            }
            _ => (0.0, None, None),
        };
        Ok(Sample {
            masked_fraction,
            height,
            first_masked,
            abs_delta,
        })
    })?;

    let n = samples.len() as f64;
    let composed = samples.iter().filter(|s| s.height.is_some()).count();
    let freq = |pick: fn(&Sample) -> Option<bool>| {
        if composed == 0 {
            0.0
        } else {
            samples.iter().filter(|s| pick(s) == Some(true)).count() as f64 / composed as f64
        }
    };
    Ok(StatsReport {
        samples: samples.len(),
        composed,
        masked_fraction_mean: samples.iter().map(|s| s.masked_fraction).sum::<f64>() / n,
        axis_height_frequency: freq(|s| s.height),
        piece1_masked_frequency: freq(|s| s.first_masked),
        mean_abs_delta: samples.iter().map(|s| s.abs_delta).sum::<f64>() / n,
    })
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples={}", self.samples)?;
        writeln!(f, "composed={}", self.composed)?;
        writeln!(f, "masked_fraction_mean={:.6}", self.masked_fraction_mean)?;
        writeln!(f, "axis_height_frequency={:.6}", self.axis_height_frequency)?;
        writeln!(f, "piece1_masked_frequency={:.6}", self.piece1_masked_frequency)?;
        writeln!(f, "mean_abs_delta={:.6}", self.mean_abs_delta)
    }
}

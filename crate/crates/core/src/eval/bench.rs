//! Per-image latency of plain augmentation versus YONA composition.

use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use crate::augment::AugmentationSpec;
use crate::compositor::{Composition, Pipeline, YonaConfig};
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::{derive_stream, SeedSpec};

pub const MIN_BENCH_ITERATIONS: usize = 100;
const CHUNK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub iterations: usize,
    pub plain_ns_per_image: f64,
    pub yona_ns_per_image: f64,
    /// `yona / plain`.
    pub ratio: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Times `n_iterations` images through each arm.
///
/// Both arms run the full per-image path (stream derivation included).
/// Work is timed in chunks of 50 images, alternating between the arms so
/// that drift affects both equally; each arm reports the median chunk time
/// per image. A tenth of the iterations (at least 10) run first as
/// untimed warm-up.
pub fn benchmark_throughput(
    aug: &AugmentationSpec,
    yona: &YonaConfig,
    dims: (usize, usize, usize),
    n_iterations: usize,
) -> Result<BenchReport> {
    if n_iterations < MIN_BENCH_ITERATIONS {
        return Err(Error::argument(format!(
            "benchmark needs >= {MIN_BENCH_ITERATIONS} iterations, got {n_iterations}"
        )));
    }
    let plain = Pipeline::new(aug.clone(), Composition::Plain);
    let composed = Pipeline::new(aug.clone(), Composition::Yona(*yona));
    plain.validate()?;
    composed.validate()?;
    let (c, h, w) = dims;
    let image = ImageTensor::random(c, h, w, &mut derive_stream(SeedSpec::new(0xBE7C, 0)))?;

    for i in 0..(n_iterations / 10).max(10) {
        black_box(plain.apply(&image, 1, i as u64)?);
        black_box(composed.apply(&image, 1, i as u64)?);
    }

    let mut plain_chunks = Vec::new();
    let mut yona_chunks = Vec::new();
    let mut start = 0;
    while start < n_iterations {
        let end = (start + CHUNK).min(n_iterations);
        for (pipe, out) in [(&plain, &mut plain_chunks), (&composed, &mut yona_chunks)] {
            let t = Instant::now();
            for i in start..end {
                black_box(pipe.apply(black_box(&image), 2, i as u64)?);
            }
            out.push(t.elapsed().as_nanos() as f64 / (end - start) as f64);
        }
        start = end;
    }
    let plain_ns = median(&mut plain_chunks);
    let yona_ns = median(&mut yona_chunks);
    Ok(BenchReport {
        iterations: n_iterations,
        plain_ns_per_image: plain_ns,
        yona_ns_per_image: yona_ns,
        ratio: yona_ns / plain_ns.max(f64::MIN_POSITIVE),
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "iterations={}", self.iterations)?;
        writeln!(f, "plain_ns_per_image={:.1}", self.plain_ns_per_image)?;
        writeln!(f, "yona_ns_per_image={:.1}", self.yona_ns_per_image)?;
        writeln!(f, "ratio={:.4}", self.ratio)
    }
}

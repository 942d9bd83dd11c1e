//! Desk-scale checks: composition statistics, a linear probe, calibration
//! error and throughput.

pub mod bench;
pub mod calibration;
pub mod probe;
pub mod stats;

pub use bench::{benchmark_throughput, BenchReport};
pub use calibration::{rms_calibration_error, rms_calibration_error_percent, DEFAULT_CALIBRATION_BINS};
pub use probe::{
    accuracy, features, predict_records, train_linear_probe, PredictionRecord, ProbeConfig, ProbeGradient,
    ProbeModel, ProbeRun,
};
pub use stats::{collect_stats, StatsReport};

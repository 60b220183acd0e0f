//! Throughput measurement of the tracking loop alone.

use crate::geometry::BBox;
use crate::tracker::{TrackOutput, Tracker, TrackerConfig, TrackerError};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub frames: u64,
    /// Frames per second of each repetition, in run order.
    pub runs_hz: Vec<f64>,
    pub median_hz: f64,
    /// Output of the last repetition.
    pub outputs: Vec<TrackOutput>,
}

/// Runs a fresh tracker over pre-grouped frames `repetitions` times and
/// times only the `step` loop.
pub fn measure(frames: &[Vec<BBox>], config: TrackerConfig, repetitions: usize) -> Result<BenchResult, TrackerError> {
    let repetitions = repetitions.max(1);
    let mut runs_hz = Vec::with_capacity(repetitions);
    let mut outputs = Vec::new();
    for _ in 0..repetitions {
        let mut tracker = Tracker::new(config)?;
        let mut out = Vec::with_capacity(frames.iter().map(Vec::len).sum());
        let start = Instant::now();
        for boxes in frames {
            out.extend(tracker.step(boxes));
        }
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        runs_hz.push(frames.len() as f64 / secs);
        outputs = out;
    }
    Ok(BenchResult {
        frames: frames.len() as u64,
        median_hz: median(&runs_hz),
        runs_hz,
        outputs,
    })
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

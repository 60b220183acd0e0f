//! Online multi-object tracking by detection.
//!
//! Each target is a constant-velocity Kalman filter over box centre, area
//! and aspect ratio. Every frame the filters are predicted, matched to the
//! new detections by maximum total IOU, corrected, and the track set is
//! grown or pruned. The crate also carries a CLEAR-MOT evaluator, a MOT
//! Challenge file reader/writer and a synthetic scene generator.
//!
//! ```
//! use sortrack::geometry::BBox;
//! use sortrack::tracker::{Tracker, TrackerConfig};
//!
//! let mut tracker = Tracker::new(TrackerConfig { min_hits: 1, ..Default::default() }).unwrap();
//! let out = tracker.step(&[BBox::new(10.0, 10.0, 50.0, 90.0).unwrap()]);
//! assert_eq!(out[0].id, 1);
//! ```

pub mod assoc;
pub mod bench;
pub mod cli;
pub mod geometry;
pub mod kalman;
mod linalg;
pub mod metrics;
pub mod mot_io;
pub mod synth;
pub mod tracker;

pub use linalg::Matrix;

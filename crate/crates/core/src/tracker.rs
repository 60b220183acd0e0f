//! Per-frame track lifecycle: predict, associate, update, spawn, delete, report.

use crate::assoc::associate;
use crate::geometry::{box_to_observation, BBox};
use crate::kalman::{BoxFilter, FilterParams, KalmanError};
use crate::mot_io::{group_by_frame, Detection, MotIoError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("invalid tracker config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Filter(#[from] KalmanError),
    #[error(transparent)]
    Sequencing(#[from] MotIoError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Consecutive missed frames a track survives (T_Lost).
    pub max_age: u32,
    /// Consecutive hits needed before a track is reported.
    pub min_hits: u32,
    /// Minimum IOU for a detection to update a track.
    pub iou_min: f64,
    /// Report unconfirmed tracks during the first `min_hits` frames.
    pub warmup: bool,
    pub filter: FilterParams,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            max_age: 1,
            min_hits: 3,
            iou_min: 0.3,
            warmup: true,
            filter: FilterParams::default(),
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackerError> {
        if self.max_age < 1 {
            return Err(TrackerError::InvalidConfig("max_age must be >= 1".into()));
        }
        if self.min_hits < 1 {
            return Err(TrackerError::InvalidConfig("min_hits must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.iou_min) {
            return Err(TrackerError::InvalidConfig("iou_min must lie in [0, 1]".into()));
        }
        self.filter.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub filter: BoxFilter,
    pub time_since_update: u32,
    pub hits: u32,
    pub hit_streak: u32,
    pub age: u32,
}

impl Track {
    fn spawn(id: u64, bbox: &BBox, params: &FilterParams) -> Self {
        let obs = box_to_observation(bbox).expect("spawned from a positive-area box");
        Self {
            id,
            filter: BoxFilter::new(&obs, params),
            time_since_update: 0,
            hits: 1,
            hit_streak: 1,
            age: 0,
        }
    }

    pub fn bbox(&self) -> BBox {
        self.filter.to_box().expect("state box is clamped to positive shape")
    }
}

/// Whether `track` is reported at `frame` (1-based count of steps so far).
pub fn confirm(track: &Track, config: &TrackerConfig, frame: u64) -> bool {
    track.time_since_update == 0
        && (track.hit_streak >= config.min_hits || (config.warmup && frame <= config.min_hits as u64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOutput {
    pub frame: u64,
    pub id: u64,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackMatch {
    pub detection: usize,
    pub track_id: u64,
    pub iou: f64,
}

/// What happened in one step, keyed by detection index and track id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameLog {
    pub frame: u64,
    pub matches: Vec<TrackMatch>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_tracks: Vec<u64>,
    pub created: Vec<u64>,
    pub deleted: Vec<u64>,
}

impl FrameLog {
    pub fn matched_detection(&self, track_id: u64) -> Option<usize> {
        self.matches
            .iter()
            .find(|m| m.track_id == track_id)
            .map(|m| m.detection)
    }
}

#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    frame: u64,
    log: FrameLog,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            tracks: Vec::new(),
            next_id: 1,
            frame: 0,
            log: FrameLog::default(),
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Number of steps taken; also the frame index of the last step.
    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn last_log(&self) -> &FrameLog {
        &self.log
    }

    /// Advances one frame. Detections with zero area can neither update nor
    /// seed a track and are reported as unmatched.
    pub fn step(&mut self, detections: &[BBox]) -> Vec<TrackOutput> {
        self.frame += 1;
        let params = self.config.filter;
        let mut log = FrameLog {
            frame: self.frame,
            ..FrameLog::default()
        };

        // predict
        self.tracks.retain_mut(|t| {
            t.filter.predict(&params);
            t.age += 1;
            if t.filter.state.is_finite() {
                true
            } else {
                log.deleted.push(t.id);
                false
            }
        });
        let predictions: Vec<BBox> = self.tracks.iter().map(Track::bbox).collect();

        // associate
        let usable: Vec<usize> = (0..detections.len()).filter(|&i| detections[i].area() > 0.0).collect();
        let boxes: Vec<BBox> = usable.iter().map(|&i| detections[i]).collect();
        let assignment = associate(&boxes, &predictions, self.config.iou_min);

        // update matched
        let mut updated = vec![false; self.tracks.len()];
        for m in &assignment.matches {
            let det = detections[usable[m.detection]];
            let track = &mut self.tracks[m.track];
            let obs = box_to_observation(&det).expect("usable detections have positive area");
            if track.filter.update(&obs, &params).is_err() {
                // Only reachable if the covariance has lost definiteness.
                track.filter = BoxFilter::new(&obs, &params);
            }
            track.time_since_update = 0;
            track.hits += 1;
            track.hit_streak += 1;
            updated[m.track] = true;
            log.matches.push(TrackMatch {
                detection: usable[m.detection],
                track_id: track.id,
                iou: m.iou,
            });
        }

        // coast unmatched
        for (track, _) in self.tracks.iter_mut().zip(&updated).filter(|(_, u)| !**u) {
            track.time_since_update += 1;
            track.hit_streak = 0;
            log.unmatched_tracks.push(track.id);
        }

        // spawn
        let mut unmatched: Vec<usize> = (0..detections.len()).filter(|&i| detections[i].area() <= 0.0).collect();
        for &d in &assignment.unmatched_detections {
            let id = self.next_id;
            self.next_id += 1;
            self.tracks.push(Track::spawn(id, &boxes[d], &params));
            log.created.push(id);
            unmatched.push(usable[d]);
        }
        unmatched.sort_unstable();
        log.unmatched_detections = unmatched;

        // delete
        let max_age = self.config.max_age;
        self.tracks.retain(|t| {
            if t.time_since_update > max_age {
                log.deleted.push(t.id);
                false
            } else {
                true
            }
        });

        // report
        let frame = self.frame;
        let mut out: Vec<TrackOutput> = self
            .tracks
            .iter()
            .filter(|t| confirm(t, &self.config, frame))
            .map(|t| TrackOutput {
                frame,
                id: t.id,
                bbox: t.bbox(),
            })
            .collect();
        out.sort_by_key(|o| o.id);
        self.log = log;
        out
    }
}

/// Runs a fresh tracker over detections sorted by frame. Frames run from 1 to
/// `max(frame_count, last detection frame)`; missing frames are empty steps.
pub fn run_sequence(
    detections: &[Detection],
    frame_count: u64,
    config: TrackerConfig,
) -> Result<Vec<TrackOutput>, TrackerError> {
    let frames = group_by_frame(detections, frame_count)?;
    let mut tracker = Tracker::new(config)?;
    let mut out = Vec::new();
    for boxes in &frames {
        out.extend(tracker.step(boxes));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x1: f64, y1: f64, x2: f64, y2: f64) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    fn cfg(min_hits: u32, max_age: u32) -> TrackerConfig {
        TrackerConfig {
            min_hits,
            max_age,
            ..TrackerConfig::default()
        }
    }

    #[test]
    fn probation_hides_new_tracks() {
        let mut c = cfg(3, 1);
        c.warmup = false;
        let mut t = Tracker::new(c).unwrap();
        let out = t.step(&[bb(0.0, 0.0, 10.0, 10.0), bb(100.0, 100.0, 120.0, 130.0)]);
        assert!(out.is_empty());
        assert_eq!(t.tracks().iter().map(|t| t.id).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn min_hits_one_reports_immediately() {
        let dets = [bb(0.0, 0.0, 10.0, 10.0), bb(100.0, 100.0, 120.0, 130.0)];
        let mut t = Tracker::new(cfg(1, 1)).unwrap();
        let out = t.step(&dets);
        assert_eq!(out.len(), 2);
        for (o, d) in out.iter().zip(&dets) {
            for (a, b) in [
                (o.bbox.x1, d.x1),
                (o.bbox.y1, d.y1),
                (o.bbox.x2, d.x2),
                (o.bbox.y2, d.y2),
            ] {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn confirm_rule() {
        let mut track = Track::spawn(1, &bb(0.0, 0.0, 4.0, 4.0), &FilterParams::default());
        let c = cfg(3, 1);
        track.hit_streak = 3;
        assert!(confirm(&track, &c, 50));
        track.hit_streak = 1;
        assert!(confirm(&track, &c, 1));
        track.hit_streak = 2;
        assert!(!confirm(&track, &c, 50));
        track.hit_streak = 3;
        track.time_since_update = 1;
        assert!(!confirm(&track, &c, 50));
        let strict = TrackerConfig { warmup: false, ..c };
        track.time_since_update = 0;
        track.hit_streak = 1;
        assert!(!confirm(&track, &strict, 1));
    }

    #[test]
    fn deletion_after_max_age_misses() {
        let b = bb(10.0, 10.0, 30.0, 50.0);
        let mut t = Tracker::new(cfg(1, 1)).unwrap();
        t.step(&[b]);
        t.step(&[]);
        assert_eq!(t.tracks().len(), 1);
        assert_eq!(t.tracks()[0].time_since_update, 1);
        t.step(&[]);
        assert!(t.tracks().is_empty());
        assert_eq!(t.last_log().deleted, vec![1]);
        let out = t.step(&[b]);
        assert_eq!(out[0].id, 2);
    }

    #[test]
    fn coasting_tracks_are_silent() {
        let b = bb(10.0, 10.0, 30.0, 50.0);
        let mut t = Tracker::new(cfg(1, 3)).unwrap();
        assert_eq!(t.step(&[b]).len(), 1);
        assert!(t.step(&[]).is_empty());
        assert_eq!(t.tracks().len(), 1);
        let out = t.step(&[b]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].id, 1);
    }

    #[test]
    fn counters_stay_consistent() {
        let mut t = Tracker::new(cfg(2, 2)).unwrap();
        let frames: Vec<Vec<BBox>> = (0..30)
            .map(|k| {
                let x = 3.0 * k as f64;
                if k % 7 == 3 {
                    vec![]
                } else {
                    vec![bb(x, 0.0, x + 40.0, 80.0), bb(500.0 - x, 200.0, 540.0 - x, 260.0)]
                }
            })
            .collect();
        for f in &frames {
            t.step(f);
            for tr in t.tracks() {
                assert!(tr.hit_streak <= tr.hits);
                assert!(tr.hits <= tr.age + 1);
                assert!(tr.filter.cov.max_asymmetry() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_area_detections_are_ignored() {
        let mut t = Tracker::new(cfg(1, 1)).unwrap();
        let out = t.step(&[bb(5.0, 5.0, 5.0, 20.0), bb(0.0, 0.0, 10.0, 10.0)]);
        assert_eq!(out.len(), 1);
        assert_eq!(t.last_log().unmatched_detections, vec![0, 1]);
        assert_eq!(t.last_log().created, vec![1]);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(Tracker::new(cfg(0, 1)).is_err());
        assert!(Tracker::new(cfg(1, 0)).is_err());
        let c = TrackerConfig {
            iou_min: 1.5,
            ..TrackerConfig::default()
        };
        assert!(Tracker::new(c).is_err());
    }

    #[test]
    fn run_sequence_empty_and_ordering() {
        assert!(run_sequence(&[], 0, TrackerConfig::default()).unwrap().is_empty());
        let d = |frame| Detection {
            frame,
            bbox: bb(0.0, 0.0, 5.0, 5.0),
            confidence: 1.0,
        };
        assert!(matches!(
            run_sequence(&[d(2), d(1)], 0, TrackerConfig::default()),
            Err(TrackerError::Sequencing(_))
        ));
    }
}

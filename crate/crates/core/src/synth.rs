//! Synthetic constant-velocity scenes with ground truth and corrupted detections.

use crate::geometry::BBox;
use crate::mot_io::{Detection, GtEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid scenario: {0}")]
pub struct ScenarioError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub num_objects: usize,
    pub num_frames: u64,
    /// Per-axis speed magnitude in px/frame; direction is random.
    pub speed: (f64, f64),
    pub box_width: (f64, f64),
    pub box_height: (f64, f64),
    pub image_width: f64,
    pub image_height: f64,
    /// Standard deviation of the Gaussian added to each corner coordinate.
    pub noise_sigma: f64,
    /// Probability that a visible object yields no detection in a frame.
    pub dropout: f64,
    /// Mean number of false positives per frame (Poisson).
    pub fp_rate: f64,
    pub seed: u64,
    /// Free 2D motion. When false each object gets its own horizontal lane
    /// and moves horizontally, so boxes never overlap.
    pub crossing: bool,
    /// Suppress detections of objects fully covered by another object.
    pub occlusion: bool,
    /// Choose start positions so no object leaves the image.
    pub keep_in_view: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_objects: 10,
            num_frames: 200,
            speed: (0.5, 4.0),
            box_width: (20.0, 60.0),
            box_height: (40.0, 100.0),
            image_width: 1920.0,
            image_height: 1080.0,
            noise_sigma: 1.0,
            dropout: 0.05,
            fp_rate: 0.5,
            seed: 0,
            crossing: false,
            occlusion: false,
            keep_in_view: false,
        }
    }
}

impl ScenarioConfig {
    /// Default geometry with every corruption switched off.
    pub fn clean() -> Self {
        Self {
            noise_sigma: 0.0,
            dropout: 0.0,
            fp_rate: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |m: &str| Err(ScenarioError(m.to_string()));
        if self.num_frames < 1 {
            return err("num_frames must be >= 1");
        }
        if !(self.image_width > 0.0 && self.image_height > 0.0)
            || !self.image_width.is_finite()
            || !self.image_height.is_finite()
        {
            return err("image bounds must be positive");
        }
        for (name, (lo, hi)) in [
            ("speed", self.speed),
            ("box_width", self.box_width),
            ("box_height", self.box_height),
        ] {
            if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo > hi {
                return Err(ScenarioError(format!("{name} range must satisfy 0 <= min <= max")));
            }
        }
        if self.box_width.0 <= 0.0 || self.box_height.0 <= 0.0 {
            return err("box sizes must be positive");
        }
        if self.box_width.1 > self.image_width || self.box_height.1 > self.image_height {
            return err("objects larger than the image");
        }
        if !(0.0..=1.0).contains(&self.dropout) {
            return err("dropout must lie in [0, 1]");
        }
        if !(self.fp_rate >= 0.0 && self.fp_rate.is_finite()) {
            return err("fp_rate must be finite and >= 0");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return err("noise_sigma must be finite and >= 0");
        }
        if !self.crossing && self.num_objects > 0 {
            let lane = self.image_height / self.num_objects as f64;
            if self.box_height.1 > lane {
                return Err(ScenarioError(format!(
                    "{} lanes of {lane:.1} px cannot hold boxes up to {} px tall",
                    self.num_objects, self.box_height.1
                )));
            }
        }
        if self.keep_in_view {
            let travel = self.speed.1 * (self.num_frames - 1) as f64;
            if self.box_width.1 + travel > self.image_width
                || (self.crossing && self.box_height.1 + travel > self.image_height)
            {
                return err("keep_in_view is infeasible for this speed and sequence length");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSequence {
    pub gt: Vec<GtEntry>,
    pub detections: Vec<Detection>,
    pub num_frames: u64,
}

struct Object {
    id: u64,
    start: BBox,
    velocity: (f64, f64),
}

impl Object {
    fn at(&self, frame: u64) -> BBox {
        let t = (frame - 1) as f64;
        self.start.translate(self.velocity.0 * t, self.velocity.1 * t)
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn signed_speed(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    let s = uniform(rng, range);
    if rng.random_bool(0.5) {
        s
    } else {
        -s
    }
}

// Start coordinate (lower corner) along one axis.
fn start_coord(rng: &mut ChaCha8Rng, extent: f64, size: f64, velocity: f64, frames: u64, keep: bool) -> f64 {
    let (mut lo, mut hi) = (0.0, extent - size);
    if keep {
        let travel = velocity * (frames - 1) as f64;
        lo -= travel.min(0.0);
        hi -= travel.max(0.0);
    }
    uniform(rng, (lo, hi.max(lo)))
}

pub fn generate(config: &ScenarioConfig) -> Result<SyntheticSequence, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let frames = config.num_frames;

    let mut objects = Vec::with_capacity(config.num_objects);
    for k in 0..config.num_objects {
        let w = uniform(&mut rng, config.box_width);
        let h = uniform(&mut rng, config.box_height);
        let vx = signed_speed(&mut rng, config.speed);
        let vy = if config.crossing {
            signed_speed(&mut rng, config.speed)
        } else {
            0.0
        };
        let x = start_coord(&mut rng, config.image_width, w, vx, frames, config.keep_in_view);
        let y = if config.crossing {
            start_coord(&mut rng, config.image_height, h, vy, frames, config.keep_in_view)
        } else {
            let lane = config.image_height / config.num_objects as f64;
            (k as f64 + 0.5) * lane - h * 0.5
        };
        objects.push(Object {
            id: k as u64 + 1,
            start: BBox::new(x, y, x + w, y + h).expect("positive size"),
            velocity: (vx, vy),
        });
    }

    let image = BBox::new(0.0, 0.0, config.image_width, config.image_height).expect("positive image");
    let noise = Normal::new(0.0, config.noise_sigma).expect("validated sigma");
    let false_positives = (config.fp_rate > 0.0).then(|| Poisson::new(config.fp_rate).expect("validated rate"));
    let mut alive = vec![true; objects.len()];
    let mut gt = Vec::new();
    let mut detections = Vec::new();

    for frame in 1..=frames {
        let mut visible: Vec<(u64, BBox)> = Vec::new();
        for (obj, alive) in objects.iter().zip(alive.iter_mut()) {
            if !*alive {
                continue;
            }
            let b = obj.at(frame);
            if !image.contains(&b) {
                *alive = false;
                continue;
            }
            visible.push((obj.id, b));
        }
        for &(id, bbox) in &visible {
            gt.push(GtEntry { frame, id, bbox });
        }

        for (i, &(_, b)) in visible.iter().enumerate() {
            if config.occlusion
                && visible
                    .iter()
                    .enumerate()
                    .any(|(j, (_, other))| j != i && other.area() > b.area() && other.contains(&b))
            {
                continue;
            }
            if config.dropout > 0.0 && rng.random_bool(config.dropout) {
                continue;
            }
            let bbox = if config.noise_sigma > 0.0 {
                let c: [f64; 4] = std::array::from_fn(|_| noise.sample(&mut rng));
                let (x1, x2) = (b.x1 + c[0], b.x2 + c[2]);
                let (y1, y2) = (b.y1 + c[1], b.y2 + c[3]);
                match BBox::new(x1.min(x2), y1.min(y2), x1.max(x2), y1.max(y2)) {
                    Ok(n) if n.area() > 0.0 => n,
                    _ => continue,
                }
            } else {
                b
            };
            detections.push(Detection {
                frame,
                bbox,
                confidence: 1.0,
            });
        }

        if let Some(pois) = &false_positives {
            let count = pois.sample(&mut rng) as usize;
            for _ in 0..count {
                let w = uniform(&mut rng, config.box_width);
                let h = uniform(&mut rng, config.box_height);
                let x = uniform(&mut rng, (0.0, config.image_width - w));
                let y = uniform(&mut rng, (0.0, config.image_height - h));
                let confidence = rng.random_range(0.3..1.0);
                detections.push(Detection {
                    frame,
                    bbox: BBox::new(x, y, x + w, y + h).expect("positive size"),
                    confidence,
                });
            }
        }
    }

    Ok(SyntheticSequence {
        gt,
        detections,
        num_frames: frames,
    })
}

/// A large box passing over a small one, built for the short-occlusion check.
#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionScenario {
    pub sequence: SyntheticSequence,
    pub occluder_id: u64,
    pub target_id: u64,
    /// Frames in which the target is fully covered and undetected.
    pub occluded_frames: RangeInclusive<u64>,
}

pub const OCCLUSION_FRAMES: u64 = 60;

/// Occluder (120×240, 6 px/frame) overtakes a target (40×80, 1 px/frame) on
/// the same row. While the target lies inside the occluder only the occluder
/// is detected. Boxes are noise free with confidence 1.
pub fn occlusion_scenario() -> OcclusionScenario {
    let occluder = Object {
        id: 1,
        start: BBox::new(20.0, 120.0, 140.0, 360.0).unwrap(),
        velocity: (6.0, 0.0),
    };
    let target = Object {
        id: 2,
        start: BBox::new(180.0, 200.0, 220.0, 280.0).unwrap(),
        velocity: (1.0, 0.0),
    };

    let mut gt = Vec::new();
    let mut detections = Vec::new();
    let mut first = None;
    let mut last = 0;
    for frame in 1..=OCCLUSION_FRAMES {
        let big = occluder.at(frame);
        let small = target.at(frame);
        gt.push(GtEntry {
            frame,
            id: occluder.id,
            bbox: big,
        });
        gt.push(GtEntry {
            frame,
            id: target.id,
            bbox: small,
        });
        detections.push(Detection {
            frame,
            bbox: big,
            confidence: 1.0,
        });
        if big.contains(&small) {
            first.get_or_insert(frame);
            last = frame;
        } else {
            detections.push(Detection {
                frame,
                bbox: small,
                confidence: 1.0,
            });
        }
    }

    OcclusionScenario {
        sequence: SyntheticSequence {
            gt,
            detections,
            num_frames: OCCLUSION_FRAMES,
        },
        occluder_id: occluder.id,
        target_id: target.id,
        occluded_frames: first.expect("paths overlap")..=last,
    }
}

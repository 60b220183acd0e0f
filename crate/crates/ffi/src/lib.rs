//! C ABI for the `sortrack` tracker and evaluator.
//!
//! Handles are opaque; every fallible call returns a [`SortStatus`]. Memory
//! passed in is borrowed for the duration of the call only. A tracker handle
//! may move between threads but must not be used from two threads at once.
//!
//! The header `include/sortrack.h` is regenerated by `build.rs`.

use sortrack::geometry::{iou, BBox};
use sortrack::kalman::FilterParams;
use sortrack::metrics::{evaluate, EvalOptions, MetricsReport, MostlyTrackedMode};
use sortrack::mot_io::GtEntry;
use sortrack::tracker::{TrackOutput, Tracker, TrackerConfig};
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    InvalidBox = 3,
    /// The output buffer was too small; `written` holds the required count.
    BufferTooSmall = 4,
    InvalidInput = 5,
    Panic = 6,
}

/// Corner-form box in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SortBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl SortBox {
    fn to_bbox(self) -> Option<BBox> {
        BBox::new(self.x1, self.y1, self.x2, self.y2).ok()
    }
}

impl From<BBox> for SortBox {
    fn from(b: BBox) -> Self {
        Self {
            x1: b.x1,
            y1: b.y1,
            x2: b.x2,
            y2: b.y2,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SortConfig {
    pub max_age: u32,
    pub min_hits: u32,
    pub iou_min: f64,
    pub warmup: bool,
    /// Diagonal of the process noise Q.
    pub process_noise: [f64; 7],
    /// Diagonal of the measurement noise R.
    pub measurement_noise: [f64; 4],
    /// Diagonal of the initial covariance P0.
    pub initial_covariance: [f64; 7],
}

impl Default for SortConfig {
    fn default() -> Self {
        let c = TrackerConfig::default();
        Self {
            max_age: c.max_age,
            min_hits: c.min_hits,
            iou_min: c.iou_min,
            warmup: c.warmup,
            process_noise: c.filter.process_noise.diagonal(),
            measurement_noise: c.filter.measurement_noise.diagonal(),
            initial_covariance: c.filter.initial_covariance.diagonal(),
        }
    }
}

impl SortConfig {
    fn to_tracker_config(self) -> Option<TrackerConfig> {
        let filter =
            FilterParams::from_diagonals(&self.process_noise, &self.measurement_noise, &self.initial_covariance)
                .ok()?;
        let cfg = TrackerConfig {
            max_age: self.max_age,
            min_hits: self.min_hits,
            iou_min: self.iou_min,
            warmup: self.warmup,
            filter,
        };
        cfg.validate().ok().map(|_| cfg)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SortTrackOutput {
    pub frame: u64,
    pub id: u64,
    pub bbox: SortBox,
}

impl From<&TrackOutput> for SortTrackOutput {
    fn from(o: &TrackOutput) -> Self {
        Self {
            frame: o.frame,
            id: o.id,
            bbox: o.bbox.into(),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SortGtEntry {
    pub frame: u64,
    pub id: u64,
    pub bbox: SortBox,
}

/// CLEAR-MOT summary; ratios are fractions, not percentages.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SortMetrics {
    pub mota: f64,
    pub motp: f64,
    pub faf: f64,
    pub mostly_tracked: u64,
    pub partially_tracked: u64,
    pub mostly_lost: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub id_switches: u64,
    pub fragmentations: u64,
    pub num_gt: u64,
    pub num_frames: u64,
}

impl From<MetricsReport> for SortMetrics {
    fn from(r: MetricsReport) -> Self {
        Self {
            mota: r.mota,
            motp: r.motp,
            faf: r.faf,
            mostly_tracked: r.mt,
            partially_tracked: r.pt,
            mostly_lost: r.ml,
            false_positives: r.fp,
            false_negatives: r.fn_,
            id_switches: r.idsw,
            fragmentations: r.frag,
            num_gt: r.num_gt,
            num_frames: r.num_frames,
        }
    }
}

/// Opaque tracker handle.
pub struct SortTracker {
    inner: Tracker,
    last: Vec<SortTrackOutput>,
}

fn guard<F: FnOnce() -> SortStatus>(f: F) -> SortStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(SortStatus::Panic)
}

unsafe fn slice_or_empty<'a, T>(data: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if data.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(data, len))
    }
}

// Copies as much as fits and reports the full count through `written`.
unsafe fn copy_out(
    src: &[SortTrackOutput],
    out: *mut SortTrackOutput,
    capacity: usize,
    written: *mut usize,
) -> SortStatus {
    *written = src.len();
    let n = src.len().min(capacity);
    if n > 0 {
        if out.is_null() {
            return SortStatus::NullPointer;
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, n);
    }
    if src.len() > capacity {
        SortStatus::BufferTooSmall
    } else {
        SortStatus::Ok
    }
}

/// Fills `out` with the default configuration.
///
/// # Safety
/// `out` must be null or point to writable memory for one `SortConfig`.
#[no_mangle]
pub unsafe extern "C" fn sort_config_default(out: *mut SortConfig) -> SortStatus {
    if out.is_null() {
        return SortStatus::NullPointer;
    }
    out.write(SortConfig::default());
    SortStatus::Ok
}

/// Creates a tracker. A null `config` selects the defaults.
///
/// # Safety
/// `config` must be null or point to a valid `SortConfig`; `out` must point to
/// writable storage for one pointer. Free the handle with `sort_tracker_free`.
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_new(config: *const SortConfig, out: *mut *mut SortTracker) -> SortStatus {
    if out.is_null() {
        return SortStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| {
        let cfg = if config.is_null() {
            SortConfig::default()
        } else {
            *config
        };
        let Some(cfg) = cfg.to_tracker_config() else {
            return SortStatus::InvalidConfig;
        };
        match Tracker::new(cfg) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SortTracker {
                    inner,
                    last: Vec::new(),
                }));
                SortStatus::Ok
            }
            Err(_) => SortStatus::InvalidConfig,
        }
    })
}

/// # Safety
/// `tracker` must be null or a handle from `sort_tracker_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_free(tracker: *mut SortTracker) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}

/// Advances the tracker by one frame.
///
/// Reported tracks are copied into `out` (up to `capacity`) and their count is
/// stored in `written`. When the buffer is too small the frame is still
/// processed, `SORT_STATUS_BUFFER_TOO_SMALL` is returned and the full output
/// stays available through `sort_tracker_last_outputs`.
///
/// # Safety
/// `detections` must point to `count` boxes (or may be null when `count` is 0);
/// `out` must have room for `capacity` records; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_step(
    tracker: *mut SortTracker,
    detections: *const SortBox,
    count: usize,
    out: *mut SortTrackOutput,
    capacity: usize,
    written: *mut usize,
) -> SortStatus {
    if tracker.is_null() || written.is_null() {
        return SortStatus::NullPointer;
    }
    *written = 0;
    let Some(dets) = slice_or_empty(detections, count) else {
        return SortStatus::NullPointer;
    };
    let t = &mut *tracker;
    guard(|| {
        let boxes: Option<Vec<BBox>> = dets.iter().map(|d| d.to_bbox()).collect();
        let Some(boxes) = boxes else {
            return SortStatus::InvalidBox;
        };
        t.last = t.inner.step(&boxes).iter().map(SortTrackOutput::from).collect();
        copy_out(&t.last, out, capacity, written)
    })
}

/// Copies the output of the most recent step again.
///
/// # Safety
/// Same buffer rules as `sort_tracker_step`.
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_last_outputs(
    tracker: *const SortTracker,
    out: *mut SortTrackOutput,
    capacity: usize,
    written: *mut usize,
) -> SortStatus {
    if tracker.is_null() || written.is_null() {
        return SortStatus::NullPointer;
    }
    copy_out(&(*tracker).last, out, capacity, written)
}

/// Frames processed so far (0 for a fresh tracker).
///
/// # Safety
/// `tracker` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_frame(tracker: *const SortTracker) -> u64 {
    if tracker.is_null() {
        return 0;
    }
    (*tracker).inner.frame()
}

/// Live tracks, reported or not.
///
/// # Safety
/// `tracker` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn sort_tracker_track_count(tracker: *const SortTracker) -> usize {
    if tracker.is_null() {
        return 0;
    }
    (*tracker).inner.tracks().len()
}

/// IOU of two boxes; NaN for null pointers or invalid boxes.
///
/// # Safety
/// `a` and `b` must be null or point to valid boxes.
#[no_mangle]
pub unsafe extern "C" fn sort_iou(a: *const SortBox, b: *const SortBox) -> f64 {
    if a.is_null() || b.is_null() {
        return f64::NAN;
    }
    match ((*a).to_bbox(), (*b).to_bbox()) {
        (Some(a), Some(b)) => iou(&a, &b),
        _ => f64::NAN,
    }
}

/// CLEAR-MOT evaluation of `results` against `gt`. `num_frames` of 0 means
/// "largest frame seen"; `strict_mostly_tracked` selects the same-label rule.
///
/// # Safety
/// Arrays must hold the stated number of records (null allowed for 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sort_evaluate(
    gt: *const SortGtEntry,
    gt_count: usize,
    results: *const SortTrackOutput,
    result_count: usize,
    num_frames: u64,
    strict_mostly_tracked: bool,
    out: *mut SortMetrics,
) -> SortStatus {
    if out.is_null() {
        return SortStatus::NullPointer;
    }
    let (Some(gt), Some(results)) = (slice_or_empty(gt, gt_count), slice_or_empty(results, result_count)) else {
        return SortStatus::NullPointer;
    };
    guard(|| {
        let gt: Option<Vec<GtEntry>> = gt
            .iter()
            .map(|g| {
                g.bbox.to_bbox().map(|bbox| GtEntry {
                    frame: g.frame,
                    id: g.id,
                    bbox,
                })
            })
            .collect();
        let res: Option<Vec<TrackOutput>> = results
            .iter()
            .map(|r| {
                r.bbox.to_bbox().map(|bbox| TrackOutput {
                    frame: r.frame,
                    id: r.id,
                    bbox,
                })
            })
            .collect();
        let (Some(gt), Some(res)) = (gt, res) else {
            return SortStatus::InvalidBox;
        };
        let opts = EvalOptions {
            num_frames: (num_frames > 0).then_some(num_frames),
            mt_mode: if strict_mostly_tracked {
                MostlyTrackedMode::SameLabel
            } else {
                MostlyTrackedMode::Coverage
            },
            ..EvalOptions::default()
        };
        match evaluate(&gt, &res, &opts) {
            Ok(r) => {
                out.write(r.into());
                SortStatus::Ok
            }
            Err(_) => SortStatus::InvalidInput,
        }
    })
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn sort_status_str(status: SortStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SortStatus::Ok => c"ok",
        SortStatus::NullPointer => c"null pointer argument",
        SortStatus::InvalidConfig => c"invalid tracker configuration",
        SortStatus::InvalidBox => c"invalid box (non-finite or inverted corners)",
        SortStatus::BufferTooSmall => c"output buffer too small",
        SortStatus::InvalidInput => c"invalid input (duplicate identities)",
        SortStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn sort_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

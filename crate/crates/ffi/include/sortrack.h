/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SORTRACK_H
#define SORTRACK_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum SortStatus {
  SORT_STATUS_OK = 0,
  SORT_STATUS_NULL_POINTER = 1,
  SORT_STATUS_INVALID_CONFIG = 2,
  SORT_STATUS_INVALID_BOX = 3,
  // The output buffer was too small; `written` holds the required count.
  SORT_STATUS_BUFFER_TOO_SMALL = 4,
  SORT_STATUS_INVALID_INPUT = 5,
  SORT_STATUS_PANIC = 6,
} SortStatus;

// Opaque tracker handle.
typedef struct SortTracker SortTracker;

typedef struct SortConfig {
  uint32_t max_age;
  uint32_t min_hits;
  double iou_min;
  bool warmup;
  // Diagonal of the process noise Q.
  double process_noise[7];
  // Diagonal of the measurement noise R.
  double measurement_noise[4];
  // Diagonal of the initial covariance P0.
  double initial_covariance[7];
} SortConfig;

// Corner-form box in pixels.
typedef struct SortBox {
  double x1;
  double y1;
  double x2;
  double y2;
} SortBox;

typedef struct SortTrackOutput {
  uint64_t frame;
  uint64_t id;
  struct SortBox bbox;
} SortTrackOutput;

typedef struct SortGtEntry {
  uint64_t frame;
  uint64_t id;
  struct SortBox bbox;
} SortGtEntry;

// CLEAR-MOT summary; ratios are fractions, not percentages.
typedef struct SortMetrics {
  double mota;
  double motp;
  double faf;
  uint64_t mostly_tracked;
  uint64_t partially_tracked;
  uint64_t mostly_lost;
  uint64_t false_positives;
  uint64_t false_negatives;
  uint64_t id_switches;
  uint64_t fragmentations;
  uint64_t num_gt;
  uint64_t num_frames;
} SortMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Fills `out` with the default configuration.
//
// # Safety
// `out` must be null or point to writable memory for one `SortConfig`.
enum SortStatus sort_config_default(struct SortConfig *out);

// Creates a tracker. A null `config` selects the defaults.
//
// # Safety
// `config` must be null or point to a valid `SortConfig`; `out` must point to
// writable storage for one pointer. Free the handle with `sort_tracker_free`.
enum SortStatus sort_tracker_new(const struct SortConfig *config, struct SortTracker **out);

// # Safety
// `tracker` must be null or a handle from `sort_tracker_new` not yet freed.
void sort_tracker_free(struct SortTracker *tracker);

// Advances the tracker by one frame.
//
// Reported tracks are copied into `out` (up to `capacity`) and their count is
// stored in `written`. When the buffer is too small the frame is still
// processed, `SORT_STATUS_BUFFER_TOO_SMALL` is returned and the full output
// stays available through `sort_tracker_last_outputs`.
//
// # Safety
// `detections` must point to `count` boxes (or may be null when `count` is 0);
// `out` must have room for `capacity` records; `written` must be writable.
enum SortStatus sort_tracker_step(struct SortTracker *tracker,
                                  const struct SortBox *detections,
                                  size_t count,
                                  struct SortTrackOutput *out,
                                  size_t capacity,
                                  size_t *written);

// Copies the output of the most recent step again.
//
// # Safety
// Same buffer rules as `sort_tracker_step`.
enum SortStatus sort_tracker_last_outputs(const struct SortTracker *tracker,
                                          struct SortTrackOutput *out,
                                          size_t capacity,
                                          size_t *written);

// Frames processed so far (0 for a fresh tracker).
//
// # Safety
// `tracker` must be a live handle or null (returns 0).
uint64_t sort_tracker_frame(const struct SortTracker *tracker);

// Live tracks, reported or not.
//
// # Safety
// `tracker` must be a live handle or null (returns 0).
size_t sort_tracker_track_count(const struct SortTracker *tracker);

// IOU of two boxes; NaN for null pointers or invalid boxes.
//
// # Safety
// `a` and `b` must be null or point to valid boxes.
double sort_iou(const struct SortBox *a, const struct SortBox *b);

// CLEAR-MOT evaluation of `results` against `gt`. `num_frames` of 0 means
// "largest frame seen"; `strict_mostly_tracked` selects the same-label rule.
//
// # Safety
// Arrays must hold the stated number of records (null allowed for 0);
// `out` must be writable.
enum SortStatus sort_evaluate(const struct SortGtEntry *gt,
                              size_t gt_count,
                              const struct SortTrackOutput *results,
                              size_t result_count,
                              uint64_t num_frames,
                              bool strict_mostly_tracked,
                              struct SortMetrics *out);

// Static, NUL-terminated description of a status code.
const char *sort_status_str(enum SortStatus status);

// Library version, NUL-terminated.
const char *sort_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SORTRACK_H */

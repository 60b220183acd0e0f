mod common;

use proptest::prelude::*;
use sortrack::assoc::{associate, solve_assignment, CostMatrix};
use sortrack::geometry::BBox;
use sortrack::metrics::{evaluate, EvalOptions};
use sortrack::mot_io::GtEntry;
use sortrack::synth::{generate, ScenarioConfig};
use sortrack::tracker::{run_sequence, TrackOutput, Tracker, TrackerConfig};
use std::collections::{BTreeMap, HashMap};

fn arb_box() -> impl Strategy<Value = BBox> {
    (0.0..300.0f64, 0.0..300.0f64, 5.0..80.0f64, 5.0..80.0f64)
        .prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h).unwrap())
}

fn arb_boxes(max: usize) -> impl Strategy<Value = Vec<BBox>> {
    prop::collection::vec(arb_box(), 0..=max)
}

// ---- association -----------------------------------------------------------

#[test]
fn continuous_costs_match_oracle() {
    use rand::Rng;
    let mut rng = common::rng(11);
    for _ in 0..500 {
        let m = rng.random_range(0..=7);
        let n = rng.random_range(0..=7);
        let data = (0..m * n).map(|_| rng.random::<f64>()).collect();
        let costs = CostMatrix::from_row_major(m, n, data);
        let got = common::matching_total(&costs, &solve_assignment(&costs));
        let want = common::brute_force_max_total(&costs);
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
}

proptest! {
    #[test]
    fn associate_partitions_indices(dets in arb_boxes(8), preds in arb_boxes(8), gate in 0.0..1.0f64) {
        let a = associate(&dets, &preds, gate);
        prop_assert_eq!(a.matches.len() + a.unmatched_detections.len(), dets.len());
        prop_assert_eq!(a.matches.len() + a.unmatched_tracks.len(), preds.len());
        for m in &a.matches {
            prop_assert!(m.iou >= gate);
            prop_assert!(!a.unmatched_detections.contains(&m.detection));
            prop_assert!(!a.unmatched_tracks.contains(&m.track));
        }
    }

    #[test]
    fn raising_the_gate_never_adds_matches(dets in arb_boxes(8), preds in arb_boxes(8), lo in 0.0..1.0f64, step in 0.0..1.0f64) {
        let hi = (lo + step).min(1.0);
        prop_assert!(associate(&dets, &preds, hi).matches.len() <= associate(&dets, &preds, lo).matches.len());
    }

    #[test]
    fn detection_order_does_not_matter(
        dets in arb_boxes(7),
        preds in arb_boxes(7),
        perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..dets.len()).collect();
        order.shuffle(&mut common::rng(perm_seed));
        let shuffled: Vec<BBox> = order.iter().map(|&i| dets[i]).collect();

        let pairs = |a: sortrack::assoc::FrameAssignment, relabel: &dyn Fn(usize) -> usize| {
            let mut p: Vec<(usize, usize)> = a.matches.iter().map(|m| (relabel(m.detection), m.track)).collect();
            p.sort_unstable();
            p
        };
        let base = pairs(associate(&dets, &preds, 0.3), &|i| i);
        let moved = pairs(associate(&shuffled, &preds, 0.3), &|i| order[i]);
        prop_assert_eq!(base, moved);
    }
}

// ---- tracker ---------------------------------------------------------------

fn noisy_scene(seed: u64) -> sortrack::synth::SyntheticSequence {
    generate(&ScenarioConfig {
        num_objects: 15,
        num_frames: 80,
        crossing: true,
        noise_sigma: 2.0,
        dropout: 0.1,
        fp_rate: 1.0,
        seed,
        ..ScenarioConfig::default()
    })
    .unwrap()
}

#[test]
fn tracking_is_deterministic() {
    let seq = noisy_scene(4);
    let a = run_sequence(&seq.detections, seq.num_frames, TrackerConfig::default()).unwrap();
    let b = run_sequence(&seq.detections, seq.num_frames, TrackerConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ids_are_monotone_and_never_resume_after_long_gaps() {
    for seed in 0..10 {
        let seq = noisy_scene(seed);
        let frames = sortrack::mot_io::group_by_frame(&seq.detections, seq.num_frames).unwrap();
        for max_age in [1, 3] {
            let config = TrackerConfig {
                max_age,
                min_hits: 1,
                ..TrackerConfig::default()
            };
            let mut tracker = Tracker::new(config).unwrap();
            let mut last_created = 0;
            let mut last_seen: HashMap<u64, u64> = HashMap::new();
            for (i, dets) in frames.iter().enumerate() {
                let frame = i as u64 + 1;
                let out = tracker.step(dets);
                for &id in &tracker.last_log().created {
                    assert!(id > last_created, "id {id} created after {last_created}");
                    last_created = id;
                }
                for o in &out {
                    if let Some(prev) = last_seen.insert(o.id, frame) {
                        assert!(
                            frame - prev <= max_age as u64 + 1,
                            "id {} resumed after {} frames",
                            o.id,
                            frame - prev
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn live_tracks_are_bounded_by_recent_detections() {
    for seed in 0..10 {
        let seq = noisy_scene(seed);
        let frames = sortrack::mot_io::group_by_frame(&seq.detections, seq.num_frames).unwrap();
        let max_age = 2;
        let mut tracker = Tracker::new(TrackerConfig {
            max_age,
            ..TrackerConfig::default()
        })
        .unwrap();
        for (i, dets) in frames.iter().enumerate() {
            tracker.step(dets);
            let window = &frames[i.saturating_sub(max_age as usize)..=i];
            let recent: usize = window.iter().map(Vec::len).sum();
            assert!(tracker.tracks().len() <= recent);
        }
    }
}

#[test]
fn outputs_are_posteriors_not_detections() {
    let seq = noisy_scene(9);
    let frames = sortrack::mot_io::group_by_frame(&seq.detections, seq.num_frames).unwrap();
    let mut tracker = Tracker::new(TrackerConfig::default()).unwrap();
    let mut differs = 0;
    for dets in &frames {
        let out = tracker.step(dets);
        let log = tracker.last_log().clone();
        for o in &out {
            let track = tracker.tracks().iter().find(|t| t.id == o.id).unwrap();
            assert_eq!(o.bbox, track.bbox());
            if let Some(d) = log.matched_detection(o.id) {
                if o.bbox != dets[d] {
                    differs += 1;
                }
            }
        }
    }
    assert!(differs > 0, "every reported box equals its raw detection");
}

#[test]
fn clean_scenes_score_perfectly() {
    for seed in 0..20 {
        let seq = generate(&ScenarioConfig {
            num_objects: 8,
            num_frames: 120,
            seed,
            ..ScenarioConfig::clean()
        })
        .unwrap();
        let config = TrackerConfig {
            min_hits: 1,
            ..TrackerConfig::default()
        };
        let out = run_sequence(&seq.detections, seq.num_frames, config).unwrap();
        let r = evaluate(&seq.gt, &out, &EvalOptions::default()).unwrap();
        assert_eq!(r.mota, 1.0, "seed {seed}: {r:?}");
    }
}

// ---- metrics ---------------------------------------------------------------

fn as_outputs(gt: &[GtEntry]) -> Vec<TrackOutput> {
    gt.iter()
        .map(|g| TrackOutput {
            frame: g.frame,
            id: g.id,
            bbox: g.bbox,
        })
        .collect()
}

fn as_gt(out: &[TrackOutput]) -> Vec<GtEntry> {
    out.iter()
        .map(|o| GtEntry {
            frame: o.frame,
            id: o.id,
            bbox: o.bbox,
        })
        .collect()
}

#[test]
fn self_evaluation_is_perfect() {
    for seed in 0..20 {
        let seq = noisy_scene(seed);
        let res = run_sequence(&seq.detections, seq.num_frames, TrackerConfig::default()).unwrap();
        for stream in [as_outputs(&seq.gt), res] {
            let r = evaluate(&as_gt(&stream), &stream, &EvalOptions::default()).unwrap();
            assert_eq!((r.fp, r.fn_, r.idsw, r.frag), (0, 0, 0, 0));
            assert_eq!(r.mota, 1.0);
            assert!(r.num_gt == 0 || r.motp == 1.0);
        }
    }
}

#[test]
fn removing_hypotheses_leaves_only_misses() {
    let seq = noisy_scene(2);
    let r = evaluate(&seq.gt, &[], &EvalOptions::default()).unwrap();
    assert_eq!((r.fp, r.fn_, r.idsw), (0, r.num_gt, 0));
    assert_eq!(r.mota, 0.0);
}

#[test]
fn relabeling_hypotheses_changes_nothing() {
    for seed in 0..20 {
        let seq = noisy_scene(seed);
        let res = common::fuzzed_results(&seq.gt, seed);
        let mut ids: Vec<u64> = res.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        ids.dedup();
        let map: BTreeMap<u64, u64> = ids
            .iter()
            .rev()
            .enumerate()
            .map(|(k, &id)| (id, 7 * k as u64 + 3))
            .collect();
        let relabeled: Vec<TrackOutput> = res.iter().map(|o| TrackOutput { id: map[&o.id], ..*o }).collect();
        let a = evaluate(&seq.gt, &res, &EvalOptions::default()).unwrap();
        let b = evaluate(&seq.gt, &relabeled, &EvalOptions::default()).unwrap();
        assert_eq!((a.idsw, a.frag), (b.idsw, b.frag));
        assert_eq!(a, b);
    }
}

#[test]
fn far_away_objects_do_not_disturb_existing_correspondences() {
    for seed in 0..10 {
        let seq = noisy_scene(seed);
        let res = common::fuzzed_results(&seq.gt, seed);
        let base = evaluate(&seq.gt, &res, &EvalOptions::default()).unwrap();

        let far = |f: u64| BBox::new(10_000.0 + f as f64, 10_000.0, 10_040.0 + f as f64, 10_080.0).unwrap();
        let mut gt = seq.gt.clone();
        let mut out = res.clone();
        for f in 20..=40 {
            gt.push(GtEntry {
                frame: f,
                id: 999,
                bbox: far(f),
            });
            out.push(TrackOutput {
                frame: f,
                id: 99_999,
                bbox: far(f),
            });
        }
        gt.sort_by_key(|g| g.frame);
        out.sort_by_key(|o| o.frame);
        let more = evaluate(&gt, &out, &EvalOptions::default()).unwrap();
        assert_eq!(
            (more.fp, more.fn_, more.idsw, more.frag),
            (base.fp, base.fn_, base.idsw, base.frag)
        );
        assert_eq!(more.num_matches, base.num_matches + 21);
    }
}

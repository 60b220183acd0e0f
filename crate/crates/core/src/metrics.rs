//! CLEAR-MOT evaluation of tracker output against ground truth.
//!
//! Per frame, correspondences from the previous frame are kept while their
//! overlap stays at or above the threshold; the remaining ground truth and
//! hypotheses are matched by maximum total IOU among gated pairs. Counts are
//! accumulated into a [`MetricsReport`].

use crate::assoc::{solve_assignment, CostMatrix};
use crate::geometry::iou;
use crate::mot_io::GtEntry;
use crate::tracker::TrackOutput;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("duplicate {stream} identity {id} in frame {frame}")]
    Duplicate { stream: &'static str, frame: u64, id: u64 },
    #[error("cannot aggregate zero reports")]
    Empty,
}

/// How "mostly tracked" is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MostlyTrackedMode {
    /// Fraction of the lifespan matched to any hypothesis.
    #[default]
    Coverage,
    /// Fraction of the lifespan matched to the single most frequent hypothesis.
    SameLabel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Minimum IOU for a true positive (inclusive).
    pub overlap_threshold: f64,
    pub mt_mode: MostlyTrackedMode,
    /// Sequence length used for FAF; defaults to the largest frame seen.
    pub num_frames: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            overlap_threshold: 0.5,
            mt_mode: MostlyTrackedMode::Coverage,
            num_frames: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub mota: f64,
    pub motp: f64,
    pub faf: f64,
    pub mt: u64,
    pub ml: u64,
    pub pt: u64,
    pub fp: u64,
    pub fn_: u64,
    pub idsw: u64,
    pub frag: u64,
    pub num_gt: u64,
    pub num_frames: u64,
    pub num_matches: u64,
    /// Sum of IOU over all matched pairs.
    pub total_overlap: f64,
}

impl MetricsReport {
    fn finalize(mut self) -> Self {
        let errors = self.fn_ + self.fp + self.idsw;
        self.mota = if self.num_gt > 0 {
            1.0 - errors as f64 / self.num_gt as f64
        } else if errors == 0 {
            1.0
        } else {
            f64::NEG_INFINITY
        };
        self.motp = if self.num_matches > 0 {
            self.total_overlap / self.num_matches as f64
        } else {
            0.0
        };
        self.faf = if self.num_frames > 0 {
            self.fp as f64 / self.num_frames as f64
        } else {
            0.0
        };
        self
    }

    pub fn num_trajectories(&self) -> u64 {
        self.mt + self.pt + self.ml
    }
}

#[derive(Default)]
struct TrajectoryStats {
    present: u64,
    matched: u64,
    per_hypothesis: HashMap<u64, u64>,
    tracked_before: bool,
    in_gap: bool,
    frag: u64,
}

fn check_unique<I: Iterator<Item = (u64, u64)>>(stream: &'static str, keys: I) -> Result<(), MetricsError> {
    let mut seen = HashSet::new();
    for (frame, id) in keys {
        if !seen.insert((frame, id)) {
            return Err(MetricsError::Duplicate { stream, frame, id });
        }
    }
    Ok(())
}

pub fn evaluate(gt: &[GtEntry], results: &[TrackOutput], options: &EvalOptions) -> Result<MetricsReport, MetricsError> {
    check_unique("ground-truth", gt.iter().map(|g| (g.frame, g.id)))?;
    check_unique("result", results.iter().map(|r| (r.frame, r.id)))?;

    let mut frames: BTreeMap<u64, (Vec<&GtEntry>, Vec<&TrackOutput>)> = BTreeMap::new();
    for g in gt {
        frames.entry(g.frame).or_default().0.push(g);
    }
    for r in results {
        frames.entry(r.frame).or_default().1.push(r);
    }

    let threshold = options.overlap_threshold;
    let mut report = MetricsReport::default();
    let mut previous: HashMap<u64, u64> = HashMap::new();
    let mut previous_frame = 0;
    let mut last_matched: HashMap<u64, u64> = HashMap::new();
    let mut stats: BTreeMap<u64, TrajectoryStats> = BTreeMap::new();

    for (&frame, (gts, hyps)) in &frames {
        if frame != previous_frame + 1 {
            previous.clear();
        }
        let gt_index: HashMap<u64, usize> = gts.iter().enumerate().map(|(i, g)| (g.id, i)).collect();
        let hyp_index: HashMap<u64, usize> = hyps.iter().enumerate().map(|(i, h)| (h.id, i)).collect();
        let mut gt_taken = vec![false; gts.len()];
        let mut hyp_taken = vec![false; hyps.len()];
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();

        // keep last frame's correspondences that still hold
        let mut carried: Vec<(u64, u64)> = previous.iter().map(|(&g, &h)| (g, h)).collect();
        carried.sort_unstable();
        for (g, h) in carried {
            if let (Some(&gi), Some(&hi)) = (gt_index.get(&g), hyp_index.get(&h)) {
                let overlap = iou(&gts[gi].bbox, &hyps[hi].bbox);
                if overlap >= threshold {
                    gt_taken[gi] = true;
                    hyp_taken[hi] = true;
                    pairs.push((gi, hi, overlap));
                }
            }
        }

        // optimal matching of what remains, gated pairs only
        let free_gt: Vec<usize> = (0..gts.len()).filter(|&i| !gt_taken[i]).collect();
        let free_hyp: Vec<usize> = (0..hyps.len()).filter(|&j| !hyp_taken[j]).collect();
        if !free_gt.is_empty() && !free_hyp.is_empty() {
            let mut data = Vec::with_capacity(free_gt.len() * free_hyp.len());
            for &gi in &free_gt {
                for &hj in &free_hyp {
                    let overlap = iou(&gts[gi].bbox, &hyps[hj].bbox);
                    data.push(if overlap >= threshold { overlap } else { 0.0 });
                }
            }
            let costs = CostMatrix::from_row_major(free_gt.len(), free_hyp.len(), data);
            for (r, c) in solve_assignment(&costs) {
                let overlap = costs.get(r, c);
                if overlap > 0.0 && overlap >= threshold {
                    pairs.push((free_gt[r], free_hyp[c], overlap));
                }
            }
        }

        let mut current = HashMap::with_capacity(pairs.len());
        let mut matched_gt = vec![false; gts.len()];
        for &(gi, hi, overlap) in &pairs {
            let (g, h) = (gts[gi].id, hyps[hi].id);
            if let Some(&before) = last_matched.get(&g) {
                if before != h {
                    report.idsw += 1;
                }
            }
            last_matched.insert(g, h);
            current.insert(g, h);
            matched_gt[gi] = true;
            report.total_overlap += overlap;
            *stats.entry(g).or_default().per_hypothesis.entry(h).or_default() += 1;
        }

        for (gi, g) in gts.iter().enumerate() {
            let s = stats.entry(g.id).or_default();
            s.present += 1;
            if matched_gt[gi] {
                s.matched += 1;
                if s.in_gap {
                    s.frag += 1;
                }
                s.tracked_before = true;
                s.in_gap = false;
            } else if s.tracked_before {
                s.in_gap = true;
            }
        }

        let n = pairs.len() as u64;
        report.num_matches += n;
        report.num_gt += gts.len() as u64;
        report.fn_ += gts.len() as u64 - n;
        report.fp += hyps.len() as u64 - n;
        previous = current;
        previous_frame = frame;
    }

    for s in stats.values() {
        report.frag += s.frag;
        let tracked = match options.mt_mode {
            MostlyTrackedMode::Coverage => s.matched,
            MostlyTrackedMode::SameLabel => s.per_hypothesis.values().copied().max().unwrap_or(0),
        };
        let coverage = s.matched as f64 / s.present as f64;
        if tracked as f64 >= 0.8 * s.present as f64 {
            report.mt += 1;
        } else if coverage < 0.2 {
            report.ml += 1;
        } else {
            report.pt += 1;
        }
    }

    let max_frame = frames.keys().next_back().copied().unwrap_or(0);
    report.num_frames = options.num_frames.unwrap_or(max_frame);
    Ok(report.finalize())
}

/// Sums the counts of several sequences and recomputes the ratios.
pub fn aggregate(reports: &[MetricsReport]) -> Result<MetricsReport, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Empty);
    }
    let sum = reports.iter().fold(MetricsReport::default(), |acc, r| MetricsReport {
        mt: acc.mt + r.mt,
        ml: acc.ml + r.ml,
        pt: acc.pt + r.pt,
        fp: acc.fp + r.fp,
        fn_: acc.fn_ + r.fn_,
        idsw: acc.idsw + r.idsw,
        frag: acc.frag + r.frag,
        num_gt: acc.num_gt + r.num_gt,
        num_frames: acc.num_frames + r.num_frames,
        num_matches: acc.num_matches + r.num_matches,
        total_overlap: acc.total_overlap + r.total_overlap,
        ..acc
    });
    Ok(sum.finalize())
}

const COLUMNS: [&str; 9] = ["MOTA", "MOTP", "FAF", "MT", "ML", "FP", "FN", "IDsw", "Frag"];

/// Aligned text table, MOTA/MOTP in percent.
pub fn format_table(rows: &[(String, MetricsReport)]) -> String {
    let name_width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(8);
    let mut out = String::new();
    let _ = write!(out, "{:<name_width$}", "Sequence");
    for c in COLUMNS {
        let _ = write!(out, " {c:>8}");
    }
    out.push('\n');
    for (name, r) in rows {
        let _ = writeln!(
            out,
            "{:<name_width$} {:>8.1} {:>8.1} {:>8.2} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            name,
            r.mota * 100.0,
            r.motp * 100.0,
            r.faf,
            r.mt,
            r.ml,
            r.fp,
            r.fn_,
            r.idsw,
            r.frag
        );
    }
    out
}

/// Comma-separated form with a header row; same columns as the table.
pub fn format_csv(rows: &[(String, MetricsReport)]) -> String {
    let mut out = String::from("Sequence");
    for c in COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (name, r) in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.6},{},{},{},{},{},{}",
            name,
            r.mota * 100.0,
            r.motp * 100.0,
            r.faf,
            r.mt,
            r.ml,
            r.fp,
            r.fn_,
            r.idsw,
            r.frag
        );
    }
    out
}

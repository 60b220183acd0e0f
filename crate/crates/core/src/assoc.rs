//! IOU cost matrices and optimal detection-to-track assignment.
//!
//! The solver is a shortest-augmenting-path Hungarian method with dual
//! potentials, O(n²·m) for an n×m problem with n ≤ m. Taller matrices are
//! solved transposed. Maximising total IOU is done by minimising `1 - IOU`.

use crate::geometry::{iou, BBox};

/// Pairwise IOU between detections (rows) and predicted track boxes (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_boxes(detections: &[BBox], predictions: &[BBox]) -> Self {
        let mut data = Vec::with_capacity(detections.len() * predictions.len());
        for d in detections {
            data.extend(predictions.iter().map(|p| iou(d, p)));
        }
        Self {
            rows: detections.len(),
            cols: predictions.len(),
            data,
        }
    }

    /// Row-major construction; panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix shape mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }
}

/// Minimum-cost assignment of a dense `rows × cols` matrix.
///
/// Returns `min(rows, cols)` pairs `(row, col)` sorted by row.
pub fn solve_min_cost<F>(rows: usize, cols: usize, cost: F) -> Vec<(usize, usize)>
where
    F: Fn(usize, usize) -> f64,
{
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let mut pairs = if rows <= cols {
        shortest_augmenting_path(rows, cols, &cost)
    } else {
        shortest_augmenting_path(cols, rows, &|i, j| cost(j, i))
            .into_iter()
            .map(|(c, r)| (r, c))
            .collect()
    };
    pairs.sort_unstable();
    pairs
}

// Requires n <= m. Index 0 is a sentinel column/row, real indices start at 1.
fn shortest_augmenting_path<F>(n: usize, m: usize, cost: &F) -> Vec<(usize, usize)>
where
    F: Fn(usize, usize) -> f64,
{
    debug_assert!(n <= m);
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![f64::INFINITY; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .collect()
}

/// Matching of maximum total IOU, of size `min(rows, cols)`, sorted by row.
pub fn solve_assignment(costs: &CostMatrix) -> Vec<(usize, usize)> {
    solve_min_cost(costs.rows, costs.cols, |i, j| 1.0 - costs.get(i, j))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub detection: usize,
    pub track: usize,
    pub iou: f64,
}

/// Per-frame partition of detections and tracks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameAssignment {
    pub matches: Vec<Match>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_tracks: Vec<usize>,
}

/// Assigns detections to predicted track boxes, rejecting pairs below `iou_min`.
pub fn associate(detections: &[BBox], predictions: &[BBox], iou_min: f64) -> FrameAssignment {
    let costs = CostMatrix::from_boxes(detections, predictions);
    associate_costs(&costs, iou_min)
}

pub fn associate_costs(costs: &CostMatrix, iou_min: f64) -> FrameAssignment {
    let (m, n) = (costs.rows(), costs.cols());
    let mut det_matched = vec![false; m];
    let mut trk_matched = vec![false; n];
    let mut matches = Vec::new();

    // Rows and columns with no overlap anywhere can only ever produce
    // zero-IOU pairs, which a positive gate rejects.
    let (row_ids, col_ids): (Vec<usize>, Vec<usize>) = if iou_min > 0.0 {
        let rows = (0..m).filter(|&i| (0..n).any(|j| costs.get(i, j) > 0.0)).collect();
        let cols = (0..n).filter(|&j| (0..m).any(|i| costs.get(i, j) > 0.0)).collect();
        (rows, cols)
    } else {
        ((0..m).collect(), (0..n).collect())
    };

    let pairs = solve_min_cost(row_ids.len(), col_ids.len(), |i, j| {
        1.0 - costs.get(row_ids[i], col_ids[j])
    });
    for (i, j) in pairs {
        let (d, t) = (row_ids[i], col_ids[j]);
        let overlap = costs.get(d, t);
        if overlap >= iou_min {
            det_matched[d] = true;
            trk_matched[t] = true;
            matches.push(Match {
                detection: d,
                track: t,
                iou: overlap,
            });
        }
    }

    FrameAssignment {
        matches,
        unmatched_detections: (0..m).filter(|&i| !det_matched[i]).collect(),
        unmatched_tracks: (0..n).filter(|&j| !trk_matched[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x1: f64, y1: f64, x2: f64, y2: f64) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    fn total(costs: &CostMatrix, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(i, j)| costs.get(i, j)).sum()
    }

    #[test]
    fn single_entry() {
        let c = CostMatrix::from_row_major(1, 1, vec![0.7]);
        assert_eq!(solve_assignment(&c), vec![(0, 0)]);
    }

    #[test]
    fn two_by_two_prefers_larger_total() {
        // 0.9 + 0.2 = 1.1 beats 0.1 + 0.8 = 0.9
        let c = CostMatrix::from_row_major(2, 2, vec![0.9, 0.1, 0.8, 0.2]);
        let pairs = solve_assignment(&c);
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);
        assert!((total(&c, &pairs) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn empty_dimensions() {
        assert!(solve_assignment(&CostMatrix::from_row_major(0, 3, vec![])).is_empty());
        assert!(solve_assignment(&CostMatrix::from_row_major(4, 0, vec![])).is_empty());
        let a = associate(&[bb(0.0, 0.0, 1.0, 1.0)], &[], 0.3);
        assert_eq!(a.unmatched_detections, vec![0]);
        assert!(a.matches.is_empty() && a.unmatched_tracks.is_empty());
        let a = associate(&[], &[bb(0.0, 0.0, 1.0, 1.0)], 0.3);
        assert_eq!(a.unmatched_tracks, vec![0]);
    }

    #[test]
    fn rectangular_both_orientations() {
        let wide = CostMatrix::from_row_major(2, 3, vec![0.1, 0.9, 0.3, 0.8, 0.85, 0.0]);
        // best: (0,1)=0.9 + (1,0)=0.8 = 1.7
        assert_eq!(solve_assignment(&wide), vec![(0, 1), (1, 0)]);
        let tall = CostMatrix::from_row_major(3, 2, vec![0.1, 0.8, 0.9, 0.85, 0.3, 0.0]);
        assert_eq!(solve_assignment(&tall), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn associate_identity() {
        let b = bb(0.0, 0.0, 10.0, 10.0);
        let a = associate(&[b], &[b], 0.3);
        assert_eq!(
            a.matches,
            vec![Match {
                detection: 0,
                track: 0,
                iou: 1.0
            }]
        );
    }

    #[test]
    fn associate_gates_disjoint_pair() {
        let a = associate(&[bb(0.0, 0.0, 10.0, 10.0)], &[bb(100.0, 100.0, 110.0, 110.0)], 0.3);
        assert!(a.matches.is_empty());
        assert_eq!(a.unmatched_detections, vec![0]);
        assert_eq!(a.unmatched_tracks, vec![0]);
    }

    #[test]
    fn associate_picks_best_of_two_detections() {
        let pred = bb(0.0, 0.0, 10.0, 10.0);
        // a horizontal shift s of a 10x10 box gives iou (10-s)/(10+s)
        let d_good = bb(2.5, 0.0, 12.5, 10.0);
        let s = 30.0 / 7.0;
        let d_weak = bb(s, 0.0, 10.0 + s, 10.0);
        assert!((iou(&pred, &d_good) - 0.6).abs() < 1e-12);
        assert!((iou(&pred, &d_weak) - 0.4).abs() < 1e-12);
        let a = associate(&[d_weak, d_good], &[pred], 0.3);
        assert_eq!(a.matches.len(), 1);
        assert_eq!(a.matches[0].detection, 1);
        assert_eq!(a.unmatched_detections, vec![0]);
    }

    #[test]
    fn zero_gate_keeps_zero_overlap_matches() {
        let a = associate(&[bb(0.0, 0.0, 1.0, 1.0)], &[bb(5.0, 5.0, 6.0, 6.0)], 0.0);
        assert_eq!(a.matches.len(), 1);
    }
}

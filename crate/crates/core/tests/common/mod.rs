//! Test-only helpers shared by the integration targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sortrack::assoc::CostMatrix;
use sortrack::geometry::BBox;
use sortrack::mot_io::GtEntry;
use sortrack::tracker::TrackOutput;

/// Best total over every matching of size min(rows, cols), by exhaustive
/// enumeration of injective row -> column maps (or the transpose).
pub fn brute_force_max_total(costs: &CostMatrix) -> f64 {
    let (m, n) = (costs.rows(), costs.cols());
    if m == 0 || n == 0 {
        return 0.0;
    }
    let get = |i: usize, j: usize| if m <= n { costs.get(i, j) } else { costs.get(j, i) };
    let (small, large) = if m <= n { (m, n) } else { (n, m) };
    let mut used = vec![false; large];
    let mut picked = Vec::with_capacity(small);
    let mut best = f64::NEG_INFINITY;
    enumerate(0, small, large, &get, &mut used, &mut picked, &mut best);
    best
}

fn enumerate<F: Fn(usize, usize) -> f64>(
    row: usize,
    small: usize,
    large: usize,
    get: &F,
    used: &mut [bool],
    picked: &mut Vec<usize>,
    best: &mut f64,
) {
    if row == small {
        let total: f64 = picked.iter().enumerate().map(|(i, &j)| get(i, j)).sum();
        if total > *best {
            *best = total;
        }
        return;
    }
    for j in 0..large {
        if !used[j] {
            used[j] = true;
            picked.push(j);
            enumerate(row + 1, small, large, get, used, picked, best);
            picked.pop();
            used[j] = false;
        }
    }
}

/// Total of a matching, summed in row order.
pub fn matching_total(costs: &CostMatrix, pairs: &[(usize, usize)]) -> f64 {
    let mut p = pairs.to_vec();
    p.sort_unstable();
    p.iter().map(|&(i, j)| costs.get(i, j)).sum()
}

/// Random matrix with entries on the 1/1024 grid, so every sum of up to
/// seven entries is exact in f64.
pub fn random_dyadic_matrix(rng: &mut ChaCha8Rng, max_dim: usize) -> CostMatrix {
    let m = rng.random_range(0..=max_dim);
    let n = rng.random_range(0..=max_dim);
    let data = (0..m * n)
        .map(|_| rng.random_range(0..=1024u32) as f64 / 1024.0)
        .collect();
    CostMatrix::from_row_major(m, n, data)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Result stream derived from ground truth: dropped boxes, jitter, a small
// pool of ids shuffled now and then, and unrelated false alarms.
pub fn fuzzed_results(gt: &[GtEntry], seed: u64) -> Vec<TrackOutput> {
    let mut rng = rng(seed);
    let last = gt.iter().map(|g| g.frame).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut relabel: Vec<u64> = (0..64).collect();
    for frame in 1..=last {
        if rng.random_bool(0.05) {
            let a = rng.random_range(0..relabel.len());
            let b = rng.random_range(0..relabel.len());
            relabel.swap(a, b);
        }
        for g in gt.iter().filter(|g| g.frame == frame) {
            if rng.random_bool(0.15) {
                continue;
            }
            let j = 6.0;
            let bbox = g.bbox.translate(rng.random_range(-j..j), rng.random_range(-j..j));
            out.push(TrackOutput {
                frame,
                id: 1000 + relabel[(g.id % 64) as usize],
                bbox,
            });
        }
        for k in 0..rng.random_range(0..3u64) {
            let x = rng.random_range(0.0..1800.0);
            let y = rng.random_range(0.0..1000.0);
            let bbox = BBox::new(x, y, x + 40.0, y + 80.0).unwrap();
            out.push(TrackOutput {
                frame,
                id: 5000 + k,
                bbox,
            });
        }
    }
    out
}

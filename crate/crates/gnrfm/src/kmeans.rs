//! Seeded k-means over matrix rows: k-means++ initialization, Lloyd
//! iterations with an empty-cluster repair, and several restarts keeping the
//! lowest-inertia run. Fully deterministic for a given (data, k, seed).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const RESTARTS: usize = 20;
const MAX_ITERS: usize = 300;

/// Cluster the rows of `points` into `k` groups; returns one label per row.
pub fn kmeans(points: &Matrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = points.rows();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot split {n} points into {k} clusters"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..RESTARTS {
        let sub_seed: u64 = master.random();
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
        let (labels, inertia) = lloyd(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some((best_inertia, _)) => inertia < *best_inertia,
        };
        if better {
            best = Some((inertia, labels));
        }
    }
    Ok(best.expect("at least one restart").1)
}

fn lloyd(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.rows();
    let d = points.cols();
    let mut centers = plus_plus_init(points, k, rng);
    let mut labels = vec![0usize; n];
    for _ in 0..MAX_ITERS {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let l = nearest_center(points.row(i), &centers, d);
            if *label != l {
                *label = l;
                changed = true;
            }
        }
        // Recompute means; repair empty clusters by stealing the farthest
        // point from its current cluster.
        let mut sums = vec![0.0f64; k * d];
        let mut sizes = vec![0usize; k];
        for i in 0..n {
            sizes[labels[i]] += 1;
            let row = points.row(i);
            let acc = &mut sums[labels[i] * d..(labels[i] + 1) * d];
            for (a, &x) in acc.iter_mut().zip(row) {
                *a += x;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far_i = usize::MAX;
            let mut far_d = -1.0;
            for i in 0..n {
                if sizes[labels[i]] <= 1 {
                    continue; // don't empty another cluster
                }
                let dist = sq_dist(points.row(i), &centers[labels[i] * d..(labels[i] + 1) * d]);
                if dist > far_d {
                    far_d = dist;
                    far_i = i;
                }
            }
            if far_i == usize::MAX {
                continue; // k ≤ n guarantees this is unreachable, but stay safe
            }
            let old = labels[far_i];
            sizes[old] -= 1;
            let row = points.row(far_i);
            for j in 0..d {
                sums[old * d + j] -= row[j];
            }
            labels[far_i] = c;
            sizes[c] = 1;
            sums[c * d..(c + 1) * d].copy_from_slice(row);
            changed = true;
        }
        for c in 0..k {
            if sizes[c] == 0 {
                continue; // keep the previous center rather than divide by zero
            }
            let inv = 1.0 / sizes[c] as f64;
            for j in 0..d {
                centers[c * d + j] = sums[c * d + j] * inv;
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = (0..n)
        .map(|i| sq_dist(points.row(i), &centers[labels[i] * d..(labels[i] + 1) * d]))
        .sum();
    (labels, inertia)
}

/// k-means++ seeding: first center uniform, the rest sampled proportionally
/// to the squared distance from the chosen set. When every remaining point
/// coincides with a center, fall back to the first index not yet used.
fn plus_plus_init(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = points.rows();
    let d = points.cols();
    let mut centers = Vec::with_capacity(k * d);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centers.extend_from_slice(points.row(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(first)))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            (0..n)
                .find(|&i| !chosen[i])
                .expect("k ≤ n leaves an unchosen point")
        };
        chosen[next] = true;
        let row = points.row(next);
        centers.extend_from_slice(row);
        for (i, best) in d2.iter_mut().enumerate() {
            let dist = sq_dist(points.row(i), row);
            if dist < *best {
                *best = dist;
            }
        }
    }
    centers
}

fn nearest_center(row: &[f64], centers: &[f64], d: usize) -> usize {
    let k = centers.len() / d;
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for c in 0..k {
        let dist = sq_dist(row, &centers[c * d..(c + 1) * d]);
        if dist < best_d {
            best_d = dist;
            best = c;
        }
    }
    best
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::accuracy;
    use rand::{Rng, SeedableRng};

    fn blobs(centers: &[(f64, f64)], per: usize, spread: f64, seed: u64) -> (Matrix, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = centers.len() * per;
        let mut m = Matrix::zeros(n, 2);
        let mut labels = Vec::with_capacity(n);
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for i in 0..per {
                let r = c * per + i;
                m[(r, 0)] = cx + spread * rng.random_range(-1.0..1.0);
                m[(r, 1)] = cy + spread * rng.random_range(-1.0..1.0);
                labels.push(c);
            }
        }
        (m, labels)
    }

    #[test]
    fn recovers_separated_blobs() {
        let (m, truth) = blobs(&[(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)], 15, 0.5, 3);
        let labels = kmeans(&m, 3, 0).unwrap();
        assert_eq!(accuracy(&truth, &labels).unwrap(), 1.0);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let (m, _) = blobs(&[(0.0, 0.0), (5.0, 5.0)], 3, 0.3, 4);
        let labels = kmeans(&m, 6, 1).unwrap();
        let mut seen = labels.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn k_equals_one_gives_single_cluster() {
        let (m, _) = blobs(&[(1.0, 2.0)], 8, 1.0, 5);
        let labels = kmeans(&m, 1, 0).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn duplicate_points_are_handled() {
        let mut m = Matrix::zeros(6, 2);
        for i in 3..6 {
            m[(i, 0)] = 1.0; // two distinct locations, three copies each
        }
        let labels = kmeans(&m, 2, 0).unwrap();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[3], labels[4]);
        assert_ne!(labels[0], labels[3]);
    }

    #[test]
    fn deterministic_per_seed() {
        let (m, _) = blobs(&[(0.0, 0.0), (3.0, 3.0), (6.0, 0.0)], 10, 1.0, 6);
        assert_eq!(kmeans(&m, 3, 42).unwrap(), kmeans(&m, 3, 42).unwrap());
    }

    #[test]
    fn all_clusters_nonempty_and_labels_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = Matrix::from_fn(30, 4, |_, _| rng.random_range(-1.0..1.0));
        for seed in 0..3 {
            let labels = kmeans(&m, 5, seed).unwrap();
            assert_eq!(labels.len(), 30);
            let mut sizes = [0usize; 5];
            for &l in &labels {
                assert!(l < 5);
                sizes[l] += 1;
            }
            assert!(sizes.iter().all(|&s| s > 0), "seed {seed}: {sizes:?}");
        }
    }

    #[test]
    fn rejects_bad_k() {
        let (m, _) = blobs(&[(0.0, 0.0)], 4, 0.1, 7);
        assert!(kmeans(&m, 0, 0).is_err());
        assert!(kmeans(&m, 5, 0).is_err());
    }
}

//! Clustering quality scores: segmentation accuracy under the best
//! one-to-one cluster matching, and normalized mutual information.
//!
//! Both scores are label-invariant: inputs are remapped to contiguous ids
//! (sorted order of the distinct values), so any usize labelling works.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Joint count table of two labelings over the same points.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    /// counts[i][j] = number of points with i-th distinct label in `a` and
    /// j-th distinct label in `b`.
    counts: Vec<Vec<usize>>,
    row_totals: Vec<usize>,
    col_totals: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_totals.len()
    }

    pub fn count(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    pub fn row_totals(&self) -> &[usize] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[usize] {
        &self.col_totals
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Build the contingency table of two labelings.
pub fn contingency(a: &[usize], b: &[usize]) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "labelings have different lengths: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot score empty labelings".into(),
        ));
    }
    let a_ids = remap(a);
    let b_ids = remap(b);
    let (r, c) = (a_ids.1, b_ids.1);
    let mut counts = vec![vec![0usize; c]; r];
    for (&i, &j) in a_ids.0.iter().zip(&b_ids.0) {
        counts[i][j] += 1;
    }
    let row_totals: Vec<usize> = counts.iter().map(|row| row.iter().sum()).collect();
    let mut col_totals = vec![0usize; c];
    for row in &counts {
        for (t, &v) in col_totals.iter_mut().zip(row) {
            *t += v;
        }
    }
    Ok(ContingencyTable {
        counts,
        row_totals,
        col_totals,
        n: a.len(),
    })
}

/// Map labels to contiguous ids, ordered by sorted distinct value; returns
/// (ids, number of distinct labels).
fn remap(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ids = labels
        .iter()
        .map(|l| distinct.binary_search(l).unwrap())
        .collect();
    (ids, distinct.len())
}

/// Segmentation accuracy in [0,1]: the fraction of points whose predicted
/// cluster maps to their true cluster under the best one-to-one matching
/// (maximum-weight assignment on the contingency table).
pub fn accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let table = contingency(truth, pred)?;
    let q = table.rows().max(table.cols());
    // Minimize negated counts on a zero-padded square cost matrix.
    let cost: Vec<Vec<i64>> = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| {
                    if i < table.rows() && j < table.cols() {
                        -(table.count(i, j) as i64)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let assignment = hungarian_min(&cost);
    let matched: usize = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < table.rows() && j < table.cols())
        .map(|(i, &j)| table.count(i, j))
        .sum();
    Ok(matched as f64 / table.n() as f64)
}

/// Normalization used by [`nmi_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmiNorm {
    /// MI / √(H(a)·H(b)) — the default.
    Sqrt,
    /// MI / ((H(a)+H(b))/2).
    Mean,
}

/// Normalized mutual information with the √(H·H) normalization.
pub fn nmi(truth: &[usize], pred: &[usize]) -> Result<f64> {
    nmi_with(truth, pred, NmiNorm::Sqrt)
}

/// Normalized mutual information. Degenerate partitions follow the usual
/// convention: if both labelings have zero entropy they describe the same
/// single cluster (NMI = 1); if only one does, NMI = 0.
pub fn nmi_with(truth: &[usize], pred: &[usize], norm: NmiNorm) -> Result<f64> {
    let table = contingency(truth, pred)?;
    let n = table.n() as f64;
    let h = |totals: &[usize]| -> f64 {
        totals
            .iter()
            .filter(|&&t| t > 0)
            .map(|&t| {
                let p = t as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a: f64 = h(table.row_totals());
    let h_b: f64 = h(table.col_totals());
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(if h_a == 0.0 && h_b == 0.0 { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for i in 0..table.rows() {
        for j in 0..table.cols() {
            let nij = table.count(i, j);
            if nij == 0 {
                continue;
            }
            let pij = nij as f64 / n;
            let pi = table.row_totals()[i] as f64 / n;
            let pj = table.col_totals()[j] as f64 / n;
            mi += pij * (pij / (pi * pj)).ln();
        }
    }
    let denom = match norm {
        NmiNorm::Sqrt => (h_a * h_b).sqrt(),
        NmiNorm::Mean => 0.5 * (h_a + h_b),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Minimum-cost perfect assignment on an n×n cost matrix via shortest
/// augmenting paths with potentials (O(n³)). Returns row → column.
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based internals; index 0 is the virtual start column/row.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column -> row
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Walk the augmenting path backwards, flipping the matching.
        while j0 != 0 {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn contingency_counts_and_totals() {
        let t = contingency(&[0, 0, 1, 1, 2, 2], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!((t.rows(), t.cols(), t.n()), (3, 2, 6));
        assert_eq!(t.count(0, 0), 2);
        assert_eq!(t.count(1, 0), 1);
        assert_eq!(t.count(1, 1), 1);
        assert_eq!(t.count(2, 1), 2);
        assert_eq!(t.row_totals(), &[2, 2, 2]);
        assert_eq!(t.col_totals(), &[3, 3]);
    }

    #[test]
    fn contingency_rejects_bad_input() {
        assert!(contingency(&[0, 1], &[0]).is_err());
        assert!(contingency(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_hand_oracles() {
        // Perfect and permuted-perfect labelings.
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0, 1, 1], &[7, 7, 3, 3]).unwrap(), 1.0);
        // Three true clusters squeezed into two predicted ones: the best
        // matching recovers 2 + 2 of 6 points.
        let acc = accuracy(&[0, 0, 1, 1, 2, 2], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((acc - 4.0 / 6.0).abs() < 1e-15);
        // One flipped point.
        let acc = accuracy(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 1, 1]).unwrap();
        assert!((acc - 5.0 / 6.0).abs() < 1e-15);
        // Single cluster on both sides.
        assert_eq!(accuracy(&[4, 4, 4], &[1, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_is_label_invariant() {
        let truth = [0, 0, 1, 1, 2, 2, 2];
        let pred = [5, 5, 9, 2, 2, 2, 2];
        let relabeled: Vec<usize> = pred.iter().map(|&l| l * 100 + 7).collect();
        assert_eq!(
            accuracy(&truth, &pred).unwrap(),
            accuracy(&truth, &relabeled).unwrap()
        );
    }

    /// Brute force over all column permutations of the padded square table.
    fn accuracy_brute(truth: &[usize], pred: &[usize]) -> f64 {
        let table = contingency(truth, pred).unwrap();
        let q = table.rows().max(table.cols());
        let mut perm: Vec<usize> = (0..q).collect();
        let mut best = 0usize;
        permute(&mut perm, 0, &mut |p| {
            let s: usize = p
                .iter()
                .enumerate()
                .filter(|&(i, &j)| i < table.rows() && j < table.cols())
                .map(|(i, &j)| table.count(i, j))
                .sum();
            best = best.max(s);
        });
        best as f64 / table.n() as f64
    }

    fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }

    #[test]
    fn hungarian_matches_brute_force_on_random_labelings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let n = rng.random_range(1..30);
            let ka = rng.random_range(1..=5usize);
            let kb = rng.random_range(1..=5usize);
            let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
            let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
            let fast = accuracy(&truth, &pred).unwrap();
            let slow = accuracy_brute(&truth, &pred);
            assert!(
                (fast - slow).abs() < 1e-12,
                "trial {trial}: hungarian {fast} vs brute {slow} for {truth:?} / {pred:?}"
            );
        }
    }

    #[test]
    fn nmi_hand_oracles() {
        // Identical partitions.
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        // Independent partitions have zero mutual information.
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
        // Hand-computed: MI = ln2, H(a) = ln2, H(b) = 1.5·ln2.
        let truth = [0, 0, 1, 1];
        let pred = [0, 0, 1, 2];
        let sqrt = nmi(&truth, &pred).unwrap();
        assert!((sqrt - 1.0 / 1.5f64.sqrt()).abs() < 1e-12, "{sqrt}");
        let mean = nmi_with(&truth, &pred, NmiNorm::Mean).unwrap();
        assert!((mean - 0.8).abs() < 1e-12, "{mean}");
    }

    #[test]
    fn nmi_degenerate_partitions() {
        assert_eq!(nmi(&[0, 0, 0], &[2, 2, 2]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 1, 2], &[5, 5, 5]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(2..40);
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..4usize)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..6usize)).collect();
            let ab = nmi(&a, &b).unwrap();
            let ba = nmi(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&ab));
        }
    }
}

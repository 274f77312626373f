//! The intrinsic metric between partitions and optimal relabelings.
//!
//! `delta(X, Y)` is the smallest Frobenius distance between any relabeling
//! of `X` and `Y`. Since every relabeling has the same norm, this reduces to
//! maximizing `<PX, Y>`, a linear assignment over cluster pairs.

use rayon::prelude::*;

use crate::assignment::max_weight_assignment;
use crate::error::Result;
use crate::partition::{check_enumerable, dot, frobenius_norm, LabeledPartition, Permutation};

/// Optimal relabeling of a first partition onto a second.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseAlignment {
    /// Applied to the first argument.
    pub permutation: Permutation,
    pub distance: f64,
    /// Maximized `<PX, Y>`.
    pub inner_value: f64,
}

impl PairwiseAlignment {
    pub fn squared_distance(&self) -> f64 {
        self.distance * self.distance
    }
}

/// Cluster-overlap matrix: entry `(l, k)` is `<row_l(X), row_k(Y)>`.
fn overlap_matrix(x: &LabeledPartition, y: &LabeledPartition) -> Vec<f64> {
    let ell = x.ell();
    let mut s = vec![0.0; ell * ell];
    for l in 0..ell {
        let xl = x.row(l);
        for k in 0..ell {
            s[l * ell + k] = dot(xl, y.row(k));
        }
    }
    s
}

/// `||PX - Y||` summed directly; the expanded squared form cancels badly
/// when the distance is small.
fn relabeled_distance(x: &LabeledPartition, y: &LabeledPartition, p: &Permutation) -> f64 {
    p.mapping()
        .iter()
        .enumerate()
        .map(|(l, &k)| {
            x.row(l)
                .iter()
                .zip(y.row(k))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Intrinsic distance via linear assignment. Among optimal relabelings the
/// lexicographically smallest mapping is reported.
pub fn delta(x: &LabeledPartition, y: &LabeledPartition) -> Result<PairwiseAlignment> {
    x.check_same_dims(y)?;
    let ell = x.ell();
    let a = max_weight_assignment(&overlap_matrix(x, y), ell);
    let permutation = Permutation::from_mapping_unchecked(a.mapping);
    Ok(PairwiseAlignment {
        distance: relabeled_distance(x, y, &permutation),
        inner_value: a.value,
        permutation,
    })
}

/// Intrinsic distance by exhaustive search over all `ell!` relabelings.
pub fn delta_bruteforce(x: &LabeledPartition, y: &LabeledPartition) -> Result<PairwiseAlignment> {
    x.check_same_dims(y)?;
    check_enumerable(x.ell())?;
    let ell = x.ell();
    let candidates: Vec<(Permutation, f64)> = Permutation::all(ell)
        .map(|p| {
            let d = relabeled_distance(x, y, &p);
            (p, d * d)
        })
        .collect();
    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let scale = 1.0 + frobenius_norm(x).powi(2) + frobenius_norm(y).powi(2);
    let eps = 1e-12 * ell as f64 * scale;
    let (permutation, _) = candidates
        .into_iter()
        .find(|(_, d2)| *d2 <= best + eps)
        .expect("at least one permutation");
    let inner_value = dot(x.permuted(&permutation).values(), y.values());
    Ok(PairwiseAlignment {
        permutation,
        distance: best.max(0.0).sqrt(),
        inner_value,
    })
}

/// Relabels `x` into optimal position with `z`.
pub fn align_to(x: &LabeledPartition, z: &LabeledPartition) -> Result<LabeledPartition> {
    Ok(x.permuted(&delta(x, z)?.permutation))
}

/// Symmetric `n x n` matrix of squared intrinsic distances, row-major.
/// Entries are computed in parallel, each independently of the others.
pub fn pairwise_squared_deltas(sample: &[LabeledPartition]) -> Result<Vec<f64>> {
    let n = sample.len();
    if let Some(first) = sample.first() {
        for x in sample {
            first.check_same_dims(x)?;
        }
    }
    let upper: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| delta(&sample[i], &sample[j]).map(|a| (i, j, a.squared_distance())))
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; n * n];
    for (i, j, d2) in upper {
        out[i * n + j] = d2;
        out[j * n + i] = d2;
    }
    Ok(out)
}

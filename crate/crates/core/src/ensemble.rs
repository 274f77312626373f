//! Synthetic datasets and k-means ensembles.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{make_hard, HardLabeling, LabeledPartition};
use crate::rng::{self, BoxMuller};

/// Points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    points: Vec<f64>,
    /// 0-based component per point.
    ground_truth: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(d: usize, points: Vec<f64>, ground_truth: Option<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("dimension must be at least 1"));
        }
        if points.is_empty() || !points.len().is_multiple_of(d) {
            return Err(Error::validation(format!(
                "{} coordinates do not form points of dimension {d}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite coordinate at point {}",
                i / d
            )));
        }
        if let Some(gt) = &ground_truth {
            if gt.len() != points.len() / d {
                return Err(Error::validation(format!(
                    "{} ground-truth labels for {} points",
                    gt.len(),
                    points.len() / d
                )));
            }
        }
        Ok(Self {
            d,
            points,
            ground_truth,
        })
    }

    pub fn m(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.d..(j + 1) * self.d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn ground_truth(&self) -> Option<&[usize]> {
        self.ground_truth.as_deref()
    }

    /// Number of ground-truth components, if labels are present.
    pub fn components(&self) -> Option<usize> {
        self.ground_truth
            .as_ref()
            .map(|gt| gt.iter().max().map_or(0, |&l| l + 1))
    }
}

/// Isotropic Gaussian blobs centred on the integer grid `(r, c)`.
///
/// Component `r * cols + c` contributes `points_per_component` consecutive
/// points.
pub fn gen_gaussian_grid(
    rows: usize,
    cols: usize,
    sigma: f64,
    points_per_component: usize,
    seed: u64,
) -> Result<Dataset> {
    if rows == 0 || cols == 0 || points_per_component == 0 {
        return Err(Error::validation(
            "rows, cols and points per component must be at least 1",
        ));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::validation(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let mut r = rng::stream(seed, "gaussian-grid", 0);
    let mut normal = BoxMuller::new();
    let m = rows * cols * points_per_component;
    let mut points = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(m);
    for row in 0..rows {
        for col in 0..cols {
            for _ in 0..points_per_component {
                points.push(row as f64 + sigma * normal.sample(&mut r));
                points.push(col as f64 + sigma * normal.sample(&mut r));
                labels.push(row * cols + col);
            }
        }
    }
    Dataset::new(2, points, Some(labels))
}

/// `m` points uniform on the unit cube `[0, 1]^d`.
pub fn gen_uniform(m: usize, d: usize, seed: u64) -> Result<Dataset> {
    if m == 0 || d == 0 {
        return Err(Error::validation("m and d must be at least 1"));
    }
    let mut r = rng::stream(seed, "uniform", 0);
    let points = (0..m * d).map(|_| r.random::<f64>()).collect();
    Dataset::new(d, points, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyClusterPolicy {
    /// Move an empty centroid onto the point farthest from its centroid,
    /// once per iteration; a cluster still empty afterwards stays empty.
    #[default]
    FarthestPoint,
    LeaveEmpty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub max_iters: usize,
    /// Independent initializations; the lowest inertia wins.
    pub n_init: usize,
    pub empty_clusters: EmptyClusterPolicy,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            n_init: 2,
            empty_clusters: EmptyClusterPolicy::FarthestPoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: HardLabeling,
    pub inertia: f64,
    /// Within-cluster sum of squares after every assignment step.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(data: &Dataset, centroids: &[f64], k: usize, labels: &mut [usize]) {
    let d = data.d();
    for (j, label) in labels.iter_mut().enumerate() {
        let p = data.point(j);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let dist = sq_dist(p, &centroids[c * d..(c + 1) * d]);
            if dist < best_d {
                best_d = dist;
                best = c;
            }
        }
        *label = best;
    }
}

fn inertia(data: &Dataset, centroids: &[f64], labels: &[usize]) -> f64 {
    let d = data.d();
    labels
        .iter()
        .enumerate()
        .map(|(j, &c)| sq_dist(data.point(j), &centroids[c * d..(c + 1) * d]))
        .sum()
}

fn reseed_empty(data: &Dataset, centroids: &mut [f64], k: usize, labels: &mut [usize]) {
    let d = data.d();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let empty: Vec<usize> = (0..k).filter(|&c| sizes[c] == 0).collect();
    if empty.is_empty() {
        return;
    }
    let mut dists: Vec<(usize, f64)> = labels
        .iter()
        .enumerate()
        .map(|(j, &c)| (j, sq_dist(data.point(j), &centroids[c * d..(c + 1) * d])))
        .collect();
    // farthest first, lower index on ties
    dists.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (&c, &(j, _)) in empty.iter().zip(&dists) {
        centroids[c * d..(c + 1) * d].copy_from_slice(data.point(j));
    }
    assign(data, centroids, k, labels);
}

fn update(data: &Dataset, centroids: &mut [f64], k: usize, labels: &[usize]) {
    let d = data.d();
    let mut sums = vec![0.0; k * d];
    let mut sizes = vec![0usize; k];
    for (j, &c) in labels.iter().enumerate() {
        sizes[c] += 1;
        for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(data.point(j)) {
            *s += v;
        }
    }
    for c in 0..k {
        if sizes[c] > 0 {
            for t in 0..d {
                centroids[c * d + t] = sums[c * d + t] / sizes[c] as f64;
            }
        }
    }
}

fn lloyd(data: &Dataset, k: usize, cfg: &KMeansConfig, seed: u64) -> KMeansResult {
    let d = data.d();
    let m = data.m();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Vec::with_capacity(k * d);
    for j in index::sample(&mut r, m, k) {
        centroids.extend_from_slice(data.point(j));
    }
    let mut labels = vec![0; m];
    assign(data, &centroids, k, &mut labels);
    let reseed = cfg.empty_clusters == EmptyClusterPolicy::FarthestPoint;
    if reseed {
        reseed_empty(data, &mut centroids, k, &mut labels);
    }
    let mut trace = vec![inertia(data, &centroids, &labels)];
    let mut next = labels.clone();
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        update(data, &mut centroids, k, &labels);
        assign(data, &centroids, k, &mut next);
        if reseed {
            reseed_empty(data, &mut centroids, k, &mut next);
        }
        trace.push(inertia(data, &centroids, &next));
        if next == labels {
            break;
        }
        std::mem::swap(&mut labels, &mut next);
    }
    KMeansResult {
        labels: HardLabeling::new(k, labels).expect("labels below k"),
        inertia: *trace.last().expect("nonempty trace"),
        inertia_trace: trace,
        iterations,
    }
}

/// Lloyd's k-means from `k` distinct random data points, repeated
/// `cfg.n_init` times; the run with the smallest inertia is returned.
pub fn kmeans(data: &Dataset, k: usize, seed: u64, cfg: &KMeansConfig) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    if k > data.m() {
        return Err(Error::validation(format!(
            "k = {k} exceeds the number of points {}",
            data.m()
        )));
    }
    if cfg.n_init == 0 || cfg.max_iters == 0 {
        return Err(Error::validation("n_init and max_iters must be at least 1"));
    }
    let mut best: Option<KMeansResult> = None;
    for t in 0..cfg.n_init {
        let run = lloyd(
            data,
            k,
            cfg,
            rng::derive_seed(seed, "kmeans-init", t as u64),
        );
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub kmeans: KMeansConfig,
}

/// `spec.n` k-means partitions of the same dataset. Member `i` depends only
/// on `(spec.seed, i)`.
pub fn generate_ensemble(data: &Dataset, spec: &EnsembleSpec) -> Result<Vec<LabeledPartition>> {
    if spec.n == 0 {
        return Err(Error::validation("ensemble size must be at least 1"));
    }
    (0..spec.n)
        .into_par_iter()
        .map(|i| {
            let seed = rng::derive_seed(spec.seed, "member", i as u64);
            kmeans(data, spec.k, seed, &spec.kmeans).map(|r| make_hard(&r.labels))
        })
        .collect()
}

//! Labeled partitions, the relabeling action and orbit-level quantities.
//!
//! A [`LabeledPartition`] is an `ell x m` membership matrix stored row-major
//! by cluster. Entry `(k, j)` is the degree to which point `j` belongs to
//! cluster `k`, so every column sums to one. Two labeled partitions related
//! by a row permutation represent the same (unlabeled) partition.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Tolerance on column sums of a membership matrix.
pub const COLUMN_SUM_TOL: f64 = 1e-9;
/// Slack allowed on entries outside `[0, 1]` from floating-point averaging.
pub const ENTRY_TOL: f64 = 1e-12;
/// Entrywise tolerance for "PX equals X" in stabilizer computations.
pub const STABILIZER_TOL: f64 = 1e-12;
/// Largest cluster count for which `ell!` enumeration is allowed.
pub const MAX_ENUM_ELL: usize = 8;

/// Relabeling of clusters. Source row `k` is moved to row `mapping[k]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn identity(ell: usize) -> Self {
        Self {
            mapping: (0..ell).collect(),
        }
    }

    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &t in &mapping {
            if t >= mapping.len() || seen[t] {
                return Err(Error::validation(format!(
                    "mapping {mapping:?} is not a bijection"
                )));
            }
            seen[t] = true;
        }
        Ok(Self { mapping })
    }

    pub(crate) fn from_mapping_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Self::new(mapping.clone()).is_ok());
        Self { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(k, &t)| k == t)
    }

    /// `self ∘ other`, so that `(PQ)X = P(QX)`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Permutation {
            mapping: other.mapping.iter().map(|&q| self.mapping[q]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &t) in self.mapping.iter().enumerate() {
            inv[t] = k;
        }
        Permutation { mapping: inv }
    }

    /// All permutations of `ell` labels in lexicographic order of the mapping.
    pub fn all(ell: usize) -> impl Iterator<Item = Permutation> {
        (0..ell)
            .permutations(ell)
            .map(|mapping| Permutation { mapping })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.mapping)
    }
}

/// Crisp assignment of `m` points to `ell` clusters, labels are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardLabeling {
    ell: usize,
    labels: Vec<usize>,
}

impl HardLabeling {
    pub fn new(ell: usize, labels: Vec<usize>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::validation("cluster count must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::validation("a labeling needs at least one point"));
        }
        if let Some((j, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= ell) {
            return Err(Error::validation(format!(
                "label {l} of point {j} out of range for {ell} clusters"
            )));
        }
        Ok(Self { ell, labels })
    }

    /// Builds a labeling from labels in `1..=ell`, the convention of the
    /// partition file format.
    pub fn from_one_based(ell: usize, labels: &[i64]) -> Result<Self> {
        let zero_based = labels
            .iter()
            .enumerate()
            .map(|(j, &l)| {
                if l < 1 || l as u64 > ell as u64 {
                    Err(Error::validation(format!(
                        "label {l} of point {j} out of range 1..={ell}"
                    )))
                } else {
                    Ok(l as usize - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ell, zero_based)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn to_partition(&self) -> LabeledPartition {
        make_hard(self)
    }
}

/// Column-stochastic `ell x m` membership matrix.
#[derive(Clone, PartialEq)]
pub struct LabeledPartition {
    ell: usize,
    m: usize,
    values: Vec<f64>,
}

impl fmt::Debug for LabeledPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl LabeledPartition {
    pub fn new(ell: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if ell == 0 || m == 0 {
            return Err(Error::validation(format!(
                "partition dimensions must be positive, got ell={ell}, m={m}"
            )));
        }
        if values.len() != ell * m {
            return Err(Error::validation(format!(
                "expected {} membership values for ell={ell}, m={m}, got {}",
                ell * m,
                values.len()
            )));
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&v) {
                return Err(Error::validation(format!(
                    "membership ({}, {}) = {v} outside [0, 1]",
                    idx / m,
                    idx % m
                )));
            }
        }
        let p = Self { ell, m, values };
        for j in 0..m {
            let s: f64 = p.column(j).sum();
            if (s - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(Error::validation(format!(
                    "memberships of point {j} sum to {s}, expected 1"
                )));
            }
        }
        Ok(p)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ell = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(k) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::validation(format!(
                "row {k} has {} entries, expected {m}",
                rows[k].len()
            )));
        }
        Self::new(ell, m, rows.concat())
    }

    pub(crate) fn from_raw(ell: usize, m: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), ell * m);
        Self { ell, m, values }
    }

    /// Every entry `1 / ell`, the maximally symmetric partition.
    pub fn uniform(ell: usize, m: usize) -> Result<Self> {
        Self::new(ell, m, vec![1.0 / ell as f64; ell * m])
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.ell, self.m)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.m + j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.m..(k + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.m)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.ell).map(move |k| self.values[k * self.m + j])
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn check_same_dims(&self, other: &LabeledPartition) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    /// `PX`: row `k` of `self` becomes row `p.mapping()[k]`.
    pub fn permuted(&self, p: &Permutation) -> LabeledPartition {
        assert_eq!(p.len(), self.ell, "permutation size differs from ell");
        let mut values = vec![0.0; self.values.len()];
        for (k, &t) in p.mapping().iter().enumerate() {
            values[t * self.m..(t + 1) * self.m].copy_from_slice(self.row(k));
        }
        Self::from_raw(self.ell, self.m, values)
    }

    /// Squared Frobenius distance between these two representations.
    pub fn squared_distance(&self, other: &LabeledPartition) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    pub fn max_abs_diff(&self, other: &LabeledPartition) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Hard labeling if every column is one-hot.
    pub fn to_hard(&self) -> Option<HardLabeling> {
        let labels = (0..self.m)
            .map(|j| {
                let mut hot = None;
                for (k, v) in self.column(j).enumerate() {
                    if v == 1.0 && hot.is_none() {
                        hot = Some(k);
                    } else if v != 0.0 {
                        return None;
                    }
                }
                hot
            })
            .collect::<Option<Vec<_>>>()?;
        Some(HardLabeling {
            ell: self.ell,
            labels,
        })
    }

    pub fn is_hard(&self) -> bool {
        self.to_hard().is_some()
    }
}

/// One-hot membership matrix of a crisp labeling.
pub fn make_hard(labels: &HardLabeling) -> LabeledPartition {
    let m = labels.m();
    let mut values = vec![0.0; labels.ell() * m];
    for (j, &k) in labels.labels().iter().enumerate() {
        values[k * m + j] = 1.0;
    }
    LabeledPartition::from_raw(labels.ell(), m, values)
}

pub fn inner_product(x: &LabeledPartition, y: &LabeledPartition) -> Result<f64> {
    x.check_same_dims(y)?;
    Ok(dot(x.values(), y.values()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn frobenius_norm(x: &LabeledPartition) -> f64 {
    dot(x.values(), x.values()).sqrt()
}

/// Length of the partition represented by `x`. Every representation of an
/// orbit has the same Frobenius norm, so this is an orbit invariant.
pub fn partition_length(x: &LabeledPartition) -> f64 {
    frobenius_norm(x)
}

fn enum_capacity_check(ell: usize) -> Result<()> {
    if ell > MAX_ENUM_ELL {
        return Err(Error::capacity(format!(
            "enumerating {ell}! permutations exceeds the limit ell <= {MAX_ENUM_ELL}"
        )));
    }
    Ok(())
}

pub(crate) fn check_enumerable(ell: usize) -> Result<()> {
    enum_capacity_check(ell)
}

/// All relabelings fixing `x`, in lexicographic order. The identity is
/// always first.
pub fn stabilizer(x: &LabeledPartition) -> Result<Vec<Permutation>> {
    enum_capacity_check(x.ell())?;
    Ok(Permutation::all(x.ell())
        .filter(|p| {
            p.mapping().iter().enumerate().all(|(k, &t)| {
                x.row(k)
                    .iter()
                    .zip(x.row(t))
                    .all(|(a, b)| (a - b).abs() <= STABILIZER_TOL)
            })
        })
        .collect())
}

pub fn is_asymmetric(x: &LabeledPartition) -> Result<bool> {
    Ok(stabilizer(x)?.len() == 1)
}

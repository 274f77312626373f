//! Mean partitions of a sample and the multiple-alignment objectives.
//!
//! A multiple alignment picks one representation per sample partition. Its
//! elementwise mean is again a membership matrix. The mean partition solver
//! alternates between relabeling every sample member into optimal position
//! with the current candidate and replacing the candidate by the mean of
//! that alignment. At a fixed point the candidate is the average of members
//! in optimal position with it, which is the necessary condition every local
//! minimum of the Fréchet function satisfies.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::delta;
use crate::error::{Error, Result};
use crate::partition::{check_enumerable, dot, inner_product, LabeledPartition, Permutation};
use crate::rng;

/// Tolerance used by [`check_stationarity`].
pub const STATIONARITY_TOL: f64 = 1e-9;
/// A mean that moves less than this under one update is a fixed point.
const FIXED_POINT_TOL: f64 = 1e-14;
/// Largest number of alignments [`exhaustive_mean`] will enumerate.
pub const MAX_EXHAUSTIVE_ALIGNMENTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 4,
            max_iters: 200,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::validation("restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::validation(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// One representation per sample partition, in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipleAlignment {
    members: Vec<LabeledPartition>,
    source_ids: Vec<usize>,
    permutations: Vec<Permutation>,
}

impl MultipleAlignment {
    /// Member `i` is `permutations[i]` applied to `sample[i]`.
    pub fn from_sample(
        sample: &[LabeledPartition],
        permutations: Vec<Permutation>,
    ) -> Result<Self> {
        check_sample(sample)?;
        if permutations.len() != sample.len() {
            return Err(Error::validation(format!(
                "{} permutations for {} sample members",
                permutations.len(),
                sample.len()
            )));
        }
        let ell = sample[0].ell();
        if let Some(p) = permutations.iter().find(|p| p.len() != ell) {
            return Err(Error::validation(format!(
                "permutation of size {} for ell = {ell}",
                p.len()
            )));
        }
        let members = sample
            .iter()
            .zip(&permutations)
            .map(|(x, p)| x.permuted(p))
            .collect();
        Ok(Self {
            members,
            source_ids: (0..sample.len()).collect(),
            permutations,
        })
    }

    /// Treats `members` as the sample itself, aligned by identities.
    pub fn from_members(members: Vec<LabeledPartition>) -> Result<Self> {
        check_sample(&members)?;
        let ell = members[0].ell();
        Ok(Self {
            source_ids: (0..members.len()).collect(),
            permutations: vec![Permutation::identity(ell); members.len()],
            members,
        })
    }

    pub fn members(&self) -> &[LabeledPartition] {
        &self.members
    }

    pub fn source_ids(&self) -> &[usize] {
        &self.source_ids
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.permutations
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_sample(sample: &[LabeledPartition]) -> Result<()> {
    let first = sample
        .first()
        .ok_or_else(|| Error::validation("sample must contain at least one partition"))?;
    for x in sample {
        first.check_same_dims(x)?;
    }
    Ok(())
}

/// Mean of squared intrinsic distances from `z` to the sample.
pub fn frechet_value(sample: &[LabeledPartition], z: &LabeledPartition) -> Result<f64> {
    check_sample(sample)?;
    let d2 = sample
        .par_iter()
        .map(|x| delta(x, z).map(|a| a.squared_distance()))
        .collect::<Result<Vec<_>>>()?;
    Ok(d2.iter().sum::<f64>() / sample.len() as f64)
}

fn mean_of(members: &[LabeledPartition]) -> LabeledPartition {
    let (ell, m) = members[0].dims();
    let mut values = vec![0.0; ell * m];
    for x in members {
        for (acc, v) in values.iter_mut().zip(x.values()) {
            *acc += v;
        }
    }
    let n = members.len() as f64;
    for v in &mut values {
        *v = (*v / n).clamp(0.0, 1.0);
    }
    LabeledPartition::from_raw(ell, m, values)
}

/// Elementwise average of the alignment members.
pub fn alignment_mean(a: &MultipleAlignment) -> LabeledPartition {
    mean_of(&a.members)
}

/// Average pairwise squared Frobenius distance, diagonal included.
pub fn g_value(a: &MultipleAlignment) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += a.members[i]
                    .squared_distance(&a.members[j])
                    .expect("alignment members share dimensions");
            }
        }
    }
    total / (n * n) as f64
}

/// Average squared Frobenius distance of the members to their mean.
pub fn f_value(a: &MultipleAlignment) -> f64 {
    let mean = alignment_mean(a);
    a.members
        .iter()
        .map(|x| x.squared_distance(&mean).expect("shared dimensions"))
        .sum::<f64>()
        / a.len() as f64
}

/// Sum of inner products of the members with their mean.
pub fn h_value(a: &MultipleAlignment) -> f64 {
    let mean = alignment_mean(a);
    a.members
        .iter()
        .map(|x| dot(x.values(), mean.values()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The relabelings of every member repeated the previous iteration.
    FixedPoint,
    /// The objective decreased by less than the tolerance.
    SmallDecrease,
    MaxIterations,
    /// Single-member sample, nothing to iterate.
    Trivial,
    /// Certified global optimum from full enumeration.
    Exhaustive,
}

#[derive(Debug, Clone)]
pub struct MeanResult {
    /// Representation of the (approximate) mean partition.
    pub mean: LabeledPartition,
    /// Sample representations the mean was averaged from.
    pub alignment: MultipleAlignment,
    /// Fréchet function at `mean`.
    pub frechet_value: f64,
    /// Objective of the alignment after each iteration of the best restart.
    pub f_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub restarts_used: usize,
    /// Index of the restart that produced this result.
    pub best_restart: usize,
}

impl MeanResult {
    /// `g` of the reported alignment.
    pub fn g(&self) -> f64 {
        g_value(&self.alignment)
    }
}

struct RestartRun {
    mean: LabeledPartition,
    alignment: MultipleAlignment,
    f_trace: Vec<f64>,
    stop_reason: StopReason,
}

fn initial_mean(sample: &[LabeledPartition], restart: usize, seed: u64) -> LabeledPartition {
    let n = sample.len();
    if restart < n {
        return sample[restart].clone();
    }
    let mut r = rng::stream(seed, "restart", restart as u64);
    let a = r.random_range(0..n);
    let b = r.random_range(0..n);
    let w = r.random::<f64>();
    let values = sample[a]
        .values()
        .iter()
        .zip(sample[b].values())
        .map(|(x, y)| (w * x + (1.0 - w) * y).clamp(0.0, 1.0))
        .collect();
    let (ell, m) = sample[0].dims();
    LabeledPartition::from_raw(ell, m, values)
}

fn align_all(sample: &[LabeledPartition], target: &LabeledPartition) -> Result<Vec<Permutation>> {
    sample
        .par_iter()
        .map(|x| delta(x, target).map(|a| a.permutation))
        .collect()
}

fn run_restart(
    sample: &[LabeledPartition],
    init: LabeledPartition,
    config: &SolverConfig,
) -> Result<RestartRun> {
    let mut mean = init;
    let mut prev_perms: Option<Vec<Permutation>> = None;
    let mut prev_f = f64::INFINITY;
    let mut f_trace = Vec::new();
    let mut alignment = None;
    let mut stop_reason = StopReason::MaxIterations;

    for _ in 0..config.max_iters {
        let perms = align_all(sample, &mean)?;
        let repeated = prev_perms.as_ref() == Some(&perms);
        let current = MultipleAlignment::from_sample(sample, perms.clone())?;
        let next_mean = alignment_mean(&current);
        let f = f_value(&current);
        f_trace.push(f);
        alignment = Some(current);
        let unchanged = next_mean.max_abs_diff(&mean)? <= FIXED_POINT_TOL;
        if repeated || unchanged {
            stop_reason = StopReason::FixedPoint;
            mean = next_mean;
            break;
        }
        mean = next_mean;
        if prev_f - f < config.tol {
            stop_reason = StopReason::SmallDecrease;
            break;
        }
        prev_f = f;
        prev_perms = Some(perms);
    }

    Ok(RestartRun {
        mean,
        alignment: alignment.expect("max_iters >= 1"),
        f_trace,
        stop_reason,
    })
}

/// Approximate mean partition by alternating alignment and averaging.
///
/// Restart `r < n` starts from sample member `r`; later restarts start from a
/// seeded random convex combination of two members. The restart with the
/// smallest Fréchet value wins, ties going to the lower restart index.
pub fn mean_partition(sample: &[LabeledPartition], config: &SolverConfig) -> Result<MeanResult> {
    check_sample(sample)?;
    config.validate()?;
    if sample.len() == 1 {
        return Ok(trivial_result(sample));
    }

    let runs: Vec<(RestartRun, f64)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let run = run_restart(sample, initial_mean(sample, r, config.seed), config)?;
            let fv = frechet_value(sample, &run.mean)?;
            Ok((run, fv))
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (r, (_, fv)) in runs.iter().enumerate() {
        if *fv < runs[best].1 {
            best = r;
        }
    }
    let (run, frechet) = runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(MeanResult {
        mean: run.mean,
        alignment: run.alignment,
        frechet_value: frechet,
        iterations: run.f_trace.len(),
        converged: run.stop_reason != StopReason::MaxIterations,
        stop_reason: run.stop_reason,
        f_trace: run.f_trace,
        restarts_used: config.restarts,
        best_restart: best,
    })
}

fn trivial_result(sample: &[LabeledPartition]) -> MeanResult {
    let ell = sample[0].ell();
    let alignment = MultipleAlignment::from_sample(sample, vec![Permutation::identity(ell)])
        .expect("valid singleton");
    MeanResult {
        mean: sample[0].clone(),
        alignment,
        frechet_value: 0.0,
        f_trace: vec![0.0],
        iterations: 0,
        converged: true,
        stop_reason: StopReason::Trivial,
        restarts_used: 0,
        best_restart: 0,
    }
}

/// Number of alignments [`exhaustive_mean`] enumerates, or `None` on overflow.
pub fn exhaustive_alignment_count(ell: usize, n: usize) -> Option<u64> {
    let fact = (1..=ell as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))?;
    (1..n).try_fold(1u64, |acc, _| acc.checked_mul(fact))
}

/// Global mean partition by enumerating every multiple alignment.
///
/// The first member keeps its given representation, every other member
/// ranges over all `ell!` relabelings. The alignment minimizing `g` is
/// returned together with its mean, whose Fréchet value must coincide with
/// `f` of that alignment.
pub fn exhaustive_mean(sample: &[LabeledPartition]) -> Result<MeanResult> {
    check_sample(sample)?;
    let n = sample.len();
    let (ell, _) = sample[0].dims();
    check_enumerable(ell)?;
    match exhaustive_alignment_count(ell, n) {
        Some(c) if c <= MAX_EXHAUSTIVE_ALIGNMENTS => {}
        _ => {
            return Err(Error::capacity(format!(
                "({ell}!)^{} alignments exceed the limit of {MAX_EXHAUSTIVE_ALIGNMENTS}",
                n - 1
            )))
        }
    }
    if n == 1 {
        let mut r = trivial_result(sample);
        r.stop_reason = StopReason::Exhaustive;
        return Ok(r);
    }

    let perms: Vec<Permutation> = Permutation::all(ell).collect();
    let relabeled: Vec<Vec<LabeledPartition>> = sample
        .iter()
        .map(|x| perms.iter().map(|p| x.permuted(p)).collect())
        .collect();
    // sum of squared norms is constant, so minimizing g maximizes ||mean||^2
    let mut choice = vec![0usize; n];
    let mut best_choice = choice.clone();
    let mut best_norm2 = f64::NEG_INFINITY;
    let mut buf = vec![0.0; sample[0].values().len()];
    loop {
        buf.copy_from_slice(sample[0].values());
        for i in 1..n {
            for (acc, v) in buf.iter_mut().zip(relabeled[i][choice[i]].values()) {
                *acc += v;
            }
        }
        let norm2 = dot(&buf, &buf);
        if norm2 > best_norm2 + 1e-12 * (1.0 + norm2.abs()) {
            best_norm2 = norm2;
            best_choice.clone_from(&choice);
        }
        // odometer, last member fastest
        let mut i = n - 1;
        loop {
            choice[i] += 1;
            if choice[i] < perms.len() {
                break;
            }
            choice[i] = 0;
            i -= 1;
            if i == 0 {
                break;
            }
        }
        if i == 0 {
            break;
        }
    }

    let mut chosen = vec![Permutation::identity(ell)];
    chosen.extend(best_choice[1..].iter().map(|&c| perms[c].clone()));
    let alignment = MultipleAlignment::from_sample(sample, chosen)?;
    let mean = alignment_mean(&alignment);
    let f = f_value(&alignment);
    let frechet = frechet_value(sample, &mean)?;
    if (frechet - f).abs() > 1e-9 * (1.0 + f) {
        return Err(Error::Internal(format!(
            "Fréchet value {frechet} differs from alignment objective {f} at the global optimum"
        )));
    }
    Ok(MeanResult {
        mean,
        alignment,
        frechet_value: frechet,
        f_trace: vec![f],
        iterations: 0,
        converged: true,
        stop_reason: StopReason::Exhaustive,
        restarts_used: 0,
        best_restart: 0,
    })
}

/// Residuals of the fixed-point condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    /// Largest entrywise gap between the mean and the alignment average.
    pub mean_residual: f64,
    /// Largest gain in `<PX_i, M>` available by relabeling any member.
    pub max_realignment_gain: f64,
}

impl StationarityReport {
    pub fn is_stationary(&self) -> bool {
        self.mean_residual <= STATIONARITY_TOL && self.max_realignment_gain <= STATIONARITY_TOL
    }
}

pub fn stationarity_report(result: &MeanResult) -> Result<StationarityReport> {
    let avg = alignment_mean(&result.alignment);
    let mean_residual = avg.max_abs_diff(&result.mean)?;
    let mut max_gain = 0.0_f64;
    for x in result.alignment.members() {
        let best = delta(x, &result.mean)?.inner_value;
        max_gain = max_gain.max(best - inner_product(x, &result.mean)?);
    }
    Ok(StationarityReport {
        mean_residual,
        max_realignment_gain: max_gain,
    })
}

/// True iff the mean is the average of the alignment and every member is in
/// optimal position with the mean, both within [`STATIONARITY_TOL`].
pub fn check_stationarity(result: &MeanResult) -> bool {
    stationarity_report(result).is_ok_and(|r| r.is_stationary())
}

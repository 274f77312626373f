//! Cluster-instability scores and model selection over the cluster count.
//!
//! Three scores are computed for an ensemble of `k`-cluster partitions:
//!
//! - `G`: average squared intrinsic distance over all ordered pairs, each
//!   pair aligned on its own.
//! - `g`: average pairwise squared Frobenius distance of a single multiple
//!   alignment. The solver's alignment gives an upper bound on the optimum.
//! - `F`: Fréchet function at the approximate mean partition.
//!
//! For any alignment `G <= g`; for the exact mean `F <= G` as well.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::pairwise_squared_deltas;
use crate::consensus::{
    exhaustive_alignment_count, exhaustive_mean, f_value, g_value, mean_partition,
    MultipleAlignment, SolverConfig, MAX_EXHAUSTIVE_ALIGNMENTS,
};
use crate::ensemble::{generate_ensemble, Dataset, EnsembleSpec, KMeansConfig};
use crate::error::{Error, Result};
use crate::partition::{LabeledPartition, MAX_ENUM_ELL};
use crate::rng::derive_seed;

/// Slack on the inequality and identity checks of a report.
pub const CHAIN_TOL: f64 = 1e-9;

/// Average squared intrinsic distance over all ordered pairs.
pub fn pairwise_instability(sample: &[LabeledPartition]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::validation(
            "sample must contain at least one partition",
        ));
    }
    let n = sample.len();
    let d2 = pairwise_squared_deltas(sample)?;
    Ok(d2.iter().sum::<f64>() / (n * n) as f64)
}

/// `g` of the alignment the mean-partition solver ends on.
pub fn multiple_alignment_instability(
    sample: &[LabeledPartition],
    config: &SolverConfig,
) -> Result<(f64, MultipleAlignment)> {
    let r = mean_partition(sample, config)?;
    Ok((g_value(&r.alignment), r.alignment))
}

/// Fréchet function at the solver's approximate mean partition.
pub fn frechet_variation(sample: &[LabeledPartition], config: &SolverConfig) -> Result<f64> {
    Ok(mean_partition(sample, config)?.frechet_value)
}

/// Scores from the exhaustive oracle, available on tiny ensembles only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactScores {
    pub g: f64,
    pub frechet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub k: usize,
    pub n: usize,
    #[serde(rename = "G")]
    pub pairwise: f64,
    #[serde(rename = "g")]
    pub multiple: f64,
    #[serde(rename = "F")]
    pub frechet: f64,
    /// `g - G`, nonnegative for every alignment.
    #[serde(rename = "D")]
    pub gap: f64,
    /// `f` of the reported alignment; `g = 2 f`.
    pub alignment_f: f64,
    pub solver_iterations: usize,
    pub solver_converged: bool,
    /// `F <= G` is only guaranteed for the exact mean; recorded, not enforced.
    pub frechet_exceeds_pairwise: bool,
    pub exact: Option<ExactScores>,
}

/// Which cluster count each score selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedK {
    #[serde(rename = "G")]
    pub pairwise: usize,
    #[serde(rename = "g")]
    pub multiple: usize,
    #[serde(rename = "F")]
    pub frechet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub k_min: usize,
    pub k_max: usize,
    pub n: usize,
    pub rows: Vec<StabilityRow>,
    pub selected: SelectedK,
}

/// `g - G` with round-off below [`CHAIN_TOL`] cleared to zero.
fn chain_gap(pairwise: f64, multiple: f64) -> f64 {
    let d = multiple - pairwise;
    if (-CHAIN_TOL..0.0).contains(&d) {
        0.0
    } else {
        d
    }
}

/// `k` with the smallest score, the smaller `k` on ties.
pub fn select_k(scores: &[(usize, f64)]) -> Option<usize> {
    scores
        .iter()
        .fold(None, |best: Option<(usize, f64)>, &(k, s)| match best {
            Some((bk, bs)) if bs < s || (bs == s && bk <= k) => best,
            _ => Some((k, s)),
        })
        .map(|(k, _)| k)
}

fn selected_of<'a>(rows: impl Iterator<Item = &'a StabilityRow> + Clone) -> SelectedK {
    let pick = |f: fn(&StabilityRow) -> f64| {
        let scores: Vec<_> = rows.clone().map(|r| (r.k, f(r))).collect();
        select_k(&scores).expect("at least one row")
    };
    SelectedK {
        pairwise: pick(|r| r.pairwise),
        multiple: pick(|r| r.multiple),
        frechet: pick(|r| r.frechet),
    }
}

/// Scores one ensemble and checks `G <= g` and `g = 2 f`.
pub fn score_ensemble(
    k: usize,
    sample: &[LabeledPartition],
    config: &SolverConfig,
) -> Result<StabilityRow> {
    let pairwise = pairwise_instability(sample)?;
    let r = mean_partition(sample, config)?;
    let multiple = g_value(&r.alignment);
    let alignment_f = f_value(&r.alignment);
    if pairwise > multiple + CHAIN_TOL {
        return Err(Error::Internal(format!(
            "k = {k}: pairwise instability {pairwise} exceeds alignment instability {multiple}"
        )));
    }
    if (multiple - 2.0 * alignment_f).abs() > CHAIN_TOL {
        return Err(Error::Internal(format!(
            "k = {k}: g = {multiple} differs from 2 f = {}",
            2.0 * alignment_f
        )));
    }
    let n = sample.len();
    let ell = sample[0].ell();
    let exact = match exhaustive_alignment_count(ell, n) {
        Some(c) if c <= MAX_EXHAUSTIVE_ALIGNMENTS && ell <= MAX_ENUM_ELL => {
            let e = exhaustive_mean(sample)?;
            Some(ExactScores {
                g: g_value(&e.alignment),
                frechet: e.frechet_value,
            })
        }
        _ => None,
    };
    Ok(StabilityRow {
        k,
        n,
        pairwise,
        multiple,
        frechet: r.frechet_value,
        gap: chain_gap(pairwise, multiple),
        alignment_f,
        solver_iterations: r.iterations,
        solver_converged: r.converged,
        frechet_exceeds_pairwise: r.frechet_value > pairwise + CHAIN_TOL,
        exact,
    })
}

/// Seeds and k-means settings for the ensembles of a sweep. The ensemble for
/// cluster count `k` is seeded by `(seed, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub kmeans: KMeansConfig,
}

/// Builds an `n`-member k-means ensemble for every `k` in the range and
/// scores it. Rows are independent and returned in `k` order.
pub fn stability_sweep(
    data: &Dataset,
    k_min: usize,
    k_max: usize,
    n: usize,
    sweep: &SweepConfig,
    solver: &SolverConfig,
) -> Result<StabilityReport> {
    if k_min == 0 || k_min > k_max || k_max > data.m() {
        return Err(Error::validation(format!(
            "invalid cluster range {k_min}..={k_max} for {} points",
            data.m()
        )));
    }
    if n < 2 {
        return Err(Error::validation(
            "stability needs an ensemble of at least 2",
        ));
    }
    solver.validate()?;
    let rows: Vec<StabilityRow> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let spec = EnsembleSpec {
                n,
                k,
                seed: derive_seed(sweep.seed, "ensemble-k", k as u64),
                kmeans: sweep.kmeans,
            };
            let sample = generate_ensemble(data, &spec)?;
            let cfg = SolverConfig {
                seed: derive_seed(solver.seed, "solver-k", k as u64),
                ..*solver
            };
            score_ensemble(k, &sample, &cfg)
        })
        .collect::<Result<_>>()?;
    let selected = selected_of(rows.iter());
    Ok(StabilityReport {
        k_min,
        k_max,
        n,
        rows,
        selected,
    })
}

/// Row-wise mean of several reports over the same range.
pub fn average_reports(reports: &[StabilityReport]) -> Result<StabilityReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::validation("no reports to average"))?;
    if reports
        .iter()
        .any(|r| r.k_min != first.k_min || r.k_max != first.k_max)
    {
        return Err(Error::validation("reports cover different cluster ranges"));
    }
    let t = reports.len() as f64;
    let rows: Vec<StabilityRow> = first
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mean = |f: fn(&StabilityRow) -> f64| {
                reports.iter().map(|r| f(&r.rows[i])).sum::<f64>() / t
            };
            let pairwise = mean(|r| r.pairwise);
            let multiple = mean(|r| r.multiple);
            let frechet = mean(|r| r.frechet);
            StabilityRow {
                k: row.k,
                n: row.n,
                pairwise,
                multiple,
                frechet,
                gap: chain_gap(pairwise, multiple),
                alignment_f: mean(|r| r.alignment_f),
                solver_iterations: reports
                    .iter()
                    .map(|r| r.rows[i].solver_iterations)
                    .max()
                    .unwrap_or(0),
                solver_converged: reports.iter().all(|r| r.rows[i].solver_converged),
                frechet_exceeds_pairwise: frechet > pairwise + CHAIN_TOL,
                exact: None,
            }
        })
        .collect();
    let selected = selected_of(rows.iter());
    Ok(StabilityReport {
        k_min: first.k_min,
        k_max: first.k_max,
        n: first.n,
        rows,
        selected,
    })
}

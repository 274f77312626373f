//! Randomized comparisons of the fast routines against exhaustive oracles.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{delta, delta_bruteforce};
use crate::consensus::{
    exhaustive_mean, f_value, frechet_value, g_value, h_value, mean_partition, MultipleAlignment,
    SolverConfig,
};
use crate::error::{Error, Result};
use crate::partition::{frobenius_norm, LabeledPartition, Permutation};
use crate::rng::stream;
use crate::stability::pairwise_instability;

/// Tolerance every oracle comparison is held to.
pub const ORACLE_TOL: f64 = 1e-9;

/// Columns drawn uniformly from the open cube and normalized.
pub fn random_soft<R: Rng + ?Sized>(ell: usize, m: usize, rng: &mut R) -> LabeledPartition {
    let mut values: Vec<f64> = (0..ell * m).map(|_| rng.random::<f64>() + 1e-3).collect();
    for j in 0..m {
        let s: f64 = (0..ell).map(|k| values[k * m + j]).sum();
        for k in 0..ell {
            values[k * m + j] /= s;
        }
    }
    LabeledPartition::new(ell, m, values).expect("normalized columns")
}

pub fn random_hard<R: Rng + ?Sized>(ell: usize, m: usize, rng: &mut R) -> LabeledPartition {
    let mut values = vec![0.0; ell * m];
    for j in 0..m {
        values[rng.random_range(0..ell) * m + j] = 1.0;
    }
    LabeledPartition::new(ell, m, values).expect("one-hot columns")
}

pub fn random_permutation<R: Rng + ?Sized>(ell: usize, rng: &mut R) -> Permutation {
    let mut mapping: Vec<usize> = (0..ell).collect();
    mapping.shuffle(rng);
    Permutation::new(mapping).expect("shuffled identity")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Delta,
    Mean,
    Identities,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub case: usize,
    pub ell: usize,
    pub m: usize,
    pub n: usize,
    /// Largest deviation from the oracle or identity in this case.
    pub residual: f64,
    pub ok: bool,
    /// Mean suite only: the heuristic reached the exhaustive optimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: Vec<OracleCase>,
    pub passed: usize,
    pub violations: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_count: Option<usize>,
}

impl OracleReport {
    fn new(suite: Suite, seed: u64, cases: Vec<OracleCase>) -> Self {
        let passed = cases.iter().filter(|c| c.ok).count();
        let optimal_count = (suite == Suite::Mean)
            .then(|| cases.iter().filter(|c| c.optimal == Some(true)).count());
        Self {
            suite,
            seed,
            violations: cases.len() - passed,
            max_residual: cases.iter().map(|c| c.residual).fold(0.0, f64::max),
            passed,
            optimal_count,
            cases,
        }
    }
}

fn delta_case(case: usize, seed: u64) -> Result<OracleCase> {
    let mut r = stream(seed, "oracle-delta", case as u64);
    let ell = r.random_range(2..=6);
    let m = r.random_range(3..=12);
    let (x, y) = if case.is_multiple_of(2) {
        (random_soft(ell, m, &mut r), random_soft(ell, m, &mut r))
    } else {
        (random_hard(ell, m, &mut r), random_hard(ell, m, &mut r))
    };
    let fast = delta(&x, &y)?;
    let slow = delta_bruteforce(&x, &y)?;
    let residual = (fast.distance - slow.distance).abs();
    Ok(OracleCase {
        case,
        ell,
        m,
        n: 2,
        residual,
        ok: residual < ORACLE_TOL && fast.permutation == slow.permutation,
        optimal: None,
    })
}

fn mean_case(case: usize, seed: u64) -> Result<OracleCase> {
    let mut r = stream(seed, "oracle-mean", case as u64);
    let n = r.random_range(2..=4);
    let ell = r.random_range(2..=3);
    let m = r.random_range(3..=6);
    let soft = r.random_bool(0.5);
    let sample: Vec<_> = (0..n)
        .map(|_| {
            if soft {
                random_soft(ell, m, &mut r)
            } else {
                random_hard(ell, m, &mut r)
            }
        })
        .collect();
    let exact = exhaustive_mean(&sample)?;
    let f_star = f_value(&exact.alignment);
    let g_star = g_value(&exact.alignment);
    let heuristic = mean_partition(
        &sample,
        &SolverConfig {
            restarts: 6,
            seed: r.random(),
            ..SolverConfig::default()
        },
    )?;
    let identity = (exact.frechet_value - f_star)
        .abs()
        .max((g_star - 2.0 * f_star).abs());
    let shortfall = (exact.frechet_value - heuristic.frechet_value).max(0.0);
    let residual = identity.max(shortfall);
    Ok(OracleCase {
        case,
        ell,
        m,
        n,
        residual,
        ok: residual <= ORACLE_TOL,
        optimal: Some(heuristic.frechet_value - exact.frechet_value <= ORACLE_TOL),
    })
}

fn identities_case(case: usize, seed: u64) -> Result<OracleCase> {
    let mut r = stream(seed, "oracle-identities", case as u64);
    let n = r.random_range(2..=8);
    let ell = r.random_range(2..=5);
    let m = r.random_range(3..=15);
    let sample: Vec<_> = (0..n).map(|_| random_soft(ell, m, &mut r)).collect();
    let perms = (0..n).map(|_| random_permutation(ell, &mut r)).collect();
    let a = MultipleAlignment::from_sample(&sample, perms)?;
    let (g, f, h) = (g_value(&a), f_value(&a), h_value(&a));
    let nf = n as f64;
    let norms = a
        .members()
        .iter()
        .map(|x| frobenius_norm(x).powi(2))
        .sum::<f64>()
        / nf;
    let mut residual = (g - 2.0 * f).abs().max((f - (norms - h / nf)).abs());
    let big_g = pairwise_instability(&sample)?;
    let mut avg_f = 0.0;
    for x in &sample {
        avg_f += frechet_value(&sample, x)?;
    }
    residual = residual.max((big_g - avg_f / nf).abs());
    Ok(OracleCase {
        case,
        ell,
        m,
        n,
        residual,
        ok: residual < ORACLE_TOL,
        optimal: None,
    })
}

/// Runs `cases` independent comparisons; case `i` draws from `(seed, i)`.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> Result<OracleReport> {
    if cases == 0 {
        return Err(Error::validation("an oracle run needs at least one case"));
    }
    let run = match suite {
        Suite::Delta => delta_case,
        Suite::Mean => mean_case,
        Suite::Identities => identities_case,
    };
    let cases = (0..cases)
        .into_par_iter()
        .map(|i| run(i, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport::new(suite, seed, cases))
}

//! Profiles of aligned ensembles and the motifs read off them.

use serde::{Deserialize, Serialize};

use crate::consensus::{alignment_mean, MultipleAlignment};
use crate::error::{Error, Result};
use crate::partition::{LabeledPartition, Permutation};

/// Average membership of each point in each cluster under an alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub values: LabeledPartition,
    pub n: usize,
    /// Relabelings of the sample members the profile was averaged over.
    pub alignment_permutations: Vec<Permutation>,
}

impl Profile {
    pub fn ell(&self) -> usize {
        self.values.ell()
    }

    pub fn m(&self) -> usize {
        self.values.m()
    }
}

pub fn profile_of(a: &MultipleAlignment) -> Profile {
    Profile {
        values: alignment_mean(a),
        n: a.len(),
        alignment_permutations: a.permutations().to_vec(),
    }
}

/// Rejects thresholds outside the open interval `(0.5, 1)`.
pub fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.5 && tau < 1.0) {
        return Err(Error::validation(format!(
            "consensus threshold must lie in (0.5, 1), got {tau}"
        )));
    }
    Ok(())
}

/// Binary `ell x m` matrix, row-major, with a one wherever `tau <= p_kj`.
pub fn truncate(p: &Profile, tau: f64) -> Result<Vec<u8>> {
    check_tau(tau)?;
    Ok(p.values
        .values()
        .iter()
        .map(|&v| u8::from(tau <= v))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifSet {
    pub tau: f64,
    /// Point indices of motif `k`, one entry per cluster, possibly empty.
    pub motifs: Vec<Vec<usize>>,
    /// Points belonging to some motif, ascending.
    pub covered: Vec<usize>,
    /// Points in no motif, ascending.
    pub uncovered: Vec<usize>,
}

impl MotifSet {
    /// Motif id per point, `None` when uncovered.
    pub fn assignment(&self, m: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; m];
        for (k, motif) in self.motifs.iter().enumerate() {
            for &j in motif {
                out[j] = Some(k);
            }
        }
        out
    }

    /// Majority ground-truth fraction per motif; `None` for empty motifs.
    pub fn purity(&self, ground_truth: &[usize]) -> Vec<Option<f64>> {
        self.motifs
            .iter()
            .map(|motif| {
                if motif.is_empty() {
                    return None;
                }
                let mut counts = std::collections::BTreeMap::new();
                for &j in motif {
                    *counts.entry(ground_truth[j]).or_insert(0usize) += 1;
                }
                let top = counts.values().copied().max().unwrap_or(0);
                Some(top as f64 / motif.len() as f64)
            })
            .collect()
    }

    /// Ground-truth label holding the majority of each motif.
    pub fn majority_labels(&self, ground_truth: &[usize]) -> Vec<Option<usize>> {
        self.motifs
            .iter()
            .map(|motif| {
                let mut counts = std::collections::BTreeMap::new();
                for &j in motif {
                    *counts.entry(ground_truth[j]).or_insert(0usize) += 1;
                }
                // smallest label wins ties
                counts
                    .into_iter()
                    .fold(None, |best: Option<(usize, usize)>, (l, c)| match best {
                        Some((_, bc)) if bc >= c => best,
                        _ => Some((l, c)),
                    })
                    .map(|(l, _)| l)
            })
            .collect()
    }
}

pub fn motifs_of(p: &Profile, tau: f64) -> Result<MotifSet> {
    let t = truncate(p, tau)?;
    let (ell, m) = (p.ell(), p.m());
    let motifs: Vec<Vec<usize>> = (0..ell)
        .map(|k| (0..m).filter(|&j| t[k * m + j] == 1).collect())
        .collect();
    let mut in_motif = vec![false; m];
    for &j in motifs.iter().flatten() {
        in_motif[j] = true;
    }
    let (covered, uncovered) = (0..m).partition(|&j| in_motif[j]);
    Ok(MotifSet {
        tau,
        motifs,
        covered,
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{make_hard, HardLabeling};

    fn hard(ell: usize, labels: &[usize]) -> LabeledPartition {
        make_hard(&HardLabeling::new(ell, labels.to_vec()).unwrap())
    }

    fn profile_from_rows(rows: &[Vec<f64>]) -> Profile {
        let values = LabeledPartition::from_rows(rows).unwrap();
        Profile {
            n: 1,
            alignment_permutations: vec![Permutation::identity(values.ell())],
            values,
        }
    }

    #[test]
    fn profile_of_identical_members() {
        let x = hard(3, &[0, 2, 1, 1]);
        let p = profile_of(&MultipleAlignment::from_members(vec![x.clone(); 4]).unwrap());
        assert_eq!(p.values, x);
        assert_eq!(p.n, 4);
        let ms = motifs_of(&p, 0.9).unwrap();
        assert_eq!(ms.motifs, vec![vec![0], vec![2, 3], vec![1]]);
        assert!(ms.uncovered.is_empty());
    }

    #[test]
    fn running_pair_profile_and_motifs() {
        let a = MultipleAlignment::from_members(vec![hard(2, &[0, 0, 1]), hard(2, &[0, 1, 1])])
            .unwrap();
        let p = profile_of(&a);
        assert_eq!(p.values.column(1).collect::<Vec<_>>(), vec![0.5, 0.5]);
        let ms = motifs_of(&p, 0.8).unwrap();
        assert_eq!(ms.motifs, vec![vec![0], vec![2]]);
        assert_eq!(ms.covered, vec![0, 2]);
        assert_eq!(ms.uncovered, vec![1]);
    }

    #[test]
    fn truncation_examples() {
        let p = profile_from_rows(&[vec![0.85, 0.6, 0.8], vec![0.15, 0.4, 0.2]]);
        assert_eq!(truncate(&p, 0.8).unwrap(), vec![1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn threshold_domain_is_open() {
        let p = profile_from_rows(&[vec![1.0]]);
        for tau in [0.5, 1.0, 0.2, 1.3, f64::NAN] {
            assert!(matches!(truncate(&p, tau), Err(Error::Validation(_))));
            assert!(motifs_of(&p, tau).is_err());
        }
    }

    #[test]
    fn purity_and_majority() {
        let ms = MotifSet {
            tau: 0.8,
            motifs: vec![vec![0, 1, 2, 3], vec![], vec![4]],
            covered: vec![0, 1, 2, 3, 4],
            uncovered: vec![],
        };
        let gt = [5, 5, 5, 2, 7];
        assert_eq!(ms.purity(&gt), vec![Some(0.75), None, Some(1.0)]);
        assert_eq!(ms.majority_labels(&gt), vec![Some(5), None, Some(7)]);
        assert_eq!(
            ms.assignment(6),
            vec![Some(0), Some(0), Some(0), Some(0), Some(2), None]
        );
    }
}

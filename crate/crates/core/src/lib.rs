//! Consensus clustering in the space of partitions.
//!
//! Partitions are membership matrices modulo relabeling of their clusters.
//! The crate provides the intrinsic metric on that space, mean partitions
//! and multiple alignments of an ensemble, profiles and motifs derived from
//! an alignment, and cluster-instability scores for choosing the number of
//! clusters. Small instances can be checked against exhaustive oracles.

pub mod alignment;
pub mod assignment;
pub mod consensus;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod oracle;
pub mod partition;
pub mod profile;
pub mod rng;
pub mod stability;

pub use alignment::{align_to, delta, delta_bruteforce, PairwiseAlignment};
pub use consensus::{
    alignment_mean, check_stationarity, exhaustive_mean, f_value, frechet_value, g_value, h_value,
    mean_partition, MeanResult, MultipleAlignment, SolverConfig,
};
pub use ensemble::{Dataset, EnsembleSpec, KMeansConfig};
pub use error::{Error, Result};
pub use partition::{
    frobenius_norm, inner_product, is_asymmetric, make_hard, partition_length, stabilizer,
    HardLabeling, LabeledPartition, Permutation,
};
pub use profile::{motifs_of, profile_of, truncate, MotifSet, Profile};
pub use stability::{StabilityReport, StabilityRow};

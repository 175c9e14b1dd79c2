//! Subset selection for low-budget labeling.
//!
//! Given an `N x d` matrix of per-example features and a budget `s`, the
//! strategies in [`strategies`] choose which `s` examples to annotate:
//!
//! - uniform sampling without replacement,
//! - sampling with probability proportional to the feature norm,
//! - randomized Gram-Schmidt selection, which samples by the norm of each
//!   example's residual after removing the span of the examples already
//!   chosen,
//! - deterministic argmax variants of the two norm-driven strategies,
//! - a norm filter that refines the top `m * s` candidates of an external
//!   selector down to `s`.
//!
//! [`ingest`] reads NPY/CSV/raw feature files and writes result records,
//! and [`eval`] holds a small synthetic harness (nearest-centroid probe,
//! norm/accuracy correlation, norm histograms, a Fréchet distance proxy).
//! The `subset-select` binary exposes all of this on the command line.

pub mod cli;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod linalg;
pub mod sampling;
pub mod strategies;

pub use error::{Error, Result};
pub use linalg::{compute_norms, FeatureMatrix, NormType, ResidualState};
pub use sampling::{normalize, sample_index, SeededRng, WeightVector};
pub use strategies::{
    norm_filter, select, select_argmax_variant, select_gram_schmidt, select_norm_weighted,
    select_uniform, CandidateOrdering, SelectionConfig, SelectionResult, StepDiagnostic, Strategy,
};

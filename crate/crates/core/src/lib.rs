//! Sparse linear discriminant analysis by group-Lasso penalized optimal scoring.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the numerical core:
//!
//! * [`dataset`]: centering, class indicators and scatter matrices.
//! * [`grouplasso`]: the quadratic variational group-Lasso machinery (reweighted
//!   penalized least squares sharing one Cholesky factor across all responses,
//!   KKT checks, objectives).
//! * [`glossfit`]: the active-set optimal scoring solver, its eigen post-processing,
//!   `lambda_max` and warm-started regularization paths, including the
//!   diagonal within-class covariance variant.
//! * [`lda`]: the exact mapping from optimal-scoring coefficients to penalized LDA
//!   directions, projection and classification.
//! * [`eval`]: simulation generators, support recovery metrics, stratified
//!   cross-validation and the repeated simulation study.
//!
//! File formats, the CLI and thread-parallel drivers live in the companion `gloss` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod eval;
pub mod glossfit;
pub mod grouplasso;
pub mod lda;
pub mod linalg;

pub use dataset::{CenteringStats, LabeledDataset, ScatterMatrices};
pub use error::{GlossError, Result};
pub use glossfit::{FitConfig, GramMode, OsFit, PathConfig, RegularizationPath};
pub use grouplasso::ActiveSet;
pub use lda::LdaModel;
pub use linalg::Matrix;

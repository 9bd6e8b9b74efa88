//! Unsupervised feature selection for numeric tables.
//!
//! Four selectors map an unlabeled [`dataset::DataTable`] to a
//! [`dataset::FeatureSubset`]:
//!
//! - [`selectors::pca_select`]: attributes with the largest loadings on the
//!   retained principal components
//! - [`selectors::rough_pca_select`]: loading preselection reduced by a
//!   rough-set reduct
//! - [`selectors::edr_select`]: ranking by the empirical distribution
//!   function at the column mean
//! - [`selectors::usqr`]: greedy unsupervised quick reduct on mean
//!   dependency
//!
//! [`eval`] scores selections by cross-validated accuracy of small built-in
//! classifiers, and [`cli`] wraps everything in the `unselect` binary.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod pca;
pub mod roughset;
pub mod selectors;

pub use error::{Error, Result};

//! Dialog act classification with character- and word-level convolutional
//! networks.
//!
//! The crate is layered bottom-up:
//!
//! * [`nn`] — tensors, layers with explicit backward passes, an optimizer and a
//!   gradient checker.
//! * [`textprep`] — tokenisation under the preprocessing variants, vocabularies
//!   and index encoding.
//! * [`corpus`] — the TSV corpus format, split manifests, pre-trained embedding
//!   files and context features.
//! * [`model`] — single-branch and dual-branch classifiers, checkpoints.
//! * [`harness`] — training with early stopping, evaluation, multi-seed
//!   experiments and reports.

pub mod corpus;
pub mod error;
pub mod harness;
pub mod model;
pub mod nn;
pub mod synthetic;
pub mod textprep;

pub use error::{Error, Result};

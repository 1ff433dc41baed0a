//! Attribute clustering as a preprocessing stage for tabular classifiers,
//! with the evaluation machinery to judge whether it helped.
//!
//! The core idea: transpose the data matrix so attributes become points,
//! cluster them with k-means under generalized Jaccard distance, and train
//! on the attribute subset that co-clusters with the class column. The
//! crate ships three pipeline variants (raw, PCA, cluster), stratified
//! cross-validation with F1 and Cohen's kappa, and paired t-tests for
//! comparing variants, all behind both a library API and the
//! `attrcluster` CLI.
//!
//! Everything is deterministic: fixed seeds reproduce fold splits,
//! clusterings, trained models, and serialized reports byte for byte.

pub mod classifiers;
pub mod clustering;
pub mod data;
pub mod evaluation;
mod linalg;
pub mod pca;
pub mod pipeline;
pub mod stats;

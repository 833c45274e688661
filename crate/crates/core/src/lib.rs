//! Invertible pairwise graph mixup for graph classification.
//!
//! Two binary graphs are mixed by padding both to a common node count with
//! disconnected zero-feature nodes and taking the convex combination of their
//! edge-weight and feature matrices. When the ratio differs from one half and
//! the node features are drawn from a linearly independent vocabulary, the
//! mix determines its source pair uniquely ([`recovery`]), so no mixed graph
//! can coincide with a real graph of a different label.
//!
//! The crate also provides weighted-edge GCN and GIN models with exact
//! gradients ([`gnn`]), baseline augmentations ([`augment`]), a TUDataset
//! reader ([`data`]) and a cross-validated training harness ([`trainer`]).

pub mod augment;
pub mod cli;
pub mod data;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod linalg;
pub mod mixer;
pub mod plot;
pub mod recovery;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{GraphDataset, LabelDistribution, NodeFeaturedGraph};
pub use mixer::{mix_labels, mix_pair, BetaParams, MixedSample};
pub use recovery::{recover_pair, RecoveredPair, RecoveryMode};

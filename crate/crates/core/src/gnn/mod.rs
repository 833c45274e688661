//! Weighted GCN and GIN graph classifiers with hand-written gradients.

pub mod layers;
pub mod model;
pub mod params;

pub use layers::{gcn_layer, gin_layer, normalized_adjacency, pool, Readout, Skip};
pub use model::{
    soft_cross_entropy, softmax, Arch, Checkpoint, EncoderTrace, ForwardTrace, HeadRef, HeadTrace, Model, ModelConfig,
    TrainSample, PROB_CLAMP,
};
pub use params::{ModelParams, TensorId, TensorSpec};

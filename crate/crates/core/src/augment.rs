//! Baseline augmentations: edge and node dropping, and mixing at the graph
//! representation or at a hidden layer's pooled readout.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{EncoderTrace, HeadRef, HeadTrace, Model, ModelParams};
use crate::graph::NodeFeaturedGraph;
use crate::mixer::BetaParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentKind {
    #[default]
    None,
    IfMixup,
    DropEdge,
    DropNode,
    MixupGraph,
    ManifoldMixup,
    IfMixupShuffled,
}

impl AugmentKind {
    pub const ALL: [AugmentKind; 7] = [
        AugmentKind::None,
        AugmentKind::IfMixup,
        AugmentKind::DropEdge,
        AugmentKind::DropNode,
        AugmentKind::MixupGraph,
        AugmentKind::ManifoldMixup,
        AugmentKind::IfMixupShuffled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AugmentKind::None => "none",
            AugmentKind::IfMixup => "if_mixup",
            AugmentKind::DropEdge => "drop_edge",
            AugmentKind::DropNode => "drop_node",
            AugmentKind::MixupGraph => "mixup_graph",
            AugmentKind::ManifoldMixup => "manifold_mixup",
            AugmentKind::IfMixupShuffled => "if_mixup_shuffled",
        }
    }

    pub fn uses_beta(self) -> bool {
        matches!(
            self,
            AugmentKind::IfMixup | AugmentKind::MixupGraph | AugmentKind::ManifoldMixup | AugmentKind::IfMixupShuffled
        )
    }

    pub fn uses_ratio(self) -> bool {
        matches!(self, AugmentKind::DropEdge | AugmentKind::DropNode)
    }
}

impl std::str::FromStr for AugmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown augmentation {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSpec {
    pub kind: AugmentKind,
    /// Drop ratio, read by the drop variants only.
    pub ratio: f64,
    /// Mixing distribution, read by the mixing variants only.
    pub beta: BetaParams,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        Self {
            kind: AugmentKind::None,
            ratio: 0.2,
            beta: BetaParams { alpha: 20.0, beta: 1.0 },
        }
    }
}

impl AugmentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_ratio() && !(0.0..1.0).contains(&self.ratio) {
            return Err(Error::Config(format!("augment.ratio {} is outside [0, 1)", self.ratio)));
        }
        if self.kind.uses_beta() {
            self.beta.validate()?;
        }
        Ok(())
    }
}

/// Removes `⌊ratio·E⌋` undirected edges chosen uniformly without replacement.
pub fn drop_edge<R: Rng + ?Sized>(g: &NodeFeaturedGraph, ratio: f64, rng: &mut R) -> Result<NodeFeaturedGraph> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::Config(format!("drop ratio {ratio} is outside [0, 1)")));
    }
    let edges = g.edges();
    let k = (ratio * edges.len() as f64).floor() as usize;
    let mut out = g.clone();
    if k == 0 {
        return Ok(out);
    }
    for idx in sample(rng, edges.len(), k) {
        let (i, j, _) = edges[idx];
        out.weights[[i, j]] = 0.0;
        out.weights[[j, i]] = 0.0;
    }
    Ok(out)
}

/// Removes `⌊ratio·n⌋` nodes chosen uniformly, with their incident edges. The
/// survivors keep their relative order.
pub fn drop_node<R: Rng + ?Sized>(g: &NodeFeaturedGraph, ratio: f64, rng: &mut R) -> Result<NodeFeaturedGraph> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::Config(format!("drop ratio {ratio} is outside [0, 1)")));
    }
    let n = g.num_nodes();
    let k = (ratio * n as f64).floor() as usize;
    if k >= n {
        return Err(Error::InvalidGraph(format!(
            "dropping {k} of {n} nodes leaves an empty graph"
        )));
    }
    if k == 0 {
        return Ok(g.clone());
    }
    let mut removed = vec![false; n];
    for idx in sample(rng, n, k) {
        removed[idx] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    Ok(induced_subgraph(g, &keep))
}

/// Subgraph on `keep`, in the given order.
pub fn induced_subgraph(g: &NodeFeaturedGraph, keep: &[usize]) -> NodeFeaturedGraph {
    let m = keep.len();
    let features = Array2::from_shape_fn((m, g.feature_dim()), |(r, c)| g.features[[keep[r], c]]);
    let weights = Array2::from_shape_fn((m, m), |(r, c)| g.weights[[keep[r], keep[c]]]);
    NodeFeaturedGraph { features, weights }
}

fn check_ratio(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// `λ·hA + (1−λ)·hB`.
pub fn mix_readout(ha: &Array1<f64>, hb: &Array1<f64>, lambda: f64) -> Result<Array1<f64>> {
    check_ratio(lambda)?;
    if ha.len() != hb.len() {
        return Err(Error::dims("mix_readout dimension", ha.len(), hb.len()));
    }
    Ok(ndarray::Zip::from(ha)
        .and(hb)
        .map_collect(|&a, &b| if a == b { a } else { lambda * a + (1.0 - lambda) * b }))
}

/// A layer-`k` mix and the head it must be classified with.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenMix {
    pub vector: Array1<f64>,
    pub head: HeadRef,
}

/// Mixes the pooled layer-`k` readouts (`1 ≤ k ≤ K`). At `k = K` the whole
/// graph representation is mixed and the main head is used, which is the same
/// as [`mix_readout`].
pub fn mix_hidden(model: &Model, a: &EncoderTrace, b: &EncoderTrace, lambda: f64, k: usize) -> Result<HiddenMix> {
    let layers = model.config.layers;
    if k == 0 || k > layers {
        return Err(Error::Config(format!("mixing layer {k} outside 1..={layers}")));
    }
    if a.pooled.len() != layers || b.pooled.len() != layers {
        return Err(Error::dims(
            "trace layer count",
            layers,
            a.pooled.len().min(b.pooled.len()),
        ));
    }
    if k == layers {
        return Ok(HiddenMix {
            vector: mix_readout(&a.representation, &b.representation, lambda)?,
            head: HeadRef::Main,
        });
    }
    Ok(HiddenMix {
        vector: mix_readout(&a.pooled[k - 1], &b.pooled[k - 1], lambda)?,
        head: HeadRef::Layer(k),
    })
}

/// Runs a [`HiddenMix`] through its head in evaluation mode.
pub fn classify_hidden_mix(model: &Model, params: &ModelParams, mix: &HiddenMix) -> Result<HeadTrace> {
    model.head_forward(mix.head, mix.vector.clone(), params, None)
}

/// Uniform layer index in `1..=layers`.
pub fn sample_layer<R: Rng + ?Sized>(layers: usize, rng: &mut R) -> usize {
    rng.random_range(1..=layers)
}

use std::borrow::Cow;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{concat, normalized_adjacency, pool, relu, Readout};
use super::params::{ModelParams, TensorId};
use crate::error::{Error, Result};
use crate::graph::{LabelDistribution, NodeFeaturedGraph};

/// Floor applied to probabilities inside the log of the cross-entropy.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    Gcn,
    Gin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub arch: Arch,
    /// Number of message-passing layers `K`.
    pub layers: usize,
    pub hidden: usize,
    /// Dropout rate after the dense classifier layer.
    pub dropout: f64,
    pub readout: Readout,
    /// Residual connections between GCN layers.
    pub gcn_skip: bool,
    /// Linear layers per GIN MLP.
    pub gin_mlp_depth: usize,
    /// Bias terms in the message-passing layers.
    pub bias: bool,
    /// Extra classifier heads on the pooled output of layers `1..K-1`, used
    /// by hidden-layer mixing.
    pub layer_heads: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            arch: Arch::Gin,
            layers: 5,
            hidden: 64,
            dropout: 0.0,
            readout: Readout::Sum,
            gcn_skip: true,
            gin_mlp_depth: 2,
            bias: true,
            layer_heads: false,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Config("model.layers must be at least 1".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("model.hidden must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "model.dropout {} is outside [0, 1)",
                self.dropout
            )));
        }
        if self.arch == Arch::Gin && self.gin_mlp_depth == 0 {
            return Err(Error::Config("model.gin_mlp_depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum LayerIds {
    Gcn {
        weight: TensorId,
        bias: Option<TensorId>,
        proj: Option<TensorId>,
        identity_skip: bool,
    },
    Gin {
        eps: TensorId,
        mlp: Vec<(TensorId, Option<TensorId>)>,
    },
}

#[derive(Clone, Debug)]
struct HeadIds {
    w1: TensorId,
    b1: TensorId,
    w2: TensorId,
    b2: TensorId,
}

/// Which classifier head to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadRef {
    /// The head on the full graph representation.
    Main,
    /// Auxiliary head on the pooled output of layer `k` (1-based, `k < K`).
    Layer(usize),
}

/// Architecture of a GCN or GIN classifier; parameters live in a separate
/// [`ModelParams`].
#[derive(Clone, Debug)]
pub struct Model {
    pub config: ModelConfig,
    pub input_dim: usize,
    pub classes: usize,
    layers: Vec<LayerIds>,
    head: HeadIds,
    layer_heads: Vec<HeadIds>,
}

fn glorot<R: Rng + ?Sized>(params: &mut ModelParams, id: TensorId, rng: &mut R) {
    let spec = params.spec(id).clone();
    let limit = (6.0 / (spec.rows + spec.cols) as f64).sqrt();
    for x in params.view_mut(id).iter_mut() {
        *x = rng.random_range(-limit..limit);
    }
}

/// Layer trace kept for the backward pass.
#[derive(Clone, Debug)]
pub struct LayerTrace {
    /// `h^{k-1}`.
    pub input: Array2<f64>,
    /// Inputs of each linear map (the aggregated messages first).
    pub linear_inputs: Vec<Array2<f64>>,
    /// Pre-activations of each linear map.
    pub pre_activations: Vec<Array2<f64>>,
    /// `h^k`.
    pub output: Array2<f64>,
}

#[derive(Clone, Debug)]
pub struct EncoderTrace {
    /// Normalized adjacency (GCN) or raw edge weights (GIN).
    pub propagation: Array2<f64>,
    pub layers: Vec<LayerTrace>,
    /// Pooled readout of every layer.
    pub pooled: Vec<Array1<f64>>,
    /// Graph representation `h_G` fed to the main head.
    pub representation: Array1<f64>,
}

impl EncoderTrace {
    /// Node embeddings `h^k` for `k = 1..=K`.
    pub fn embeddings(&self) -> impl Iterator<Item = &Array2<f64>> {
        self.layers.iter().map(|l| &l.output)
    }
}

#[derive(Clone, Debug)]
pub struct HeadTrace {
    pub input: Array1<f64>,
    pub pre_hidden: Array1<f64>,
    pub mask: Array1<f64>,
    pub hidden: Array1<f64>,
    pub logits: Array1<f64>,
    pub probs: Array1<f64>,
}

#[derive(Clone, Debug)]
pub struct ForwardTrace {
    pub encoder: EncoderTrace,
    pub head: HeadTrace,
}

impl ForwardTrace {
    pub fn probs(&self) -> &Array1<f64> {
        &self.head.probs
    }

    /// Sign pattern of every ReLU pre-activation, for detecting kinks.
    pub fn relu_pattern(&self) -> Vec<bool> {
        let mut out = Vec::new();
        for l in &self.encoder.layers {
            for p in &l.pre_activations {
                out.extend(p.iter().map(|&x| x > 0.0));
            }
        }
        out.extend(self.head.pre_hidden.iter().map(|&x| x > 0.0));
        out
    }
}

/// A training example as seen by the gradient computation.
#[derive(Clone, Debug)]
pub enum TrainSample<'a> {
    /// A plain (possibly input-mixed) graph.
    Graph {
        graph: Cow<'a, NodeFeaturedGraph>,
        label: LabelDistribution,
    },
    /// Two graphs mixed at a representation: `layer == None` mixes the full
    /// graph representation; `Some(k)` mixes the pooled output of layer `k`.
    RepresentationMix {
        a: Cow<'a, NodeFeaturedGraph>,
        b: Cow<'a, NodeFeaturedGraph>,
        lambda: f64,
        layer: Option<usize>,
        label: LabelDistribution,
    },
}

impl TrainSample<'_> {
    pub fn label(&self) -> &LabelDistribution {
        match self {
            TrainSample::Graph { label, .. } | TrainSample::RepresentationMix { label, .. } => label,
        }
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: ArrayView1<'_, f64>) -> Array1<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ex = logits.mapv(|z| (z - m).exp());
    let s = ex.sum();
    ex / s
}

/// `−Σ_c y(c) · log max(p(c), 1e-12)`.
pub fn soft_cross_entropy(target: &LabelDistribution, probs: ArrayView1<'_, f64>) -> Result<f64> {
    if target.num_classes() != probs.len() {
        return Err(Error::dims("cross-entropy classes", target.num_classes(), probs.len()));
    }
    Ok(-target
        .probs()
        .iter()
        .zip(probs.iter())
        .filter(|(&y, _)| y != 0.0)
        .map(|(&y, &p)| y * p.max(PROB_CLAMP).ln())
        .sum::<f64>())
}

/// Gradient with respect to the logits, `p·Σy − y`. This is the derivative of
/// the log-softmax form of the loss, which agrees with the clamped loss
/// whenever no labelled class has probability below the clamp; past the clamp
/// it keeps pushing instead of going flat.
fn cross_entropy_logit_grad(target: &LabelDistribution, probs: &Array1<f64>) -> Array1<f64> {
    let mass: f64 = target.probs().iter().sum();
    probs.iter().zip(target.probs()).map(|(&p, &y)| p * mass - y).collect()
}

fn outer_add(dst: &mut ndarray::ArrayViewMut2<'_, f64>, x: &Array1<f64>, y: &Array1<f64>) {
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let mut row = dst.row_mut(i);
        row.scaled_add(xi, y);
    }
}

impl Model {
    /// Builds the architecture with all parameters zero.
    pub fn new(config: ModelConfig, input_dim: usize, classes: usize) -> Result<(Self, ModelParams)> {
        config.validate()?;
        if input_dim == 0 || classes == 0 {
            return Err(Error::Config("input dimension and class count must be positive".into()));
        }
        let mut p = ModelParams::empty();
        let h = config.hidden;
        let mut layers = Vec::with_capacity(config.layers);
        for k in 0..config.layers {
            let f_in = if k == 0 { input_dim } else { h };
            let ids = match config.arch {
                Arch::Gcn => {
                    let weight = p.add(format!("layer{k}.weight"), f_in, h);
                    let bias = config.bias.then(|| p.add(format!("layer{k}.bias"), 1, h));
                    let identity_skip = config.gcn_skip && f_in == h;
                    let proj = (config.gcn_skip && f_in != h).then(|| p.add(format!("layer{k}.skip"), f_in, h));
                    LayerIds::Gcn {
                        weight,
                        bias,
                        proj,
                        identity_skip,
                    }
                }
                Arch::Gin => {
                    let eps = p.add(format!("layer{k}.eps"), 1, 1);
                    let mlp = (0..config.gin_mlp_depth)
                        .map(|l| {
                            let rows = if l == 0 { f_in } else { h };
                            let w = p.add(format!("layer{k}.mlp{l}.weight"), rows, h);
                            let b = config.bias.then(|| p.add(format!("layer{k}.mlp{l}.bias"), 1, h));
                            (w, b)
                        })
                        .collect();
                    LayerIds::Gin { eps, mlp }
                }
            };
            layers.push(ids);
        }
        let rep = Self::rep_dim(&config);
        let add_head = |p: &mut ModelParams, prefix: &str, input: usize| HeadIds {
            w1: p.add(format!("{prefix}.dense.weight"), input, h),
            b1: p.add(format!("{prefix}.dense.bias"), 1, h),
            w2: p.add(format!("{prefix}.out.weight"), h, classes),
            b2: p.add(format!("{prefix}.out.bias"), 1, classes),
        };
        let head = add_head(&mut p, "head", rep);
        let layer_heads = if config.layer_heads {
            (1..config.layers)
                .map(|k| add_head(&mut p, &format!("layer_head{k}"), h))
                .collect()
        } else {
            Vec::new()
        };
        Ok((
            Self {
                config,
                input_dim,
                classes,
                layers,
                head,
                layer_heads,
            },
            p,
        ))
    }

    /// Builds the architecture with Glorot-uniform weights and zero biases and
    /// ε.
    pub fn init<R: Rng + ?Sized>(
        config: ModelConfig,
        input_dim: usize,
        classes: usize,
        rng: &mut R,
    ) -> Result<(Self, ModelParams)> {
        let (model, mut p) = Self::new(config, input_dim, classes)?;
        let weights: Vec<TensorId> = (0..p.layout.len())
            .map(TensorId)
            .filter(|&id| {
                let name = &p.spec(id).name;
                name.ends_with(".weight") || name.ends_with(".skip")
            })
            .collect();
        for id in weights {
            glorot(&mut p, id, rng);
        }
        Ok((model, p))
    }

    fn rep_dim(config: &ModelConfig) -> usize {
        match config.arch {
            Arch::Gcn => config.hidden,
            Arch::Gin => config.hidden * config.layers,
        }
    }

    /// Dimension of the graph representation `h_G`.
    pub fn representation_dim(&self) -> usize {
        Self::rep_dim(&self.config)
    }

    pub fn check_params(&self, params: &ModelParams) -> Result<()> {
        let (_, fresh) = Self::new(self.config.clone(), self.input_dim, self.classes)?;
        if !fresh.same_layout(params) {
            return Err(Error::Config("parameter layout does not match the model".into()));
        }
        Ok(())
    }

    /// Runs the message-passing layers and the readout.
    pub fn encode(&self, g: &NodeFeaturedGraph, params: &ModelParams) -> Result<EncoderTrace> {
        if g.feature_dim() != self.input_dim {
            return Err(Error::dims("model input dimension", self.input_dim, g.feature_dim()));
        }
        if g.num_nodes() == 0 {
            return Err(Error::EmptyGraph);
        }
        let propagation = match self.config.arch {
            Arch::Gcn => normalized_adjacency(g.weights.view()),
            Arch::Gin => g.weights.clone(),
        };
        let mut h = g.features.clone();
        let mut traces = Vec::with_capacity(self.layers.len());
        let mut pooled = Vec::with_capacity(self.layers.len());
        for ids in &self.layers {
            let trace = match ids {
                LayerIds::Gcn {
                    weight,
                    bias,
                    proj,
                    identity_skip,
                } => {
                    let agg = propagation.dot(&h);
                    let mut pre = agg.dot(&params.view(*weight));
                    if let Some(b) = bias {
                        pre += &params.view(*b).row(0);
                    }
                    let mut out = relu(&pre);
                    if *identity_skip {
                        out += &h;
                    } else if let Some(pid) = proj {
                        out += &h.dot(&params.view(*pid));
                    }
                    LayerTrace {
                        input: h,
                        linear_inputs: vec![agg],
                        pre_activations: vec![pre],
                        output: out,
                    }
                }
                LayerIds::Gin { eps, mlp } => {
                    let e1 = 1.0 + params.scalar(*eps);
                    let mut x = &h * e1 + propagation.dot(&h);
                    let mut linear_inputs = Vec::with_capacity(mlp.len());
                    let mut pre_activations = Vec::with_capacity(mlp.len());
                    for (w, b) in mlp {
                        let mut pre = x.dot(&params.view(*w));
                        if let Some(b) = b {
                            pre += &params.view(*b).row(0);
                        }
                        let next = relu(&pre);
                        linear_inputs.push(x);
                        pre_activations.push(pre);
                        x = next;
                    }
                    LayerTrace {
                        input: h,
                        linear_inputs,
                        pre_activations,
                        output: x,
                    }
                }
            };
            pooled.push(pool(trace.output.view(), self.config.readout)?);
            h = trace.output.clone();
            traces.push(trace);
        }
        let representation = match self.config.arch {
            Arch::Gcn => pooled.last().expect("at least one layer").clone(),
            Arch::Gin => concat(&pooled),
        };
        Ok(EncoderTrace {
            propagation,
            layers: traces,
            pooled,
            representation,
        })
    }

    fn head_ids(&self, head: HeadRef) -> Result<&HeadIds> {
        match head {
            HeadRef::Main => Ok(&self.head),
            HeadRef::Layer(k) => {
                if k == 0 || k >= self.config.layers {
                    return Err(Error::Config(format!(
                        "layer head index {k} outside 1..{}",
                        self.config.layers
                    )));
                }
                self.layer_heads
                    .get(k - 1)
                    .ok_or_else(|| Error::Config("model was built without layer heads".into()))
            }
        }
    }

    /// Dense layer, ReLU, dropout (only when `dropout_rng` is given), output
    /// layer, softmax.
    pub fn head_forward(
        &self,
        head: HeadRef,
        input: Array1<f64>,
        params: &ModelParams,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<HeadTrace> {
        let ids = self.head_ids(head)?;
        let w1 = params.view(ids.w1);
        if input.len() != w1.nrows() {
            return Err(Error::dims("head input", w1.nrows(), input.len()));
        }
        let pre_hidden = input.dot(&w1) + params.view(ids.b1).row(0);
        let act = pre_hidden.mapv(|x| x.max(0.0));
        let p = self.config.dropout;
        let mask = match dropout_rng {
            Some(rng) if p > 0.0 => {
                let keep = 1.0 / (1.0 - p);
                act.iter()
                    .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep })
                    .collect()
            }
            _ => Array1::ones(act.len()),
        };
        let hidden = &act * &mask;
        let logits = hidden.dot(&params.view(ids.w2)) + params.view(ids.b2).row(0);
        let probs = softmax(logits.view());
        Ok(HeadTrace {
            input,
            pre_hidden,
            mask,
            hidden,
            logits,
            probs,
        })
    }

    pub fn forward_classify(
        &self,
        g: &NodeFeaturedGraph,
        params: &ModelParams,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<ForwardTrace> {
        let encoder = self.encode(g, params)?;
        let head = self.head_forward(HeadRef::Main, encoder.representation.clone(), params, dropout_rng)?;
        Ok(ForwardTrace { encoder, head })
    }

    /// Class probabilities in evaluation mode.
    pub fn predict_proba(&self, g: &NodeFeaturedGraph, params: &ModelParams) -> Result<Array1<f64>> {
        Ok(self.forward_classify(g, params, None)?.head.probs)
    }

    /// Predicted class, ties toward the lower index.
    pub fn predict(&self, g: &NodeFeaturedGraph, params: &ModelParams) -> Result<usize> {
        let p = self.predict_proba(g, params)?;
        Ok(crate::graph::argmax(p.as_slice().expect("contiguous")))
    }

    fn head_backward(
        &self,
        head: HeadRef,
        trace: &HeadTrace,
        d_logits: &Array1<f64>,
        params: &ModelParams,
        grads: &mut ModelParams,
    ) -> Result<Array1<f64>> {
        let ids = self.head_ids(head)?.clone();
        outer_add(&mut grads.view_mut(ids.w2), &trace.hidden, d_logits);
        grads.view_mut(ids.b2).row_mut(0).scaled_add(1.0, d_logits);
        let d_hidden = params.view(ids.w2).dot(d_logits);
        let d_pre: Array1<f64> = d_hidden
            .iter()
            .zip(trace.mask.iter())
            .zip(trace.pre_hidden.iter())
            .map(|((&g, &m), &z)| if z > 0.0 { g * m } else { 0.0 })
            .collect();
        outer_add(&mut grads.view_mut(ids.w1), &trace.input, &d_pre);
        grads.view_mut(ids.b1).row_mut(0).scaled_add(1.0, &d_pre);
        Ok(params.view(ids.w1).dot(&d_pre))
    }

    /// Backpropagates gradients of the pooled per-layer readouts through the
    /// encoder.
    fn encoder_backward(
        &self,
        trace: &EncoderTrace,
        d_pooled: &[Option<Array1<f64>>],
        params: &ModelParams,
        grads: &mut ModelParams,
    ) {
        let k_total = self.layers.len();
        let n = trace.layers[0].input.nrows();
        let pool_scale = match self.config.readout {
            Readout::Sum => 1.0,
            Readout::Mean => 1.0 / n as f64,
        };
        let width = self.config.hidden;
        let mut d_h: Option<Array2<f64>> = None;
        for k in (0..k_total).rev() {
            let lt = &trace.layers[k];
            let mut d_out = d_h.take().unwrap_or_else(|| Array2::zeros((n, width)));
            if let Some(dp) = &d_pooled[k] {
                d_out += &(dp * pool_scale).insert_axis(Axis(0));
            }
            let d_in = match &self.layers[k] {
                LayerIds::Gcn {
                    weight,
                    bias,
                    proj,
                    identity_skip,
                } => {
                    let pre = &lt.pre_activations[0];
                    let d_pre = ndarray::Zip::from(&d_out)
                        .and(pre)
                        .map_collect(|&g, &z| if z > 0.0 { g } else { 0.0 });
                    let agg = &lt.linear_inputs[0];
                    grads.view_mut(*weight).scaled_add(1.0, &agg.t().dot(&d_pre));
                    if let Some(b) = bias {
                        grads.view_mut(*b).row_mut(0).scaled_add(1.0, &d_pre.sum_axis(Axis(0)));
                    }
                    let d_agg = d_pre.dot(&params.view(*weight).t());
                    let mut d_in = trace.propagation.t().dot(&d_agg);
                    if *identity_skip {
                        d_in += &d_out;
                    } else if let Some(pid) = proj {
                        grads.view_mut(*pid).scaled_add(1.0, &lt.input.t().dot(&d_out));
                        d_in += &d_out.dot(&params.view(*pid).t());
                    }
                    d_in
                }
                LayerIds::Gin { eps, mlp } => {
                    let mut dx = d_out;
                    for (l, (w, b)) in mlp.iter().enumerate().rev() {
                        let pre = &lt.pre_activations[l];
                        let d_pre = ndarray::Zip::from(&dx)
                            .and(pre)
                            .map_collect(|&g, &z| if z > 0.0 { g } else { 0.0 });
                        grads.view_mut(*w).scaled_add(1.0, &lt.linear_inputs[l].t().dot(&d_pre));
                        if let Some(b) = b {
                            grads.view_mut(*b).row_mut(0).scaled_add(1.0, &d_pre.sum_axis(Axis(0)));
                        }
                        dx = d_pre.dot(&params.view(*w).t());
                    }
                    let d_eps: f64 = dx.iter().zip(lt.input.iter()).map(|(a, b)| a * b).sum();
                    grads.view_mut(*eps)[[0, 0]] += d_eps;
                    let e1 = 1.0 + params.scalar(*eps);
                    &dx * e1 + trace.propagation.t().dot(&dx)
                }
            };
            d_h = Some(d_in);
        }
    }

    /// Splits a gradient of `h_G` into per-layer pooled gradients.
    fn split_representation_grad(&self, d_rep: &Array1<f64>) -> Vec<Option<Array1<f64>>> {
        let k = self.layers.len();
        let mut out = vec![None; k];
        match self.config.arch {
            Arch::Gcn => out[k - 1] = Some(d_rep.clone()),
            Arch::Gin => {
                let h = self.config.hidden;
                for (l, slot) in out.iter_mut().enumerate() {
                    *slot = Some(d_rep.slice(ndarray::s![l * h..(l + 1) * h]).to_owned());
                }
            }
        }
        out
    }

    /// Loss of one sample and its gradient accumulated into `grads`.
    pub fn sample_gradient(
        &self,
        sample: &TrainSample<'_>,
        params: &ModelParams,
        grads: &mut ModelParams,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<f64> {
        if sample.label().num_classes() != self.classes {
            return Err(Error::dims(
                "sample label classes",
                self.classes,
                sample.label().num_classes(),
            ));
        }
        match sample {
            TrainSample::Graph { graph, label } => {
                let trace = self.forward_classify(graph, params, dropout_rng)?;
                let loss = soft_cross_entropy(label, trace.head.probs.view())?;
                let d_logits = cross_entropy_logit_grad(label, &trace.head.probs);
                let d_rep = self.head_backward(HeadRef::Main, &trace.head, &d_logits, params, grads)?;
                self.encoder_backward(&trace.encoder, &self.split_representation_grad(&d_rep), params, grads);
                Ok(loss)
            }
            TrainSample::RepresentationMix {
                a,
                b,
                lambda,
                layer,
                label,
            } => {
                let ta = self.encode(a, params)?;
                let tb = self.encode(b, params)?;
                let k_total = self.config.layers;
                let (head, rep_a, rep_b) = match layer {
                    None => (HeadRef::Main, &ta.representation, &tb.representation),
                    Some(k) if *k == k_total => (HeadRef::Main, &ta.representation, &tb.representation),
                    Some(k) if *k >= 1 && *k < k_total => (HeadRef::Layer(*k), &ta.pooled[k - 1], &tb.pooled[k - 1]),
                    Some(k) => {
                        return Err(Error::Config(format!("mixing layer {k} outside 1..={k_total}")));
                    }
                };
                let mixed = rep_a * *lambda + rep_b * (1.0 - lambda);
                let ht = self.head_forward(head, mixed, params, dropout_rng)?;
                let loss = soft_cross_entropy(label, ht.probs.view())?;
                let d_logits = cross_entropy_logit_grad(label, &ht.probs);
                let d_mixed = self.head_backward(head, &ht, &d_logits, params, grads)?;
                let (da, db) = (&d_mixed * *lambda, &d_mixed * (1.0 - lambda));
                let split = |d: Array1<f64>| match head {
                    HeadRef::Main => self.split_representation_grad(&d),
                    HeadRef::Layer(k) => {
                        let mut v = vec![None; k_total];
                        v[k - 1] = Some(d);
                        v
                    }
                };
                self.encoder_backward(&ta, &split(da), params, grads);
                self.encoder_backward(&tb, &split(db), params, grads);
                Ok(loss)
            }
        }
    }

    /// Mean loss over the batch and its exact gradient. Samples are processed
    /// in order, so results are reproducible given the dropout stream.
    pub fn batch_gradients(
        &self,
        batch: &[TrainSample<'_>],
        params: &ModelParams,
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(f64, ModelParams)> {
        if batch.is_empty() {
            return Err(Error::Data("empty batch".into()));
        }
        let mut grads = params.zeros_like();
        let mut total = 0.0;
        for s in batch {
            total += self.sample_gradient(s, params, &mut grads, dropout_rng.as_deref_mut())?;
        }
        let inv = 1.0 / batch.len() as f64;
        grads.scale(inv);
        Ok((total * inv, grads))
    }

    /// [`Model::batch_gradients`] for plain `(graph, label)` pairs.
    pub fn model_gradients(
        &self,
        batch: &[(NodeFeaturedGraph, LabelDistribution)],
        params: &ModelParams,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(f64, ModelParams)> {
        let samples: Vec<TrainSample<'_>> = batch
            .iter()
            .map(|(g, y)| TrainSample::Graph {
                graph: Cow::Borrowed(g),
                label: y.clone(),
            })
            .collect();
        self.batch_gradients(&samples, params, dropout_rng)
    }

    /// Mean loss only, without gradients.
    pub fn batch_loss(
        &self,
        batch: &[TrainSample<'_>],
        params: &ModelParams,
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<f64> {
        let mut scratch = params.zeros_like();
        let mut total = 0.0;
        for s in batch {
            total += self.sample_gradient(s, params, &mut scratch, dropout_rng.as_deref_mut())?;
        }
        Ok(total / batch.len() as f64)
    }
}

/// Serialized model: config, shapes and row-major values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub input_dim: usize,
    pub classes: usize,
    pub tensors: Vec<CheckpointTensor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointTensor {
    pub name: String,
    pub shape: [usize; 2],
    pub values: Vec<f64>,
}

pub const CHECKPOINT_FORMAT: &str = "graphmix-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

impl Checkpoint {
    pub fn from_model(model: &Model, params: &ModelParams) -> Self {
        let tensors = params
            .layout
            .iter()
            .map(|s| CheckpointTensor {
                name: s.name.clone(),
                shape: [s.rows, s.cols],
                values: params.values[s.offset..s.offset + s.len()].to_vec(),
            })
            .collect();
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: model.config.clone(),
            input_dim: model.input_dim,
            classes: model.classes,
            tensors,
        }
    }

    pub fn into_model(self) -> Result<(Model, ModelParams)> {
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(Error::Config(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            )));
        }
        let (model, mut params) = Model::new(self.config, self.input_dim, self.classes)?;
        if self.tensors.len() != params.layout.len() {
            return Err(Error::Config("checkpoint tensor count does not match the model".into()));
        }
        for (spec, t) in params.layout.clone().iter().zip(&self.tensors) {
            if spec.name != t.name || [spec.rows, spec.cols] != t.shape || t.values.len() != spec.len() {
                return Err(Error::Config(format!(
                    "checkpoint tensor {} does not match the model",
                    t.name
                )));
            }
            params.values[spec.offset..spec.offset + spec.len()].copy_from_slice(&t.values);
        }
        Ok((model, params))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

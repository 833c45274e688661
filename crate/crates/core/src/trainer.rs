//! AdamW training with a halving learning-rate schedule, per-epoch
//! augmentation streams, stratified k-fold cross-validation and sweeps.

use std::borrow::Cow;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augment::{drop_edge, drop_node, sample_layer, AugmentKind, AugmentSpec};
use crate::data::{encode_node_features, parse_tudataset, FeatureEncoding, TuDatasetFiles};
use crate::error::{Error, Result};
use crate::gnn::{Checkpoint, Model, ModelConfig, ModelParams, TrainSample};
use crate::graph::{validate_graph, GraphDataset};
use crate::mixer::{mix_labels, mix_pair, sample_lambda, sample_lambda_distinguishable, BetaParams, ABLATION_BETAS};
use crate::recovery::RECOVERY_TOL;
use crate::rng::stream;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;
/// Epochs between learning-rate halvings.
pub const LR_HALVING_PERIOD: usize = 50;

/// Dataset a configuration trains on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub dir: PathBuf,
    pub name: String,
    /// Defaults to node labels when present, degrees otherwise.
    #[serde(default)]
    pub encoding: Option<FeatureEncoding>,
}

impl DataSource {
    pub fn load(&self) -> Result<GraphDataset> {
        let parsed = parse_tudataset(&TuDatasetFiles::new(&self.dir, &self.name))?;
        let enc = self.encoding.unwrap_or_else(|| FeatureEncoding::auto(&parsed));
        encode_node_features(&parsed, enc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub data: Option<DataSource>,
    pub model: ModelConfig,
    pub augment: AugmentSpec,
    pub lr0: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub folds: usize,
    pub runs: usize,
    pub seed: u64,
    pub weight_decay: f64,
    /// Permute the node order of the second graph of each pair before mixing.
    pub shuffle_nodes_before_mix: bool,
    /// Keep every mixing ratio at least the recovery tolerance away from one
    /// half and validate every mixed graph.
    pub audit_mixes: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            data: None,
            model: ModelConfig::default(),
            augment: AugmentSpec::default(),
            lr0: 0.01,
            batch_size: 32,
            epochs: 350,
            folds: 10,
            runs: 3,
            seed: 0,
            weight_decay: 0.01,
            shuffle_nodes_before_mix: false,
            audit_mixes: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.augment.validate()?;
        for (name, v) in [
            ("batch_size", self.batch_size),
            ("epochs", self.epochs),
            ("folds", self.folds),
            ("runs", self.runs),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return Err(Error::Config(format!("lr0 {} must be positive", self.lr0)));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::Config(format!(
                "weight_decay {} must be nonnegative",
                self.weight_decay
            )));
        }
        Ok(())
    }

    /// Model configuration with the extra heads hidden-layer mixing needs.
    pub fn effective_model(&self) -> ModelConfig {
        let mut m = self.model.clone();
        if self.augment.kind == AugmentKind::ManifoldMixup {
            m.layer_heads = true;
        }
        m
    }

    pub fn shuffles_nodes(&self) -> bool {
        self.shuffle_nodes_before_mix || self.augment.kind == AugmentKind::IfMixupShuffled
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// `lr0 · 0.5^⌊epoch/50⌋`.
pub fn lr_at_epoch(lr0: f64, epoch: usize) -> f64 {
    let halvings = (epoch / LR_HALVING_PERIOD).min(i32::MAX as usize) as i32;
    lr0 * 0.5f64.powi(halvings)
}

/// First and second moment estimates and the step count.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }
}

/// One AdamW update with decoupled weight decay:
/// `w ← w − lr·m̂/(√v̂ + ε) − lr·wd·w`.
pub fn adamw_step(
    params: &mut ModelParams,
    grads: &ModelParams,
    state: &mut AdamState,
    lr: f64,
    weight_decay: f64,
) -> Result<()> {
    let n = params.len();
    if grads.len() != n {
        return Err(Error::dims("adamw gradient length", n, grads.len()));
    }
    if state.m.len() != n || state.v.len() != n {
        return Err(Error::dims("adamw state length", n, state.m.len()));
    }
    state.t += 1;
    let t = state.t.min(i32::MAX as u64) as i32;
    let c1 = 1.0 - ADAM_BETA1.powi(t);
    let c2 = 1.0 - ADAM_BETA2.powi(t);
    for k in 0..n {
        let g = grads.values[k];
        let m = ADAM_BETA1 * state.m[k] + (1.0 - ADAM_BETA1) * g;
        let v = ADAM_BETA2 * state.v[k] + (1.0 - ADAM_BETA2) * g * g;
        state.m[k] = m;
        state.v[k] = v;
        let w = params.values[k];
        params.values[k] = w - lr * (m / c1) / ((v / c2).sqrt() + ADAM_EPS) - lr * weight_decay * w;
    }
    Ok(())
}

/// Training samples of one epoch, in the order they are batched.
pub fn build_epoch_stream<'a, R: Rng + ?Sized>(
    train: &'a GraphDataset,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<Vec<TrainSample<'a>>> {
    let n = train.len();
    if n == 0 {
        return Err(Error::Data("empty training set".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let spec = &cfg.augment;
    let draw_lambda = |rng: &mut R| {
        if cfg.audit_mixes {
            sample_lambda_distinguishable(spec.beta, RECOVERY_TOL, rng)
        } else {
            sample_lambda(spec.beta, rng)
        }
    };
    let plain = |i: usize| TrainSample::Graph {
        graph: Cow::Borrowed(&train.items[i].graph),
        label: train.items[i].label.clone(),
    };
    let mut out = Vec::with_capacity(n);
    match spec.kind {
        AugmentKind::None => out.extend(order.iter().map(|&i| plain(i))),
        AugmentKind::DropEdge | AugmentKind::DropNode => {
            for &i in &order {
                let g = &train.items[i].graph;
                let dropped = if spec.kind == AugmentKind::DropEdge {
                    drop_edge(g, spec.ratio, rng)?
                } else {
                    drop_node(g, spec.ratio, rng)?
                };
                out.push(TrainSample::Graph {
                    graph: Cow::Owned(dropped),
                    label: train.items[i].label.clone(),
                });
            }
        }
        AugmentKind::IfMixup | AugmentKind::IfMixupShuffled => {
            for (p, &i) in order.iter().enumerate() {
                let j = order[(p + 1) % n];
                let lambda = draw_lambda(rng);
                let (a, b) = (&train.items[i], &train.items[j]);
                let mixed = if cfg.shuffles_nodes() {
                    let mut perm: Vec<usize> = (0..b.graph.num_nodes()).collect();
                    perm.shuffle(rng);
                    mix_pair(&a.graph, &b.graph.permuted(&perm), lambda)?
                } else {
                    mix_pair(&a.graph, &b.graph, lambda)?
                };
                if cfg.audit_mixes {
                    if let Some(v) = validate_graph(&mixed).first() {
                        return Err(Error::InvalidGraph(format!("mix of {i} and {j}: {v}")));
                    }
                }
                out.push(TrainSample::Graph {
                    graph: Cow::Owned(mixed),
                    label: mix_labels(&a.label, &b.label, lambda)?,
                });
            }
        }
        AugmentKind::MixupGraph | AugmentKind::ManifoldMixup => {
            for (p, &i) in order.iter().enumerate() {
                let j = order[(p + 1) % n];
                let lambda = draw_lambda(rng);
                let layer = (spec.kind == AugmentKind::ManifoldMixup).then(|| sample_layer(cfg.model.layers, rng));
                let (a, b) = (&train.items[i], &train.items[j]);
                out.push(TrainSample::RepresentationMix {
                    a: Cow::Borrowed(&a.graph),
                    b: Cow::Borrowed(&b.graph),
                    lambda,
                    layer,
                    label: mix_labels(&a.label, &b.label, lambda)?,
                });
            }
        }
    }
    Ok(out)
}

/// Fraction of graphs whose argmax prediction equals the argmax of the label.
pub fn accuracy(model: &Model, params: &ModelParams, ds: &GraphDataset) -> Result<f64> {
    if ds.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for it in &ds.items {
        if model.predict(&it.graph, params)? == it.label.argmax() {
            hits += 1;
        }
    }
    Ok(hits as f64 / ds.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_acc: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: Model,
    pub params: ModelParams,
    pub epochs: Vec<EpochRecord>,
}

/// Trains one model from scratch and evaluates it on `val` after every epoch.
pub fn train_single<R: Rng + ?Sized>(
    train: &GraphDataset,
    val: &GraphDataset,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<TrainOutcome> {
    train_single_with(train, val, cfg, rng, &mut |_| {})
}

/// [`train_single`] with a callback after every epoch.
pub fn train_single_with<R: Rng + ?Sized>(
    train: &GraphDataset,
    val: &GraphDataset,
    cfg: &TrainConfig,
    rng: &mut R,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::Data("training and validation sets must be nonempty".into()));
    }
    if train.feature_dim != val.feature_dim || train.classes != val.classes {
        return Err(Error::Data(
            "training and validation sets disagree on dimensions".into(),
        ));
    }
    let mut init_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut epoch_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let (model, mut params) = Model::init(cfg.effective_model(), train.feature_dim, train.classes, &mut init_rng)?;
    let mut state = AdamState::new(params.len());
    let mut log = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let lr = lr_at_epoch(cfg.lr0, epoch);
        let stream = build_epoch_stream(train, cfg, &mut epoch_rng)?;
        let mut total = 0.0;
        for batch in stream.chunks(cfg.batch_size) {
            let (loss, grads) = model.batch_gradients(batch, &params, Some(&mut epoch_rng))?;
            adamw_step(&mut params, &grads, &mut state, lr, cfg.weight_decay)?;
            total += loss * batch.len() as f64;
        }
        let rec = EpochRecord {
            epoch,
            train_loss: total / stream.len() as f64,
            val_acc: accuracy(&model, &params, val)?,
        };
        on_epoch(&rec);
        log.push(rec);
    }
    Ok(TrainOutcome {
        model,
        params,
        epochs: log,
    })
}

/// Stratified fold index of every sample: each class is shuffled and dealt
/// round-robin after the classes before it.
pub fn stratified_folds<R: Rng + ?Sized>(classes: &[usize], folds: usize, rng: &mut R) -> Result<Vec<usize>> {
    if folds == 0 || classes.len() < folds {
        return Err(Error::Data(format!(
            "{} samples cannot be split into {folds} folds",
            classes.len()
        )));
    }
    let num_classes = classes.iter().copied().max().map_or(0, |m| m + 1);
    let mut order = Vec::with_capacity(classes.len());
    for c in 0..num_classes {
        let mut members: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == c).collect();
        members.shuffle(rng);
        order.extend(members);
    }
    let mut fold_of = vec![0; classes.len()];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % folds;
    }
    Ok(fold_of)
}

/// Training and validation indices for one fold.
pub fn fold_split(fold_of: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    let (val, train): (Vec<usize>, Vec<usize>) = (0..fold_of.len()).partition(|&i| fold_of[i] == fold);
    (train, val)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub run: usize,
    pub fold: usize,
    pub final_acc: f64,
    pub curve: Vec<EpochRecord>,
}

/// Cross-validation log. A run's score is the best epoch of its
/// fold-averaged validation curve; the final-epoch average is kept as well.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsLog {
    pub config: TrainConfig,
    pub dataset: String,
    pub folds: Vec<FoldResult>,
    pub run_scores: Vec<f64>,
    pub run_best_epochs: Vec<usize>,
    pub run_final_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub final_mean: f64,
    pub final_std: f64,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    (m, v.sqrt())
}

impl MetricsLog {
    /// Per-epoch curve averaged over every fold of every run.
    pub fn mean_curve(&self) -> Vec<EpochRecord> {
        let Some(first) = self.folds.first() else {
            return Vec::new();
        };
        let k = self.folds.len() as f64;
        (0..first.curve.len())
            .map(|e| EpochRecord {
                epoch: e,
                train_loss: self.folds.iter().map(|f| f.curve[e].train_loss).sum::<f64>() / k,
                val_acc: self.folds.iter().map(|f| f.curve[e].val_acc).sum::<f64>() / k,
            })
            .collect()
    }

    /// `epoch,train_loss,val_acc` rows of the mean curve.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_curve_csv(&self.mean_curve(), path)
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub fn write_curve_csv(curve: &[EpochRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    for r in curve {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<EpochRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Data(format!("{}: {e}", path.display()))))
        .collect()
}

/// Repeated stratified k-fold cross-validation. Run `r` uses fold assignment
/// and training streams derived from `(seed, r)` and `(seed, r, fold)`.
pub fn cross_validate(ds: &GraphDataset, cfg: &TrainConfig) -> Result<MetricsLog> {
    cross_validate_with(ds, cfg, &mut |_, _, _| {})
}

/// [`cross_validate`] with a callback `(run, fold, epoch record)`.
pub fn cross_validate_with(
    ds: &GraphDataset,
    cfg: &TrainConfig,
    on_epoch: &mut dyn FnMut(usize, usize, &EpochRecord),
) -> Result<MetricsLog> {
    cfg.validate()?;
    let classes = ds.class_indices();
    let mut folds = Vec::with_capacity(cfg.runs * cfg.folds);
    let mut run_scores = Vec::with_capacity(cfg.runs);
    let mut run_best_epochs = Vec::with_capacity(cfg.runs);
    let mut run_final_scores = Vec::with_capacity(cfg.runs);
    for run in 0..cfg.runs {
        let fold_of = stratified_folds(&classes, cfg.folds, &mut stream(cfg.seed, &[run as u64]))?;
        let mut run_folds = Vec::with_capacity(cfg.folds);
        for fold in 0..cfg.folds {
            let (tr, va) = fold_split(&fold_of, fold);
            let mut rng = stream(cfg.seed, &[run as u64, fold as u64]);
            let out = train_single_with(&ds.subset(&tr), &ds.subset(&va), cfg, &mut rng, &mut |rec| {
                on_epoch(run, fold, rec)
            })?;
            run_folds.push(FoldResult {
                run,
                fold,
                final_acc: out.epochs.last().map_or(0.0, |r| r.val_acc),
                curve: out.epochs,
            });
        }
        let k = run_folds.len() as f64;
        let avg: Vec<f64> = (0..cfg.epochs)
            .map(|e| run_folds.iter().map(|f| f.curve[e].val_acc).sum::<f64>() / k)
            .collect();
        let (best_epoch, best) =
            avg.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (e, &a)| if a > acc.1 { (e, a) } else { acc },
            );
        run_scores.push(best);
        run_best_epochs.push(best_epoch);
        run_final_scores.push(*avg.last().expect("epochs > 0"));
        folds.extend(run_folds);
    }
    let (mean, std) = mean_std(&run_scores);
    let (final_mean, final_std) = mean_std(&run_final_scores);
    Ok(MetricsLog {
        config: cfg.clone(),
        dataset: ds.name.clone(),
        folds,
        run_scores,
        run_best_epochs,
        run_final_scores,
        mean,
        std,
        final_mean,
        final_std,
    })
}

/// One bar of a sweep chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dataset: String,
    pub method: String,
    pub setting: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Beta,
    Layers,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(SweepAxis::Beta),
            "layers" => Ok(SweepAxis::Layers),
            _ => Err(Error::Config(format!(
                "unknown sweep axis {s:?}; expected beta or layers"
            ))),
        }
    }
}

/// The cells of a sweep: mixing distributions for MixupGraph and ifMixup, or
/// depths 5 and 8 for the baseline and both mixing methods.
pub fn sweep_cells(base: &TrainConfig, axis: SweepAxis) -> Vec<(String, String, TrainConfig)> {
    let mut cells = Vec::new();
    match axis {
        SweepAxis::Beta => {
            for kind in [AugmentKind::MixupGraph, AugmentKind::IfMixup] {
                for beta in ABLATION_BETAS {
                    let mut c = base.clone();
                    c.augment.kind = kind;
                    c.augment.beta = beta;
                    cells.push((kind.name().to_string(), beta.to_string(), c));
                }
            }
        }
        SweepAxis::Layers => {
            for kind in [AugmentKind::None, AugmentKind::MixupGraph, AugmentKind::IfMixup] {
                for layers in [5, 8] {
                    let mut c = base.clone();
                    c.augment.kind = kind;
                    c.model.layers = layers;
                    cells.push((kind.name().to_string(), format!("K={layers}"), c));
                }
            }
        }
    }
    cells
}

pub fn run_sweep(
    ds: &GraphDataset,
    base: &TrainConfig,
    axis: SweepAxis,
    on_cell: &mut dyn FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for (method, setting, cfg) in sweep_cells(base, axis) {
        let log = cross_validate(ds, &cfg)?;
        let row = SweepRow {
            dataset: ds.name.clone(),
            method,
            setting,
            mean: log.mean,
            std: log.std,
        };
        on_cell(&row);
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Data(format!("{}: {e}", path.display()))))
        .collect()
}

/// Hyperparameter values searched over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub lr0: Vec<f64>,
    pub hidden: Vec<usize>,
    pub batch_size: Vec<usize>,
    pub dropout: Vec<f64>,
    pub drop_ratio: Vec<f64>,
    pub layers: Vec<usize>,
    pub betas: Vec<BetaParams>,
}

pub fn default_grid() -> HyperGrid {
    HyperGrid {
        lr0: vec![0.01, 0.0005],
        hidden: vec![64, 128],
        batch_size: vec![32, 128],
        dropout: vec![0.0, 0.5],
        drop_ratio: vec![0.2, 0.4],
        layers: vec![5, 8],
        betas: vec![
            BetaParams { alpha: 1.0, beta: 1.0 },
            BetaParams { alpha: 2.0, beta: 2.0 },
            BetaParams { alpha: 20.0, beta: 1.0 },
        ],
    }
}

impl HyperGrid {
    /// Every configuration of the grid for the augmentation in `base`; the
    /// drop ratio and Beta axes only vary for kinds that read them.
    pub fn configs(&self, base: &TrainConfig) -> Vec<TrainConfig> {
        let kind = base.augment.kind;
        let ratios = if kind.uses_ratio() {
            self.drop_ratio.clone()
        } else {
            vec![base.augment.ratio]
        };
        let betas = if kind.uses_beta() {
            self.betas.clone()
        } else {
            vec![base.augment.beta]
        };
        let mut out = Vec::new();
        for &lr0 in &self.lr0 {
            for &hidden in &self.hidden {
                for &batch_size in &self.batch_size {
                    for &dropout in &self.dropout {
                        for &layers in &self.layers {
                            for &ratio in &ratios {
                                for &beta in &betas {
                                    let mut c = base.clone();
                                    c.lr0 = lr0;
                                    c.model.hidden = hidden;
                                    c.batch_size = batch_size;
                                    c.model.dropout = dropout;
                                    c.model.layers = layers;
                                    c.augment.ratio = ratio;
                                    c.augment.beta = beta;
                                    out.push(c);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Writes `graph,label,h0,h1,...` rows with each graph's representation.
pub fn export_embeddings(model: &Model, params: &ModelParams, ds: &GraphDataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut header = vec!["graph".to_string(), "label".to_string()];
    header.extend((0..model.representation_dim()).map(|k| format!("h{k}")));
    w.write_record(&header)?;
    for (i, it) in ds.items.iter().enumerate() {
        let rep = model.encode(&it.graph, params)?.representation;
        let mut row = vec![i.to_string(), it.label.argmax().to_string()];
        row.extend(rep.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Saves a trained model.
pub fn save_checkpoint(model: &Model, params: &ModelParams, path: &Path) -> Result<()> {
    Checkpoint::from_model(model, params).save(path)
}

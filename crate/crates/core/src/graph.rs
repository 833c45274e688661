//! Graph representation, validation, dummy-node padding, and the feature
//! vocabulary machinery used by recovery.

use std::collections::HashMap;
use std::fmt;

use ndarray::{s, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, PIVOT_TOL};

/// Tolerance for probability vectors summing to one.
pub const LABEL_SUM_TOL: f64 = 1e-9;

/// A node-featured graph `(v, e)`: an `n × d` feature matrix and a symmetric
/// `n × n` edge-weight matrix with entries in `[0, 1]` and a zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeFeaturedGraph {
    pub features: Array2<f64>,
    pub weights: Array2<f64>,
}

impl NodeFeaturedGraph {
    /// Builds a graph and checks that the shapes agree. Weight invariants are
    /// left to [`validate_graph`].
    pub fn new(features: Array2<f64>, weights: Array2<f64>) -> Result<Self> {
        let n = features.nrows();
        if weights.nrows() != n {
            return Err(Error::dims("edge-weight rows", n, weights.nrows()));
        }
        if weights.ncols() != n {
            return Err(Error::dims("edge-weight columns", n, weights.ncols()));
        }
        Ok(Self { features, weights })
    }

    /// Binary graph from an undirected edge list.
    pub fn from_edges(features: Array2<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = features.nrows();
        let mut weights = Array2::zeros((n, n));
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i != j {
                weights[[i, j]] = 1.0;
                weights[[j, i]] = 1.0;
            }
        }
        Ok(Self { features, weights })
    }

    pub fn num_nodes(&self) -> usize {
        self.features.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Number of undirected edges with nonzero weight.
    pub fn num_edges(&self) -> usize {
        let n = self.num_nodes();
        (0..n)
            .map(|i| (i + 1..n).filter(|&j| self.weights[[i, j]] != 0.0).count())
            .sum()
    }

    /// Undirected edges `(i, j)` with `i < j` and their weights.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.num_nodes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weights[[i, j]];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    /// Returns a copy with nodes reordered so that new node `k` is old node
    /// `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.num_nodes();
        assert_eq!(perm.len(), n, "permutation length");
        let mut features = Array2::zeros(self.features.raw_dim());
        let mut weights = Array2::zeros((n, n));
        for (new, &old) in perm.iter().enumerate() {
            features.row_mut(new).assign(&self.features.row(old));
            for (new_j, &old_j) in perm.iter().enumerate() {
                weights[[new, new_j]] = self.weights[[old, old_j]];
            }
        }
        Self { features, weights }
    }

    /// Appends `extra` disconnected zero-feature nodes after the existing ones.
    pub fn with_dummy_nodes(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let n = self.num_nodes();
        let d = self.feature_dim();
        let mut features = Array2::zeros((n + extra, d));
        features.slice_mut(s![..n, ..]).assign(&self.features);
        let mut weights = Array2::zeros((n + extra, n + extra));
        weights.slice_mut(s![..n, ..n]).assign(&self.weights);
        Self { features, weights }
    }

    /// The subgraph on the first `n` nodes.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            features: self.features.slice(s![..n, ..]).to_owned(),
            weights: self.weights.slice(s![..n, ..n]).to_owned(),
        }
    }
}

/// One invariant violation found by [`validate_graph`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Asymmetric { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    WeightOutOfRange { i: usize, j: usize, value: f64 },
    NonFinite { i: usize, j: usize },
    ShapeMismatch { nodes: usize, rows: usize, cols: usize },
    NoNodes,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { i, j } => write!(f, "asymmetric at ({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at ({i},{i})"),
            Violation::WeightOutOfRange { i, j, value } => {
                write!(f, "weight out of [0,1] at ({i},{j}): {value}")
            }
            Violation::NonFinite { i, j } => write!(f, "non-finite value at ({i},{j})"),
            Violation::ShapeMismatch { nodes, rows, cols } => write!(
                f,
                "dimension mismatch: {nodes} feature rows but {rows}x{cols} weight matrix"
            ),
            Violation::NoNodes => write!(f, "graph has no nodes"),
        }
    }
}

/// Every invariant violation of `g`; empty means the graph is valid.
pub fn validate_graph(g: &NodeFeaturedGraph) -> Vec<Violation> {
    let n = g.num_nodes();
    let (rows, cols) = g.weights.dim();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Violation::NoNodes);
    }
    if rows != n || cols != n {
        out.push(Violation::ShapeMismatch { nodes: n, rows, cols });
        return out;
    }
    for ((i, j), &v) in g.features.indexed_iter() {
        if !v.is_finite() {
            out.push(Violation::NonFinite { i, j });
        }
    }
    for i in 0..n {
        if g.weights[[i, i]] != 0.0 {
            out.push(Violation::NonzeroDiagonal { i });
        }
        for j in 0..n {
            let w = g.weights[[i, j]];
            if !w.is_finite() {
                out.push(Violation::NonFinite { i, j });
            } else if !(0.0..=1.0).contains(&w) && (i < j || w != g.weights[[j, i]]) {
                out.push(Violation::WeightOutOfRange { i, j, value: w });
            }
            if i < j && w != g.weights[[j, i]] {
                out.push(Violation::Asymmetric { i, j });
            }
        }
    }
    out
}

/// Pads both graphs to `max(n_a, n_b)` nodes with trailing dummy nodes.
pub fn pad_pair(a: &NodeFeaturedGraph, b: &NodeFeaturedGraph) -> Result<(NodeFeaturedGraph, NodeFeaturedGraph)> {
    if a.feature_dim() != b.feature_dim() {
        return Err(Error::dims(
            "pad_pair feature dimension",
            a.feature_dim(),
            b.feature_dim(),
        ));
    }
    let n = a.num_nodes().max(b.num_nodes());
    Ok((
        a.with_dummy_nodes(n - a.num_nodes()),
        b.with_dummy_nodes(n - b.num_nodes()),
    ))
}

/// A probability vector over `C` classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelDistribution(pub Vec<f64>);

impl LabelDistribution {
    pub fn one_hot(class: usize, classes: usize) -> Self {
        let mut p = vec![0.0; classes];
        p[class] = 1.0;
        Self(p)
    }

    pub fn new(p: Vec<f64>) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|&x| x < 0.0 || !x.is_finite()) || (sum - 1.0).abs() > LABEL_SUM_TOL {
            return Err(Error::Data(format!("not a probability vector: {p:?}")));
        }
        Ok(Self(p))
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Index of the largest entry, ties toward the lower index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }

    pub fn is_one_hot(&self) -> bool {
        self.0.iter().filter(|&&x| x == 1.0).count() == 1 && self.0.iter().all(|&x| x == 0.0 || x == 1.0)
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub graph: NodeFeaturedGraph,
    pub label: LabelDistribution,
}

/// The training collection: labelled graphs sharing a feature dimension and
/// class count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDataset {
    pub name: String,
    pub classes: usize,
    pub feature_dim: usize,
    pub items: Vec<LabeledGraph>,
}

impl GraphDataset {
    pub fn new(name: impl Into<String>, classes: usize, feature_dim: usize) -> Self {
        Self {
            name: name.into(),
            classes,
            feature_dim,
            items: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, graph: NodeFeaturedGraph, label: LabelDistribution) -> Result<()> {
        if graph.feature_dim() != self.feature_dim {
            return Err(Error::dims(
                "dataset feature dimension",
                self.feature_dim,
                graph.feature_dim(),
            ));
        }
        if label.num_classes() != self.classes {
            return Err(Error::dims("dataset class count", self.classes, label.num_classes()));
        }
        self.items.push(LabeledGraph { graph, label });
        Ok(())
    }

    /// Class index of each item (argmax of its label).
    pub fn class_indices(&self) -> Vec<usize> {
        self.items.iter().map(|it| it.label.argmax()).collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            classes: self.classes,
            feature_dim: self.feature_dim,
            items: idx.iter().map(|&i| self.items[i].clone()).collect(),
        }
    }

    /// Checks the dataset invariants: shared dimensions, binary valid graphs.
    pub fn validate(&self) -> Result<()> {
        for (k, it) in self.items.iter().enumerate() {
            if it.graph.feature_dim() != self.feature_dim {
                return Err(Error::dims(
                    "dataset feature dimension",
                    self.feature_dim,
                    it.graph.feature_dim(),
                ));
            }
            if it.label.num_classes() != self.classes {
                return Err(Error::dims("dataset class count", self.classes, it.label.num_classes()));
            }
            if let Some(v) = validate_graph(&it.graph).first() {
                return Err(Error::InvalidGraph(format!("graph {k}: {v}")));
            }
            if !it.graph.is_binary() {
                return Err(Error::InvalidGraph(format!("graph {k} has non-binary edges")));
            }
        }
        Ok(())
    }
}

/// Verdict of [`check_linear_independence`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Independence {
    pub independent: bool,
    pub rank: usize,
}

/// True iff the rows are linearly independent (rank equals row count).
pub fn check_linear_independence(rows: &[Vec<f64>]) -> Independence {
    if rows.is_empty() {
        return Independence {
            independent: true,
            rank: 0,
        };
    }
    let m = linalg::stack_rows(rows);
    let rank = linalg::rank(m.view(), PIVOT_TOL);
    Independence {
        independent: rank == rows.len(),
        rank,
    }
}

fn row_key(row: ArrayView1<'_, f64>) -> Vec<u64> {
    row.iter().map(|x| x.to_bits()).collect()
}

fn is_zero_row(row: ArrayView1<'_, f64>) -> bool {
    row.iter().all(|&x| x == 0.0)
}

/// The feature vocabulary `V` of a dataset, a basis `B` of its span and the
/// per-graph coefficient matrices `T` with `v = T · B`.
#[derive(Clone, Debug)]
pub struct FeatureBasis {
    /// Distinct nonzero feature rows in order of first appearance.
    pub vocabulary: Vec<Vec<f64>>,
    /// `m × d` basis of `SPAN(V)`, rows drawn from the vocabulary.
    pub basis: Array2<f64>,
    /// Inverse Gram matrix of the basis, used for projections.
    pub gram_inv: Array2<f64>,
    /// One `n × m` coefficient matrix per dataset graph, in dataset order.
    pub coeffs: Vec<Array2<f64>>,
}

impl FeatureBasis {
    /// A basis over an explicit vocabulary with no per-graph coefficients.
    /// Enough for independent-mode recovery.
    pub fn from_vocabulary(vocabulary: Vec<Vec<f64>>, feature_dim: usize) -> Result<Self> {
        let mut ds = GraphDataset::new("vocabulary", 1, feature_dim);
        if vocabulary.iter().any(|v| v.len() != feature_dim) {
            return Err(Error::Data(
                "vocabulary rows disagree with the feature dimension".into(),
            ));
        }
        let rows = if vocabulary.is_empty() {
            Array2::zeros((1, feature_dim))
        } else {
            linalg::stack_rows(&vocabulary)
        };
        let e = Array2::zeros((rows.nrows(), rows.nrows()));
        ds.push(NodeFeaturedGraph::new(rows, e)?, LabelDistribution::one_hot(0, 1))?;
        let mut basis = feature_vocabulary(&ds)?;
        basis.coeffs.clear();
        Ok(basis)
    }

    pub fn feature_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `m`, the dimension of `SPAN(V)`.
    pub fn span_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `V* = V ∪ {0}`.
    pub fn vocabulary_star(&self) -> Vec<Vec<f64>> {
        let mut v = self.vocabulary.clone();
        v.push(vec![0.0; self.feature_dim()]);
        v
    }

    pub fn vocabulary_independent(&self) -> bool {
        self.vocabulary.len() == self.span_dim()
    }

    /// Distinct coefficient matrices (the set 𝒯), in first-appearance order.
    pub fn coefficient_set(&self) -> Vec<Array2<f64>> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for t in &self.coeffs {
            let key: (usize, Vec<u64>) = (t.nrows(), t.iter().map(|x| x.to_bits()).collect());
            if seen.insert(key, ()).is_none() {
                out.push(t.clone());
            }
        }
        out
    }

    /// Whether 𝒯, with every matrix zero-padded to the largest node count and
    /// flattened, is a linearly independent set.
    pub fn coefficients_independent(&self) -> Independence {
        let set = self.coefficient_set();
        let n_max = set.iter().map(|t| t.nrows()).max().unwrap_or(0);
        let m = self.span_dim();
        let rows: Vec<Vec<f64>> = set
            .iter()
            .map(|t| {
                let mut flat = vec![0.0; n_max * m];
                for ((i, j), &x) in t.indexed_iter() {
                    flat[i * m + j] = x;
                }
                flat
            })
            .collect();
        check_linear_independence(&rows)
    }

    /// Coefficients of an arbitrary feature matrix in this basis plus the
    /// max-abs residual of the projection.
    pub fn project(&self, features: &Array2<f64>) -> (Array2<f64>, f64) {
        linalg::project_rows(features.view(), self.basis.view(), self.gram_inv.view())
    }

    /// Max-abs reconstruction error `v − T·B` over every graph of `ds`.
    pub fn reconstruction_error(&self, ds: &GraphDataset) -> f64 {
        ds.items
            .iter()
            .zip(&self.coeffs)
            .map(|(it, t)| linalg::max_abs_diff(it.graph.features.view(), t.dot(&self.basis).view()))
            .fold(0.0, f64::max)
    }
}

/// Builds the feature vocabulary, a basis of its span and the coefficient
/// matrices of every graph.
pub fn feature_vocabulary(ds: &GraphDataset) -> Result<FeatureBasis> {
    if ds.is_empty() {
        return Err(Error::Data("feature vocabulary of an empty dataset".into()));
    }
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut vocabulary = Vec::new();
    for it in &ds.items {
        for row in it.graph.features.rows() {
            if is_zero_row(row) {
                continue;
            }
            let key = row_key(row);
            if !seen.contains_key(&key) {
                seen.insert(key, vocabulary.len());
                vocabulary.push(row.to_vec());
            }
        }
    }
    let d = ds.feature_dim;
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    for v in &vocabulary {
        chosen.push(v.clone());
        if !check_linear_independence(&chosen).independent {
            chosen.pop();
        }
    }
    let basis = if chosen.is_empty() {
        Array2::zeros((0, d))
    } else {
        linalg::stack_rows(&chosen)
    };
    let gram_inv = if chosen.is_empty() {
        Array2::zeros((0, 0))
    } else {
        linalg::inverse(linalg::gram(basis.view()).view(), 0.0)
            .ok_or_else(|| Error::Data("basis Gram matrix is singular".into()))?
    };
    let coeffs = ds
        .items
        .iter()
        .map(|it| {
            if basis.nrows() == 0 {
                Array2::zeros((it.graph.num_nodes(), 0))
            } else {
                linalg::project_rows(it.graph.features.view(), basis.view(), gram_inv.view()).0
            }
        })
        .collect();
    Ok(FeatureBasis {
        vocabulary,
        basis,
        gram_inv,
        coeffs,
    })
}

/// Per-dataset summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub graphs: usize,
    pub mean_nodes: f64,
    /// Undirected edges, each counted once.
    pub mean_edges: f64,
    pub feature_dim: usize,
    pub classes: usize,
}

pub fn degree_stats(ds: &GraphDataset) -> DatasetSummary {
    let count = ds.len();
    let denom = count.max(1) as f64;
    let nodes: usize = ds.items.iter().map(|it| it.graph.num_nodes()).sum();
    let edges: usize = ds.items.iter().map(|it| it.graph.num_edges()).sum();
    DatasetSummary {
        graphs: count,
        mean_nodes: nodes as f64 / denom,
        mean_edges: edges as f64 / denom,
        feature_dim: ds.feature_dim,
        classes: ds.classes,
    }
}

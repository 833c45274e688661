//! TUDataset text files: parsing, writing, node-feature encoding, summary
//! statistics, and the file layout used for individual mixed graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degree_stats, DatasetSummary, GraphDataset, LabelDistribution, NodeFeaturedGraph};
use crate::mixer::MixedSample;

/// Location of a dataset: `dir/NAME_A.txt`, `dir/NAME_graph_indicator.txt`,
/// `dir/NAME_graph_labels.txt` and optionally `dir/NAME_node_labels.txt`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuDatasetFiles {
    pub dir: PathBuf,
    pub name: String,
}

impl TuDatasetFiles {
    pub fn new(dir: impl Into<PathBuf>, name: impl Into<String>) -> Self {
        Self {
            dir: dir.into(),
            name: name.into(),
        }
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}.txt", self.name))
    }
}

/// Directory holding the bundled datasets. `GRAPHMIX_DATA_DIR` overrides the
/// default `data/` at the workspace root.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os("GRAPHMIX_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// A graph as stored on disk, before feature encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedGraph {
    pub num_nodes: usize,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub node_labels: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDataset {
    pub name: String,
    pub graphs: Vec<ParsedGraph>,
    /// Contiguous class index of each graph.
    pub labels: Vec<usize>,
    /// Original label value of each class index, ascending.
    pub label_values: Vec<i64>,
}

impl ParsedDataset {
    pub fn classes(&self) -> usize {
        self.label_values.len()
    }

    pub fn has_node_labels(&self) -> bool {
        !self.graphs.is_empty() && self.graphs.iter().all(|g| g.node_labels.is_some())
    }

    /// Distinct node labels across the dataset, ascending.
    pub fn node_label_values(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self
            .graphs
            .iter()
            .filter_map(|g| g.node_labels.as_ref())
            .flatten()
            .copied()
            .collect();
        set.into_iter().collect()
    }

    pub fn max_degree(&self) -> usize {
        self.graphs
            .iter()
            .map(|g| {
                let mut deg = vec![0usize; g.num_nodes];
                for &(i, j) in &g.edges {
                    deg[i] += 1;
                    deg[j] += 1;
                }
                deg.into_iter().max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_ints(path: &Path, line: usize, text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<i64>()
                .map_err(|_| parse_err(path, line, format!("expected an integer, found {t:?}")))
        })
        .collect()
}

fn parse_single(path: &Path, line: usize, text: &str) -> Result<i64> {
    let v = parse_ints(path, line, text)?;
    if v.len() != 1 {
        return Err(parse_err(path, line, format!("expected one value, found {}", v.len())));
    }
    Ok(v[0])
}

/// Reads a dataset. Node and graph ids are 1-based on disk; directed edge
/// pairs collapse into undirected edges and self-loops are dropped.
pub fn parse_tudataset(files: &TuDatasetFiles) -> Result<ParsedDataset> {
    let label_path = files.path("graph_labels");
    let raw_labels: Vec<(usize, i64)> = read_lines(&label_path)?
        .into_iter()
        .map(|(ln, l)| parse_single(&label_path, ln, &l).map(|v| (ln, v)))
        .collect::<Result<_>>()?;
    let num_graphs = raw_labels.len();
    if num_graphs == 0 {
        return Err(parse_err(&label_path, 1, "no graph labels"));
    }

    let ind_path = files.path("graph_indicator");
    let mut node_graph = Vec::new();
    let mut node_local = Vec::new();
    let mut sizes = vec![0usize; num_graphs];
    for (ln, l) in read_lines(&ind_path)? {
        let g = parse_single(&ind_path, ln, &l)?;
        if g < 1 || g as usize > num_graphs {
            return Err(parse_err(
                &ind_path,
                ln,
                format!("graph id {g} outside 1..={num_graphs} (the number of graph labels)"),
            ));
        }
        let g = g as usize - 1;
        node_graph.push(g);
        node_local.push(sizes[g]);
        sizes[g] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(parse_err(
            &label_path,
            raw_labels[empty].0,
            format!("graph {} has no nodes in the indicator file", empty + 1),
        ));
    }
    let total_nodes = node_graph.len();

    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    let a_path = files.path("A");
    for (ln, l) in read_lines(&a_path)? {
        let v = parse_ints(&a_path, ln, &l)?;
        if v.len() != 2 {
            return Err(parse_err(
                &a_path,
                ln,
                format!("expected two node ids, found {}", v.len()),
            ));
        }
        for &id in &v {
            if id < 1 || id as usize > total_nodes {
                return Err(parse_err(
                    &a_path,
                    ln,
                    format!("node id {id} outside 1..={total_nodes} covered by the graph indicator"),
                ));
            }
        }
        let (u, w) = (v[0] as usize - 1, v[1] as usize - 1);
        if node_graph[u] != node_graph[w] {
            return Err(parse_err(
                &a_path,
                ln,
                format!(
                    "edge {} - {} crosses graphs {} and {}",
                    v[0],
                    v[1],
                    node_graph[u] + 1,
                    node_graph[w] + 1
                ),
            ));
        }
        let (i, j) = (node_local[u], node_local[w]);
        if i != j {
            edge_sets[node_graph[u]].insert((i.min(j), i.max(j)));
        }
    }

    let nl_path = files.path("node_labels");
    let node_labels: Option<Vec<i64>> = if nl_path.exists() {
        let rows = read_lines(&nl_path)?;
        if rows.len() != total_nodes {
            return Err(parse_err(
                &nl_path,
                rows.len().min(total_nodes) + 1,
                format!("{} node labels for {total_nodes} nodes", rows.len()),
            ));
        }
        Some(
            rows.into_iter()
                .map(|(ln, l)| {
                    // some datasets list several columns; the first is the label
                    parse_ints(&nl_path, ln, &l).map(|v| v[0])
                })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let mut per_graph_labels: Vec<Vec<i64>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    if let Some(nl) = &node_labels {
        for (u, &lab) in nl.iter().enumerate() {
            per_graph_labels[node_graph[u]].push(lab);
        }
    }
    let label_values: Vec<i64> = raw_labels
        .iter()
        .map(|&(_, v)| v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_of: BTreeMap<i64, usize> = label_values.iter().enumerate().map(|(k, &v)| (v, k)).collect();

    let graphs = sizes
        .iter()
        .zip(edge_sets)
        .zip(per_graph_labels)
        .map(|((&n, edges), labels)| ParsedGraph {
            num_nodes: n,
            edges: edges.into_iter().collect(),
            node_labels: node_labels.as_ref().map(|_| labels),
        })
        .collect();
    Ok(ParsedDataset {
        name: files.name.clone(),
        graphs,
        labels: raw_labels.iter().map(|(_, v)| class_of[v]).collect(),
        label_values,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a dataset in the same text format [`parse_tudataset`] reads.
pub fn write_tudataset(ds: &ParsedDataset, files: &TuDatasetFiles) -> Result<()> {
    fs::create_dir_all(&files.dir).map_err(|e| Error::io(&files.dir, e))?;
    let (mut a, mut ind, mut labels, mut nl) = (String::new(), String::new(), String::new(), String::new());
    let mut offset = 0;
    for (gi, g) in ds.graphs.iter().enumerate() {
        for &(i, j) in &g.edges {
            let (u, w) = (offset + i + 1, offset + j + 1);
            let _ = writeln!(a, "{u}, {w}");
            let _ = writeln!(a, "{w}, {u}");
        }
        for _ in 0..g.num_nodes {
            let _ = writeln!(ind, "{}", gi + 1);
        }
        if let Some(l) = &g.node_labels {
            for x in l {
                let _ = writeln!(nl, "{x}");
            }
        }
        let _ = writeln!(labels, "{}", ds.label_values[ds.labels[gi]]);
        offset += g.num_nodes;
    }
    write_file(&files.path("A"), &a)?;
    write_file(&files.path("graph_indicator"), &ind)?;
    write_file(&files.path("graph_labels"), &labels)?;
    if ds.has_node_labels() {
        write_file(&files.path("node_labels"), &nl)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureEncoding {
    OneHotLabels,
    OneHotDegree,
}

impl FeatureEncoding {
    /// Node labels when every graph has them, degrees otherwise.
    pub fn auto(ds: &ParsedDataset) -> Self {
        if ds.has_node_labels() {
            FeatureEncoding::OneHotLabels
        } else {
            FeatureEncoding::OneHotDegree
        }
    }
}

impl std::str::FromStr for FeatureEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_hot_labels" | "labels" => Ok(FeatureEncoding::OneHotLabels),
            "one_hot_degree" | "degree" => Ok(FeatureEncoding::OneHotDegree),
            _ => Err(Error::Config(format!("unknown feature encoding {s:?}"))),
        }
    }
}

/// Turns parsed graphs into featured graphs with one-hot labels.
pub fn encode_node_features(ds: &ParsedDataset, mode: FeatureEncoding) -> Result<GraphDataset> {
    let classes = ds.classes();
    let (d, index): (usize, Box<dyn Fn(&ParsedGraph, usize, &[usize]) -> usize>) = match mode {
        FeatureEncoding::OneHotLabels => {
            if let Some(k) = ds.graphs.iter().position(|g| g.node_labels.is_none()) {
                return Err(Error::Data(format!(
                    "{}: graph {} has no node labels; use the degree encoding",
                    ds.name,
                    k + 1
                )));
            }
            let values = ds.node_label_values();
            let pos: BTreeMap<i64, usize> = values.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            (
                values.len(),
                Box::new(move |g, i, _| pos[&g.node_labels.as_ref().expect("checked")[i]]),
            )
        }
        FeatureEncoding::OneHotDegree => (ds.max_degree() + 1, Box::new(|_, i, deg| deg[i])),
    };
    let mut out = GraphDataset::new(ds.name.clone(), classes, d);
    for (g, &label) in ds.graphs.iter().zip(&ds.labels) {
        let mut deg = vec![0usize; g.num_nodes];
        for &(i, j) in &g.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut features = Array2::zeros((g.num_nodes, d));
        for i in 0..g.num_nodes {
            features[[i, index(g, i, &deg)]] = 1.0;
        }
        let graph = NodeFeaturedGraph::from_edges(features, &g.edges)?;
        out.push(graph, LabelDistribution::one_hot(label, classes))?;
    }
    Ok(out)
}

/// Parses and encodes in one step, picking the encoding automatically.
pub fn load_dataset(dir: &Path, name: &str) -> Result<GraphDataset> {
    let parsed = parse_tudataset(&TuDatasetFiles::new(dir, name))?;
    encode_node_features(&parsed, FeatureEncoding::auto(&parsed))
}

/// Published statistics of a benchmark. `edges` counts directed entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceStats {
    pub names: &'static [&'static str],
    pub graphs: usize,
    pub nodes: f64,
    pub edges: f64,
    pub feature_dim: Option<usize>,
    pub classes: usize,
}

pub const REFERENCE_STATS: [ReferenceStats; 8] = [
    ReferenceStats {
        names: &["PTC_MR"],
        graphs: 334,
        nodes: 14.3,
        edges: 29.4,
        feature_dim: Some(18),
        classes: 2,
    },
    ReferenceStats {
        names: &["NCI109"],
        graphs: 4127,
        nodes: 29.7,
        edges: 64.3,
        feature_dim: Some(38),
        classes: 2,
    },
    ReferenceStats {
        names: &["NCI1"],
        graphs: 4110,
        nodes: 29.9,
        edges: 64.6,
        feature_dim: Some(37),
        classes: 2,
    },
    ReferenceStats {
        names: &["MUTAG"],
        graphs: 188,
        nodes: 17.9,
        edges: 39.6,
        feature_dim: Some(7),
        classes: 2,
    },
    ReferenceStats {
        names: &["ENZYMES"],
        graphs: 600,
        nodes: 32.6,
        edges: 124.3,
        feature_dim: Some(3),
        classes: 6,
    },
    ReferenceStats {
        names: &["PROTEINS"],
        graphs: 1113,
        nodes: 39.1,
        edges: 145.6,
        feature_dim: Some(3),
        classes: 2,
    },
    ReferenceStats {
        names: &["IMDB-M", "IMDB-MULTI"],
        graphs: 1500,
        nodes: 13.0,
        edges: 65.9,
        feature_dim: Some(89),
        classes: 3,
    },
    ReferenceStats {
        names: &["IMDB-B", "IMDB-BINARY"],
        graphs: 1000,
        nodes: 19.8,
        edges: 96.5,
        feature_dim: None,
        classes: 2,
    },
];

pub const STATS_TOL: f64 = 0.1;

pub fn reference_stats(name: &str) -> Option<&'static ReferenceStats> {
    REFERENCE_STATS
        .iter()
        .find(|r| r.names.iter().any(|n| n.eq_ignore_ascii_case(name)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatCheck {
    pub field: String,
    pub expected: f64,
    pub actual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub name: String,
    pub summary: DatasetSummary,
    /// Empty for datasets without published statistics.
    pub checks: Vec<StatCheck>,
}

impl StatsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "dataset:     {}", self.name);
        let _ = writeln!(out, "graphs:      {}", s.graphs);
        let _ = writeln!(out, "mean nodes:  {:.2}", s.mean_nodes);
        let _ = writeln!(
            out,
            "mean edges:  {:.2} (undirected, {:.2} directed)",
            s.mean_edges,
            2.0 * s.mean_edges
        );
        let _ = writeln!(out, "feature dim: {}", s.feature_dim);
        let _ = writeln!(out, "classes:     {}", s.classes);
        if !self.checks.is_empty() {
            let _ = writeln!(
                out,
                "reference comparison (means within {STATS_TOL}; edges halved to undirected):"
            );
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "  {:<12} expected {:>9.2}  actual {:>9.2}  {}",
                    c.field,
                    c.expected,
                    c.actual,
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
        }
        out
    }
}

/// Summary statistics plus a comparison with the published figures when the
/// dataset is a known benchmark.
pub fn dataset_stats(ds: &GraphDataset) -> StatsReport {
    let summary = degree_stats(ds);
    let mut checks = Vec::new();
    if let Some(r) = reference_stats(&ds.name) {
        let exact = |field: &str, e: usize, a: usize| StatCheck {
            field: field.into(),
            expected: e as f64,
            actual: a as f64,
            passed: e == a,
        };
        let near = |field: &str, e: f64, a: f64| StatCheck {
            field: field.into(),
            expected: e,
            actual: a,
            passed: (e - a).abs() <= STATS_TOL + 1e-9,
        };
        checks.push(exact("graphs", r.graphs, summary.graphs));
        checks.push(near("mean_nodes", r.nodes, summary.mean_nodes));
        checks.push(near("mean_edges", r.edges / 2.0, summary.mean_edges));
        if let Some(d) = r.feature_dim {
            checks.push(exact("feature_dim", d, summary.feature_dim));
        }
        checks.push(exact("classes", r.classes, summary.classes));
    }
    StatsReport {
        name: ds.name.clone(),
        summary,
        checks,
    }
}

/// Where a mixed graph's sources came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceRef {
    pub dir: PathBuf,
    pub name: String,
    pub encoding: FeatureEncoding,
}

/// Metadata stored next to a mixed graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixSidecar {
    pub format: String,
    pub version: u32,
    pub lambda: f64,
    pub label: LabelDistribution,
    /// 0-based indices of the sources in their dataset.
    pub source_ids: (usize, usize),
    pub feature_dim: usize,
    /// Feature vocabulary of the source dataset.
    pub vocabulary: Vec<Vec<f64>>,
    pub source: Option<SourceRef>,
}

pub const MIX_FORMAT: &str = "graphmix-mixed-graph";

pub fn sidecar_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}_mix.json"))
}

/// Writes one mixed graph as `NAME_A.txt`, `NAME_graph_indicator.txt`,
/// `NAME_edge_weights.txt` (one weight per edge line),
/// `NAME_node_attributes.txt` and the `NAME_mix.json` sidecar.
pub fn write_mixed_sample(
    dir: &Path,
    name: &str,
    sample: &MixedSample,
    vocabulary: Vec<Vec<f64>>,
    source: Option<SourceRef>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = TuDatasetFiles::new(dir, name);
    let g = &sample.graph;
    let (mut a, mut w, mut ind, mut attr) = (String::new(), String::new(), String::new(), String::new());
    for i in 0..g.num_nodes() {
        for j in 0..g.num_nodes() {
            let x = g.weights[[i, j]];
            if x != 0.0 {
                let _ = writeln!(a, "{}, {}", i + 1, j + 1);
                let _ = writeln!(w, "{x}");
            }
        }
        let _ = writeln!(ind, "1");
        let row: Vec<String> = g.features.row(i).iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(attr, "{}", row.join(", "));
    }
    write_file(&files.path("A"), &a)?;
    write_file(&files.path("edge_weights"), &w)?;
    write_file(&files.path("graph_indicator"), &ind)?;
    write_file(&files.path("node_attributes"), &attr)?;
    let sidecar = MixSidecar {
        format: MIX_FORMAT.into(),
        version: 1,
        lambda: sample.lambda,
        label: sample.label.clone(),
        source_ids: sample.source_ids,
        feature_dim: g.feature_dim(),
        vocabulary,
        source,
    };
    write_file(&sidecar_path(dir, name), &serde_json::to_string_pretty(&sidecar)?)
}

fn parse_floats(path: &Path, line: usize, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| parse_err(path, line, format!("expected a number, found {t:?}")))
        })
        .collect()
}

/// Reads a mixed graph written by [`write_mixed_sample`].
pub fn read_mixed_sample(dir: &Path, name: &str) -> Result<(NodeFeaturedGraph, MixSidecar)> {
    let side_path = sidecar_path(dir, name);
    if !side_path.exists() {
        return Err(Error::MissingFile(side_path));
    }
    let text = fs::read_to_string(&side_path).map_err(|e| Error::io(&side_path, e))?;
    let sidecar: MixSidecar = serde_json::from_str(&text)?;
    if sidecar.format != MIX_FORMAT {
        return Err(Error::Data(format!(
            "{}: not a mixed-graph sidecar",
            side_path.display()
        )));
    }
    let files = TuDatasetFiles::new(dir, name);
    let ind_path = files.path("graph_indicator");
    let n = read_lines(&ind_path)?.len();
    let attr_path = files.path("node_attributes");
    let rows = read_lines(&attr_path)?;
    if rows.len() != n {
        return Err(parse_err(
            &attr_path,
            rows.len() + 1,
            format!("{} attribute rows for {n} nodes", rows.len()),
        ));
    }
    let d = sidecar.feature_dim;
    let mut features = Array2::zeros((n, d));
    for (i, (ln, l)) in rows.iter().enumerate() {
        let v = parse_floats(&attr_path, *ln, l)?;
        if v.len() != d {
            return Err(parse_err(
                &attr_path,
                *ln,
                format!("expected {d} values, found {}", v.len()),
            ));
        }
        features.row_mut(i).assign(&ndarray::Array1::from(v));
    }
    let a_path = files.path("A");
    let w_path = files.path("edge_weights");
    let edges = read_lines(&a_path)?;
    let weights = read_lines(&w_path)?;
    if edges.len() != weights.len() {
        return Err(parse_err(
            &w_path,
            weights.len().min(edges.len()) + 1,
            format!("{} weights for {} edge lines", weights.len(), edges.len()),
        ));
    }
    let mut e = Array2::zeros((n, n));
    for ((ln, l), (wl, wt)) in edges.iter().zip(&weights) {
        let v = parse_ints(&a_path, *ln, l)?;
        if v.len() != 2 || v.iter().any(|&x| x < 1 || x as usize > n) {
            return Err(parse_err(&a_path, *ln, format!("bad edge {l:?} for {n} nodes")));
        }
        let x = parse_single_float(&w_path, *wl, wt)?;
        e[[v[0] as usize - 1, v[1] as usize - 1]] = x;
    }
    Ok((NodeFeaturedGraph::new(features, e)?, sidecar))
}

fn parse_single_float(path: &Path, line: usize, text: &str) -> Result<f64> {
    let v = parse_floats(path, line, text)?;
    if v.len() != 1 {
        return Err(parse_err(path, line, "expected one weight"));
    }
    Ok(v[0])
}

/// Random labelled dataset for tests and demos. Graphs of class `c` favour
/// node label `c` and get denser with `c`, so the classes are learnable.
pub fn synthetic_dataset<R: Rng + ?Sized>(
    name: &str,
    graphs: usize,
    classes: usize,
    node_labels: usize,
    rng: &mut R,
) -> ParsedDataset {
    let mut out = Vec::with_capacity(graphs);
    let mut labels = Vec::with_capacity(graphs);
    for k in 0..graphs {
        let c = k % classes;
        let n = rng.random_range(4..=10);
        let p = 0.2 + 0.3 * c as f64 / classes.max(1) as f64;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        let nl = (0..n)
            .map(|_| {
                if rng.random::<f64>() < 0.5 {
                    (c % node_labels) as i64
                } else {
                    rng.random_range(0..node_labels) as i64
                }
            })
            .collect();
        out.push(ParsedGraph {
            num_nodes: n,
            edges,
            node_labels: Some(nl),
        });
        labels.push(c);
    }
    ParsedDataset {
        name: name.into(),
        graphs: out,
        labels,
        label_values: (0..classes.min(graphs) as i64).collect(),
    }
}

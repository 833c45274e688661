//! Recovery of the source pair from a mixed graph.
//!
//! Edge weights of a mix of two binary graphs take at most four values
//! `{0, λ, 1−λ, 1}`; reading them back gives the two edge matrices and the
//! ratio up to the mirror `(λ, A, B) ↔ (1−λ, B, A)`. Node features are then
//! decomposed against the feature vocabulary, either directly when the
//! vocabulary is linearly independent or through the coefficient matrices of
//! a basis of its span.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{feature_vocabulary, FeatureBasis, GraphDataset, NodeFeaturedGraph};
use crate::linalg::{self, PIVOT_TOL};
use crate::mixer::{mix_labels, mix_pair, sample_lambda_distinguishable, BetaParams};

/// Default matching tolerance for recovery.
pub const RECOVERY_TOL: f64 = 1e-9;

/// Node pairs `(i, j)`, `i < j`, split by the entries of `(e, e')`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgePartition {
    pub m00: Vec<(usize, usize)>,
    pub m01: Vec<(usize, usize)>,
    pub m10: Vec<(usize, usize)>,
    pub m11: Vec<(usize, usize)>,
}

impl EdgePartition {
    pub fn len(&self) -> usize {
        self.m00.len() + self.m01.len() + self.m10.len() + self.m11.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One solution `(s, e, e')` of `s·e + (1−s)·e' = ẽ` with binary `e`, `e'`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSolution {
    pub s: f64,
    pub e: Array2<f64>,
    pub e_prime: Array2<f64>,
    pub partition: EdgePartition,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeRecovery {
    /// The two mirrored solutions, the one with `s < 0.5` first.
    Mirrored([EdgeSolution; 2]),
    /// `ẽ` is already binary: both sources share it and `s` is undetermined.
    Degenerate { e: Array2<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeClass {
    Zero,
    One,
    Low,
    High,
}

/// Solves `s·e + (1−s)·e' = ẽ` for binary symmetric `e`, `e'`.
pub fn edge_solutions(mixed: &Array2<f64>, tol: f64) -> Result<EdgeRecovery> {
    let n = mixed.nrows();
    if mixed.ncols() != n {
        return Err(Error::dims("edge matrix columns", n, mixed.ncols()));
    }
    let mut centers: Vec<f64> = Vec::new();
    for i in 0..n {
        if mixed[[i, i]].abs() > tol {
            return Err(Error::NotBinaryMix(format!("nonzero diagonal at ({i},{i})")));
        }
        for j in i + 1..n {
            let w = mixed[[i, j]];
            if (w - mixed[[j, i]]).abs() > tol {
                return Err(Error::NotBinaryMix(format!("asymmetric at ({i},{j})")));
            }
            if !(-tol..=1.0 + tol).contains(&w) {
                return Err(Error::NotBinaryMix(format!("weight {w} at ({i},{j}) outside [0,1]")));
            }
            if w.abs() > tol && (w - 1.0).abs() > tol && !centers.iter().any(|c| (c - w).abs() <= tol) {
                centers.push(w);
            }
        }
    }
    if centers.is_empty() {
        let e = mixed.mapv(|w| if w > 0.5 { 1.0 } else { 0.0 });
        return Ok(EdgeRecovery::Degenerate { e });
    }
    if centers.len() > 2 {
        return Err(Error::NotBinaryMix(format!(
            "{} distinct fractional weights (at most two allowed): {:?}",
            centers.len(),
            centers
        )));
    }
    centers.sort_by(|a, b| a.total_cmp(b));
    let (low, high) = match centers[..] {
        [x] if x < 0.5 => (x, 1.0 - x),
        [x] => (1.0 - x, x),
        [x, y] => {
            if (x + y - 1.0).abs() > 2.0 * tol {
                return Err(Error::NotBinaryMix(format!(
                    "fractional weights {x} and {y} do not sum to 1"
                )));
            }
            (x, y)
        }
        _ => unreachable!(),
    };
    if (low - 0.5).abs() < tol || (high - 0.5).abs() < tol {
        return Err(Error::IndistinguishableRatio { tol });
    }

    let mut classes = Array2::from_elem((n, n), EdgeClass::Zero);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = mixed[[i, j]];
            classes[[i, j]] = if w.abs() <= tol {
                EdgeClass::Zero
            } else if (w - 1.0).abs() <= tol {
                EdgeClass::One
            } else if (w - low).abs() <= tol {
                EdgeClass::Low
            } else {
                EdgeClass::High
            };
        }
    }

    // s = low: e carries the Low entries, e' the High entries.
    let build = |s: f64, e_class: EdgeClass| -> EdgeSolution {
        let mut e = Array2::zeros((n, n));
        let mut e_prime = Array2::zeros((n, n));
        let mut partition = EdgePartition::default();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let c = classes[[i, j]];
                let (x, y) = match c {
                    EdgeClass::Zero => (0.0, 0.0),
                    EdgeClass::One => (1.0, 1.0),
                    other if other == e_class => (1.0, 0.0),
                    _ => (0.0, 1.0),
                };
                e[[i, j]] = x;
                e_prime[[i, j]] = y;
                if i < j {
                    let bucket = match (x == 1.0, y == 1.0) {
                        (false, false) => &mut partition.m00,
                        (false, true) => &mut partition.m01,
                        (true, false) => &mut partition.m10,
                        (true, true) => &mut partition.m11,
                    };
                    bucket.push((i, j));
                }
            }
        }
        EdgeSolution {
            s,
            e,
            e_prime,
            partition,
        }
    };
    Ok(EdgeRecovery::Mirrored([
        build(low, EdgeClass::Low),
        build(high, EdgeClass::High),
    ]))
}

/// Coordinates of feature rows in a linearly independent vocabulary.
struct VocabularyCoords {
    vocab: Array2<f64>,
    gram_inv: Array2<f64>,
}

impl VocabularyCoords {
    fn new(vocabulary: &[Vec<f64>], d: usize) -> Result<Self> {
        if vocabulary.is_empty() {
            return Ok(Self {
                vocab: Array2::zeros((0, d)),
                gram_inv: Array2::zeros((0, 0)),
            });
        }
        let vocab = linalg::stack_rows(vocabulary);
        if vocab.ncols() != d {
            return Err(Error::dims("vocabulary feature dimension", d, vocab.ncols()));
        }
        let gram = linalg::gram(vocab.view());
        let gram_inv = linalg::inverse(gram.view(), PIVOT_TOL)
            .ok_or_else(|| Error::Data("feature vocabulary is not linearly independent".into()))?;
        Ok(Self { vocab, gram_inv })
    }

    fn coords(&self, rows: &Array2<f64>) -> (Array2<f64>, f64) {
        if self.vocab.nrows() == 0 {
            let resid = rows.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            return (Array2::zeros((rows.nrows(), 0)), resid);
        }
        linalg::project_rows(rows.view(), self.vocab.view(), self.gram_inv.view())
    }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Decomposes every row of `ṽ = s·v + (1−s)·v'` into a pair of rows of
/// `V* = V ∪ {0}` for a linearly independent vocabulary `V`.
pub fn recover_features_independent(
    mixed: &Array2<f64>,
    s: f64,
    vocabulary: &[Vec<f64>],
    tol: f64,
) -> Result<(Array2<f64>, Array2<f64>)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidLambda(s));
    }
    let d = mixed.ncols();
    let vc = VocabularyCoords::new(vocabulary, d)?;
    let (coords, _) = vc.coords(mixed);
    let n = mixed.nrows();
    let mut v = Array2::zeros((n, d));
    let mut v_prime = Array2::zeros((n, d));
    for i in 0..n {
        let row = mixed.row(i);
        let c = coords.row(i);
        let recon = if vc.vocab.nrows() == 0 {
            Array1::zeros(d)
        } else {
            c.dot(&vc.vocab)
        };
        let resid = row.iter().zip(&recon).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if resid > tol {
            return Err(Error::FeatureRecovery {
                row: i,
                reason: format!("row lies outside SPAN(V) (residual {resid:e})"),
            });
        }
        let support: Vec<usize> = (0..c.len()).filter(|&k| c[k].abs() > tol).collect();
        match support[..] {
            [] => {}
            [u] => {
                let coef = c[u];
                let (to_v, to_vp) = if near(coef, 1.0, tol) {
                    (true, true)
                } else if near(coef, s, tol) && near(coef, 1.0 - s, tol) {
                    return Err(Error::FeatureRecovery {
                        row: i,
                        reason: "coefficient matches both s and 1-s".into(),
                    });
                } else if near(coef, s, tol) {
                    (true, false)
                } else if near(coef, 1.0 - s, tol) {
                    (false, true)
                } else {
                    return Err(Error::FeatureRecovery {
                        row: i,
                        reason: format!("scale {coef} of a vocabulary vector is neither s={s} nor 1-s"),
                    });
                };
                if to_v {
                    v.row_mut(i).assign(&vc.vocab.row(u));
                }
                if to_vp {
                    v_prime.row_mut(i).assign(&vc.vocab.row(u));
                }
            }
            [u, w] => {
                let (a, b) = (c[u], c[w]);
                if !(a > 0.0 && b > 0.0 && near(a + b, 1.0, tol)) {
                    return Err(Error::FeatureRecovery {
                        row: i,
                        reason: format!("coefficients {a}, {b} are not a convex pair"),
                    });
                }
                let (first, second) = if near(a, s, tol) && near(b, 1.0 - s, tol) {
                    (u, w)
                } else if near(a, 1.0 - s, tol) && near(b, s, tol) {
                    (w, u)
                } else {
                    return Err(Error::FeatureRecovery {
                        row: i,
                        reason: format!("coefficients {a}, {b} do not match s={s}"),
                    });
                };
                v.row_mut(i).assign(&vc.vocab.row(first));
                v_prime.row_mut(i).assign(&vc.vocab.row(second));
            }
            _ => {
                return Err(Error::FeatureRecovery {
                    row: i,
                    reason: format!("row mixes {} vocabulary vectors", support.len()),
                })
            }
        }
    }
    Ok((v, v_prime))
}

fn padded(t: &Array2<f64>, n: usize) -> Array2<f64> {
    let mut out = Array2::zeros((n, t.ncols()));
    out.slice_mut(ndarray::s![..t.nrows(), ..]).assign(t);
    out
}

/// Ordered pairs `(T, T')` from the coefficient set whose padded convex
/// combination with ratio `s` matches `t_mixed`.
fn matching_coefficient_pairs(t_mixed: &Array2<f64>, set: &[Array2<f64>], s: f64, tol: f64) -> Vec<(usize, usize)> {
    let n = t_mixed.nrows();
    let cands: Vec<(usize, Array2<f64>)> = set
        .iter()
        .enumerate()
        .filter(|(_, t)| t.nrows() <= n)
        .map(|(k, t)| (k, padded(t, n)))
        .collect();
    let mut out = Vec::new();
    for (ka, ta) in &cands {
        for (kb, tb) in &cands {
            if set[*ka].nrows().max(set[*kb].nrows()) != n {
                continue;
            }
            let ok = ta
                .iter()
                .zip(tb.iter())
                .zip(t_mixed.iter())
                .all(|((&x, &y), &z)| (s * x + (1.0 - s) * y - z).abs() <= tol);
            if ok {
                out.push((*ka, *kb));
            }
        }
    }
    out
}

/// Recovers `(v, v')` with `v = T·B`, `v' = T'·B` for `T, T'` in the
/// dataset's coefficient set.
pub fn recover_features_basis(
    mixed: &Array2<f64>,
    s: f64,
    basis: &FeatureBasis,
    tol: f64,
) -> Result<(Array2<f64>, Array2<f64>)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidLambda(s));
    }
    let (t_mixed, resid) = basis.project(mixed);
    if resid > tol {
        return Err(Error::FeatureRecovery {
            row: 0,
            reason: format!("features lie outside SPAN(V) (residual {resid:e})"),
        });
    }
    let set = basis.coefficient_set();
    let matches = matching_coefficient_pairs(&t_mixed, &set, s, tol);
    let n = mixed.nrows();
    match matches[..] {
        [(a, b)] => Ok((
            padded(&set[a], n).dot(&basis.basis),
            padded(&set[b], n).dot(&basis.basis),
        )),
        [] => Err(Error::FeatureRecovery {
            row: 0,
            reason: "no coefficient pair from the dataset matches the mixed features".into(),
        }),
        _ => Err(Error::FeatureRecovery {
            row: 0,
            reason: format!("{} coefficient pairs match; the set is not independent", matches.len()),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    /// Vocabulary `V` linearly independent.
    Independent,
    /// Coefficient set 𝒯 linearly independent.
    Basis,
}

/// A recovered source pair. `lambda` is `None` when both sources are
/// identical and the ratio cannot be determined. When it is known it is
/// reported in the canonical orientation `lambda > 0.5`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveredPair {
    pub graph_a: NodeFeaturedGraph,
    pub graph_b: NodeFeaturedGraph,
    pub lambda: Option<f64>,
}

impl RecoveredPair {
    /// The same decomposition read the other way round.
    pub fn mirrored(&self) -> Self {
        Self {
            graph_a: self.graph_b.clone(),
            graph_b: self.graph_a.clone(),
            lambda: self.lambda.map(|l| 1.0 - l),
        }
    }

    /// Whether this decomposition describes mixing `a` and `b` with ratio
    /// `lambda` (in either orientation).
    pub fn matches(&self, a: &NodeFeaturedGraph, b: &NodeFeaturedGraph, lambda: f64, tol: f64) -> bool {
        match self.lambda {
            None => self.graph_a == *a && self.graph_b == *b,
            Some(l) => {
                (self.graph_a == *a && self.graph_b == *b && (l - lambda).abs() <= tol)
                    || (self.graph_a == *b && self.graph_b == *a && (l - (1.0 - lambda)).abs() <= tol)
            }
        }
    }
}

/// Removes trailing nodes with all-zero features and zero degree.
fn strip_dummies(features: Array2<f64>, edges: Array2<f64>, tol: f64) -> NodeFeaturedGraph {
    let mut n = features.nrows();
    while n > 1 {
        let i = n - 1;
        let zero_feat = features.row(i).iter().all(|x| x.abs() <= tol);
        let isolated = edges.row(i).iter().take(n).all(|&w| w == 0.0);
        if zero_feat && isolated {
            n -= 1;
        } else {
            break;
        }
    }
    let mut features = features.slice(ndarray::s![..n, ..]).to_owned();
    features.mapv_inplace(|x| if x.abs() <= tol { 0.0 } else { x });
    NodeFeaturedGraph {
        features,
        weights: edges.slice(ndarray::s![..n, ..n]).to_owned(),
    }
}

fn recover_features(
    mixed: &Array2<f64>,
    s: f64,
    basis: &FeatureBasis,
    mode: RecoveryMode,
    tol: f64,
) -> Result<(Array2<f64>, Array2<f64>)> {
    match mode {
        RecoveryMode::Independent => recover_features_independent(mixed, s, &basis.vocabulary, tol),
        RecoveryMode::Basis => recover_features_basis(mixed, s, basis, tol),
    }
}

/// Finds the mixing ratio from the features alone (used when the edges do not
/// reveal it). `None` means the features are consistent with identical sources.
fn ratio_from_features(mixed: &Array2<f64>, basis: &FeatureBasis, mode: RecoveryMode, tol: f64) -> Result<Option<f64>> {
    match mode {
        RecoveryMode::Independent => {
            let vc = VocabularyCoords::new(&basis.vocabulary, mixed.ncols())?;
            let (coords, resid) = vc.coords(mixed);
            if resid > tol {
                return Err(Error::FeatureRecovery {
                    row: 0,
                    reason: format!("features lie outside SPAN(V) (residual {resid:e})"),
                });
            }
            Ok(coords
                .iter()
                .copied()
                .find(|&c| c.abs() > tol && (c - 1.0).abs() > tol)
                .map(|c| c.max(1.0 - c)))
        }
        RecoveryMode::Basis => {
            let (t_mixed, resid) = basis.project(mixed);
            if resid > tol {
                return Err(Error::FeatureRecovery {
                    row: 0,
                    reason: format!("features lie outside SPAN(V) (residual {resid:e})"),
                });
            }
            let n = t_mixed.nrows();
            let set = basis.coefficient_set();
            let padded_set: Vec<Array2<f64>> = set.iter().filter(|t| t.nrows() <= n).map(|t| padded(t, n)).collect();
            if padded_set
                .iter()
                .any(|t| linalg::max_abs_diff(t.view(), t_mixed.view()) <= tol)
            {
                return Ok(None);
            }
            // t_mixed - t' = s (t - t')
            for ta in &padded_set {
                for tb in &padded_set {
                    let diff = ta - tb;
                    let norm2: f64 = diff.iter().map(|x| x * x).sum();
                    if norm2 == 0.0 {
                        continue;
                    }
                    let target = &t_mixed - tb;
                    let s = diff.iter().zip(target.iter()).map(|(a, b)| a * b).sum::<f64>() / norm2;
                    if s > 0.5 && s < 1.0 && linalg::max_abs_diff((&diff * s).view(), target.view()) <= tol {
                        return Ok(Some(s));
                    }
                }
            }
            Err(Error::FeatureRecovery {
                row: 0,
                reason: "no coefficient pair explains the mixed features".into(),
            })
        }
    }
}

/// Recovers both source graphs and the ratio from a mixed graph.
pub fn recover_pair(
    mixed: &NodeFeaturedGraph,
    basis: &FeatureBasis,
    mode: RecoveryMode,
    tol: f64,
) -> Result<RecoveredPair> {
    if mixed.feature_dim() != basis.feature_dim() {
        return Err(Error::dims(
            "recover_pair feature dimension",
            basis.feature_dim(),
            mixed.feature_dim(),
        ));
    }
    if mode == RecoveryMode::Independent && !basis.vocabulary_independent() {
        return Err(Error::Data(
            "independent-mode recovery needs a linearly independent vocabulary".into(),
        ));
    }
    let n = mixed.num_nodes();
    let (lambda, e_a, e_b) = match edge_solutions(&mixed.weights, tol)? {
        EdgeRecovery::Mirrored([_, high]) => (Some(high.s), high.e, high.e_prime),
        EdgeRecovery::Degenerate { e } => {
            let lambda = ratio_from_features(&mixed.features, basis, mode, tol)?;
            (lambda, e.clone(), e)
        }
    };
    let Some(lambda) = lambda else {
        let g = strip_dummies(mixed.features.clone(), e_a, tol);
        return Ok(RecoveredPair {
            graph_a: g.clone(),
            graph_b: g,
            lambda: None,
        });
    };
    if (lambda - 0.5).abs() < tol {
        return Err(Error::IndistinguishableRatio { tol });
    }
    let (v_a, v_b) = recover_features(&mixed.features, lambda, basis, mode, tol)
        .map_err(|e| Error::InconsistentRecovery(format!("edges give ratio {lambda} but features disagree: {e}")))?;
    let graph_a = strip_dummies(v_a, e_a, tol);
    let graph_b = strip_dummies(v_b, e_b, tol);
    let out = RecoveredPair {
        graph_a,
        graph_b,
        lambda: Some(lambda),
    };
    let remix = mix_pair(&out.graph_a, &out.graph_b, lambda)?;
    let remix = remix.with_dummy_nodes(n.saturating_sub(remix.num_nodes()));
    if remix.num_nodes() != n
        || linalg::max_abs_diff(remix.weights.view(), mixed.weights.view()) > tol.max(1e-9)
        || linalg::max_abs_diff(remix.features.view(), mixed.features.view()) > tol.max(1e-9)
    {
        return Err(Error::InconsistentRecovery(
            "re-mixing the recovered pair does not reproduce the input".into(),
        ));
    }
    Ok(out)
}

/// Picks the recovery mode a dataset supports, if any.
pub fn recovery_mode_for(basis: &FeatureBasis) -> Option<RecoveryMode> {
    if basis.vocabulary_independent() {
        Some(RecoveryMode::Independent)
    } else if basis.coefficients_independent().independent {
        Some(RecoveryMode::Basis)
    } else {
        None
    }
}

/// Result of [`intrusion_audit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub dataset: String,
    pub mode: Option<RecoveryMode>,
    pub assumption_violated: bool,
    pub trials: usize,
    pub identical_pairs: usize,
    pub collisions: usize,
    pub recovery_failures: usize,
    pub first_failure: Option<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        !self.assumption_violated && self.collisions == 0 && self.recovery_failures == 0
    }
}

fn graph_key(g: &NodeFeaturedGraph) -> Vec<u64> {
    let mut key = vec![g.num_nodes() as u64, g.feature_dim() as u64];
    key.extend(g.features.iter().map(|x| x.to_bits()));
    key.extend(g.weights.iter().map(|x| x.to_bits()));
    key
}

/// Mixes random pairs and checks that no mix coincides with a training graph
/// of a different label and that every mix recovers its true sources.
pub fn intrusion_audit<R: Rng + ?Sized>(
    ds: &GraphDataset,
    trials: usize,
    params: BetaParams,
    rng: &mut R,
) -> Result<AuditReport> {
    params.validate()?;
    let basis = feature_vocabulary(ds)?;
    let mode = recovery_mode_for(&basis);
    let mut report = AuditReport {
        dataset: ds.name.clone(),
        mode,
        assumption_violated: mode.is_none(),
        trials: 0,
        identical_pairs: 0,
        collisions: 0,
        recovery_failures: 0,
        first_failure: None,
    };
    let Some(mode) = mode else {
        return Ok(report);
    };
    let mut index: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for (k, it) in ds.items.iter().enumerate() {
        index.entry(graph_key(&it.graph)).or_default().push(k);
    }
    for trial in 0..trials {
        let i = rng.random_range(0..ds.len());
        let j = rng.random_range(0..ds.len());
        let lambda = sample_lambda_distinguishable(params, 1e-6, rng);
        let (a, b) = (&ds.items[i], &ds.items[j]);
        let mixed = mix_pair(&a.graph, &b.graph, lambda)?;
        let label = mix_labels(&a.label, &b.label, lambda)?;
        if a.graph == b.graph {
            report.identical_pairs += 1;
        }
        report.trials += 1;
        if let Some(hits) = index.get(&graph_key(&mixed)) {
            if let Some(&k) = hits.iter().find(|&&k| ds.items[k].label != label) {
                report.collisions += 1;
                report.first_failure.get_or_insert_with(|| {
                    format!(
                        "trial {trial}: mix of {i} and {j} (lambda {lambda}) equals graph {k} with a different label"
                    )
                });
            }
        }
        let ok = match recover_pair(&mixed, &basis, mode, RECOVERY_TOL) {
            Ok(rec) => rec.matches(&a.graph, &b.graph, lambda, 1e-9),
            Err(e) => {
                report.first_failure.get_or_insert_with(|| {
                    format!("trial {trial}: recovering mix of {i} and {j} (lambda {lambda}) failed: {e}")
                });
                false
            }
        };
        if !ok {
            report.recovery_failures += 1;
            report.first_failure.get_or_insert_with(|| {
                format!("trial {trial}: mix of {i} and {j} (lambda {lambda}) recovered the wrong pair")
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LabelDistribution, NodeFeaturedGraph};
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_hots(d: usize) -> Vec<Vec<f64>> {
        (0..d)
            .map(|k| (0..d).map(|j| f64::from(u8::from(j == k))).collect())
            .collect()
    }

    #[test]
    fn single_entry_solutions() {
        let m = array![[0.0, 0.3], [0.3, 0.0]];
        let EdgeRecovery::Mirrored([lo, hi]) = edge_solutions(&m, 1e-9).unwrap() else {
            panic!("expected two solutions");
        };
        assert_eq!(lo.s, 0.3);
        assert_eq!((lo.e[[0, 1]], lo.e_prime[[0, 1]]), (1.0, 0.0));
        assert!((hi.s - 0.7).abs() < 1e-15);
        assert_eq!((hi.e[[0, 1]], hi.e_prime[[0, 1]]), (0.0, 1.0));
    }

    #[test]
    fn partition_table() {
        // pairs (0,1)=0, (0,2)=0.3, (1,2)=0.7, (0,3)=1, others 0
        let mut m = Array2::zeros((4, 4));
        for &(i, j, w) in &[(0, 2, 0.3), (1, 2, 0.7), (0, 3, 1.0)] {
            m[[i, j]] = w;
            m[[j, i]] = w;
        }
        let EdgeRecovery::Mirrored([_, hi]) = edge_solutions(&m, 1e-9).unwrap() else {
            panic!()
        };
        assert!((hi.s - 0.7).abs() < 1e-15);
        assert!(hi.partition.m00.contains(&(0, 1)));
        assert_eq!(hi.partition.m10, vec![(1, 2)]);
        assert_eq!(hi.partition.m01, vec![(0, 2)]);
        assert_eq!(hi.partition.m11, vec![(0, 3)]);
        assert_eq!(hi.partition.len(), 6);
    }

    #[test]
    fn binary_input_is_degenerate() {
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(edge_solutions(&m, 1e-9).unwrap(), EdgeRecovery::Degenerate { e: m });
    }

    #[test]
    fn edge_errors() {
        let mut m = Array2::zeros((4, 4));
        for &(i, j, w) in &[(0, 1, 0.2), (0, 2, 0.3), (1, 2, 0.6)] {
            m[[i, j]] = w;
            m[[j, i]] = w;
        }
        assert!(matches!(edge_solutions(&m, 1e-9), Err(Error::NotBinaryMix(_))));
        let half = array![[0.0, 0.5], [0.5, 0.0]];
        assert!(matches!(
            edge_solutions(&half, 1e-9),
            Err(Error::IndistinguishableRatio { .. })
        ));
    }

    #[test]
    fn feature_cases() {
        let v = one_hots(3);
        let mixed = array![
            [0.7, 0.3, 0.0],
            [0.0, 0.0, 0.0],
            [0.7, 0.0, 0.0],
            [0.0, 0.3, 0.0],
            [0.0, 0.0, 1.0]
        ];
        let (a, b) = recover_features_independent(&mixed, 0.7, &v, 1e-9).unwrap();
        assert_eq!(
            a,
            array![
                [1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0]
            ]
        );
        assert_eq!(
            b,
            array![
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0]
            ]
        );
        let bad = array![[0.5, 0.2, 0.3]];
        assert!(recover_features_independent(&bad, 0.7, &v, 1e-9).is_err());
    }

    fn lemma3_basis() -> FeatureBasis {
        let basis = array![[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let gram_inv = linalg::inverse(linalg::gram(basis.view()).view(), PIVOT_TOL).unwrap();
        FeatureBasis {
            vocabulary: vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            basis,
            gram_inv,
            coeffs: vec![array![[1.0, 0.0]], array![[0.0, 1.0]]],
        }
    }

    #[test]
    fn basis_projection_example() {
        let fb = lemma3_basis();
        let mixed = array![[0.7, 0.7, 0.3]];
        let (a, b) = recover_features_basis(&mixed, 0.7, &fb, 1e-9).unwrap();
        assert!(linalg::max_abs_diff(a.view(), array![[1.0, 1.0, 0.0]].view()) < 1e-12);
        assert!(linalg::max_abs_diff(b.view(), array![[0.0, 0.0, 1.0]].view()) < 1e-12);
        let same = array![[1.0, 1.0, 0.0]];
        let (a, b) = recover_features_basis(&same, 0.3, &fb, 1e-9).unwrap();
        assert_eq!(a, b);
        let outside = array![[1.0, 0.0, 0.0]];
        assert!(recover_features_basis(&outside, 0.7, &fb, 1e-9).is_err());
    }

    fn small_dataset() -> GraphDataset {
        let mut ds = GraphDataset::new("small", 2, 3);
        let f = |rows: &[usize]| Array2::from_shape_fn((rows.len(), 3), |(i, j)| f64::from(u8::from(rows[i] == j)));
        ds.push(
            NodeFeaturedGraph::from_edges(f(&[0, 1, 2]), &[(0, 1), (1, 2)]).unwrap(),
            LabelDistribution::one_hot(0, 2),
        )
        .unwrap();
        ds.push(
            NodeFeaturedGraph::from_edges(f(&[2, 2, 0, 1, 1]), &[(0, 1), (2, 3), (3, 4), (0, 4)]).unwrap(),
            LabelDistribution::one_hot(1, 2),
        )
        .unwrap();
        ds
    }

    #[test]
    fn round_trip_with_padding() {
        let ds = small_dataset();
        let fb = feature_vocabulary(&ds).unwrap();
        let (a, b) = (&ds.items[0].graph, &ds.items[1].graph);
        let mixed = mix_pair(a, b, 0.73).unwrap();
        let rec = recover_pair(&mixed, &fb, RecoveryMode::Independent, RECOVERY_TOL).unwrap();
        assert_eq!(rec.graph_a.num_nodes(), 3);
        assert!(rec.matches(a, b, 0.73, 1e-12));
        let mixed = mix_pair(a, b, 0.2).unwrap();
        let rec = recover_pair(&mixed, &fb, RecoveryMode::Independent, RECOVERY_TOL).unwrap();
        assert!(rec.lambda.unwrap() > 0.5);
        assert_eq!(rec.graph_a, *b);
        assert!(rec.matches(a, b, 0.2, 1e-12));
        let half = mix_pair(a, b, 0.5).unwrap();
        assert!(matches!(
            recover_pair(&half, &fb, RecoveryMode::Independent, RECOVERY_TOL),
            Err(Error::IndistinguishableRatio { .. })
        ));
    }

    #[test]
    fn identical_sources() {
        let ds = small_dataset();
        let fb = feature_vocabulary(&ds).unwrap();
        let g = &ds.items[1].graph;
        let rec = recover_pair(
            &mix_pair(g, g, 0.8).unwrap(),
            &fb,
            RecoveryMode::Independent,
            RECOVERY_TOL,
        )
        .unwrap();
        assert_eq!(rec.lambda, None);
        assert_eq!((&rec.graph_a, &rec.graph_b), (g, g));
    }

    #[test]
    fn same_topology_ratio_from_features() {
        let ds = small_dataset();
        let fb = feature_vocabulary(&ds).unwrap();
        let a = &ds.items[0].graph;
        let mut b = a.clone();
        b.features = array![[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        let rec = recover_pair(
            &mix_pair(a, &b, 0.35).unwrap(),
            &fb,
            RecoveryMode::Independent,
            RECOVERY_TOL,
        )
        .unwrap();
        assert!(rec.matches(a, &b, 0.35, 1e-12));
    }

    #[test]
    fn audit_gate_on_dependent_features() {
        let mut ds = GraphDataset::new("dep", 2, 2);
        // V = {[1,0],[0,1],[1,1]}; five 2x2 coefficient matrices in R^4 are dependent
        for (rows, c) in [
            (array![[1.0, 0.0], [0.0, 1.0]], 0),
            (array![[1.0, 1.0], [0.0, 0.0]], 1),
            (array![[0.0, 1.0], [1.0, 1.0]], 0),
            (array![[1.0, 0.0], [1.0, 1.0]], 1),
            (array![[0.0, 1.0], [1.0, 0.0]], 1),
        ] {
            ds.push(
                NodeFeaturedGraph::from_edges(rows, &[(0, 1)]).unwrap(),
                LabelDistribution::one_hot(c, 2),
            )
            .unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = intrusion_audit(&ds, 10, BetaParams::new(2.0, 2.0).unwrap(), &mut rng).unwrap();
        assert!(r.assumption_violated);
        assert_eq!(r.trials, 0);
    }

    #[test]
    fn audit_small_dataset() {
        let ds = small_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = intrusion_audit(&ds, 200, BetaParams::new(2.0, 2.0).unwrap(), &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.identical_pairs > 0);
    }
}

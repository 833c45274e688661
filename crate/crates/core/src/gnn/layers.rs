//! Weighted message-passing layers and pooling, usable on their own.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    #[default]
    Sum,
    Mean,
}

pub(crate) fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

/// `D̂^{-1/2} (e + I) D̂^{-1/2}` with `d̂_i = 1 + Σ_j e(i, j)`: each node keeps a
/// self-weight of one.
pub fn normalized_adjacency(e: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = e.nrows();
    let deg: Vec<f64> = (0..n).map(|i| 1.0 + e.row(i).sum()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let w = if i == j { 1.0 } else { e[[i, j]] };
        w / (deg[i] * deg[j]).sqrt()
    })
}

fn check_square(h: ArrayView2<'_, f64>, e: ArrayView2<'_, f64>) -> Result<()> {
    if e.nrows() != h.nrows() || e.ncols() != h.nrows() {
        return Err(Error::dims("edge matrix vs node count", h.nrows(), e.nrows()));
    }
    Ok(())
}

/// How a GCN layer adds its input back.
#[derive(Clone, Copy, Debug)]
pub enum Skip<'a> {
    None,
    Identity,
    Projection(ArrayView2<'a, f64>),
}

/// One weighted GCN layer:
/// `out_i = ReLU(W · Σ_{j ∈ N(i) ∪ {i}} e(i,j)/√(d̂_i d̂_j) · h_j + b)`, plus the
/// skip term when requested.
pub fn gcn_layer(
    h: ArrayView2<'_, f64>,
    e: ArrayView2<'_, f64>,
    weight: ArrayView2<'_, f64>,
    bias: Option<ArrayView2<'_, f64>>,
    skip: Skip<'_>,
) -> Result<Array2<f64>> {
    check_square(h, e)?;
    if weight.nrows() != h.ncols() {
        return Err(Error::dims("gcn weight rows", h.ncols(), weight.nrows()));
    }
    let agg = normalized_adjacency(e).dot(&h);
    let mut pre = agg.dot(&weight);
    if let Some(b) = bias {
        pre += &b.row(0);
    }
    let mut out = relu(&pre);
    match skip {
        Skip::None => {}
        Skip::Identity => {
            if h.ncols() != out.ncols() {
                return Err(Error::dims("identity skip width", out.ncols(), h.ncols()));
            }
            out += &h;
        }
        Skip::Projection(p) => out += &h.dot(&p),
    }
    Ok(out)
}

/// A GIN update: `out_i = MLP((1 + ε) h_i + Σ_{j ∈ N(i)} e(i,j) h_j)`, where the
/// MLP is a stack of `(weight, bias)` layers each followed by ReLU.
pub fn gin_layer(
    h: ArrayView2<'_, f64>,
    e: ArrayView2<'_, f64>,
    eps: f64,
    mlp: &[(ArrayView2<'_, f64>, Option<ArrayView2<'_, f64>>)],
) -> Result<Array2<f64>> {
    check_square(h, e)?;
    let mut x = &h * (1.0 + eps) + e.dot(&h);
    for (w, b) in mlp {
        if w.nrows() != x.ncols() {
            return Err(Error::dims("gin mlp weight rows", x.ncols(), w.nrows()));
        }
        let mut pre = x.dot(w);
        if let Some(b) = b {
            pre += &b.row(0);
        }
        x = relu(&pre);
    }
    Ok(x)
}

/// Pools node embeddings into one vector.
pub fn pool(h: ArrayView2<'_, f64>, readout: Readout) -> Result<Array1<f64>> {
    if h.nrows() == 0 {
        return Err(Error::EmptyGraph);
    }
    let s = h.sum_axis(Axis(0));
    Ok(match readout {
        Readout::Sum => s,
        Readout::Mean => s / h.nrows() as f64,
    })
}

/// Concatenation of per-layer pooled vectors.
pub fn concat(parts: &[Array1<f64>]) -> Array1<f64> {
    let mut out = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        out.extend(p.iter().copied());
    }
    Array1::from(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn gcn_scalar_example() {
        let h = array![[1.0], [2.0]];
        let e = array![[0.0, 0.5], [0.5, 0.0]];
        let w = array![[1.0]];
        let out = gcn_layer(h.view(), e.view(), w.view(), None, Skip::None).unwrap();
        // d̂ = 1.5 for both nodes
        assert!((out[[0, 0]] - (1.0 / 1.5 + 0.5 / 1.5 * 2.0)).abs() < 1e-12);
        assert!((out[[0, 0]] - 1.333_333_333_333_333).abs() < 1e-12);
    }

    #[test]
    fn gcn_without_edges_is_self_only() {
        let h = array![[1.0, -2.0], [3.0, 0.5]];
        let w = array![[1.0, 0.0], [0.0, 1.0]];
        let out = gcn_layer(h.view(), Array2::zeros((2, 2)).view(), w.view(), None, Skip::None).unwrap();
        assert_eq!(out, array![[1.0, 0.0], [3.0, 0.5]]);
        let neg = gcn_layer(
            array![[-1.0]].view(),
            Array2::zeros((1, 1)).view(),
            array![[1.0]].view(),
            None,
            Skip::None,
        )
        .unwrap();
        assert_eq!(neg[[0, 0]], 0.0);
        let skip = gcn_layer(h.view(), Array2::zeros((2, 2)).view(), w.view(), None, Skip::Identity).unwrap();
        assert_eq!(skip, array![[2.0, -2.0], [6.0, 1.0]]);
    }

    #[test]
    fn gin_examples() {
        let h = array![[1.0], [2.0]];
        let e = array![[0.0, 1.0], [1.0, 0.0]];
        let id = array![[1.0]];
        let mlp = [(id.view(), None)];
        let out = gin_layer(h.view(), e.view(), 0.0, &mlp).unwrap();
        assert_eq!(out[[0, 0]], 3.0);
        let out = gin_layer(h.view(), e.view(), 1.0, &mlp).unwrap();
        assert_eq!(out[[0, 0]], 4.0);
        let hz = array![[1.0], [0.0]];
        let out = gin_layer(hz.view(), e.view(), 0.0, &mlp).unwrap();
        assert_eq!(out[[0, 0]], 1.0);
    }

    #[test]
    fn pooling() {
        let h = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(pool(h.view(), Readout::Sum).unwrap(), array![4.0, 6.0]);
        assert_eq!(pool(h.view(), Readout::Mean).unwrap(), array![2.0, 3.0]);
        assert!(matches!(
            pool(Array2::zeros((0, 2)).view(), Readout::Sum),
            Err(Error::EmptyGraph)
        ));
    }
}

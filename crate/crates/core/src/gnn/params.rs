//! Flat parameter storage. Every trainable tensor is a row-major 2-D block of
//! one contiguous buffer, so optimizers and gradient checks can treat θ as a
//! single vector.

use ndarray::{ArrayView2, ArrayViewMut2};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Index of a tensor inside a [`ModelParams`] layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorId(pub usize);

/// All trainable values θ, or a gradient with the same layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub layout: Vec<TensorSpec>,
    pub values: Vec<f64>,
}

impl ModelParams {
    pub fn empty() -> Self {
        Self {
            layout: Vec::new(),
            values: Vec::new(),
        }
    }

    pub(crate) fn add(&mut self, name: impl Into<String>, rows: usize, cols: usize) -> TensorId {
        let offset = self.values.len();
        self.layout.push(TensorSpec {
            name: name.into(),
            rows,
            cols,
            offset,
        });
        self.values.resize(offset + rows * cols, 0.0);
        TensorId(self.layout.len() - 1)
    }

    /// A zero buffer with the same layout.
    pub fn zeros_like(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec(&self, id: TensorId) -> &TensorSpec {
        &self.layout[id.0]
    }

    pub fn view(&self, id: TensorId) -> ArrayView2<'_, f64> {
        let s = &self.layout[id.0];
        ArrayView2::from_shape((s.rows, s.cols), &self.values[s.offset..s.offset + s.len()])
            .expect("layout matches buffer")
    }

    pub fn view_mut(&mut self, id: TensorId) -> ArrayViewMut2<'_, f64> {
        let s = &self.layout[id.0];
        let (rows, cols, off, len) = (s.rows, s.cols, s.offset, s.len());
        ArrayViewMut2::from_shape((rows, cols), &mut self.values[off..off + len]).expect("layout matches buffer")
    }

    pub fn scalar(&self, id: TensorId) -> f64 {
        self.values[self.layout[id.0].offset]
    }

    /// Name of the tensor holding flat index `k` and the position inside it.
    pub fn locate(&self, k: usize) -> Option<(&str, usize, usize)> {
        self.layout
            .iter()
            .find(|s| k >= s.offset && k < s.offset + s.len())
            .map(|s| {
                let local = k - s.offset;
                (s.name.as_str(), local / s.cols, local % s.cols)
            })
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.layout == other.layout && self.values.len() == other.values.len()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&mut self, f: f64) {
        for a in &mut self.values {
            *a *= f;
        }
    }
}

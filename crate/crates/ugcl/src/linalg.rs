//! Dense matrices, sparse-dense products, and the Adam optimizer.
//!
//! Everything is 64-bit and deterministic: sparse rows accumulate in
//! ascending column order, so repeated runs produce bit-identical results.

use crate::error::{Result, UgclError};
use crate::graph::NormalizedAdjacency;
use crate::rng::SplitMix64;

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(UgclError::DimensionMismatch(format!(
                "expected {}x{}={} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(UgclError::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    c
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self * other`, (m x k)(k x n) -> (m x n).
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(UgclError::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = out.row_mut(i);
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other`, (m x k)^T (m x n) -> (k x n).
    pub fn transpose_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(UgclError::DimensionMismatch(format!(
                "transpose_matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let b_row = other.row(i);
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = out.row_mut(k);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Columnwise mean as a length-`cols` vector.
    pub fn col_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (m, &v) in means.iter_mut().zip(self.row(r)) {
                *m += v;
            }
        }
        let inv = 1.0 / self.rows as f64;
        for m in &mut means {
            *m *= inv;
        }
        means
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_assign(&mut self, other: &DenseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(UgclError::DimensionMismatch(format!(
                "add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Sparse (normalized adjacency) times dense: `a * h`.
///
/// Each output row accumulates its nonzeros in ascending column order, which
/// pins the floating-point result bit-for-bit.
pub fn spmm(a: &NormalizedAdjacency, h: &DenseMatrix) -> Result<DenseMatrix> {
    if a.num_nodes() != h.rows() {
        return Err(UgclError::DimensionMismatch(format!(
            "spmm: adjacency is {0}x{0}, matrix has {1} rows",
            a.num_nodes(),
            h.rows()
        )));
    }
    let d = h.cols();
    let mut out = DenseMatrix::zeros(h.rows(), d);
    for u in 0..a.num_nodes() {
        let out_row = out.row_mut(u);
        for (v, w) in a.row_entries(u) {
            let h_row = h.row(v);
            for (o, &x) in out_row.iter_mut().zip(h_row) {
                *o += w * x;
            }
        }
    }
    Ok(out)
}

/// `a^n * h` as `n` successive sparse-dense products; `a^n` is never formed.
pub fn power_apply(a: &NormalizedAdjacency, h: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    let mut out = h.clone();
    for _ in 0..n {
        out = spmm(a, &out)?;
    }
    Ok(out)
}

/// Uniform Xavier/Glorot initialization: entries in ±sqrt(6/(rows+cols)).
pub fn xavier_init(rows: usize, cols: usize, rng: &mut SplitMix64) -> DenseMatrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.next_symmetric(bound);
    }
    m
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer state for one parameter group (a list of tensors).
#[derive(Debug, Clone)]
pub struct AdamState {
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
    step_count: u64,
    pub hyper: AdamHyper,
}

impl AdamState {
    /// `shapes` are flat lengths of each parameter tensor.
    pub fn new(shapes: &[usize], hyper: AdamHyper) -> Self {
        AdamState {
            first_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step_count: 0,
            hyper,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected Adam update over flat parameter slices.
    ///
    /// `params[i]` and `grads[i]` must have the length registered at
    /// construction. Rejects non-finite gradients before touching state.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(UgclError::DimensionMismatch(
                "adam: parameter group count mismatch".into(),
            ));
        }
        for (i, g) in grads.iter().enumerate() {
            if g.len() != self.first_moment[i].len() {
                return Err(UgclError::DimensionMismatch(format!(
                    "adam: group {} has {} entries, state expects {}",
                    i,
                    g.len(),
                    self.first_moment[i].len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(UgclError::DivergentGradient(format!("parameter group {i}")));
            }
        }

        self.step_count += 1;
        let t = self.step_count as i32;
        let h = self.hyper;
        let bias1 = 1.0 - h.beta1.powi(t);
        let bias2 = 1.0 - h.beta2.powi(t);

        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(&mut self.second_moment))
        {
            for k in 0..p.len() {
                m[k] = h.beta1 * m[k] + (1.0 - h.beta1) * g[k];
                v[k] = h.beta2 * v[k] + (1.0 - h.beta2) * g[k] * g[k];
                let m_hat = m[k] / bias1;
                let v_hat = v[k] / bias2;
                p[k] -= h.learning_rate * m_hat / (v_hat.sqrt() + h.epsilon);
            }
        }
        Ok(())
    }
}

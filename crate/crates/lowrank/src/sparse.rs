//! Compressed sparse row matrices for dataset inputs.
//!
//! CSR covers every sparse product the schemes need: `S * D` directly and
//! `S^T * D` as a scatter traversal (treating the CSR arrays as a CSC view
//! of the transpose). The sparse operand is never densified.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Which side of the dense operand the sparse matrix sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// S * D
    Left,
    /// D * S
    Right,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets. Duplicates are summed,
    /// entries are sorted row-major, and explicit zeros are kept.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidInput(format!(
                    "triplet ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite value at ({i}, {j})"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        // merge duplicates
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (i, j, v) in sorted {
            match merged.last_mut() {
                Some((li, lj, lv)) if *li == i && *lj == j => *lv += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(merged.len());
        let mut values = Vec::with_capacity(merged.len());
        for (i, j, v) in merged {
            col_idx.push(j);
            values.push(v);
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Build directly from CSR arrays, validating the structural invariants.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1 {
            return Err(Error::InvalidInput(format!(
                "row_ptr length {} != rows + 1 = {}",
                row_ptr.len(),
                rows + 1
            )));
        }
        if row_ptr[0] != 0 || *row_ptr.last().unwrap() != col_idx.len() {
            return Err(Error::InvalidInput(
                "row_ptr must start at 0 and end at nnz".into(),
            ));
        }
        if col_idx.len() != values.len() {
            return Err(Error::InvalidInput("col_idx/values length mismatch".into()));
        }
        for w in row_ptr.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidInput("row_ptr not nondecreasing".into()));
            }
        }
        for r in 0..rows {
            let lo = row_ptr[r];
            let hi = row_ptr[r + 1];
            for k in lo..hi {
                if col_idx[k] >= cols {
                    return Err(Error::InvalidInput(format!(
                        "column index {} out of bounds in row {r}",
                        col_idx[k]
                    )));
                }
                if k > lo && col_idx[k] <= col_idx[k - 1] {
                    return Err(Error::InvalidInput(format!(
                        "column indices not strictly increasing in row {r}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value".into()));
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterate entries of row `r` as (col, value).
    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&j, &v)| (j, v))
    }

    /// Iterate all entries as (row, col, value).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row_entries(r).map(move |(j, v)| (r, j, v)))
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Densify columns `j0..j1` into an rows x (j1-j0) block.
    pub fn densify_col_block(&self, j0: usize, j1: usize) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, j1 - j0);
        for r in 0..self.rows {
            for (j, v) in self.row_entries(r) {
                if j >= j0 && j < j1 {
                    d[(r, j - j0)] = v;
                }
            }
        }
        d
    }
}

/// Sparse-dense product, `S * D` (Left) or `D * S` (Right).
/// The sparse operand is traversed in place; nothing is densified.
pub fn spmm(s: &SparseMatrix, d: &DenseMatrix, side: Side) -> Result<DenseMatrix> {
    match side {
        Side::Left => {
            if s.cols != d.rows() {
                return Err(Error::Dimension {
                    op: "spmm left",
                    left: (s.rows, s.cols),
                    right: d.shape(),
                });
            }
            let mut out = DenseMatrix::zeros(s.rows, d.cols());
            for c in 0..d.cols() {
                let dc = d.col(c);
                let oc = out.col_mut(c);
                for (r, o) in oc.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, v) in s.row_entries(r) {
                        acc += v * dc[j];
                    }
                    *o = acc;
                }
            }
            Ok(out)
        }
        Side::Right => {
            if d.cols() != s.rows {
                return Err(Error::Dimension {
                    op: "spmm right",
                    left: d.shape(),
                    right: (s.rows, s.cols),
                });
            }
            let m = d.rows();
            let mut out = DenseMatrix::zeros(m, s.cols);
            for r in 0..s.rows {
                let dr = d.col(r);
                for (j, v) in s.row_entries(r) {
                    let oj = out.col_mut(j);
                    for i in 0..m {
                        oj[i] += v * dr[i];
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `S^T * D` via a CSC-view traversal of the CSR arrays.
pub fn spmm_trans(s: &SparseMatrix, d: &DenseMatrix) -> Result<DenseMatrix> {
    if s.rows != d.rows() {
        return Err(Error::Dimension {
            op: "spmm_trans",
            left: (s.cols, s.rows),
            right: d.shape(),
        });
    }
    let mut out = DenseMatrix::zeros(s.cols, d.cols());
    for c in 0..d.cols() {
        let dc = d.col(c);
        let oc = out.col_mut(c);
        for (r, &dr) in dc.iter().enumerate() {
            if dr != 0.0 {
                for (j, v) in s.row_entries(r) {
                    oc[j] += v * dr;
                }
            }
        }
    }
    Ok(out)
}

/// A matrix that is either dense or CSR; the input type every scheme accepts.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl AnyMatrix {
    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::Dense(d) => d.rows(),
            AnyMatrix::Sparse(s) => s.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyMatrix::Dense(d) => d.cols(),
            AnyMatrix::Sparse(s) => s.cols(),
        }
    }

    pub fn frob_norm(&self) -> f64 {
        match self {
            AnyMatrix::Dense(d) => d.frob_norm(),
            AnyMatrix::Sparse(s) => s.frob_norm(),
        }
    }

    pub fn frob_norm_sq(&self) -> f64 {
        match self {
            AnyMatrix::Dense(d) => d.frob_norm_sq(),
            AnyMatrix::Sparse(s) => s.frob_norm_sq(),
        }
    }

    /// A * X with dense X.
    pub fn mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            AnyMatrix::Dense(d) => crate::dense::matmul(d, x),
            AnyMatrix::Sparse(s) => spmm(s, x, Side::Left),
        }
    }

    /// A^T * X with dense X.
    pub fn tr_mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            AnyMatrix::Dense(d) => crate::dense::matmul_trans_a(d, x),
            AnyMatrix::Sparse(s) => spmm_trans(s, x),
        }
    }

    pub fn densify_col_block(&self, j0: usize, j1: usize) -> DenseMatrix {
        match self {
            AnyMatrix::Dense(d) => d.col_block(j0, j1),
            AnyMatrix::Sparse(s) => s.densify_col_block(j0, j1),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            AnyMatrix::Dense(d) => d.clone(),
            AnyMatrix::Sparse(s) => s.to_dense(),
        }
    }
}

impl From<DenseMatrix> for AnyMatrix {
    fn from(d: DenseMatrix) -> Self {
        AnyMatrix::Dense(d)
    }
}

impl From<SparseMatrix> for AnyMatrix {
    fn from(s: SparseMatrix) -> Self {
        AnyMatrix::Sparse(s)
    }
}

//! Dense column-major matrices and the products every scheme is built on.
//!
//! Storage is column-major: entry (i, j) lives at `data[j * rows + i]`.
//! The layout is private; use `col`/`col_mut`/indexing or `as_col_major`.

use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Clone, Debug, PartialEq)]
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

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from column-major data. Length must equal rows * cols.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "column-major data length {} != {}x{}",
            data.len(),
            rows,
            cols
        );
        DenseMatrix { rows, cols, data }
    }

    /// Build from a row-major slice of slices (test convenience).
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// iid standard-normal entries; column j comes from substream j of `seed`.
    pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            let mut stream = Stream::new(seed, j as u64);
            for i in 0..rows {
                m.data[j * rows + i] = stream.next_normal();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// The backing column-major slice.
    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            let src = self.col(j);
            for (i, &v) in src.iter().enumerate() {
                t.data[i * self.cols + j] = v;
            }
        }
        t
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "sub shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "add shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    /// Copy of columns `j0..j1`.
    pub fn col_block(&self, j0: usize, j1: usize) -> DenseMatrix {
        assert!(j0 <= j1 && j1 <= self.cols);
        DenseMatrix {
            rows: self.rows,
            cols: j1 - j0,
            data: self.data[j0 * self.rows..j1 * self.rows].to_vec(),
        }
    }

    /// Copy of the leading `k` columns.
    pub fn leading_cols(&self, k: usize) -> DenseMatrix {
        self.col_block(0, k)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

fn check_dims(op: &'static str, ok: bool, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension {
            op,
            left: a.shape(),
            right: b.shape(),
        })
    }
}

/// C = A * B.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims("matmul", a.cols == b.rows, a, b)?;
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut c = DenseMatrix::zeros(m, n);
    for j in 0..n {
        let bj = &b.data[j * k..(j + 1) * k];
        let cj = &mut c.data[j * m..(j + 1) * m];
        for (l, &blj) in bj.iter().enumerate().take(k) {
            if blj != 0.0 {
                let al = &a.data[l * m..(l + 1) * m];
                for i in 0..m {
                    cj[i] += blj * al[i];
                }
            }
        }
    }
    Ok(c)
}

/// C = A^T * B.
pub fn matmul_trans_a(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims("matmul_trans_a", a.rows == b.rows, a, b)?;
    let (k, m, n) = (a.rows, a.cols, b.cols);
    let mut c = DenseMatrix::zeros(m, n);
    for j in 0..n {
        let bj = &b.data[j * k..(j + 1) * k];
        let cj = &mut c.data[j * m..(j + 1) * m];
        for (i, ci) in cj.iter_mut().enumerate().take(m) {
            let ai = &a.data[i * k..(i + 1) * k];
            let mut acc = 0.0;
            for l in 0..k {
                acc += ai[l] * bj[l];
            }
            *ci = acc;
        }
    }
    Ok(c)
}

/// C = A * B^T.
pub fn matmul_trans_b(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims("matmul_trans_b", a.cols == b.cols, a, b)?;
    let (m, k, n) = (a.rows, a.cols, b.rows);
    let mut c = DenseMatrix::zeros(m, n);
    for l in 0..k {
        let al = &a.data[l * m..(l + 1) * m];
        let bl = &b.data[l * n..(l + 1) * n];
        for (j, &blj) in bl.iter().enumerate() {
            if blj != 0.0 {
                let cj = &mut c.data[j * m..(j + 1) * m];
                for i in 0..m {
                    cj[i] += blj * al[i];
                }
            }
        }
    }
    Ok(c)
}

/// Largest singular value, estimated by power iteration on A^T A.
/// Deterministic: the start vector comes from a fixed internal stream.
pub fn spectral_norm(a: &DenseMatrix, max_iters: usize) -> f64 {
    if a.rows == 0 || a.cols == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = {
        let mut s = Stream::new(0x9073_1d2c_55aa_10ff, 0);
        (0..a.cols).map(|_| s.next_normal()).collect()
    };
    let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
    let nv = norm(&v);
    if nv == 0.0 {
        return 0.0;
    }
    for t in &mut v {
        *t /= nv;
    }
    let mut sigma = 0.0;
    for _ in 0..max_iters {
        // w = A v
        let mut w = vec![0.0; a.rows];
        for (l, &vl) in v.iter().enumerate() {
            if vl != 0.0 {
                let al = a.col(l);
                for i in 0..a.rows {
                    w[i] += vl * al[i];
                }
            }
        }
        // v' = A^T w
        let mut v2 = vec![0.0; a.cols];
        for (j, t) in v2.iter_mut().enumerate() {
            let aj = a.col(j);
            *t = aj.iter().zip(&w).map(|(x, y)| x * y).sum();
        }
        let n2 = norm(&v2);
        if n2 == 0.0 {
            return 0.0;
        }
        let new_sigma = n2.sqrt();
        let done = (new_sigma - sigma).abs() <= 1e-12 * new_sigma.max(1e-300);
        sigma = new_sigma;
        for t in &mut v2 {
            *t /= n2;
        }
        v = v2;
        if done {
            break;
        }
    }
    sigma
}

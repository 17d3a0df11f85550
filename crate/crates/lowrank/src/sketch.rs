//! Randomized sketching operators.
//!
//! An operator is a linear map from R^input_dim to R^sketch_dim, i.e. an
//! s x m matrix S applied as `S * A` (apply_left) or `A * S^T` (apply_right;
//! this is how the tall sketching matrices X = S^T of the approximation
//! schemes are realized). Construction is fully determined by
//! (kind, dims, seed): per-column substreams of the seed drive every draw,
//! so parallel construction order cannot change the result and the first r
//! columns of a sketch do not depend on how many columns were requested.
//!
//! Kinds:
//! * `Gaussian` - dense entries iid N(0, 1/s); materialized, apply is O(smn).
//! * `SparseSign` - per column exactly zeta random signs at distinct rows,
//!   scaled 1/sqrt(zeta) at apply time so norms are preserved in expectation.
//! * `Srtt` - subsampled randomized trigonometric transform
//!   sqrt(m/s) R F D with F the orthonormal DCT-II, D a random sign flip and
//!   R a uniform row subsample without replacement; F is applied by the fast
//!   transform and never materialized.
//! * `ColumnSampling` - uniform subsample without replacement, unscaled;
//!   in tall form each column has exactly one nonzero entry equal to 1.

use crate::dct::dct2_orthonormal;
use crate::dense::{matmul, matmul_trans_b, DenseMatrix};
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::sparse::AnyMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchKind {
    Gaussian,
    SparseSign,
    Srtt,
    ColumnSampling,
}

impl SketchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::SparseSign => "sparse-sign",
            SketchKind::Srtt => "srtt",
            SketchKind::ColumnSampling => "column-sampling",
        }
    }
}

impl std::str::FromStr for SketchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(SketchKind::Gaussian),
            "sparse-sign" => Ok(SketchKind::SparseSign),
            "srtt" => Ok(SketchKind::Srtt),
            "column-sampling" => Ok(SketchKind::ColumnSampling),
            other => Err(Error::Parameter(format!("unknown sketch kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Payload {
    Gaussian {
        mat: DenseMatrix, // s x m
    },
    SparseSign {
        zeta: usize,
        /// rows[c * zeta .. (c+1) * zeta]: nonzero rows of column c (of the
        /// tall m x s form this is transposed; here columns index R^m).
        rows: Vec<u32>,
        signs: Vec<f64>,
    },
    Srtt {
        signs: Vec<f64>,    // diagonal of D, +-1, length m
        sample: Vec<usize>, // s distinct rows of the transformed vector
    },
    ColumnSampling {
        sample: Vec<usize>, // s distinct coordinates
    },
}

/// Replayable description of an operator; reconstruction regenerates the
/// payload from the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchDescriptor {
    pub kind: SketchKind,
    pub input_dim: usize,
    pub sketch_dim: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zeta: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SketchOperator {
    kind: SketchKind,
    input_dim: usize,
    sketch_dim: usize,
    seed: u64,
    payload: Payload,
}

fn check_dims(input_dim: usize, sketch_dim: usize) -> Result<()> {
    if sketch_dim < 1 || sketch_dim > input_dim {
        return Err(Error::Parameter(format!(
            "sketch_dim must satisfy 1 <= s <= input_dim, got s = {sketch_dim}, m = {input_dim}"
        )));
    }
    Ok(())
}

impl SketchOperator {
    /// Gaussian embedding, entries iid N(0, 1/sketch_dim).
    pub fn gaussian(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self> {
        check_dims(input_dim, sketch_dim)?;
        let scale = 1.0 / (sketch_dim as f64).sqrt();
        let mut mat = DenseMatrix::zeros(sketch_dim, input_dim);
        for j in 0..input_dim {
            let mut stream = Stream::new(seed, j as u64);
            for v in mat.col_mut(j) {
                *v = scale * stream.next_normal();
            }
        }
        Ok(SketchOperator {
            kind: SketchKind::Gaussian,
            input_dim,
            sketch_dim,
            seed,
            payload: Payload::Gaussian { mat },
        })
    }

    /// Sparse sign map with exactly `zeta` nonzeros per column.
    pub fn sparse_sign(
        input_dim: usize,
        sketch_dim: usize,
        zeta: usize,
        seed: u64,
    ) -> Result<Self> {
        check_dims(input_dim, sketch_dim)?;
        if zeta < 1 || zeta > sketch_dim {
            return Err(Error::Parameter(format!(
                "sparse-sign sparsity must satisfy 1 <= zeta <= sketch_dim, got zeta = {zeta}"
            )));
        }
        let mut rows = Vec::with_capacity(input_dim * zeta);
        let mut signs = Vec::with_capacity(input_dim * zeta);
        for c in 0..input_dim {
            let mut stream = Stream::new(seed, c as u64);
            let picks = stream.sample_without_replacement(sketch_dim, zeta);
            for p in picks {
                rows.push(p as u32);
                signs.push(stream.next_sign());
            }
        }
        Ok(SketchOperator {
            kind: SketchKind::SparseSign,
            input_dim,
            sketch_dim,
            seed,
            payload: Payload::SparseSign { zeta, rows, signs },
        })
    }

    /// Sparse sign map with the recommended default zeta = min(s, 8).
    pub fn sparse_sign_default(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self> {
        Self::sparse_sign(input_dim, sketch_dim, sketch_dim.min(8), seed)
    }

    /// Subsampled randomized trigonometric transform sqrt(m/s) R F D.
    pub fn srtt(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self> {
        check_dims(input_dim, sketch_dim)?;
        let mut sign_stream = Stream::new(seed, 0);
        let signs: Vec<f64> = (0..input_dim).map(|_| sign_stream.next_sign()).collect();
        let mut sample_stream = Stream::new(seed, 1);
        let sample = sample_stream.sample_without_replacement(input_dim, sketch_dim);
        Ok(SketchOperator {
            kind: SketchKind::Srtt,
            input_dim,
            sketch_dim,
            seed,
            payload: Payload::Srtt { signs, sample },
        })
    }

    /// Uniform coordinate sampling without replacement.
    pub fn column_sampling(input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self> {
        check_dims(input_dim, sketch_dim)?;
        let mut stream = Stream::new(seed, 0);
        let sample = stream.sample_without_replacement(input_dim, sketch_dim);
        Ok(SketchOperator {
            kind: SketchKind::ColumnSampling,
            input_dim,
            sketch_dim,
            seed,
            payload: Payload::ColumnSampling { sample },
        })
    }

    /// Construct by kind, using each kind's defaults.
    pub fn build(kind: SketchKind, input_dim: usize, sketch_dim: usize, seed: u64) -> Result<Self> {
        match kind {
            SketchKind::Gaussian => Self::gaussian(input_dim, sketch_dim, seed),
            SketchKind::SparseSign => Self::sparse_sign_default(input_dim, sketch_dim, seed),
            SketchKind::Srtt => Self::srtt(input_dim, sketch_dim, seed),
            SketchKind::ColumnSampling => Self::column_sampling(input_dim, sketch_dim, seed),
        }
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn sketch_dim(&self) -> usize {
        self.sketch_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn descriptor(&self) -> SketchDescriptor {
        SketchDescriptor {
            kind: self.kind,
            input_dim: self.input_dim,
            sketch_dim: self.sketch_dim,
            seed: self.seed,
            zeta: match &self.payload {
                Payload::SparseSign { zeta, .. } => Some(*zeta),
                _ => None,
            },
        }
    }

    pub fn from_descriptor(d: &SketchDescriptor) -> Result<Self> {
        match d.kind {
            SketchKind::SparseSign => match d.zeta {
                Some(z) => Self::sparse_sign(d.input_dim, d.sketch_dim, z, d.seed),
                None => Self::sparse_sign_default(d.input_dim, d.sketch_dim, d.seed),
            },
            kind => Self::build(kind, d.input_dim, d.sketch_dim, d.seed),
        }
    }

    /// Apply the operator to one length-m vector, writing an s-vector.
    fn apply_vec(&self, x: &[f64], out: &mut [f64]) {
        match &self.payload {
            Payload::Gaussian { .. } => unreachable!("dense path handled by matmul"),
            Payload::SparseSign { zeta, rows, signs } => {
                let scale = 1.0 / (*zeta as f64).sqrt();
                for o in out.iter_mut() {
                    *o = 0.0;
                }
                for (c, &xc) in x.iter().enumerate() {
                    if xc != 0.0 {
                        let base = c * zeta;
                        for t in 0..*zeta {
                            out[rows[base + t] as usize] += signs[base + t] * scale * xc;
                        }
                    }
                }
            }
            Payload::Srtt { signs, sample } => {
                let m = self.input_dim as f64;
                let s = self.sketch_dim as f64;
                let scale = (m / s).sqrt();
                let flipped: Vec<f64> = x.iter().zip(signs).map(|(v, sg)| v * sg).collect();
                let transformed = dct2_orthonormal(&flipped);
                for (o, &idx) in out.iter_mut().zip(sample) {
                    *o = scale * transformed[idx];
                }
            }
            Payload::ColumnSampling { sample } => {
                for (o, &idx) in out.iter_mut().zip(sample) {
                    *o = x[idx];
                }
            }
        }
    }

    /// S * A for dense A (rows = input_dim).
    pub fn apply_left(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.rows() != self.input_dim {
            return Err(Error::Dimension {
                op: "sketch apply_left",
                left: (self.sketch_dim, self.input_dim),
                right: a.shape(),
            });
        }
        if let Payload::Gaussian { mat } = &self.payload {
            return matmul(mat, a);
        }
        let mut out = DenseMatrix::zeros(self.sketch_dim, a.cols());
        let mut buf = vec![0.0; self.sketch_dim];
        for j in 0..a.cols() {
            self.apply_vec(a.col(j), &mut buf);
            out.col_mut(j).copy_from_slice(&buf);
        }
        Ok(out)
    }

    /// A * S^T for dense A (cols = input_dim).
    pub fn apply_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.cols() != self.input_dim {
            return Err(Error::Dimension {
                op: "sketch apply_right",
                left: a.shape(),
                right: (self.input_dim, self.sketch_dim),
            });
        }
        if let Payload::Gaussian { mat } = &self.payload {
            return matmul_trans_b(a, mat);
        }
        // A S^T = (S A^T)^T
        Ok(self.apply_left(&a.transpose())?.transpose())
    }

    /// S * A where A may be sparse. The sparse operand is densified only
    /// column-block-wise, never as a whole.
    pub fn apply_left_any(&self, a: &AnyMatrix) -> Result<DenseMatrix> {
        match a {
            AnyMatrix::Dense(d) => self.apply_left(d),
            AnyMatrix::Sparse(s) => {
                let n = s.cols();
                let mut out = DenseMatrix::zeros(self.sketch_dim, n);
                let block = 256;
                let mut j0 = 0;
                while j0 < n {
                    let j1 = (j0 + block).min(n);
                    let dense = s.densify_col_block(j0, j1);
                    let part = self.apply_left(&dense)?;
                    for (jj, j) in (j0..j1).enumerate() {
                        out.col_mut(j).copy_from_slice(part.col(jj));
                    }
                    j0 = j1;
                }
                Ok(out)
            }
        }
    }

    /// A * S^T where A may be sparse.
    pub fn apply_right_any(&self, a: &AnyMatrix) -> Result<DenseMatrix> {
        match a {
            AnyMatrix::Dense(d) => self.apply_right(d),
            AnyMatrix::Sparse(s) => {
                if s.cols() != self.input_dim {
                    return Err(Error::Dimension {
                        op: "sketch apply_right",
                        left: (s.rows(), s.cols()),
                        right: (self.input_dim, self.sketch_dim),
                    });
                }
                // A S^T computed as S-applied-to-rows: densify row blocks via
                // the transposed CSC view, i.e. apply to A^T column blocks.
                if let Payload::Gaussian { mat } = &self.payload {
                    // A G^T with G materialized: sparse times dense transpose
                    return crate::sparse::spmm(s, &mat.transpose(), crate::sparse::Side::Left);
                }
                let m = s.rows();
                let mut out_t = DenseMatrix::zeros(self.sketch_dim, m);
                let mut buf = vec![0.0; self.sketch_dim];
                let mut row = vec![0.0; s.cols()];
                for i in 0..m {
                    for v in row.iter_mut() {
                        *v = 0.0;
                    }
                    for (j, v) in s.row_entries(i) {
                        row[j] = v;
                    }
                    self.apply_vec(&row, &mut buf);
                    out_t.col_mut(i).copy_from_slice(&buf);
                }
                Ok(out_t.transpose())
            }
        }
    }

    /// Materialize S as a dense s x m matrix. Test oracle; O(m^2 log m) for
    /// SRTT, so keep it to small dims.
    pub fn densify(&self) -> DenseMatrix {
        if let Payload::Gaussian { mat } = &self.payload {
            return mat.clone();
        }
        self.apply_left(&DenseMatrix::identity(self.input_dim))
            .expect("identity conforms")
    }
}

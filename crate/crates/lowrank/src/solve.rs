//! Guarded triangular solves.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Which side the triangular factor sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriSide {
    /// Solve R * X = B.
    Left,
    /// Solve X * R = B.
    Right,
}

fn guard(r: &DenseMatrix, hint: Option<&'static str>) -> Result<()> {
    let n = r.rows();
    let mut max_d = 0.0_f64;
    let mut min_d = f64::INFINITY;
    let mut min_idx = 0;
    for i in 0..n {
        let d = r[(i, i)].abs();
        max_d = max_d.max(d);
        if d < min_d {
            min_d = d;
            min_idx = i;
        }
    }
    let threshold = n as f64 * f64::EPSILON * max_d;
    if min_d < threshold || max_d == 0.0 {
        return Err(Error::IllConditionedTriangular {
            index: min_idx,
            value: min_d,
            threshold,
            hint,
        });
    }
    Ok(())
}

/// Solve an upper-triangular system against a dense right-hand side.
/// Rejects factors whose smallest diagonal falls under
/// n * eps * max|R_ii|; failing loudly beats a silent blowup.
pub fn tri_solve_upper(r: &DenseMatrix, b: &DenseMatrix, side: TriSide) -> Result<DenseMatrix> {
    tri_solve_upper_hinted(r, b, side, None)
}

/// Same as [`tri_solve_upper`] but attaches a caller hint to the
/// ill-conditioned error (e.g. which fallback scheme to try).
pub fn tri_solve_upper_hinted(
    r: &DenseMatrix,
    b: &DenseMatrix,
    side: TriSide,
    hint: Option<&'static str>,
) -> Result<DenseMatrix> {
    let n = r.rows();
    if r.cols() != n {
        return Err(Error::Parameter(format!(
            "triangular factor must be square, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    guard(r, hint)?;
    match side {
        TriSide::Left => {
            if b.rows() != n {
                return Err(Error::Dimension {
                    op: "tri_solve_upper left",
                    left: r.shape(),
                    right: b.shape(),
                });
            }
            // back substitution, column by column of B
            let mut x = b.clone();
            for c in 0..b.cols() {
                let xc = x.col_mut(c);
                for i in (0..n).rev() {
                    let mut acc = xc[i];
                    for j in i + 1..n {
                        acc -= r[(i, j)] * xc[j];
                    }
                    xc[i] = acc / r[(i, i)];
                }
            }
            Ok(x)
        }
        TriSide::Right => {
            if b.cols() != n {
                return Err(Error::Dimension {
                    op: "tri_solve_upper right",
                    left: b.shape(),
                    right: r.shape(),
                });
            }
            // X R = B: column j of X depends on earlier columns
            let m = b.rows();
            let mut x = DenseMatrix::zeros(m, n);
            for j in 0..n {
                let mut col = b.col(j).to_vec();
                for l in 0..j {
                    let rlj = r[(l, j)];
                    if rlj != 0.0 {
                        let xl = x.col(l);
                        for i in 0..m {
                            col[i] -= rlj * xl[i];
                        }
                    }
                }
                let d = r[(j, j)];
                let xj = x.col_mut(j);
                for i in 0..m {
                    xj[i] = col[i] / d;
                }
            }
            Ok(x)
        }
    }
}

//! Truncated Moore-Penrose pseudo-inverse.

use crate::dense::{matmul, DenseMatrix};
use crate::error::{Error, Result};
use crate::svd::svd;

/// Pseudo-inverse keeping only singular values strictly greater than `eps`.
///
/// Returns V1 * Sigma1^{-1} * U1^T (shape n x m). With `eps = 0` this is the
/// exact Moore-Penrose pseudo-inverse of the numerically nonzero part. If
/// every singular value is <= eps the zero matrix of transposed shape comes
/// back.
pub fn pinv_eps(a: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    let (pinv, _) = pinv_eps_with_rank(a, eps)?;
    Ok(pinv)
}

/// Same as [`pinv_eps`], also reporting how many singular values survived.
pub fn pinv_eps_with_rank(a: &DenseMatrix, eps: f64) -> Result<(DenseMatrix, usize)> {
    if eps < 0.0 {
        return Err(Error::Parameter(format!(
            "pinv_eps requires eps >= 0, got {eps}"
        )));
    }
    let s = svd(a)?;
    let kept = s.sigma.iter().take_while(|&&x| x > eps).count();
    if kept == 0 {
        return Ok((DenseMatrix::zeros(a.cols(), a.rows()), 0));
    }
    // V1 * Sigma1^{-1} (n x kept), then times U1^T
    let v = s.vt.transpose();
    let mut v1s = v.leading_cols(kept);
    for j in 0..kept {
        let inv = 1.0 / s.sigma[j];
        for t in v1s.col_mut(j) {
            *t *= inv;
        }
    }
    let u1t = {
        // U1^T: first `kept` columns of U, transposed
        s.u.leading_cols(kept).transpose()
    };
    Ok((matmul(&v1s, &u1t)?, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{matmul_trans_a, DenseMatrix};
    use crate::qr::orth;

    #[test]
    fn threshold_drops_tiny_singular_value() {
        let a = DenseMatrix::diag(&[2.0, 1e-20]);
        let p = pinv_eps(&a, 1e-10).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(p[(1, 1)], 0.0);
    }

    #[test]
    fn orthonormal_columns_give_transpose() {
        let q = orth(&DenseMatrix::gaussian(12, 4, 31)).unwrap();
        let p = pinv_eps(&q, 0.0).unwrap();
        assert!(p.sub(&q.transpose()).frob_norm() < 1e-12);
    }

    #[test]
    fn moore_penrose_identity_on_full_rank() {
        let a = DenseMatrix::gaussian(8, 5, 32);
        let p = pinv_eps(&a, 0.0).unwrap();
        let apa = matmul(&a, &matmul(&p, &a).unwrap()).unwrap();
        assert!(apa.sub(&a).frob_norm() <= 1e-11 * a.frob_norm());
    }

    #[test]
    fn all_four_moore_penrose_identities() {
        for (m, n, seed) in [(8usize, 5usize, 33u64), (5, 8, 34), (6, 6, 35)] {
            let a = DenseMatrix::gaussian(m, n, seed);
            let p = pinv_eps(&a, 0.0).unwrap();
            let scale = a.frob_norm();
            let ap = matmul(&a, &p).unwrap();
            let pa = matmul(&p, &a).unwrap();
            // A P A = A
            assert!(matmul(&ap, &a).unwrap().sub(&a).frob_norm() <= 1e-10 * scale);
            // P A P = P
            assert!(matmul(&pa, &p).unwrap().sub(&p).frob_norm() <= 1e-10 * p.frob_norm());
            // (A P)^T = A P
            assert!(ap.transpose().sub(&ap).frob_norm() <= 1e-10);
            // (P A)^T = P A
            assert!(pa.transpose().sub(&pa).frob_norm() <= 1e-10);
            let _ = matmul_trans_a(&a, &a);
        }
    }

    #[test]
    fn negative_eps_rejected() {
        let a = DenseMatrix::identity(2);
        assert!(pinv_eps(&a, -1e-3).is_err());
    }

    #[test]
    fn zero_matrix_gives_zero_of_transposed_shape() {
        let a = DenseMatrix::zeros(3, 7);
        let (p, rank) = pinv_eps_with_rank(&a, 0.0).unwrap();
        assert_eq!(p.shape(), (7, 3));
        assert_eq!(rank, 0);
        assert_eq!(p.frob_norm(), 0.0);
    }
}

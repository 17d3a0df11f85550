//! Dense singular value decomposition.
//!
//! Golub-Kahan: Householder bidiagonalization followed by implicit-shift QR
//! iteration on the bidiagonal, with singular values returned nonincreasing
//! and nonnegative. Backward stable; the contract is the reconstruction
//! residual, not the iteration count. Wide inputs are transposed internally.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// m x k with orthonormal columns, k = min(m, n).
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative singular values, length k.
    pub sigma: Vec<f64>,
    /// k x n with orthonormal rows.
    pub vt: DenseMatrix,
}

impl SvdResult {
    /// U * diag(sigma) * V^T, for test-scale checks.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            for v in us.col_mut(j) {
                *v *= s;
            }
        }
        crate::dense::matmul(&us, &self.vt).expect("conforming by construction")
    }
}

/// Reflector tails are stored below the diagonal (left) and right of the
/// superdiagonal (right) of the working copy.
struct Bidiag {
    w: DenseMatrix,
    tau_left: Vec<f64>,
    tau_right: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>, // e[j] = B[j, j+1]; slot n-1 unused and kept zero
}

fn householder_in_slice(x: &mut [f64]) -> f64 {
    let x0 = x[0];
    let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
    if sigma == 0.0 {
        if x0 < 0.0 {
            x[0] = -x0;
            return 2.0;
        }
        return 0.0;
    }
    let mu = (x0 * x0 + sigma).sqrt();
    let beta = if x0 <= 0.0 { mu } else { -mu };
    let tau = (beta - x0) / beta;
    let scale = 1.0 / (x0 - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    x[0] = beta;
    tau
}

/// Reduce a (m >= n) to upper bidiagonal form.
fn bidiagonalize(a: &DenseMatrix) -> Bidiag {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut tau_left = vec![0.0; n];
    let mut tau_right = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; m.max(n)];

    for k in 0..n {
        // left reflector: zero w[k+1.., k]
        let tl = householder_in_slice(&mut w.col_mut(k)[k..]);
        tau_left[k] = tl;
        d[k] = w[(k, k)];
        if tl != 0.0 {
            let tail = m - k - 1;
            v[..tail].copy_from_slice(&w.col(k)[k + 1..]);
            for c in k + 1..n {
                let target = &mut w.col_mut(c)[k..];
                let mut dot = target[0];
                for (vi, ti) in v[..tail].iter().zip(&target[1..]) {
                    dot += vi * ti;
                }
                dot *= tl;
                target[0] -= dot;
                for (vi, ti) in v[..tail].iter().zip(&mut target[1..]) {
                    *ti -= dot * vi;
                }
            }
        }
        if k + 1 < n {
            if k + 2 < n {
                // right reflector: zero w[k, k+2..]
                let len = n - k - 1;
                for (t, c) in v[..len].iter_mut().zip(k + 1..n) {
                    *t = w[(k, c)];
                }
                let tr = householder_in_slice(&mut v[..len]);
                tau_right[k] = tr;
                e[k] = v[0];
                w[(k, k + 1)] = v[0];
                for (idx, c) in (k + 2..n).enumerate() {
                    w[(k, c)] = v[idx + 1];
                }
                if tr != 0.0 {
                    // apply from the right to rows k+1..m:
                    // z = W[k+1.., k+1..n] * u  (u = [1, v[1..len]])
                    let mut z = vec![0.0; m - k - 1];
                    {
                        let c0 = &w.col(k + 1)[k + 1..];
                        z.copy_from_slice(c0);
                    }
                    for (t, c) in v[1..len].iter().zip(k + 2..n) {
                        if *t != 0.0 {
                            let colc = &w.col(c)[k + 1..];
                            for (zi, ci) in z.iter_mut().zip(colc) {
                                *zi += t * ci;
                            }
                        }
                    }
                    for zi in &mut z {
                        *zi *= tr;
                    }
                    // W[k+1.., c] -= z * u[c]
                    {
                        let c0 = &mut w.col_mut(k + 1)[k + 1..];
                        for (ci, zi) in c0.iter_mut().zip(&z) {
                            *ci -= zi;
                        }
                    }
                    for (offset, &uc) in v[1..len].iter().enumerate() {
                        if uc != 0.0 {
                            let colc = &mut w.col_mut(k + 2 + offset)[k + 1..];
                            for (ci, zi) in colc.iter_mut().zip(&z) {
                                *ci -= uc * zi;
                            }
                        }
                    }
                }
            } else {
                // single superdiagonal element, nothing to zero beyond it
                e[k] = w[(k, k + 1)];
            }
        }
    }
    Bidiag {
        w,
        tau_left,
        tau_right,
        d,
        e,
    }
}

/// Accumulate U (m x n economy) from the stored left reflectors.
fn accumulate_u(b: &Bidiag, m: usize, n: usize) -> DenseMatrix {
    let mut u = DenseMatrix::zeros(m, n);
    for j in 0..n {
        u[(j, j)] = 1.0;
    }
    let mut v = vec![0.0; m];
    for k in (0..n).rev() {
        let tau = b.tau_left[k];
        if tau == 0.0 {
            continue;
        }
        let tail = m - k - 1;
        v[..tail].copy_from_slice(&b.w.col(k)[k + 1..]);
        for c in k..n {
            let target = &mut u.col_mut(c)[k..];
            let mut dot = target[0];
            for (vi, ti) in v[..tail].iter().zip(&target[1..]) {
                dot += vi * ti;
            }
            dot *= tau;
            target[0] -= dot;
            for (vi, ti) in v[..tail].iter().zip(&mut target[1..]) {
                *ti -= dot * vi;
            }
        }
    }
    u
}

/// Accumulate V (n x n) from the stored right reflectors.
fn accumulate_v(b: &Bidiag, n: usize) -> DenseMatrix {
    let mut v = DenseMatrix::identity(n);
    if n < 3 {
        return v;
    }
    let mut refl = vec![0.0; n];
    for k in (0..n - 2).rev() {
        let tau = b.tau_right[k];
        if tau == 0.0 {
            continue;
        }
        let len = n - k - 1;
        refl[0] = 1.0;
        for (t, c) in refl[1..len].iter_mut().zip(k + 2..n) {
            *t = b.w[(k, c)];
        }
        // left-apply G_k = I - tau u u^T to rows k+1..n of V
        for c in 0..n {
            let target = &mut v.col_mut(c)[k + 1..];
            let mut dot = 0.0;
            for (ui, ti) in refl[..len].iter().zip(target.iter()) {
                dot += ui * ti;
            }
            dot *= tau;
            for (ui, ti) in refl[..len].iter().zip(target.iter_mut()) {
                *ti -= dot * ui;
            }
        }
    }
    v
}

fn rotate_cols(m: &mut DenseMatrix, a: usize, b: usize, c: f64, s: f64) {
    let rows = m.rows();
    for i in 0..rows {
        let t = c * m[(i, a)] + s * m[(i, b)];
        m[(i, b)] = -s * m[(i, a)] + c * m[(i, b)];
        m[(i, a)] = t;
    }
}

fn hypot(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Implicit-shift QR on the bidiagonal (d, e), accumulating into U and V.
fn diagonalize(
    d: &mut [f64],
    e: &mut [f64],
    u: &mut DenseMatrix,
    v: &mut DenseMatrix,
) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let tiny = 2.0_f64.powi(-966);
    let mut p = n;
    let pp_top = n - 1;
    let mut iter = 0usize;
    let max_iter_per_level = 500usize;

    while p > 0 {
        if iter > max_iter_per_level {
            let rem: f64 = e[..p - 1].iter().map(|x| x.abs()).sum();
            return Err(Error::Factorization(format!(
                "bidiagonal QR did not converge: {iter} iterations at block end {p}, \
                 remaining off-diagonal mass {rem:.3e}"
            )));
        }
        // find split point
        let mut k_split: isize = -1;
        for k in (0..p.saturating_sub(1)).rev() {
            if e[k].abs() <= tiny + eps * (d[k].abs() + d[k + 1].abs()) {
                e[k] = 0.0;
                k_split = k as isize;
                break;
            }
        }
        let kase;
        let mut k;
        if k_split == (p as isize) - 2 {
            kase = 4;
            k = k_split;
        } else {
            let mut ks = (p as isize) - 1;
            while ks > k_split {
                let t = if ks != p as isize - 1 {
                    e[ks as usize].abs()
                } else {
                    0.0
                } + if ks != k_split + 1 {
                    e[ks as usize - 1].abs()
                } else {
                    0.0
                };
                if d[ks as usize].abs() <= tiny + eps * t {
                    d[ks as usize] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k_split {
                kase = 3;
                k = k_split;
            } else if ks == p as isize - 1 {
                kase = 1;
                k = k_split;
            } else {
                kase = 2;
                k = ks;
            }
        }
        k += 1;
        let k = k as usize;

        match kase {
            1 => {
                // d[p-1] negligible: chase e[p-2] away with right rotations
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..p - 1).rev() {
                    let t = hypot(d[j], f);
                    let (cs, sn) = if t == 0.0 {
                        (1.0, 0.0)
                    } else {
                        (d[j] / t, f / t)
                    };
                    d[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    rotate_cols(v, j, p - 1, cs, sn);
                }
            }
            2 => {
                // d[k-1] negligible: chase e[k-1] away with left rotations
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = hypot(d[j], f);
                    let (cs, sn) = if t == 0.0 {
                        (1.0, 0.0)
                    } else {
                        (d[j] / t, f / t)
                    };
                    d[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    rotate_cols(u, j, k - 1, cs, sn);
                }
            }
            3 => {
                // one implicit-shift QR sweep on block k .. p-1
                let scale = d[p - 1]
                    .abs()
                    .max(d[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(d[k].abs())
                    .max(e[k].abs());
                let sp = d[p - 1] / scale;
                let spm1 = d[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = d[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..p - 1 {
                    let t = hypot(f, g);
                    let (mut cs, mut sn) = if t == 0.0 { (1.0, 0.0) } else { (f / t, g / t) };
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * d[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * d[j];
                    g = sn * d[j + 1];
                    d[j + 1] *= cs;
                    rotate_cols(v, j, j + 1, cs, sn);
                    let t2 = hypot(f, g);
                    if t2 == 0.0 {
                        cs = 1.0;
                        sn = 0.0;
                    } else {
                        cs = f / t2;
                        sn = g / t2;
                    }
                    d[j] = t2;
                    f = cs * e[j] + sn * d[j + 1];
                    d[j + 1] = -sn * e[j] + cs * d[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    rotate_cols(u, j, j + 1, cs, sn);
                }
                e[p - 2] = f;
                iter += 1;
            }
            _ => {
                // converged singular value at position k
                let mut kk = k;
                if d[kk] <= 0.0 {
                    d[kk] = if d[kk] < 0.0 { -d[kk] } else { 0.0 };
                    // negate V column kk
                    for i in 0..v.rows() {
                        v[(i, kk)] = -v[(i, kk)];
                    }
                }
                while kk < pp_top {
                    if d[kk] >= d[kk + 1] {
                        break;
                    }
                    d.swap(kk, kk + 1);
                    swap_cols(v, kk, kk + 1);
                    swap_cols(u, kk, kk + 1);
                    kk += 1;
                }
                iter = 0;
                p -= 1;
            }
        }
    }
    Ok(())
}

fn swap_cols(m: &mut DenseMatrix, a: usize, b: usize) {
    for i in 0..m.rows() {
        let t = m[(i, a)];
        m[(i, a)] = m[(i, b)];
        m[(i, b)] = t;
    }
}

fn svd_tall(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let bd = bidiagonalize(a);
    let mut u = accumulate_u(&bd, m, n);
    let mut v = accumulate_v(&bd, n);
    let mut d = bd.d.clone();
    let mut e = bd.e.clone();
    // last e slot is a scratch zero, mirror that in the iteration arrays
    e[n - 1] = 0.0;
    diagonalize(&mut d, &mut e, &mut u, &mut v)?;
    Ok(SvdResult {
        u,
        sigma: d,
        vt: v.transpose(),
    })
}

/// Full (economy) SVD. Deterministic up to the sign convention of the
/// singular-vector pairs, which is itself fixed for a given input.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Parameter("svd requires a nonempty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("svd: non-finite entries".into()));
    }
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.transpose())?;
        Ok(SvdResult {
            u: t.vt.transpose(),
            sigma: t.sigma,
            vt: t.u.transpose(),
        })
    }
}

/// Just the singular values.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{matmul, matmul_trans_a, matmul_trans_b};

    fn check_roundtrip(a: &DenseMatrix, tol: f64) {
        let s = svd(a).unwrap();
        let recon = s.reconstruct();
        let denom = a.frob_norm().max(1e-300);
        let resid = recon.sub(a).frob_norm() / denom;
        assert!(resid <= tol, "residual {resid} > {tol}");
        for w in s.sigma.windows(2) {
            assert!(w[0] >= w[1], "sigma not sorted: {:?}", s.sigma);
        }
        assert!(s.sigma.iter().all(|&x| x >= 0.0));
        // orthonormality
        let utu = matmul_trans_a(&s.u, &s.u).unwrap();
        let k = s.sigma.len();
        assert!(utu.sub(&DenseMatrix::identity(k)).frob_norm() < 1e-12 * (k as f64).sqrt() + 1e-13);
        let vvt = matmul_trans_b(&s.vt, &s.vt).unwrap();
        assert!(vvt.sub(&DenseMatrix::identity(k)).frob_norm() < 1e-12 * (k as f64).sqrt() + 1e-13);
    }

    #[test]
    fn diagonal_matrix() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!((s.sigma[1] - 2.0).abs() < 1e-14);
        assert!((s.sigma[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_outer_product() {
        // u with norm 2, v with norm 3 -> sigma = (6, 0, 0)
        let u = [2.0, 0.0, 0.0];
        let v = [0.0, 3.0, 0.0];
        let a = DenseMatrix::from_fn(3, 3, |i, j| u[i] * v[j]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 6.0).abs() < 1e-13);
        assert!(s.sigma[1].abs() < 1e-13);
        assert!(s.sigma[2].abs() < 1e-13);
    }

    #[test]
    fn roundtrip_shapes() {
        for (m, n, seed) in [
            (1, 1, 1u64),
            (1, 5, 2),
            (5, 1, 3),
            (2, 2, 4),
            (7, 7, 5),
            (20, 7, 6),
            (7, 20, 7),
            (60, 60, 8),
            (80, 35, 9),
        ] {
            let a = DenseMatrix::gaussian(m, n, seed);
            check_roundtrip(&a, 1e-12);
        }
    }

    #[test]
    fn roundtrip_low_rank() {
        let b = DenseMatrix::gaussian(40, 5, 10);
        let c = DenseMatrix::gaussian(5, 30, 11);
        let a = matmul(&b, &c).unwrap();
        check_roundtrip(&a, 1e-12);
        let s = svd(&a).unwrap();
        assert!(s.sigma[5] <= 1e-12 * s.sigma[0]);
    }

    #[test]
    fn zero_matrix() {
        let a = DenseMatrix::zeros(4, 3);
        let s = svd(&a).unwrap();
        assert!(s.sigma.iter().all(|&x| x == 0.0));
        check_roundtrip(&a, 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(1, 1)] = f64::INFINITY;
        assert!(svd(&a).is_err());
    }
}

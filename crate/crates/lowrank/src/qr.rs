//! Economy-size QR by Householder reflections (unpivoted).
//!
//! For an m x n input, `qr_econ` returns Q with k = min(m, n) orthonormal
//! columns and R upper triangular (k x n) with A = Q R. Reflector signs are
//! fixed deterministically (the reflected diagonal carries the opposite
//! sign of the leading entry, with sign(0) = +1), so a given input always
//! produces the same factors.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QrEconResult {
    /// m x k, orthonormal columns.
    pub q: DenseMatrix,
    /// k x n, upper triangular; entries below the diagonal are exactly zero.
    pub r: DenseMatrix,
}

/// Build a Householder reflector in place over `x`.
/// On return x[0] holds beta (the reflected value) and x[1..] the reflector
/// tail in LAPACK convention (leading component 1 implicit). Returns tau.
fn make_householder(x: &mut [f64]) -> f64 {
    let x0 = x[0];
    let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
    if sigma == 0.0 {
        if x0 < 0.0 {
            // flip sign so the convention is uniform: beta = -sign(x0)*|x0|
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

struct Reflectors {
    /// Working copy of A holding reflector tails below the diagonal.
    w: DenseMatrix,
    tau: Vec<f64>,
    k: usize,
}

fn factor(a: &DenseMatrix) -> Reflectors {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut w = a.clone();
    let mut tau = vec![0.0; k];
    let mut v = vec![0.0; m];
    for (j, tau_j) in tau.iter_mut().enumerate() {
        *tau_j = make_householder(&mut w.col_mut(j)[j..]);
        if *tau_j != 0.0 {
            let t = *tau_j;
            let tail = m - j - 1;
            v[..tail].copy_from_slice(&w.col(j)[j + 1..]);
            // apply H_j = I - tau v v^T to trailing columns
            for c in j + 1..n {
                let target = &mut w.col_mut(c)[j..];
                let mut dot = target[0];
                for (vi, ti) in v[..tail].iter().zip(&target[1..]) {
                    dot += vi * ti;
                }
                dot *= t;
                target[0] -= dot;
                for (vi, ti) in v[..tail].iter().zip(&mut target[1..]) {
                    *ti -= dot * vi;
                }
            }
        }
    }
    Reflectors { w, tau, k }
}

/// Accumulate the first `k` columns of H_0 H_1 ... H_{k-1}.
fn form_q(refl: &Reflectors) -> DenseMatrix {
    let (m, _) = refl.w.shape();
    let k = refl.k;
    let mut q = DenseMatrix::zeros(m, k);
    for j in 0..k {
        q[(j, j)] = 1.0;
    }
    for j in (0..k).rev() {
        let tau = refl.tau[j];
        if tau == 0.0 {
            continue;
        }
        for c in j..k {
            // w = tau * (v^T q_c); q_c -= w v    with v = [1, w[j+1.., j]]
            let vcol = refl.w.col(j);
            let v_tail = &vcol[j + 1..];
            let qc = q.col_mut(c);
            let mut dot = qc[j];
            for (vi, qi) in v_tail.iter().zip(&qc[j + 1..]) {
                dot += vi * qi;
            }
            dot *= tau;
            qc[j] -= dot;
            for (vi, qi) in v_tail.iter().zip(&mut qc[j + 1..]) {
                *qi -= dot * vi;
            }
        }
    }
    q
}

pub fn qr_econ(a: &DenseMatrix) -> Result<QrEconResult> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::Parameter(
            "qr_econ requires rows >= 1, cols >= 1".into(),
        ));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("qr_econ: non-finite entries".into()));
    }
    let refl = factor(a);
    let k = refl.k;
    let mut r = DenseMatrix::zeros(k, n);
    for j in 0..n {
        let wj = refl.w.col(j);
        for i in 0..k.min(j + 1) {
            r[(i, j)] = wj[i];
        }
    }
    let q = form_q(&refl);
    Ok(QrEconResult { q, r })
}

/// Orthonormal basis for the range of `a` (the Q-factor of its economy QR).
pub fn orth(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() > a.rows() {
        return Err(Error::Parameter(format!(
            "orth requires cols <= rows, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(qr_econ(a)?.q)
}

//! Closed-form expected-error bounds used as acceptance oracles.
//!
//! Every evaluator consumes a [`SpectrumTail`]: the full exact singular
//! value vector of the test matrix together with the target rank k. Bounds
//! are evaluated from the true spectrum (generator-known or computed by an
//! exact SVD), never from an estimate, so the oracles carry no estimation
//! error of their own.

use crate::error::{Error, Result};

/// Exact spectrum plus target rank. The tail past k is what the bounds see.
#[derive(Clone, Debug)]
pub struct SpectrumTail {
    sigma: Vec<f64>,
    k: usize,
}

impl SpectrumTail {
    pub fn new(sigma: Vec<f64>, k: usize) -> Result<Self> {
        if k >= sigma.len() {
            return Err(Error::Parameter(format!(
                "target rank k = {k} must be < spectrum length {}",
                sigma.len()
            )));
        }
        for w in sigma.windows(2) {
            if w[1] > w[0] {
                return Err(Error::InvalidInput("spectrum must be nonincreasing".into()));
            }
        }
        if sigma.iter().any(|&s| s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidInput(
                "spectrum must be nonnegative and finite".into(),
            ));
        }
        Ok(SpectrumTail { sigma, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// sigma_{k+1} (1-indexed), the spectral norm of the tail.
    pub fn sigma_k_plus_1(&self) -> f64 {
        self.sigma[self.k]
    }

    /// || A - A_k ||_F = sqrt(sum_{i > k} sigma_i^2).
    pub fn tail_frob(&self) -> f64 {
        self.sigma[self.k..]
            .iter()
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt()
    }

    /// sum_{i > k} sigma_i^4.
    pub fn tail_fourth_power_sum(&self) -> f64 {
        self.sigma[self.k..].iter().map(|s| s.powi(4)).sum()
    }

    /// || Sigma_2^t ||_F = sqrt(sum_{i > k} sigma_i^{2t}).
    pub fn tail_power_frob(&self, t: u32) -> f64 {
        self.sigma[self.k..]
            .iter()
            .map(|s| s.powi(2 * t as i32))
            .sum::<f64>()
            .sqrt()
    }

    /// || A ||_F over the whole spectrum.
    pub fn full_frob(&self) -> f64 {
        self.sigma.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

fn require(cond: bool, msg: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg))
    }
}

/// Expected Frobenius error bound for randomized SVD:
/// sqrt(1 + k / (r - k - 1)) * ||A - A_k||_F, valid for r >= k + 2.
pub fn bound_rsvd_frob(tail: &SpectrumTail, r: usize) -> Result<f64> {
    let k = tail.k;
    require(
        r >= k + 2,
        format!("rsvd bound needs r >= k + 2, got r = {r}, k = {k}"),
    )?;
    let factor = (1.0 + k as f64 / (r - k - 1) as f64).sqrt();
    Ok(factor * tail.tail_frob())
}

/// Expected Frobenius error bound for generalized Nystrom with oversampling l:
/// sqrt((1 + (r + l)/(l - 1)) (1 + k/(r - k - 1))) * ||A - A_k||_F.
pub fn bound_gn_frob(tail: &SpectrumTail, r: usize, l: usize) -> Result<f64> {
    let k = tail.k;
    require(
        r >= k + 2,
        format!("gn bound needs r >= k + 2, got r = {r}, k = {k}"),
    )?;
    require(l >= 2, format!("gn bound needs l >= 2, got l = {l}"))?;
    let f1 = 1.0 + (r + l) as f64 / (l - 1) as f64;
    let f2 = 1.0 + k as f64 / (r - k - 1) as f64;
    Ok((f1 * f2).sqrt() * tail.tail_frob())
}

/// Expected Frobenius error bound for column-sketching generalized Nystrom:
/// (1 + k/(r - k - 1))^{1/4} * || Sigma_2^2 ||_F^{1/2}. This is the q = 1
/// case of [`bound_row_subspace_iter_frob`], evaluated through it so the two
/// agree bit for bit.
pub fn bound_gnc_frob(tail: &SpectrumTail, r: usize) -> Result<f64> {
    bound_row_subspace_iter_frob(tail, r, 1)
}

/// Expected spectral error bound for column-sketching generalized Nystrom:
/// [ (1 + sqrt(k/(r-k-1))) sigma_{k+1}^2
///   + (e sqrt(r)/(r-k)) (sum_{i>k} sigma_i^4)^{1/2} ]^{1/2}.
pub fn bound_gnc_spec(tail: &SpectrumTail, r: usize) -> Result<f64> {
    let k = tail.k;
    require(
        r >= k + 2,
        format!("gn-c bound needs r >= k + 2, got r = {r}, k = {k}"),
    )?;
    let s1 = tail.sigma_k_plus_1();
    let first = (1.0 + (k as f64 / (r - k - 1) as f64).sqrt()) * s1 * s1;
    let second = std::f64::consts::E * (r as f64).sqrt() / (r - k) as f64
        * tail.tail_fourth_power_sum().sqrt();
    Ok((first + second).sqrt())
}

/// Heuristic spectral bound for randomized SVD,
/// (sqrt(m) + sqrt(r)) / (sqrt(r) - sqrt(k)) * sigma_{k+1}.
/// Report-only: the underlying statement is an approximation, not an
/// inequality, so it never gates a verdict.
pub fn bound_rsvd_spec_heuristic(tail: &SpectrumTail, r: usize, m: usize) -> Result<f64> {
    let k = tail.k;
    require(
        r > k,
        format!("rsvd spectral heuristic needs r > k, got r = {r}, k = {k}"),
    )?;
    let factor = ((m as f64).sqrt() + (r as f64).sqrt()) / ((r as f64).sqrt() - (k as f64).sqrt());
    Ok(factor * tail.sigma_k_plus_1())
}

/// Expected Frobenius bound for randomized subspace iteration with q power
/// products of A A^T applied to A Omega:
/// (1 + k/(r-k-1))^{1/(4q+2)} * || Sigma_2^{2q+1} ||_F^{1/(2q+1)}.
/// At q = 0 this is the rsvd bound.
pub fn bound_subspace_iter_frob(tail: &SpectrumTail, r: usize, q: u32) -> Result<f64> {
    let k = tail.k;
    require(
        r >= k + 2,
        format!("subspace bound needs r >= k + 2, got r = {r}, k = {k}"),
    )?;
    let exponent = 1.0 / (4.0 * q as f64 + 2.0);
    let factor = (1.0 + k as f64 / (r - k - 1) as f64).powf(exponent);
    let power = 2 * q + 1;
    Ok(factor * tail.tail_power_frob(power).powf(1.0 / power as f64))
}

/// Expected Frobenius bound for the halfway (row-space) subspace iteration
/// with 2q power products, q >= 1:
/// (1 + k/(r-k-1))^{1/(4q)} * || Sigma_2^{2q} ||_F^{1/(2q)}.
/// At q = 1 this is exactly the gn-c Frobenius bound.
pub fn bound_row_subspace_iter_frob(tail: &SpectrumTail, r: usize, q: u32) -> Result<f64> {
    let k = tail.k;
    require(
        q >= 1,
        format!("row-subspace bound needs q >= 1, got q = {q}"),
    )?;
    require(
        r >= k + 2,
        format!("subspace bound needs r >= k + 2, got r = {r}, k = {k}"),
    )?;
    let exponent = 1.0 / (4.0 * q as f64);
    let factor = (1.0 + k as f64 / (r - k - 1) as f64).powf(exponent);
    let power = 2 * q;
    Ok(factor * tail.tail_power_frob(power).powf(1.0 / power as f64))
}

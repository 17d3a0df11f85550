//! Deterministic synthetic test matrices with exactly known spectra.
//!
//! Dense generators build A = M diag(sigma) N^T from the Q-factors of two
//! independent square Gaussian draws, so the singular values of the output
//! are the requested ones up to factorization roundoff and the exact
//! spectrum is available for bound oracles.

use crate::dense::{matmul_trans_b, DenseMatrix};
use crate::error::{Error, Result};
use crate::qr::qr_econ;
use crate::rng::Stream;
use crate::sparse::SparseMatrix;

/// Spectrum shapes addressable by name in the CLI and sweep configs.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumSpec {
    /// sigma_i = i^{-p}; presets p = 1 (slow) and p = 2 (fast).
    PolyDecay(f64),
    /// sigma_i = 10^{-(i-1) q}; presets q = 0.125 (slow) and q = 0.25 (fast).
    ExpDecay(f64),
    /// sigma_i = 1 / i^2.
    InverseSquare,
    /// Explicit singular values (padded with zeros if shorter than dim).
    ExplicitVector(Vec<f64>),
    /// sigma_i = 1/i for i <= r, zero beyond.
    ExactRank(usize),
}

impl SpectrumSpec {
    pub fn poly_slow() -> Self {
        SpectrumSpec::PolyDecay(1.0)
    }

    pub fn poly_fast() -> Self {
        SpectrumSpec::PolyDecay(2.0)
    }

    pub fn exp_slow() -> Self {
        SpectrumSpec::ExpDecay(0.125)
    }

    pub fn exp_fast() -> Self {
        SpectrumSpec::ExpDecay(0.25)
    }

    /// Singular values for an m-dimensional instance, 1-indexed formulas.
    pub fn spectrum(&self, m: usize) -> Vec<f64> {
        match self {
            SpectrumSpec::PolyDecay(p) => (1..=m).map(|i| (i as f64).powf(-p)).collect(),
            SpectrumSpec::ExpDecay(q) => {
                (1..=m).map(|i| 10f64.powf(-((i - 1) as f64) * q)).collect()
            }
            SpectrumSpec::InverseSquare => (1..=m).map(|i| 1.0 / (i as f64 * i as f64)).collect(),
            SpectrumSpec::ExplicitVector(v) => {
                let mut out = v.clone();
                out.truncate(m);
                out.resize(m, 0.0);
                out
            }
            SpectrumSpec::ExactRank(r) => (1..=m)
                .map(|i| if i <= *r { 1.0 / i as f64 } else { 0.0 })
                .collect(),
        }
    }

    /// Parse a generator name: "poly-slow", "poly-fast", "exp-slow",
    /// "exp-fast", "inv-square", `exact-rank:<r>`.
    pub fn parse(name: &str) -> Result<Self> {
        if let Some(r) = name.strip_prefix("exact-rank:") {
            let r: usize = r
                .parse()
                .map_err(|_| Error::Parameter(format!("bad exact-rank spec '{name}'")))?;
            return Ok(SpectrumSpec::ExactRank(r));
        }
        match name {
            "poly-slow" => Ok(SpectrumSpec::poly_slow()),
            "poly-fast" => Ok(SpectrumSpec::poly_fast()),
            "exp-slow" => Ok(SpectrumSpec::exp_slow()),
            "exp-fast" => Ok(SpectrumSpec::exp_fast()),
            "inv-square" => Ok(SpectrumSpec::InverseSquare),
            other => Err(Error::Parameter(format!("unknown generator '{other}'"))),
        }
    }
}

// substream labels for the two orthogonal factors
const STREAM_LEFT: u64 = 0x4c;
const STREAM_RIGHT: u64 = 0x52;

/// Square m x m matrix with exactly the spectrum of `spec`, plus that
/// spectrum for bound oracles.
pub fn synth_dense(spec: &SpectrumSpec, m: usize, seed: u64) -> Result<(DenseMatrix, Vec<f64>)> {
    if m < 2 {
        return Err(Error::Parameter(format!(
            "synth_dense requires m >= 2, got {m}"
        )));
    }
    let sigma = spec.spectrum(m);
    let left = qr_econ(&DenseMatrix::gaussian(
        m,
        m,
        crate::rng::derive(seed, STREAM_LEFT),
    ))?
    .q;
    let right = qr_econ(&DenseMatrix::gaussian(
        m,
        m,
        crate::rng::derive(seed, STREAM_RIGHT),
    ))?
    .q;
    // A = M * diag(sigma) * N^T; scale columns of M, then one product
    let mut scaled = left;
    for (j, &s) in sigma.iter().enumerate() {
        for v in scaled.col_mut(j) {
            *v *= s;
        }
    }
    let a = matmul_trans_b(&scaled, &right)?;
    Ok((a, sigma))
}

/// Symmetric PSD matrix of exact rank `rank`: A = B B^T with B Gaussian.
/// Symmetry is exact by construction (the lower triangle is mirrored).
pub fn synth_spsd(rank: usize, m: usize, seed: u64) -> Result<DenseMatrix> {
    if rank > m {
        return Err(Error::Parameter(format!(
            "synth_spsd requires rank <= m, got rank = {rank}, m = {m}"
        )));
    }
    let b = DenseMatrix::gaussian(m, rank, seed);
    let mut a = matmul_trans_b(&b, &b)?;
    for i in 0..m {
        for j in 0..i {
            let v = a[(j, i)];
            a[(i, j)] = v;
        }
    }
    Ok(a)
}

/// Random sparse nonsymmetric matrix whose leading singular values are flat
/// (iid Gaussian values at iid Bernoulli(density) positions; the
/// Marchenko-Pastur bulk keeps the top of the spectrum within a small
/// factor, which the tests verify post hoc).
pub fn flat_spectrum_sparse(m: usize, density: f64, seed: u64) -> Result<SparseMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Parameter(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let mut row_ptr = vec![0usize; m + 1];
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for i in 0..m {
        let mut stream = Stream::new(seed, i as u64);
        for j in 0..m {
            if stream.next_f64() < density {
                col_idx.push(j);
                values.push(stream.next_normal());
            }
        }
        row_ptr[i + 1] = col_idx.len();
    }
    SparseMatrix::from_csr(m, m, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::matmul;
    use crate::svd::singular_values;

    #[test]
    fn exact_rank_construction() {
        let (a, sigma) = synth_dense(&SpectrumSpec::ExactRank(5), 100, 7).unwrap();
        assert_eq!(sigma.iter().filter(|&&s| s > 0.0).count(), 5);
        let sv = singular_values(&a).unwrap();
        assert!(sv[5] <= 1e-12 * sv[0], "sigma_6 = {}", sv[5]);
    }

    #[test]
    fn poly_slow_sigma_10() {
        let (_, sigma) = synth_dense(&SpectrumSpec::poly_slow(), 200, 3).unwrap();
        assert!((sigma[9] - 0.1).abs() < 1e-10);
    }

    #[test]
    fn exp_fast_sigma_5() {
        let (_, sigma) = synth_dense(&SpectrumSpec::exp_fast(), 100, 3).unwrap();
        assert!((sigma[4] - 0.1).abs() < 1e-10);
    }

    #[test]
    fn generator_is_bit_deterministic() {
        let (a, _) = synth_dense(&SpectrumSpec::poly_fast(), 60, 11).unwrap();
        let (b, _) = synth_dense(&SpectrumSpec::poly_fast(), 60, 11).unwrap();
        assert_eq!(a, b);
        let s1 = flat_spectrum_sparse(50, 0.05, 2).unwrap();
        let s2 = flat_spectrum_sparse(50, 0.05, 2).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn spsd_is_exactly_symmetric_and_psd() {
        let a = synth_spsd(6, 40, 13).unwrap();
        assert_eq!(a.sub(&a.transpose()).frob_norm(), 0.0);
        let sv = singular_values(&a).unwrap();
        assert!(sv[6] <= 1e-12 * sv[0]);
        // PSD: x^T A x >= -tiny for a few probes
        let x = DenseMatrix::gaussian(40, 5, 14);
        let ax = matmul(&a, &x).unwrap();
        for c in 0..5 {
            let quad: f64 = x.col(c).iter().zip(ax.col(c)).map(|(p, q)| p * q).sum();
            assert!(quad >= -1e-10 * sv[0]);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(flat_spectrum_sparse(20, 0.0, 1).is_err());
        assert!(flat_spectrum_sparse(20, 1.5, 1).is_err());
        assert!(synth_dense(&SpectrumSpec::poly_slow(), 1, 1).is_err());
        assert!(synth_spsd(10, 5, 1).is_err());
        assert!(SpectrumSpec::parse("exact-rank:x").is_err());
    }

    #[test]
    fn flat_sparse_shape_and_fill() {
        let m = 200;
        let density = 0.05;
        let s = flat_spectrum_sparse(m, density, 5).unwrap();
        let expected = density * (m * m) as f64;
        let got = s.nnz() as f64;
        assert!(
            (got - expected).abs() <= 0.1 * expected,
            "nnz {got} vs {expected}"
        );
        // nonsymmetric
        let d = s.to_dense();
        assert!(d.sub(&d.transpose()).frob_norm() > 0.1 * d.frob_norm());
    }
}

//! Randomized low-rank approximation schemes.
//!
//! Every scheme returns a [`LowRankFactors`] triple L (m x r), core (r x r
//! or an identity marker) and Rt (r x n) with A ~= L * core * Rt; the dense
//! approximant is never formed except by the test-scale `materialize`.
//!
//! Randomness discipline: one run seed derives the X sketch from substream 1
//! and the Y sketch from substream 2, so schemes sharing a seed share their
//! X draw (paired comparisons) while X and Y stay independent.

use crate::dense::{matmul, matmul_trans_a, DenseMatrix};
use crate::error::{Error, Result};
use crate::pinv::pinv_eps_with_rank;
use crate::qr::{orth, qr_econ};
use crate::rng::derive;
use crate::sketch::{SketchKind, SketchOperator};
use crate::solve::{tri_solve_upper_hinted, TriSide};
use crate::sparse::AnyMatrix;
use crate::svd::svd;

/// Default relative threshold for the epsilon-pseudo-inverse: eps is this
/// times the largest singular value of the core being inverted.
pub const DEFAULT_EPS_REL: f64 = 64.0 * f64::EPSILON;

const STREAM_X: u64 = 1;
const STREAM_Y: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Rsvd,
    Gn,
    GnStabilized,
    GnRc,
    GnC,
    Nystrom,
    Rurv,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Rsvd => "rsvd",
            Scheme::Gn => "gn",
            Scheme::GnStabilized => "gn-stab",
            Scheme::GnRc => "gn-rc",
            Scheme::GnC => "gn-c",
            Scheme::Nystrom => "nystrom",
            Scheme::Rurv => "rurv",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rsvd" => Ok(Scheme::Rsvd),
            "gn" => Ok(Scheme::Gn),
            "gn-stab" => Ok(Scheme::GnStabilized),
            "gn-rc" => Ok(Scheme::GnRc),
            "gn-c" => Ok(Scheme::GnC),
            "nystrom" => Ok(Scheme::Nystrom),
            "rurv" => Ok(Scheme::Rurv),
            other => Err(Error::Parameter(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoreFactor {
    Identity,
    Dense(DenseMatrix),
}

impl CoreFactor {
    fn apply(&self, rt: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            CoreFactor::Identity => Ok(rt.clone()),
            CoreFactor::Dense(c) => matmul(c, rt),
        }
    }
}

/// Factored rank-r approximation A ~= left * core * right_t.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactors {
    pub left: DenseMatrix,
    pub core: CoreFactor,
    pub right_t: DenseMatrix,
    pub scheme: Scheme,
    /// Effective rank after any epsilon-truncation.
    pub rank_used: usize,
}

impl LowRankFactors {
    fn new(
        left: DenseMatrix,
        core: CoreFactor,
        right_t: DenseMatrix,
        scheme: Scheme,
        rank_used: usize,
    ) -> Self {
        debug_assert_eq!(left.cols(), right_t.rows());
        if let CoreFactor::Dense(c) = &core {
            debug_assert_eq!(c.rows(), left.cols());
            debug_assert_eq!(c.cols(), right_t.rows());
        }
        LowRankFactors {
            left,
            core,
            right_t,
            scheme,
            rank_used,
        }
    }

    pub fn rows(&self) -> usize {
        self.left.rows()
    }

    pub fn cols(&self) -> usize {
        self.right_t.cols()
    }

    /// The dense approximant; intended for test-scale matrices only.
    pub fn materialize(&self) -> DenseMatrix {
        let mid = self.core.apply(&self.right_t).expect("conforming factors");
        matmul(&self.left, &mid).expect("conforming factors")
    }
}

/// Shared configuration for the approximation schemes.
#[derive(Clone, Debug)]
pub struct ApproxConfig {
    pub rank: usize,
    /// Oversampling for GN; `None` means the default ceil(r / 2)
    /// (floored at 2, the smallest value with a finite error bound).
    pub oversampling: Option<usize>,
    /// Power iterations for rsvd / rurv range finding.
    pub power_q: usize,
    /// Relative threshold of the epsilon-pseudo-inverse.
    pub eps_rel: f64,
    pub seed: u64,
    pub sketch_kind: SketchKind,
}

impl ApproxConfig {
    pub fn new(rank: usize, seed: u64) -> Self {
        ApproxConfig {
            rank,
            oversampling: None,
            power_q: 0,
            eps_rel: DEFAULT_EPS_REL,
            seed,
            sketch_kind: SketchKind::Gaussian,
        }
    }

    pub fn with_oversampling(mut self, l: usize) -> Self {
        self.oversampling = Some(l);
        self
    }

    pub fn with_power_q(mut self, q: usize) -> Self {
        self.power_q = q;
        self
    }

    pub fn with_sketch_kind(mut self, kind: SketchKind) -> Self {
        self.sketch_kind = kind;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn effective_oversampling(&self) -> usize {
        self.oversampling
            .unwrap_or_else(|| self.rank.div_ceil(2))
            .max(2)
    }

    fn check_rank(&self, m: usize, n: usize) -> Result<()> {
        if self.rank < 1 {
            return Err(Error::Parameter("rank must be >= 1".into()));
        }
        if self.rank > m.min(n) {
            return Err(Error::Parameter(format!(
                "rank {} exceeds min(m, n) = {}",
                self.rank,
                m.min(n)
            )));
        }
        Ok(())
    }
}

/// Truncated pseudo-inverse with the relative epsilon policy:
/// keep singular values strictly above eps_rel * sigma_max.
fn pinv_rel(a: &DenseMatrix, eps_rel: f64) -> Result<(DenseMatrix, usize)> {
    let top = svd(a)?.sigma.first().copied().unwrap_or(0.0);
    pinv_eps_with_rank(a, eps_rel * top)
}

fn sketch_pair(
    config: &ApproxConfig,
    n: usize,
    m: usize,
    x_dim: usize,
    y_dim: usize,
) -> Result<(SketchOperator, SketchOperator)> {
    let x = SketchOperator::build(config.sketch_kind, n, x_dim, derive(config.seed, STREAM_X))?;
    let y = SketchOperator::build(config.sketch_kind, m, y_dim, derive(config.seed, STREAM_Y))?;
    Ok((x, y))
}

/// Randomized SVD. Returns orthonormal left factor Q U0, diagonal core and
/// V0^T; `power_q` > 0 builds the range from (A A^T)^q A Omega with
/// re-orthonormalization between products.
pub fn rsvd(a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    let (m, n) = (a.rows(), a.cols());
    config.check_rank(m, n)?;
    let r = config.rank;
    let omega = SketchOperator::build(config.sketch_kind, n, r, derive(config.seed, STREAM_X))?;
    let mut q = orth(&omega.apply_right_any(a)?)?;
    for _ in 0..config.power_q {
        let z = a.mul_dense(&a.tr_mul_dense(&q)?)?;
        q = orth(&z)?;
    }
    let b = a.tr_mul_dense(&q)?.transpose(); // Q^T A, r x n
    let s = svd(&b)?;
    let left = matmul(&q, &s.u)?;
    let core = CoreFactor::Dense(DenseMatrix::diag(&s.sigma));
    Ok(LowRankFactors::new(left, core, s.vt, Scheme::Rsvd, r))
}

/// Generalized Nystrom: A X (Y^T A X)^+ Y^T A realized through an economy
/// QR of the core and a guarded triangular solve.
pub fn gn(a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    let (m, n) = (a.rows(), a.cols());
    config.check_rank(m, n)?;
    let r = config.rank;
    let l = config.effective_oversampling();
    if l < 2 {
        return Err(Error::Parameter(format!(
            "gn requires oversampling l >= 2, got {l}"
        )));
    }
    if r + l > m.min(n) {
        return Err(Error::Parameter(format!(
            "gn requires r + l <= min(m, n), got {r} + {l} > {}",
            m.min(n)
        )));
    }
    let (opx, opy) = sketch_pair(config, n, m, r, r + l)?;
    let ax = opx.apply_right_any(a)?; // m x r
    let yta = opy.apply_left_any(a)?; // (r+l) x n
    let core = opy.apply_left(&ax)?; // Y^T A X, (r+l) x r
    let f = qr_econ(&core)?;
    let left = tri_solve_upper_hinted(
        &f.r,
        &ax,
        TriSide::Right,
        Some("core is numerically rank deficient; gn-stab handles this case"),
    )?;
    let right_t = matmul_trans_a(&f.q, &yta)?;
    Ok(LowRankFactors::new(
        left,
        CoreFactor::Identity,
        right_t,
        Scheme::Gn,
        r,
    ))
}

/// Stabilized generalized Nystrom: the core is inverted through an
/// epsilon-pseudo-inverse, shrinking `rank_used` instead of failing when
/// trailing singular values fall under the threshold.
pub fn gn_stabilized(a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    let (m, n) = (a.rows(), a.cols());
    config.check_rank(m, n)?;
    let r = config.rank;
    let l = config.effective_oversampling();
    if r + l > m.min(n) {
        return Err(Error::Parameter(format!(
            "gn-stab requires r + l <= min(m, n), got {r} + {l} > {}",
            m.min(n)
        )));
    }
    let (opx, opy) = sketch_pair(config, n, m, r, r + l)?;
    let ax = opx.apply_right_any(a)?;
    let yta = opy.apply_left_any(a)?;
    let core = opy.apply_left(&ax)?;
    let s = svd(&core)?;
    let eps = config.eps_rel * s.sigma.first().copied().unwrap_or(0.0);
    let kept = s.sigma.iter().take_while(|&&x| x > eps).count();
    // (Y^T A X)^+_eps = V1 Sigma1^{-1} U1^T, split across the triple
    let v1 = s.vt.transpose().leading_cols(kept); // r x kept
    let u1 = s.u.leading_cols(kept); // (r+l) x kept
    let left = matmul(&ax, &v1)?;
    let inv_sigma: Vec<f64> = s.sigma[..kept].iter().map(|x| 1.0 / x).collect();
    let core_f = CoreFactor::Dense(DenseMatrix::diag(&inv_sigma));
    let right_t = matmul_trans_a(&u1, &yta)?;
    Ok(LowRankFactors::new(
        left,
        core_f,
        right_t,
        Scheme::GnStabilized,
        kept,
    ))
}

/// Which of the two equivalent assemblies the row-and-column scheme uses in
/// its final step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GnRcBranch {
    /// Factor A Q2 = Qt Rt and assemble (A Q2) Rt^+ (Qt^T Q1) (A^T Q1)^T.
    QrOfAq2,
    /// Factor A^T Q1 = Qh Rh and assemble (A Q2) (Q2^T Qh) (Rh^T)^+ (A^T Q1)^T.
    QrOfAtq1,
}

/// Generalized Nystrom with both row and column sketching: the initial
/// Gaussian draws are replaced by the Q-factors of A X and A^T Y before the
/// core is formed, and the core inverse is assembled from a QR factor
/// rather than inverted directly.
pub fn gn_rc(a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    gn_rc_with_branch(a, config, GnRcBranch::QrOfAq2)
}

pub fn gn_rc_with_branch(
    a: &AnyMatrix,
    config: &ApproxConfig,
    branch: GnRcBranch,
) -> Result<LowRankFactors> {
    let (m, n) = (a.rows(), a.cols());
    config.check_rank(m, n)?;
    let r = config.rank;
    let (opx, opy) = sketch_pair(config, n, m, r, r)?;
    let ax = opx.apply_right_any(a)?; // m x r
    let aty = opy.apply_left_any(a)?.transpose(); // A^T Y, n x r
    let q1 = orth(&ax)?;
    let q2 = orth(&aty)?;
    let aq2 = a.mul_dense(&q2)?; // m x r
    let atq1 = a.tr_mul_dense(&q1)?; // n x r
    let (core, kept) = match branch {
        GnRcBranch::QrOfAq2 => {
            let f = qr_econ(&aq2)?;
            let (rt_pinv, kept) = pinv_rel(&f.r, config.eps_rel)?;
            let qt_q1 = matmul_trans_a(&f.q, &q1)?;
            (matmul(&rt_pinv, &qt_q1)?, kept)
        }
        GnRcBranch::QrOfAtq1 => {
            let f = qr_econ(&atq1)?;
            let (rh_t_pinv, kept) = pinv_rel(&f.r.transpose(), config.eps_rel)?;
            let q2_qh = matmul_trans_a(&q2, &f.q)?;
            (matmul(&q2_qh, &rh_t_pinv)?, kept)
        }
    };
    Ok(LowRankFactors::new(
        aq2,
        CoreFactor::Dense(core),
        atq1.transpose(),
        Scheme::GnRc,
        kept,
    ))
}

/// Generalized Nystrom with column sketching: a single Gaussian draw, two
/// QR factorizations, and a core that is just the inverse transpose of the
/// second R-factor. The guarded triangular path falls back to the
/// epsilon-pseudo-inverse when the factor is numerically singular.
pub fn gn_c(a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    let (m, n) = (a.rows(), a.cols());
    config.check_rank(m, n)?;
    let r = config.rank;
    let opx = SketchOperator::build(config.sketch_kind, n, r, derive(config.seed, STREAM_X))?;
    let ax = opx.apply_right_any(a)?; // m x r
    let q1 = qr_econ(&ax)?.q;
    let atq1 = a.tr_mul_dense(&q1)?; // n x r
    let f = qr_econ(&atq1)?; // Qh (n x r), Rh (r x r)
    let aqh = a.mul_dense(&f.q)?; // m x r
    let (core, kept) =
        match tri_solve_upper_hinted(&f.r, &DenseMatrix::identity(r), TriSide::Left, None) {
            Ok(rinv) => (rinv.transpose(), r),
            Err(Error::IllConditionedTriangular { .. }) => {
                let (p, kept) = pinv_rel(&f.r, config.eps_rel)?;
                (p.transpose(), kept)
            }
            Err(e) => return Err(e),
        };
    Ok(LowRankFactors::new(
        aqh,
        CoreFactor::Dense(core),
        atq1.transpose(),
        Scheme::GnC,
        kept,
    ))
}

/// Truncation modes for the classical SPSD Nystrom approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NystromTruncate {
    /// W C^+ W^T at full sketch rank.
    None,
    /// `W [C]_k^+ W^T`: truncate the core to rank k before inverting.
    CoreK,
    /// Best rank-k truncation of the full approximant, via its thin factors.
    FullK,
}

/// Classical Nystrom for symmetric positive semidefinite input:
/// W = A Omega, C = Omega^T A Omega, A ~= W C^+ W^T, with the two
/// truncation variants. Indefinite leakage in C is absorbed by the
/// epsilon-pseudo-inverse rather than failing.
pub fn nystrom_spsd(
    a: &DenseMatrix,
    omega: &SketchOperator,
    truncate: NystromTruncate,
    k: usize,
) -> Result<LowRankFactors> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Parameter("nystrom requires a square matrix".into()));
    }
    let asym = a.sub(&a.transpose()).frob_norm();
    if asym > 1e-10 * a.frob_norm() {
        return Err(Error::Symmetry(format!(
            "input is not symmetric: ||A - A^T|| = {asym:.3e}"
        )));
    }
    let r = omega.sketch_dim();
    if k > r {
        return Err(Error::Parameter(format!(
            "truncation rank k = {k} exceeds sketch rank r = {r}"
        )));
    }
    let w = omega.apply_right(a)?; // n x r
    let c = omega.apply_left(&w)?; // r x r
    match truncate {
        NystromTruncate::None => {
            let (cp, kept) = pinv_rel(&c, DEFAULT_EPS_REL)?;
            Ok(LowRankFactors::new(
                w.clone(),
                CoreFactor::Dense(cp),
                w.transpose(),
                Scheme::Nystrom,
                kept,
            ))
        }
        NystromTruncate::CoreK => {
            let s = svd(&c)?;
            let eps = DEFAULT_EPS_REL * s.sigma.first().copied().unwrap_or(0.0);
            let kept = s.sigma.iter().take(k).take_while(|&&x| x > eps).count();
            let v1 = s.vt.transpose().leading_cols(kept);
            let u1 = s.u.leading_cols(kept);
            let inv: Vec<f64> = s.sigma[..kept].iter().map(|x| 1.0 / x).collect();
            let mut v1s = v1;
            for (j, &iv) in inv.iter().enumerate() {
                for t in v1s.col_mut(j) {
                    *t *= iv;
                }
            }
            let ck_pinv = matmul(&v1s, &u1.transpose())?;
            Ok(LowRankFactors::new(
                w.clone(),
                CoreFactor::Dense(ck_pinv),
                w.transpose(),
                Scheme::Nystrom,
                kept,
            ))
        }
        NystromTruncate::FullK => {
            // A_nys = (W C^+) W^T = L R^T; best rank-k via QR of both thin
            // factors and an r x r SVD.
            let (cp, _) = pinv_rel(&c, DEFAULT_EPS_REL)?;
            let lfac = matmul(&w, &cp)?;
            let ql = qr_econ(&lfac)?;
            let qw = qr_econ(&w)?;
            let small = crate::dense::matmul_trans_b(&ql.r, &qw.r)?;
            let s = svd(&small)?;
            let kk = k.min(s.sigma.len());
            let left = matmul(&ql.q, &s.u.leading_cols(kk))?;
            let core = CoreFactor::Dense(DenseMatrix::diag(&s.sigma[..kk]));
            let vk = s.vt.transpose().leading_cols(kk);
            let right_t = matmul(&qw.q, &vk)?.transpose();
            Ok(LowRankFactors::new(
                left,
                core,
                right_t,
                Scheme::Nystrom,
                kk,
            ))
        }
    }
}

/// Randomized rank-revealing URV factors: A V = U R with V the Q-factor of
/// a Gaussian draw (optionally powered through (A^T A)^q) and [U, R] the
/// economy QR of A V.
#[derive(Clone, Debug)]
pub struct RurvFactors {
    pub u: DenseMatrix,
    pub r: DenseMatrix,
    pub v: DenseMatrix,
}

impl RurvFactors {
    /// U(:, 1..k) R(1..k, :) V^T, the rank-k truncation of the factorization.
    pub fn truncate(&self, k: usize) -> Result<DenseMatrix> {
        let uk = self.u.leading_cols(k);
        let mut rk = DenseMatrix::zeros(k, self.r.cols());
        for j in 0..self.r.cols() {
            for i in 0..k {
                rk[(i, j)] = self.r[(i, j)];
            }
        }
        matmul(&matmul(&uk, &rk)?, &self.v.transpose())
    }
}

pub fn rurv(a: &AnyMatrix, sketch_dim: usize, power_q: usize, seed: u64) -> Result<RurvFactors> {
    let n = a.cols();
    if sketch_dim < 1 || sketch_dim > n {
        return Err(Error::Parameter(format!(
            "rurv sketch_dim must satisfy 1 <= s <= n, got {sketch_dim}"
        )));
    }
    let mut omega = DenseMatrix::gaussian(n, sketch_dim, derive(seed, STREAM_X));
    for _ in 0..power_q {
        omega = a.tr_mul_dense(&a.mul_dense(&omega)?)?;
    }
    let v = orth(&omega)?;
    let av = a.mul_dense(&v)?;
    let f = qr_econ(&av)?;
    Ok(RurvFactors { u: f.q, r: f.r, v })
}

/// Relative Frobenius error || A - L core Rt ||_F / || A ||_F, streamed in
/// column blocks of width 256 so a sparse A is never densified as a whole
/// and exact reproduction measures as ~0 instead of cancellation noise.
pub fn relative_error(a: &AnyMatrix, factors: &LowRankFactors) -> Result<f64> {
    if factors.rows() != a.rows() || factors.cols() != a.cols() {
        return Err(Error::Dimension {
            op: "relative_error",
            left: (a.rows(), a.cols()),
            right: (factors.rows(), factors.cols()),
        });
    }
    let a_sq = a.frob_norm_sq();
    if a_sq == 0.0 {
        return Err(Error::DegenerateInput(
            "relative error of a zero-norm matrix".into(),
        ));
    }
    let n = a.cols();
    let block = 256;
    let mut diff_sq = 0.0;
    let mut j0 = 0;
    while j0 < n {
        let j1 = (j0 + block).min(n);
        let rt_block = factors.right_t.col_block(j0, j1);
        let mid = factors.core.apply(&rt_block)?;
        let ahat = matmul(&factors.left, &mid)?;
        let ablock = a.densify_col_block(j0, j1);
        let d = ablock.sub(&ahat);
        diff_sq += d.frob_norm_sq();
        j0 = j1;
    }
    Ok((diff_sq / a_sq).sqrt())
}

/// Spectral-norm error || A - L core Rt ||_2 via power iteration on the
/// materialized residual; test-scale sizes only.
pub fn spectral_error(a: &AnyMatrix, factors: &LowRankFactors) -> Result<f64> {
    let residual = a.to_dense().sub(&factors.materialize());
    Ok(crate::dense::spectral_norm(&residual, 300))
}

/// Dispatch by scheme tag; `nystrom` and `rurv` have dedicated entry points
/// with extra parameters and are not reachable from here.
pub fn run_scheme(scheme: Scheme, a: &AnyMatrix, config: &ApproxConfig) -> Result<LowRankFactors> {
    match scheme {
        Scheme::Rsvd => rsvd(a, config),
        Scheme::Gn => gn(a, config),
        Scheme::GnStabilized => gn_stabilized(a, config),
        Scheme::GnRc => gn_rc(a, config),
        Scheme::GnC => gn_c(a, config),
        Scheme::Nystrom | Scheme::Rurv => Err(Error::Parameter(format!(
            "scheme '{}' needs its dedicated entry point",
            scheme.as_str()
        ))),
    }
}

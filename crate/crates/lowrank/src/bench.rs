//! Sweep harness: error and runtime versus rank, over schemes and trials.
//!
//! A sweep loads or generates its matrix once, then runs every
//! (scheme, rank, trial) cell with deterministic per-trial seeds. Schemes
//! sharing a trial share their X sketch stream (paired comparisons); rank
//! prefixes share columns, so error columns replay bit for bit across runs.
//! Timing covers the scheme call only.

use crate::approx::{relative_error, run_scheme, ApproxConfig, Scheme};
use crate::bounds::{bound_gn_frob, bound_gnc_frob, bound_rsvd_frob, SpectrumTail};
use crate::error::{Error, Result};
use crate::rng::derive;
use crate::sketch::SketchKind;
use crate::sparse::AnyMatrix;
use crate::testgen::{flat_spectrum_sparse, synth_dense, SpectrumSpec};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Oversampling policy for schemes that take one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum OversamplingPolicy {
    /// l = ceil(r / 2), the scheme default.
    HalfR,
    /// A flat value for every rank.
    Fixed { l: usize },
}

impl OversamplingPolicy {
    pub fn l_for(&self, r: usize) -> usize {
        match self {
            OversamplingPolicy::HalfR => r.div_ceil(2).max(2),
            OversamplingPolicy::Fixed { l } => *l,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Generator name (optionally `name:<dim>`) or a Matrix Market path.
    pub matrix_source: String,
    pub schemes: Vec<String>,
    pub ranks: Vec<usize>,
    pub trials: usize,
    pub seed_base: u64,
    pub oversampling: OversamplingPolicy,
    pub sketch_kind: SketchKind,
    /// Target rank k used for bound columns and verification.
    pub k_for_bounds: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Parameter("trials must be >= 1".into()));
        }
        if self.ranks.is_empty() {
            return Err(Error::Parameter("ranks must be nonempty".into()));
        }
        for w in self.ranks.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Parameter("ranks must be strictly increasing".into()));
            }
        }
        for s in &self.schemes {
            let scheme: Scheme = s.parse()?;
            if matches!(scheme, Scheme::Nystrom | Scheme::Rurv) {
                return Err(Error::Parameter(format!(
                    "scheme '{s}' is not sweepable (dedicated entry point)"
                )));
            }
        }
        Ok(())
    }
}

/// One sweep cell that ran to completion.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxReport {
    pub scheme: Scheme,
    pub r: usize,
    /// Oversampling actually used; 0 for schemes without one.
    pub l: usize,
    pub trial: usize,
    pub seed: u64,
    pub rel_err_frob: f64,
    pub elapsed_seconds: f64,
    pub rank_used: usize,
    pub bound_frob: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

/// One sweep cell that hit a precondition or numeric error.
#[derive(Clone, Debug)]
pub struct CellError {
    pub scheme: Scheme,
    pub r: usize,
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub reports: Vec<ApproxReport>,
    pub errors: Vec<CellError>,
}

const MATRIX_STREAM: u64 = 0;
const DEFAULT_GENERATOR_DIM: usize = 500;
const DEFAULT_SPARSE_DENSITY: f64 = 0.01;

/// Resolve a matrix source: a generator name ("poly-slow", "poly-fast",
/// "exp-slow", "exp-fast", "inv-square", `exact-rank:<r>`, "flat-sparse"),
/// optionally suffixed with `:<dim>` (and `:<density>` before the dim for
/// flat-sparse), or a Matrix Market file path. Returns the matrix and, for
/// synthetic dense sources, the exact spectrum.
pub fn resolve_matrix_source(source: &str, seed: u64) -> Result<(AnyMatrix, Option<Vec<f64>>)> {
    if let Some(rest) = source.strip_prefix("flat-sparse") {
        let mut density = DEFAULT_SPARSE_DENSITY;
        let mut dim = DEFAULT_GENERATOR_DIM;
        let mut parts = rest.split(':').filter(|p| !p.is_empty());
        if let Some(p) = parts.next() {
            density = p
                .parse()
                .map_err(|_| Error::Parameter(format!("bad flat-sparse density '{p}'")))?;
        }
        if let Some(p) = parts.next() {
            dim = p
                .parse()
                .map_err(|_| Error::Parameter(format!("bad flat-sparse dim '{p}'")))?;
        }
        let s = flat_spectrum_sparse(dim, density, seed)?;
        return Ok((AnyMatrix::Sparse(s), None));
    }
    // generator names, optionally "name:<dim>" ("exact-rank:<r>[:<dim>]")
    let (name, dim) = match source.rsplit_once(':') {
        Some((head, tail)) if !head.is_empty() => match tail.parse::<usize>() {
            Ok(d) if SpectrumSpec::parse(head).is_ok() => (head, d),
            _ => (source, DEFAULT_GENERATOR_DIM),
        },
        _ => (source, DEFAULT_GENERATOR_DIM),
    };
    if let Ok(spec) = SpectrumSpec::parse(name) {
        let (a, sigma) = synth_dense(&spec, dim, seed)?;
        return Ok((AnyMatrix::Dense(a), Some(sigma)));
    }
    // otherwise treat as a file path
    let m = crate::mmio::read_matrix_market(source)?;
    Ok((m, None))
}

fn bound_for(scheme: Scheme, tail: &SpectrumTail, r: usize, l: usize) -> Option<f64> {
    match scheme {
        Scheme::Rsvd => bound_rsvd_frob(tail, r).ok(),
        Scheme::Gn => bound_gn_frob(tail, r, l).ok(),
        Scheme::GnC => bound_gnc_frob(tail, r).ok(),
        _ => None,
    }
}

/// Run every (scheme, rank, trial) cell. Cells that violate a scheme
/// precondition are recorded as errors and the sweep continues.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let matrix_seed = derive(config.seed_base, MATRIX_STREAM);
    let (matrix, sigma) = resolve_matrix_source(&config.matrix_source, matrix_seed)?;
    run_sweep_on(config, &matrix, sigma.as_deref())
}

/// Same as [`run_sweep`] but on an already resolved matrix (and optional
/// exact spectrum for bound columns).
pub fn run_sweep_on(
    config: &SweepConfig,
    matrix: &AnyMatrix,
    sigma: Option<&[f64]>,
) -> Result<SweepOutcome> {
    config.validate()?;
    let schemes: Vec<Scheme> = config
        .schemes
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let a_norm = matrix.frob_norm();
    let tail = match sigma {
        Some(s) if config.k_for_bounds < s.len() => {
            Some(SpectrumTail::new(s.to_vec(), config.k_for_bounds)?)
        }
        _ => None,
    };
    let mut outcome = SweepOutcome::default();
    for &scheme in &schemes {
        for &r in &config.ranks {
            let l = match scheme {
                Scheme::Gn | Scheme::GnStabilized => config.oversampling.l_for(r),
                _ => 0,
            };
            for trial in 0..config.trials {
                let seed = derive(config.seed_base, 1 + trial as u64);
                let mut cfg = ApproxConfig::new(r, seed).with_sketch_kind(config.sketch_kind);
                if l > 0 {
                    cfg = cfg.with_oversampling(l);
                }
                let started = Instant::now();
                let factors = match run_scheme(scheme, matrix, &cfg) {
                    Ok(f) => f,
                    Err(e) => {
                        outcome.errors.push(CellError {
                            scheme,
                            r,
                            trial,
                            message: e.to_string(),
                        });
                        continue;
                    }
                };
                let elapsed = started.elapsed().as_secs_f64().max(1e-9);
                let rel_err = match relative_error(matrix, &factors) {
                    Ok(e) => e,
                    Err(e) => {
                        outcome.errors.push(CellError {
                            scheme,
                            r,
                            trial,
                            message: e.to_string(),
                        });
                        continue;
                    }
                };
                let bound_frob = tail.as_ref().and_then(|t| bound_for(scheme, t, r, l));
                let bound_satisfied = bound_frob.map(|b| rel_err * a_norm <= 1.05 * b);
                outcome.reports.push(ApproxReport {
                    scheme,
                    r,
                    l,
                    trial,
                    seed,
                    rel_err_frob: rel_err,
                    elapsed_seconds: elapsed,
                    rank_used: factors.rank_used,
                    bound_frob,
                    bound_satisfied,
                });
            }
        }
    }
    canonical_order(&mut outcome.reports);
    Ok(outcome)
}

/// (scheme, r, trial) lexicographic, the emission order.
pub fn canonical_order(reports: &mut [ApproxReport]) {
    reports
        .sort_by(|a, b| (a.scheme.as_str(), a.r, a.trial).cmp(&(b.scheme.as_str(), b.r, b.trial)));
}

pub const CSV_HEADER: &str =
    "scheme,r,l,trial,seed,rel_err_frob,elapsed_seconds,rank_used,bound_frob,bound_satisfied";

fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render reports as CSV, one row per report, floats at 17 significant
/// digits, not-applicable bound fields left empty.
pub fn render_csv(reports: &[ApproxReport]) -> String {
    let mut rows = reports.to_vec();
    canonical_order(&mut rows);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rep in &rows {
        let bound = rep.bound_frob.map(fmt_full).unwrap_or_default();
        let sat = rep
            .bound_satisfied
            .map(|b| b.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            rep.scheme.as_str(),
            rep.r,
            rep.l,
            rep.trial,
            rep.seed,
            fmt_full(rep.rel_err_frob),
            fmt_full(rep.elapsed_seconds),
            rep.rank_used,
            bound,
            sat
        ));
    }
    out
}

pub fn emit_csv(reports: &[ApproxReport], path: impl AsRef<std::path::Path>) -> Result<()> {
    std::fs::write(path, render_csv(reports))?;
    Ok(())
}

/// Parse a CSV produced by [`render_csv`]; all numeric fields recover
/// exactly.
pub fn parse_csv(text: &str) -> Result<Vec<ApproxReport>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("bad CSV header {other:?}"),
            })
        }
    }
    let mut reports = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 10 fields, got {}", fields.len()),
            });
        }
        let err = |what: &str| Error::Parse {
            line: line_no,
            message: format!("bad {what}"),
        };
        reports.push(ApproxReport {
            scheme: fields[0].parse().map_err(|_| err("scheme"))?,
            r: fields[1].parse().map_err(|_| err("r"))?,
            l: fields[2].parse().map_err(|_| err("l"))?,
            trial: fields[3].parse().map_err(|_| err("trial"))?,
            seed: fields[4].parse().map_err(|_| err("seed"))?,
            rel_err_frob: fields[5].parse().map_err(|_| err("rel_err_frob"))?,
            elapsed_seconds: fields[6].parse().map_err(|_| err("elapsed_seconds"))?,
            rank_used: fields[7].parse().map_err(|_| err("rank_used"))?,
            bound_frob: if fields[8].is_empty() {
                None
            } else {
                Some(fields[8].parse().map_err(|_| err("bound_frob"))?)
            },
            bound_satisfied: if fields[9].is_empty() {
                None
            } else {
                Some(fields[9].parse().map_err(|_| err("bound_satisfied"))?)
            },
        });
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// Per (scheme, r) verdict comparing the trial-mean absolute error against
/// the matching theoretical bound.
#[derive(Clone, Debug)]
pub struct BoundVerdict {
    pub scheme: Scheme,
    pub r: usize,
    pub l: usize,
    pub trials: usize,
    pub mean_abs_err: f64,
    pub bound: Option<f64>,
    pub status: VerdictStatus,
}

/// Slack multiplier on expectation bounds to absorb trial-mean fluctuation.
pub const BOUND_SLACK: f64 = 1.05;
const MIN_TRIALS: usize = 20;

/// Compare trial means against the theoretical error bounds. Groups are keyed by
/// (scheme, r); each needs at least 20 trials. Schemes without a stated
/// bound come back as not-applicable.
pub fn verify_bounds(
    reports: &[ApproxReport],
    true_sigma: &[f64],
    k: usize,
) -> Result<Vec<BoundVerdict>> {
    let tail = SpectrumTail::new(true_sigma.to_vec(), k)?;
    let a_norm = tail.full_frob();
    let mut groups: std::collections::BTreeMap<(&'static str, usize, usize), Vec<&ApproxReport>> =
        std::collections::BTreeMap::new();
    for rep in reports {
        groups
            .entry((rep.scheme.as_str(), rep.r, rep.l))
            .or_default()
            .push(rep);
    }
    let mut verdicts = Vec::new();
    for ((_, r, l), members) in groups {
        let scheme = members[0].scheme;
        if members.len() < MIN_TRIALS {
            return Err(Error::InsufficientSample {
                needed: MIN_TRIALS,
                got: members.len(),
            });
        }
        let mean_rel: f64 =
            members.iter().map(|m| m.rel_err_frob).sum::<f64>() / members.len() as f64;
        let mean_abs = mean_rel * a_norm;
        let bound = bound_for(scheme, &tail, r, l);
        let status = match bound {
            Some(b) => {
                if mean_abs <= BOUND_SLACK * b {
                    VerdictStatus::Pass
                } else {
                    VerdictStatus::Fail
                }
            }
            None => VerdictStatus::NotApplicable,
        };
        verdicts.push(BoundVerdict {
            scheme,
            r,
            l,
            trials: members.len(),
            mean_abs_err: mean_abs,
            bound,
            status,
        });
    }
    Ok(verdicts)
}

/// Plain-text verdict table for CLI output.
pub fn render_verdict_table(verdicts: &[BoundVerdict]) -> String {
    let mut out =
        String::from("scheme    r     l     trials  mean_abs_err   bound          verdict\n");
    for v in verdicts {
        let bound = v
            .bound
            .map(|b| format!("{b:.6e}"))
            .unwrap_or_else(|| "-".into());
        let status = match v.status {
            VerdictStatus::Pass => "pass",
            VerdictStatus::Fail => "FAIL",
            VerdictStatus::NotApplicable => "n/a",
        };
        out.push_str(&format!(
            "{:<9} {:<5} {:<5} {:<7} {:<14.6e} {:<14} {}\n",
            v.scheme.as_str(),
            v.r,
            v.l,
            v.trials,
            v.mean_abs_err,
            bound,
            status
        ));
    }
    out
}

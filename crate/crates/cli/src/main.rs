//! Command-line driver: generate test matrices, run approximation schemes,
//! sweep benchmarks and verify error bounds.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or parameter error,
//! 3 bound-verification failure.

use lowrank::approx::{relative_error, run_scheme, ApproxConfig, CoreFactor, Scheme};
use lowrank::bench::{
    emit_csv, parse_csv, render_verdict_table, run_sweep, verify_bounds, SweepConfig, VerdictStatus,
};
use lowrank::error::Error;
use lowrank::mmio::{read_matrix_market, write_matrix_market};
use lowrank::sparse::{AnyMatrix, SparseMatrix};
use lowrank::DenseMatrix;
use std::process::ExitCode;
use std::time::Instant;

/// Seed used when --seed is absent. A fixed constant, never entropy:
/// unseeded runs must still replay exactly.
const DEFAULT_SEED: u64 = 1729;

const USAGE: &str = "\
usage: lowrank <command> [args]

commands:
  generate <source> --dim <m> --output <path> [--seed <u64>] [--format array|coordinate]
      Write a synthetic test matrix in Matrix Market format, plus a
      '<path>.sigma' sidecar (one singular value per line) when the
      generator's spectrum is known exactly. Sources: poly-slow, poly-fast,
      exp-slow, exp-fast, inv-square, exact-rank:<r>, flat-sparse.

  approximate <input.mtx> --scheme <name> --rank <r> [--l <l>] [--power-q <q>]
              [--seed <u64>] --output <prefix>
      Run one scheme (rsvd, gn, gn-stab, gn-rc, gn-c) and write the factors
      as <prefix>.L.mtx, <prefix>.M.mtx, <prefix>.Rt.mtx (array format).
      Prints a one-line report to stdout. gn defaults to l = ceil(r/2).

  bench <config.json> --output <reports.csv>
      Run the sweep described by the JSON config and write the report CSV.

  verify-bounds <reports.csv> <spectrum.sigma> --k <k>
      Compare trial-mean errors against the theoretical error bounds; prints a
      verdict table. Exits 3 if any gated bound fails.

Unseeded commands use the fixed default seed 1729.";

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

struct Flags {
    named: std::collections::BTreeMap<String, String>,
    positional: Vec<String>,
}

fn parse_flags(args: &[String], allowed: &[&str]) -> Result<Flags, String> {
    let mut named = std::collections::BTreeMap::new();
    let mut positional = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(name) = a.strip_prefix("--") {
            if !allowed.contains(&name) {
                return Err(format!("unknown flag --{name}"));
            }
            let value = it
                .next()
                .ok_or_else(|| format!("flag --{name} needs a value"))?;
            if named.insert(name.to_string(), value.clone()).is_some() {
                return Err(format!("flag --{name} given twice"));
            }
        } else {
            positional.push(a.clone());
        }
    }
    Ok(Flags { named, positional })
}

impl Flags {
    fn required(&self, name: &str) -> Result<&str, String> {
        self.named
            .get(name)
            .map(|s| s.as_str())
            .ok_or_else(|| format!("missing required flag --{name}"))
    }

    fn parse_opt<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, String> {
        match self.named.get(name) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("bad value '{v}' for --{name}")),
        }
    }

    fn parse_required<T: std::str::FromStr>(&self, name: &str) -> Result<T, String> {
        let v = self.required(name)?;
        v.parse()
            .map_err(|_| format!("bad value '{v}' for --{name}"))
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    ExitCode::from(2)
}

fn lib_error(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn cmd_generate(args: &[String]) -> ExitCode {
    let flags = match parse_flags(args, &["dim", "seed", "output", "format"]) {
        Ok(f) => f,
        Err(m) => return usage_error(&m),
    };
    if flags.positional.len() != 1 {
        return usage_error("generate takes exactly one <source> argument");
    }
    let name = &flags.positional[0];
    let dim: usize = match flags.parse_opt("dim") {
        Ok(Some(d)) => d,
        Ok(None) => return usage_error("generate requires --dim"),
        Err(m) => return usage_error(&m),
    };
    let seed: u64 = match flags.parse_opt("seed") {
        Ok(v) => v.unwrap_or(DEFAULT_SEED),
        Err(m) => return usage_error(&m),
    };
    let output = match flags.required("output") {
        Ok(o) => o.to_string(),
        Err(m) => return usage_error(&m),
    };
    let format = flags
        .named
        .get("format")
        .map(|s| s.as_str())
        .unwrap_or("array");
    if format != "array" && format != "coordinate" {
        return usage_error(&format!("bad --format '{format}' (array or coordinate)"));
    }

    if name != "flat-sparse" {
        if let Err(e) = lowrank::testgen::SpectrumSpec::parse(name) {
            return usage_error(&e.to_string());
        }
    }
    let source = if name == "flat-sparse" {
        format!("flat-sparse:0.01:{dim}")
    } else {
        format!("{name}:{dim}")
    };
    let (matrix, sigma) = match lowrank::bench::resolve_matrix_source(&source, seed) {
        Ok(x) => x,
        Err(e) => return lib_error(e),
    };
    let to_write = match (&matrix, format) {
        (AnyMatrix::Dense(d), "coordinate") => {
            let trips: Vec<(usize, usize, f64)> = (0..d.rows())
                .flat_map(|i| (0..d.cols()).map(move |j| (i, j, d[(i, j)])))
                .filter(|&(_, _, v)| v != 0.0)
                .collect();
            match SparseMatrix::from_triplets(d.rows(), d.cols(), &trips) {
                Ok(s) => AnyMatrix::Sparse(s),
                Err(e) => return lib_error(e),
            }
        }
        _ => matrix.clone(),
    };
    if let Err(e) = write_matrix_market(&output, &to_write) {
        return lib_error(e);
    }
    match sigma {
        Some(sigma) => {
            let sidecar = format!("{output}.sigma");
            let body: String = sigma.iter().map(|s| format!("{s:.16e}\n")).collect();
            if let Err(e) = std::fs::write(&sidecar, body) {
                return lib_error(Error::Io(e));
            }
            println!("wrote {output} and {sidecar}");
        }
        None => {
            eprintln!("note: '{name}' has no closed-form spectrum; no sidecar written");
            println!("wrote {output}");
        }
    }
    ExitCode::SUCCESS
}

fn cmd_approximate(args: &[String]) -> ExitCode {
    let flags = match parse_flags(args, &["scheme", "rank", "l", "power-q", "seed", "output"]) {
        Ok(f) => f,
        Err(m) => return usage_error(&m),
    };
    if flags.positional.len() != 1 {
        return usage_error("approximate takes exactly one <input.mtx> argument");
    }
    let input = &flags.positional[0];
    let scheme: Scheme = match flags
        .required("scheme")
        .and_then(|s| s.parse().map_err(|e: Error| e.to_string()))
    {
        Ok(s) => s,
        Err(m) => return usage_error(&m),
    };
    if matches!(scheme, Scheme::Nystrom | Scheme::Rurv) {
        return usage_error(&format!(
            "scheme '{}' is not available through approximate",
            scheme.as_str()
        ));
    }
    let rank: usize = match flags.parse_required("rank") {
        Ok(r) => r,
        Err(m) => return usage_error(&m),
    };
    let l: Option<usize> = match flags.parse_opt("l") {
        Ok(v) => v,
        Err(m) => return usage_error(&m),
    };
    let power_q: usize = match flags.parse_opt("power-q") {
        Ok(v) => v.unwrap_or(0),
        Err(m) => return usage_error(&m),
    };
    let seed: u64 = match flags.parse_opt("seed") {
        Ok(v) => v.unwrap_or(DEFAULT_SEED),
        Err(m) => return usage_error(&m),
    };
    let prefix = match flags.required("output") {
        Ok(o) => o.to_string(),
        Err(m) => return usage_error(&m),
    };

    let matrix = match read_matrix_market(input) {
        Ok(m) => m,
        Err(e) => return lib_error(e),
    };
    let mut cfg = ApproxConfig::new(rank, seed).with_power_q(power_q);
    if let Some(l) = l {
        cfg = cfg.with_oversampling(l);
    }
    let started = Instant::now();
    let factors = match run_scheme(scheme, &matrix, &cfg) {
        Ok(f) => f,
        Err(e) => return lib_error(e),
    };
    let elapsed = started.elapsed().as_secs_f64();
    let rel_err = match relative_error(&matrix, &factors) {
        Ok(e) => e,
        Err(e) => return lib_error(e),
    };

    let core = match &factors.core {
        CoreFactor::Identity => DenseMatrix::identity(factors.left.cols()),
        CoreFactor::Dense(c) => c.clone(),
    };
    for (suffix, part) in [
        ("L", factors.left.clone()),
        ("M", core),
        ("Rt", factors.right_t.clone()),
    ] {
        let path = format!("{prefix}.{suffix}.mtx");
        if let Err(e) = write_matrix_market(&path, &AnyMatrix::Dense(part)) {
            return lib_error(e);
        }
    }
    let l_used = match scheme {
        Scheme::Gn | Scheme::GnStabilized => cfg.effective_oversampling(),
        _ => 0,
    };
    println!(
        "scheme={} r={} l={} rel_err_frob={:.6e} elapsed_seconds={:.6e} rank_used={}",
        scheme.as_str(),
        rank,
        l_used,
        rel_err,
        elapsed,
        factors.rank_used
    );
    ExitCode::SUCCESS
}

fn cmd_bench(args: &[String]) -> ExitCode {
    let flags = match parse_flags(args, &["output", "seed"]) {
        Ok(f) => f,
        Err(m) => return usage_error(&m),
    };
    if flags.positional.len() != 1 {
        return usage_error("bench takes exactly one <config.json> argument");
    }
    let config_path = &flags.positional[0];
    let output = match flags.required("output") {
        Ok(o) => o.to_string(),
        Err(m) => return usage_error(&m),
    };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return lib_error(Error::Io(e)),
    };
    let mut config: SweepConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return usage_error(&format!("config parse error: {e}")),
    };
    match flags.parse_opt::<u64>("seed") {
        Ok(Some(seed)) => config.seed_base = seed,
        Ok(None) => {}
        Err(m) => return usage_error(&m),
    }
    let outcome = match run_sweep(&config) {
        Ok(o) => o,
        Err(e) => return lib_error(e),
    };
    for err in &outcome.errors {
        eprintln!(
            "cell error: scheme={} r={} trial={}: {}",
            err.scheme.as_str(),
            err.r,
            err.trial,
            err.message
        );
    }
    if let Err(e) = emit_csv(&outcome.reports, &output) {
        return lib_error(e);
    }
    println!(
        "wrote {} report rows to {output} ({} cell errors)",
        outcome.reports.len(),
        outcome.errors.len()
    );
    ExitCode::SUCCESS
}

fn cmd_verify_bounds(args: &[String]) -> ExitCode {
    let flags = match parse_flags(args, &["k"]) {
        Ok(f) => f,
        Err(m) => return usage_error(&m),
    };
    if flags.positional.len() != 2 {
        return usage_error("verify-bounds takes <reports.csv> <spectrum.sigma>");
    }
    let k: usize = match flags.parse_required("k") {
        Ok(k) => k,
        Err(m) => return usage_error(&m),
    };
    let csv_text = match std::fs::read_to_string(&flags.positional[0]) {
        Ok(t) => t,
        Err(e) => return lib_error(Error::Io(e)),
    };
    let reports = match parse_csv(&csv_text) {
        Ok(r) => r,
        Err(e) => return lib_error(e),
    };
    let sigma_text = match std::fs::read_to_string(&flags.positional[1]) {
        Ok(t) => t,
        Err(e) => return lib_error(Error::Io(e)),
    };
    let sigma: Vec<f64> = match sigma_text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse())
        .collect::<Result<_, _>>()
    {
        Ok(s) => s,
        Err(e) => return usage_error(&format!("bad spectrum file: {e}")),
    };
    let verdicts = match verify_bounds(&reports, &sigma, k) {
        Ok(v) => v,
        Err(e) => return lib_error(e),
    };
    print!("{}", render_verdict_table(&verdicts));
    let failures: Vec<_> = verdicts
        .iter()
        .filter(|v| v.status == VerdictStatus::Fail)
        .collect();
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &failures {
            eprintln!(
                "bound failure: scheme={} r={} mean_abs_err={:.6e} bound={:.6e}",
                f.scheme.as_str(),
                f.r,
                f.mean_abs_err,
                f.bound.unwrap_or(f64::NAN)
            );
        }
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    match command.as_str() {
        "generate" => cmd_generate(&args[1..]),
        "approximate" => cmd_approximate(&args[1..]),
        "bench" => cmd_bench(&args[1..]),
        "verify-bounds" => cmd_verify_bounds(&args[1..]),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            ExitCode::SUCCESS
        }
        other => usage_error(&format!("unknown command '{other}'")),
    }
}

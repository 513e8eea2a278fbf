//! Command-line front end: `reduce`, `density` and `harness`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::IntPoly;
use crate::domain::SpecFile;
use crate::error::Error;
use crate::harness::{self, Application, DomainChoice, HarnessConfig};
use crate::reduce::{density_scan, find_maps, parse_predictions, parse_prime_range, Mode, PrimeSearchConfig};
use crate::specialize::{specialize, SpecializeBudget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Primes scanned for the density section of a `reduce` report, at most.
const REDUCE_DENSITY_CAP: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "reduction-engine",
    version,
    about = "Ring homomorphisms from finitely presented domains into Z/p"
)]
pub struct Cli {
    /// Worker threads for prime scans and harness trials.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "REDUCTION_ENGINE_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find verified maps for a JSON spec file.
    Reduce(ReduceArgs),
    /// Tally factorization patterns of a polynomial modulo primes.
    Density(DensityArgs),
    /// Run a preservation harness.
    Harness(HarnessArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: Option<String>,
    /// Inclusive prime range `lo:hi`.
    #[arg(long)]
    pub primes: Option<String>,
    #[arg(long)]
    pub max_maps: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    /// Coefficients, constant term first, e.g. `-2,0,1`.
    #[arg(short = 'f', long = "poly", allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, default_value_t = 100_000)]
    pub bound: u64,
    /// Predicted densities, e.g. `1,1=1/2;2=1/2`.
    #[arg(long)]
    pub predict: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct HarnessArgs {
    /// One of sumprod, incidence, distance, sl2, matrix.
    pub name: String,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value = "gaussian")]
    pub domain: String,
    #[arg(long, default_value = "2:1000000")]
    pub primes: String,
    #[arg(long, default_value = "relaxed")]
    pub mode: String,
    /// Allow primes `p <= size^2`.
    #[arg(long)]
    pub allow_small_primes: bool,
    /// Matrix harness: enumerate every matrix.
    #[arg(long)]
    pub exhaustive: bool,
    /// Matrix harness: comma-separated entry support.
    #[arg(long, default_value = "1,-1", allow_hyphen_values = true)]
    pub support: String,
    /// Matrix harness: sampled matrices per trial.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    options: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    input_sha256: Option<String>,
    version: &'static str,
    duration_ms: u128,
}

/// Failure carrying the process exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::NotADomain(_) => EXIT_USAGE,
            Error::Specialization { .. } | Error::Precision { .. } | Error::Internal(_) => EXIT_NOT_FOUND,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Report body and whether the run succeeded.
type Outcome = (Value, Value, Option<String>, bool);

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cli.workers {
            if w == 0 {
                return Err(usage("--workers must be at least 1"));
            }
            b = b.num_threads(w);
        }
        b.build().map_err(|e| usage(format!("thread pool: {e}")))?
    };
    let start = Instant::now();
    let (name, output) = match &cli.command {
        Command::Reduce(a) => ("reduce", &a.output),
        Command::Density(a) => ("density", &a.output),
        Command::Harness(a) => ("harness", &a.output),
    };
    let (options, body, digest, ok) = pool.install(|| match &cli.command {
        Command::Reduce(a) => cmd_reduce(a, cli.seed),
        Command::Density(a) => cmd_density(a),
        Command::Harness(a) => cmd_harness(a, cli.seed),
    })?;
    let manifest = Manifest {
        command: name.to_string(),
        options,
        input_sha256: digest,
        version: env!("CARGO_PKG_VERSION"),
        duration_ms: start.elapsed().as_millis(),
    };
    let mut report = body;
    report["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(if ok { EXIT_OK } else { EXIT_NOT_FOUND })
}

fn option_str(opts: &BTreeMap<String, Value>, key: &str) -> Result<Option<String>, Failure> {
    match opts.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(v) => Err(usage(format!("option {key:?} must be a string, got {v}"))),
    }
}

fn option_u64(opts: &BTreeMap<String, Value>, key: &str) -> Result<Option<u64>, Failure> {
    match opts.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| usage(format!("option {key:?} must be a non-negative integer, got {v}"))),
    }
}

fn cmd_reduce(a: &ReduceArgs, seed: Option<u64>) -> Result<Outcome, Failure> {
    let bytes = std::fs::read(&a.input).map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| usage("spec file is not UTF-8"))?;
    let spec = SpecFile::from_json(&text)?;
    const KNOWN: [&str; 4] = ["mode", "primes", "max_maps", "seed"];
    if let Some(k) = spec.options.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(usage(format!("unknown option {k:?} in spec file")));
    }
    let mode: Mode = match a.mode.clone().or(option_str(&spec.options, "mode")?) {
        Some(m) => m.parse()?,
        None => Mode::Strict,
    };
    let primes = a
        .primes
        .clone()
        .or(option_str(&spec.options, "primes")?)
        .unwrap_or_else(|| "2:100000".to_string());
    let (lo, hi) = parse_prime_range(&primes)?;
    let max_maps = match a.max_maps {
        Some(k) => k,
        None => option_u64(&spec.options, "max_maps")?.map_or(5, |k| k as usize),
    };
    if max_maps == 0 {
        return Err(usage("--max-maps must be at least 1"));
    }
    let seed = match seed {
        Some(s) => s,
        None => option_u64(&spec.options, "seed")?.unwrap_or(0),
    };
    let loaded = spec.load()?;
    let specialization = specialize(&loaded.domain, &loaded.constraints, seed, SpecializeBudget::default())?;
    let cfg = PrimeSearchConfig::new(lo, hi, mode, max_maps)?;
    let maps = find_maps(&loaded.domain, &loaded.constraints, &specialization, &cfg)?;
    let density_bound = hi.min(REDUCE_DENSITY_CAP);
    let density = density_scan(&loaded.domain.composition().f_theta, density_bound, None)?;
    let options = json!({
        "input": a.input.display().to_string(),
        "mode": mode,
        "primes": [lo, hi],
        "max_maps": max_maps,
        "seed": seed,
    });
    let set: BTreeMap<&str, String> = loaded.set.iter().map(|(k, e)| (k.as_str(), e.to_string())).collect();
    let body = json!({
        "composition": loaded.domain.composition(),
        "set": set,
        "constraints": loaded.constraints,
        "specialization": specialization,
        "maps": maps,
        "scanned": [lo, hi],
        "density": density,
    });
    if maps.is_empty() {
        eprintln!("no verified map for primes {lo}:{hi}");
    }
    let ok = !maps.is_empty();
    Ok((options, body, Some(digest), ok))
}

fn cmd_density(a: &DensityArgs) -> Result<Outcome, Failure> {
    let coeffs = a
        .poly
        .split(',')
        .map(|c| c.trim().parse().map_err(|_| usage(format!("bad coefficient {c:?}"))))
        .collect::<Result<Vec<num_bigint::BigInt>, _>>()?;
    let g = IntPoly::new(coeffs);
    let pred = a.predict.as_deref().map(parse_predictions).transpose()?;
    let report = density_scan(&g, a.bound, pred.as_ref())?;
    let options = serde_json::to_value(a).expect("options serialize");
    Ok((options, json!({ "density": report }), None, true))
}

fn cmd_harness(a: &HarnessArgs, seed: Option<u64>) -> Result<Outcome, Failure> {
    let app: Application = a.name.parse()?;
    let mut cfg = HarnessConfig::new(app);
    if let Some(n) = a.size {
        cfg.size = n;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    cfg.seed = seed.unwrap_or(0);
    cfg.domain = a.domain.parse::<DomainChoice>()?;
    (cfg.p_min, cfg.p_max) = parse_prime_range(&a.primes)?;
    cfg.mode = a.mode.parse()?;
    cfg.require_large_prime = !a.allow_small_primes;
    cfg.exhaustive = a.exhaustive;
    cfg.support = a.support.split(',').map(|s| s.trim().to_string()).collect();
    cfg.samples = a.samples;
    let report = harness::run(&cfg)?;
    let options = serde_json::to_value(&cfg).expect("config serializes");
    let ok = report.success();
    if !ok {
        eprintln!(
            "{} passed, {} failed, {} inconclusive",
            report.passed, report.failed, report.inconclusive
        );
    }
    Ok((options, json!({ "harness": report }), None, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_subcommands() {
        let c = Cli::try_parse_from(["x", "--seed", "3", "density", "-f", "-2,0,1", "--bound", "50"]).unwrap();
        assert_eq!(c.seed, Some(3));
        match c.command {
            Command::Density(d) => assert_eq!(d.poly, "-2,0,1"),
            _ => panic!(),
        }
        let c = Cli::try_parse_from([
            "x",
            "harness",
            "matrix",
            "--size",
            "2",
            "--exhaustive",
            "--workers",
            "2",
        ])
        .unwrap();
        assert_eq!(c.workers, Some(2));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["x", "density", "-f", "1,2,1", "--bound", "10"]), EXIT_USAGE);
        assert_eq!(run(["x", "harness", "nope"]), EXIT_USAGE);
        assert_eq!(run(["x", "bogus"]), EXIT_USAGE);
    }
}

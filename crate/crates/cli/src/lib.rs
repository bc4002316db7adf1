//! Argument parsing and dispatch for the `lmstab` binary.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lmstab::bounds::{bound_add_one, bound_corollary, bound_main, gamma_bound, rho_bound, BoundInputs};
use lmstab::config::Mode;
use lmstab::harness::{document, execute, nn_covariance, McOptions, VERSION};
use lmstab::{parse_statistic, ExperimentConfig, ModelParams, PairedSample, WeightDistribution, WeightedComplex};

/// Exit status for malformed arguments or configuration.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lmstab", version, about = "Monte Carlo and bound toolkit for randomly weighted d-complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one complex and write it in the text format
    Generate(GenerateArgs),
    /// Evaluate a statistic on a complex file or a fresh sample
    Stat(StatArgs),
    /// Replicate a statistic and report its Kolmogorov distance to N(0,1)
    Clt(ExperimentArgs),
    /// Compare the sample variance of NN with (1 + d/2) C(n, d)
    Variance(ExperimentArgs),
    /// Estimate the stabilization quantities and evaluate the bounds
    Stabilization(ExperimentArgs),
    /// Estimate the probability that two disjoint faces connect within k steps
    Gamma(ExperimentArgs),
    /// Evaluate a closed-form bound
    Bound(BoundArgs),
    /// Estimate the NN covariance of two faces sharing a cofacet
    CovNn(CovArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: u64,
    /// Dimension of the top simplices
    #[arg(long)]
    pub d: u64,
    /// Presence probability (defaults to 1)
    #[arg(long, conflicts_with = "lambda")]
    pub p: Option<f64>,
    /// Expected degree n*p, alternative to --p
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Weight law: exp:mean=<m>, uniform:b=<b>, const:c=<c>, texp:mean=<m>,cap=<a>
    #[arg(long)]
    pub weights: Option<String>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ModelArgs {
    fn params(&self, stat: Option<&str>) -> anyhow::Result<ModelParams> {
        let mut map = Map::new();
        map.insert("n".into(), self.n.into());
        map.insert("d".into(), self.d.into());
        if let Some(p) = self.p {
            map.insert("p".into(), p.into());
        }
        if let Some(l) = self.lambda {
            map.insert("lambda".into(), l.into());
        }
        if let Some(w) = &self.weights {
            map.insert("dist".into(), w.clone().into());
        }
        map.insert("stat".into(), stat.unwrap_or("isolated").into());
        map.insert("replicas".into(), 2.into());
        map.insert("seed".into(), self.seed.into());
        map.insert("workers".into(), 1.into());
        Ok(ExperimentConfig::resolve(&map).map_err(usage)?.params)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatArgs {
    /// Statistic: nn, nn-alpha:<a>, isolated, cocycle:<M>, betti:<M>, local:<g>:<M>
    #[arg(long)]
    pub stat: String,
    /// Complex file in the text format; sampled from the model flags when absent
    #[arg(long, conflicts_with_all = ["n", "d"])]
    pub input: Option<PathBuf>,
    /// Number of vertices
    #[arg(long, required_unless_present = "input")]
    pub n: Option<u64>,
    /// Dimension of the top simplices
    #[arg(long, required_unless_present = "input")]
    pub d: Option<u64>,
    /// Presence probability (defaults to 1)
    #[arg(long, conflicts_with = "lambda")]
    pub p: Option<f64>,
    /// Expected degree n*p, alternative to --p
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Weight law, as for generate
    #[arg(long)]
    pub weights: Option<String>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON configuration file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of vertices
    #[arg(long)]
    pub n: Option<u64>,
    /// Dimension of the top simplices
    #[arg(long)]
    pub d: Option<u64>,
    /// Presence probability (defaults to 1)
    #[arg(long, conflicts_with = "lambda")]
    pub p: Option<f64>,
    /// Expected degree n*p, alternative to --p
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Weight law, as for generate
    #[arg(long)]
    pub weights: Option<String>,
    /// Statistic, as for stat
    #[arg(long)]
    pub stat: Option<String>,
    /// Number of Monte Carlo replicas
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: LMSTAB_WORKERS or all cores)
    #[arg(long)]
    pub workers: Option<u64>,
    /// Neighbourhood radius
    #[arg(long)]
    pub k: Option<u64>,
    /// Output directory for summary.json, replicas.csv, metadata.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self, mode: Mode) -> anyhow::Result<ExperimentConfig> {
        let mut map = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))
                    .map_err(|e| usage(anyhow!("{e:#}")))?;
                match serde_json::from_str::<Value>(&text).map_err(|e| usage(anyhow!("config: {e}")))? {
                    Value::Object(map) => map,
                    _ => return Err(usage(anyhow!("config: expected a JSON object"))),
                }
            }
            None => Map::new(),
        };
        let mut set = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                map.insert(key.into(), v);
            }
        };
        set("n", self.n.map(Value::from));
        set("d", self.d.map(Value::from));
        set("dist", self.weights.clone().map(Value::from));
        set("stat", self.stat.clone().map(Value::from));
        set("replicas", self.replicas.map(Value::from));
        set("seed", self.seed.map(Value::from));
        set("workers", self.workers.map(Value::from));
        set("k", self.k.map(Value::from));
        set("out", self.out.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())));
        // a flag for one of p, lambda replaces both file values
        if let Some(p) = self.p {
            map.remove("lambda");
            map.insert("p".into(), p.into());
        }
        if let Some(l) = self.lambda {
            map.remove("p");
            map.insert("lambda".into(), l.into());
        }
        if let Some(m) = map.get("mode").and_then(Value::as_str) {
            if m != mode.key() && !(mode == Mode::Stabilization && m == Mode::BoundPipeline.key()) {
                return Err(usage(anyhow!("config mode {m:?} does not match subcommand {}", mode.key())));
            }
        } else {
            map.insert("mode".into(), mode.key().into());
        }
        ExperimentConfig::resolve(&map).map_err(usage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Main,
    AddOne,
    Corollary,
    Gamma,
    Rho,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Bound to evaluate
    #[arg(long, value_enum)]
    pub formula: Formula,
    /// Number of vertices (may be fractional)
    #[arg(long)]
    pub n: f64,
    /// Dimension of the top simplices
    #[arg(long)]
    pub d: usize,
    /// Expected degree n*p
    #[arg(long)]
    pub lambda: f64,
    /// Neighbourhood radius
    #[arg(long)]
    pub k: usize,
    /// Variance of the statistic, a number or auto:n^d
    #[arg(long = "sigma-sq", default_value = "auto:n^d")]
    pub sigma_sq: String,
    /// Sixth-moment constant J
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Two-scale gap
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Covariance term
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Connection probability; defaults to the analytic gamma bound
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Universal constant multiplier
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct CovArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: usize,
    /// Dimension of the top simplices
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Number of Monte Carlo replicas
    #[arg(long)]
    pub replicas: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Copies of the shared weight per replica
    #[arg(long, default_value_t = 16)]
    pub copies: usize,
    /// Worker threads (default: LMSTAB_WORKERS or all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error raised by bad input rather than by a failed run.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(UsageError(e.to_string()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

pub fn run_command(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let params = a.model.params(None)?;
            let x = PairedSample::new(&params, a.model.seed)?.primary();
            emit(a.out.as_ref(), &x.to_text())
        }
        Command::Stat(a) => {
            let f = parse_statistic(&a.stat).map_err(usage)?;
            let (x, source) = match &a.input {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let x = WeightedComplex::from_text(&text).map_err(usage)?;
                    (x, json!({ "input": path }))
                }
                None => {
                    let model = ModelArgs {
                        n: a.n.expect("required by clap"),
                        d: a.d.expect("required by clap"),
                        p: a.p,
                        lambda: a.lambda,
                        weights: a.weights.clone(),
                        seed: a.seed,
                    };
                    let params = model.params(Some(&a.stat))?;
                    let x = PairedSample::new(&params, a.seed)?.primary();
                    (x, json!({ "params": params, "seed": a.seed }))
                }
            };
            let doc = json!({
                "version": VERSION,
                "stat": f.name(),
                "source": source,
                "simplices": x.len(),
                "value": f.evaluate(&x),
            });
            emit(a.out.as_ref(), &pretty(&doc))
        }
        Command::Clt(a) => experiment(&a, Mode::Clt),
        Command::Variance(a) => experiment(&a, Mode::Variance),
        Command::Stabilization(a) => experiment(&a, Mode::Stabilization),
        Command::Gamma(a) => experiment(&a, Mode::Gamma),
        Command::Bound(a) => bound(&a),
        Command::CovNn(a) => {
            if a.n < a.d + 2 {
                bail!(UsageError(format!("need n >= d + 2, got n={} d={}", a.n, a.d)));
            }
            let params = ModelParams::new(a.n, a.d, 1.0, WeightDistribution::Exponential { mean: a.n as f64 })
                .map_err(usage)?;
            let workers = a.workers.unwrap_or_else(lmstab::config::default_workers);
            let opts = McOptions::new(a.replicas, a.seed).with_workers(workers);
            let est = nn_covariance(&params, a.copies, &opts)?;
            let doc = json!({
                "version": VERSION,
                "config": { "n": a.n, "d": a.d, "replicas": a.replicas, "seed": a.seed, "copies": a.copies },
                "result": est,
            });
            emit(a.out.as_ref(), &pretty(&doc))
        }
    }
}

fn experiment(a: &ExperimentArgs, mode: Mode) -> anyhow::Result<()> {
    let cfg = a.resolve(mode)?;
    let record = execute(&cfg)?;
    if cfg.out.is_none() {
        emit(None, &pretty(&document(&cfg, record)))?;
    }
    Ok(())
}

fn bound(a: &BoundArgs) -> anyhow::Result<()> {
    let sigma_sq = match a.sigma_sq.as_str() {
        "auto:n^d" => a.n.powi(a.d as i32),
        s => s.parse::<f64>().map_err(|_| usage(format!("--sigma-sq: expected a number or auto:n^d, got {s:?}")))?,
    };
    let gamma = a.gamma.unwrap_or_else(|| gamma_bound(a.n, a.d, a.lambda, a.k));
    let inputs = BoundInputs {
        n: a.n,
        d: a.d,
        lambda: a.lambda,
        k: a.k,
        sigma_sq,
        j: a.j,
        delta: a.delta,
        rho: a.rho,
        gamma,
        c: a.c,
    };
    let value = match a.formula {
        Formula::Main => bound_main(&inputs),
        Formula::AddOne => bound_add_one(&inputs),
        Formula::Corollary => bound_corollary(&inputs),
        Formula::Gamma => Ok(gamma_bound(a.n, a.d, a.lambda, a.k)),
        Formula::Rho => rho_bound(a.j, a.k, a.n, a.d, a.lambda, a.c),
    }
    .map_err(usage)?;
    let formula = Formula::value_variants()
        .iter()
        .find(|f| **f == a.formula)
        .and_then(|f| f.to_possible_value())
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let doc = json!({
        "formula": formula,
        "inputs": inputs,
        "value": value,
        "note": "up to universal constant C",
    });
    emit(None, &pretty(&doc))
}

/// Parses `args`, runs the command and returns the process exit status.
/// Failures print one JSON line to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            report("usage", first);
            return EXIT_USAGE;
        }
    };
    match run_command(cli) {
        Ok(()) => 0,
        Err(e) => {
            let is_usage = e.downcast_ref::<UsageError>().is_some();
            report(if is_usage { "usage" } else { "runtime" }, &format!("{e:#}"));
            if is_usage {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn report(kind: &str, message: &str) {
    let line = json!({ "error": kind, "message": message.replace('\n', " ") });
    eprintln!("{line}");
}

//! Monte Carlo engine: replicate a statistic, summarize, standardize and
//! measure the empirical Kolmogorov distance to `N(0, 1)`.
//!
//! Replica `i` is a pure function of `replica_seed(master, i)`. Results are
//! collected in index order and every reduction is a fixed-shape pairwise
//! sum, so outputs do not depend on the number of worker threads.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    bound_add_one, bound_corollary, gamma_bound, nn_cov_asymptote, nn_cov_exact_f64, nn_face_mean,
    nn_variance_asymptote, rho_bound, BoundInputs,
};
use crate::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::perturbation::{
    estimate_delta_tilde, estimate_gamma, estimate_rho_probe, estimate_variance_and_j, StabilizationEstimate,
};
use crate::rng::replica_seed;
use crate::sampling::{ModelParams, PairedSample};
use crate::statistics::{nn_face, nn_faces_all, parse_statistic, Statistic};
use crate::topology::{gamma_counts, gamma_from_counts, GAMMA_EXACT_MAX_SLOTS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Half-width of the asymptotic 95% Kolmogorov band is `KS_BAND_COEFF / √m`.
pub const KS_BAND_COEFF: f64 = 1.36;

/// Pairwise (tree) summation with a fixed split at the midpoint.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and `sd / √m`.
pub fn mean_and_std_error(values: &[f64]) -> Result<(f64, f64)> {
    let m = values.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 values, got {m}")));
    }
    let mean = pairwise_sum(values) / m as f64;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (m - 1) as f64;
    Ok((mean, (var / m as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub replicas: usize,
    pub seed: u64,
    /// Worker threads; 0 lets the pool choose.
    pub workers: usize,
}

impl McOptions {
    pub fn new(replicas: usize, seed: u64) -> Self {
        Self { replicas, seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Evaluates `f(replica_seed(seed, i))` for every replica `i`, in parallel,
/// returning the results in index order.
pub fn run_replicas<T, F>(opts: &McOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if opts.replicas < 2 {
        return Err(Error::InvalidParameter(format!("replicas = {} must be >= 2", opts.replicas)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..opts.replicas as u64)
            .into_par_iter()
            .map(|i| f(replica_seed(opts.seed, i)))
            .collect()
    })
}

/// Standard normal CDF from the complementary error function; the upper
/// half is defined as `1 - Φ(-x)`, so `Φ(x) + Φ(-x) = 1` by construction.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NotANumber);
    }
    let lower = |t: f64| 0.5 * libm::erfc(-t / std::f64::consts::SQRT_2);
    Ok(if x < 0.0 { lower(x) } else { 1.0 - lower(-x) })
}

/// `sup_t |F_m(t) - Φ(t)|` for the empirical CDF of `samples`.
pub fn kolmogorov_distance(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber);
    }
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let phi = normal_cdf(x)?;
        worst = worst.max((i + 1) as f64 / m - phi).max(phi - i as f64 / m);
    }
    Ok(worst)
}

/// `(x - mean) / sd` with the sample mean and standard deviation; `None`
/// when the standard deviation is zero.
pub fn standardize(values: &[f64]) -> Result<Option<Vec<f64>>> {
    let (mean, se) = mean_and_std_error(values)?;
    let sd = se * (values.len() as f64).sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return Ok(None);
    }
    Ok(Some(values.iter().map(|v| (v - mean) / sd).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub statistic: String,
    pub seed: u64,
    pub replicas: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_dev: f64,
    /// `mean |x - mean|³ / sd³`; absent for degenerate runs.
    pub skew_proxy: Option<f64>,
    /// Empirical Kolmogorov distance of the standardized sample to `N(0, 1)`.
    pub kolmogorov_distance: Option<f64>,
    pub kolmogorov_band: f64,
    /// Zero sample variance: no standardization, no distance.
    pub degenerate: bool,
    pub replicas_csv: Option<String>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl RunSummary {
    pub fn from_values(statistic: &str, seed: u64, values: &[f64]) -> Result<Self> {
        let m = values.len();
        let (mean, se) = mean_and_std_error(values)?;
        let sd = se * (m as f64).sqrt();
        let z = standardize(values)?;
        let (skew, dk) = match &z {
            Some(z) => {
                let cubes: Vec<f64> = z.iter().map(|v| v.abs().powi(3)).collect();
                (Some(pairwise_sum(&cubes) / m as f64), Some(kolmogorov_distance(z)?))
            }
            None => (None, None),
        };
        Ok(Self {
            statistic: statistic.to_string(),
            seed,
            replicas: m,
            mean,
            variance: sd * sd,
            std_dev: sd,
            skew_proxy: skew,
            kolmogorov_distance: dk,
            kolmogorov_band: KS_BAND_COEFF / (m as f64).sqrt(),
            degenerate: z.is_none(),
            replicas_csv: None,
            wall_time_secs: 0.0,
        })
    }
}

/// `replica,value` rows with shortest round-trip floats.
pub fn replicas_csv(values: &[f64]) -> String {
    let mut out = String::from("replica,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v:?}\n"));
    }
    out
}

pub fn parse_replicas_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "replica,value")) => {}
        _ => return Err(Error::Parse { line: 1, msg: "expected header `replica,value`".into() }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let (idx, v) = l.split_once(',').ok_or_else(|| err("expected two fields".into()))?;
            if idx.parse::<usize>().ok() != Some(i - 1) {
                return Err(err(format!("replica index {idx:?} out of order")));
            }
            v.parse().map_err(|e| err(format!("bad value {v:?}: {e}")))
        })
        .collect()
}

/// The statistic's value on each replica.
pub fn replicate_statistic(f: &dyn Statistic, params: &ModelParams, opts: &McOptions) -> Result<Vec<f64>> {
    run_replicas(opts, |seed| Ok(f.evaluate_sample(&PairedSample::new(params, seed)?)))
}

/// The summary document: version, resolved configuration echo, result.
pub fn document(cfg: &ExperimentConfig, record: Value) -> Value {
    json!({ "version": VERSION, "config": cfg.reproducible_echo(), "result": record })
}

/// Writes `summary.json`, `replicas.csv` and `metadata.json` into `dir`.
/// Everything but `metadata.json` depends only on the configuration.
pub fn write_run(dir: &Path, cfg: &ExperimentConfig, record: Value, values: Option<&[f64]>, wall: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    if let Some(values) = values {
        fs::write(dir.join("replicas.csv"), replicas_csv(values))?;
    }
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&document(cfg, record))? + "\n")?;
    let meta = json!({ "version": VERSION, "wall_time_secs": wall, "workers": cfg.workers, "out": cfg.out });
    fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn write_failure(cfg: &ExperimentConfig, err: &Error) {
    if let Some(dir) = &cfg.out {
        let meta = json!({ "version": VERSION, "status": "failed", "partial": true, "error": err.to_string() });
        let _ = fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join("metadata.json"), meta.to_string() + "\n"));
    }
}

fn options(cfg: &ExperimentConfig) -> McOptions {
    McOptions { replicas: cfg.replicas, seed: cfg.seed, workers: cfg.workers }
}

fn statistic_of(cfg: &ExperimentConfig) -> Result<Arc<dyn Statistic>> {
    parse_statistic(cfg.stat.as_deref().ok_or_else(|| Error::InvalidParameter("no statistic configured".into()))?)
}

/// Replicates the configured statistic and summarizes it; writes the run
/// directory when the configuration names one.
pub fn run_clt(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let f = statistic_of(cfg)?;
    let values = replicate_statistic(f.as_ref(), &cfg.params, &options(cfg)).inspect_err(|e| write_failure(cfg, e))?;
    let mut summary = RunSummary::from_values(&f.name(), cfg.seed, &values)?;
    summary.wall_time_secs = start.elapsed().as_secs_f64();
    if let Some(dir) = &cfg.out {
        summary.replicas_csv = Some("replicas.csv".into());
        write_run(dir, cfg, serde_json::to_value(&summary)?, Some(&values), summary.wall_time_secs)?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    pub summary: RunSummary,
    pub asymptote: f64,
    pub ratio: f64,
    /// 95% interval of the ratio from the fourth-moment standard error.
    pub ratio_ci: (f64, f64),
}

/// Sample variance of `NN_n(K_n)` against `(1 + d/2) C(n, d)`.
pub fn run_variance_check(cfg: &ExperimentConfig) -> Result<VarianceCheck> {
    let start = Instant::now();
    let f = statistic_of(cfg)?;
    if f.name() != "nn" {
        return Err(Error::InvalidParameter(format!("variance check needs stat nn, got {}", f.name())));
    }
    let values = replicate_statistic(f.as_ref(), &cfg.params, &options(cfg)).inspect_err(|e| write_failure(cfg, e))?;
    let mut summary = RunSummary::from_values("nn", cfg.seed, &values)?;
    summary.wall_time_secs = start.elapsed().as_secs_f64();
    let m = values.len() as f64;
    let dev4: Vec<f64> = values.iter().map(|v| (v - summary.mean).powi(4)).collect();
    let mu4 = pairwise_sum(&dev4) / m;
    let var_se = ((mu4 - summary.variance.powi(2)).max(0.0) / m).sqrt();
    let asymptote = nn_variance_asymptote(cfg.params.n, cfg.params.d);
    let ratio = summary.variance / asymptote;
    let half = 1.96 * var_se / asymptote;
    let mut check = VarianceCheck { summary, asymptote, ratio, ratio_ci: (ratio - half, ratio + half) };
    if let Some(dir) = &cfg.out {
        check.summary.replicas_csv = Some("replicas.csv".into());
        write_run(dir, cfg, serde_json::to_value(&check)?, Some(&values), check.summary.wall_time_secs)?;
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceMoments {
    pub face: u64,
    pub replicas: usize,
    pub mean: f64,
    pub mean_std_error: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
}

/// Moments of `NN(σ)` for one face over independent complete complexes.
pub fn nn_face_moments(params: &ModelParams, face: u64, opts: &McOptions) -> Result<FaceMoments> {
    let values = run_replicas(opts, |seed| Ok(nn_face(&PairedSample::new(params, seed)?, face)))?;
    let (mean, se) = mean_and_std_error(&values)?;
    let m = values.len();
    let expected = nn_face_mean(params.n, params.d);
    Ok(FaceMoments {
        face,
        replicas: m,
        mean,
        mean_std_error: se,
        variance: se * se * m as f64,
        expected_mean: expected,
        expected_variance: expected * expected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub n: usize,
    pub d: usize,
    pub replicas: usize,
    pub copies: usize,
    pub faces: (u64, u64),
    /// Average within-replica covariance over copies of the shared weight.
    pub estimate: f64,
    pub std_error: f64,
    /// Plain sample covariance of one `(NN(σ), NN(σ'))` pair per replica.
    pub naive_estimate: f64,
    pub naive_std_error: f64,
    pub exact: f64,
    pub asymptote: f64,
    /// `2n · estimate`.
    pub scaled: f64,
    pub scaled_std_error: f64,
}

/// `cov(NN(σ), NN(σ'))` for two faces with a common cofacet `ρ`.
///
/// `NN(σ) = min(A, w_ρ)` and `NN(σ') = min(B, w_ρ)` with `A`, `B`, `w_ρ`
/// independent, so the covariance equals `E[cov(· , · | A, B)]`. Each
/// replica draws `A`, `B` once and `copies` independent values of `w_ρ`,
/// and contributes the unbiased covariance across those copies.
pub fn nn_covariance(params: &ModelParams, copies: usize, opts: &McOptions) -> Result<CovarianceEstimate> {
    if copies < 2 {
        return Err(Error::InvalidParameter("need at least 2 copies of the shared weight".into()));
    }
    let amb = params.ambient()?;
    let (n, d) = (params.n, params.d);
    if n < d + 2 {
        return Err(Error::InvalidParameter("need n >= d + 2 for two faces with a common cofacet".into()));
    }
    let rho: Vec<usize> = (0..=d).collect();
    let sigma = amb.rank_of(&rho[1..]);
    let sigma_prime = amb.rank_of(&rho[..d]);
    let shared = amb.rank_of(&rho);
    let outs = run_replicas(opts, |seed| {
        let s = PairedSample::new(params, seed)?;
        let min_other = |face: u64| {
            amb.cofacet_ranks(face)
                .into_iter()
                .filter(|&t| t != shared)
                .map(|t| s.w(t))
                .fold(f64::INFINITY, f64::min)
        };
        let (a, b) = (min_other(sigma), min_other(sigma_prime));
        let xs: Vec<(f64, f64)> = (0..copies as u64)
            .map(|j| {
                let w = s.weight_copy(shared, j);
                (a.min(w), b.min(w))
            })
            .collect();
        let mx = xs.iter().map(|p| p.0).sum::<f64>() / copies as f64;
        let my = xs.iter().map(|p| p.1).sum::<f64>() / copies as f64;
        let within = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / (copies - 1) as f64;
        Ok((within, xs[0]))
    })?;
    let within: Vec<f64> = outs.iter().map(|o| o.0).collect();
    let (estimate, se) = mean_and_std_error(&within)?;
    let m = outs.len() as f64;
    let x: Vec<f64> = outs.iter().map(|o| o.1 .0).collect();
    let y: Vec<f64> = outs.iter().map(|o| o.1 .1).collect();
    let (mx, my) = (pairwise_sum(&x) / m, pairwise_sum(&y) / m);
    let prods: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let naive = pairwise_sum(&prods) / (m - 1.0);
    let (_, naive_se) = mean_and_std_error(&prods)?;
    Ok(CovarianceEstimate {
        n,
        d,
        replicas: outs.len(),
        copies,
        faces: (sigma, sigma_prime),
        estimate,
        std_error: se,
        naive_estimate: naive,
        naive_std_error: naive_se,
        exact: nn_cov_exact_f64(n, d)?,
        asymptote: nn_cov_asymptote(n),
        scaled: 2.0 * n as f64 * estimate,
        scaled_std_error: 2.0 * n as f64 * se,
    })
}

/// Number of replicas where `NN_n ≠ NN_n^α`, i.e. some face has `NN(σ) > α`.
pub fn truncation_mismatches(params: &ModelParams, alpha: f64, opts: &McOptions) -> Result<usize> {
    let hits = run_replicas(opts, |seed| {
        let s = PairedSample::new(params, seed)?;
        Ok(nn_faces_all(&s).iter().any(|&v| v > alpha))
    })?;
    Ok(hits.into_iter().filter(|&h| h).count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub estimate: StabilizationEstimate,
    /// Exhaustive value when the instance is small enough.
    pub exact: Option<f64>,
    pub bound: f64,
}

pub fn run_gamma(cfg: &ExperimentConfig, k: usize) -> Result<GammaRecord> {
    let start = Instant::now();
    let estimate = estimate_gamma(&cfg.params, k, &options(cfg))?;
    let amb = cfg.params.ambient()?;
    let exact = if amb.top_count() <= GAMMA_EXACT_MAX_SLOTS {
        let (s, t) = amb.canonical_disjoint_faces()?;
        Some(gamma_from_counts(&gamma_counts(&amb, s, t, k)?, cfg.params.p))
    } else {
        None
    };
    let bound = gamma_bound(cfg.params.n as f64, cfg.params.d, cfg.params.lambda(), k.max(1));
    let record = GammaRecord { estimate, exact, bound };
    if let Some(dir) = &cfg.out {
        write_run(dir, cfg, serde_json::to_value(&record)?, None, start.elapsed().as_secs_f64())?;
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizationRecord {
    pub delta_tilde: StabilizationEstimate,
    pub gamma: StabilizationEstimate,
    pub rho_probe: StabilizationEstimate,
    pub variance: StabilizationEstimate,
    pub j: StabilizationEstimate,
    pub rho_bound: Option<f64>,
    pub bound_inputs: Option<BoundInputs>,
    pub bound_corollary: Option<f64>,
    pub bound_add_one: Option<f64>,
    pub note: String,
}

/// All stabilization estimates at radius `k`, fed into the bounds.
pub fn run_stabilization(cfg: &ExperimentConfig, k: usize) -> Result<StabilizationRecord> {
    let start = Instant::now();
    let f = statistic_of(cfg)?;
    let opts = options(cfg);
    let params = &cfg.params;
    let delta_tilde = estimate_delta_tilde(f.as_ref(), params, k, &opts)?;
    let gamma = estimate_gamma(params, k, &opts)?;
    let empty = BTreeSet::new();
    let rho_probe = estimate_rho_probe(f.as_ref(), params, k, &empty, &empty, &opts)?;
    let (variance, j) = estimate_variance_and_j(f.as_ref(), params, &opts)?;
    let n = params.n as f64;
    let usable = k >= 1 && variance.point_estimate > 0.0;
    let rho = if k >= 1 { Some(rho_bound(j.point_estimate, k, n, params.d, params.lambda(), 1.0)?) } else { None };
    let inputs = usable.then(|| BoundInputs {
        n,
        d: params.d,
        lambda: params.lambda(),
        k,
        sigma_sq: variance.point_estimate,
        j: j.point_estimate,
        delta: delta_tilde.point_estimate,
        rho: rho.unwrap_or(0.0),
        gamma: gamma.point_estimate,
        c: 1.0,
    });
    let corollary = inputs.as_ref().map(bound_corollary).transpose()?;
    let add_one = inputs.as_ref().map(bound_add_one).transpose()?;
    let note = if usable {
        "bounds up to universal constant C = 1; rho input is the analytic bound, gamma and sigma^2 are estimates"
    } else {
        "no bound: needs k >= 1 and positive sample variance"
    };
    let record = StabilizationRecord {
        delta_tilde,
        gamma,
        rho_probe,
        variance,
        j,
        rho_bound: rho,
        bound_inputs: inputs,
        bound_corollary: corollary,
        bound_add_one: add_one,
        note: note.into(),
    };
    if let Some(dir) = &cfg.out {
        write_run(dir, cfg, serde_json::to_value(&record)?, None, start.elapsed().as_secs_f64())?;
    }
    Ok(record)
}

/// Runs the configured mode and returns its JSON record.
pub fn execute(cfg: &ExperimentConfig) -> Result<Value> {
    Ok(match cfg.mode {
        Mode::Clt => serde_json::to_value(run_clt(cfg)?)?,
        Mode::Variance => serde_json::to_value(run_variance_check(cfg)?)?,
        Mode::Gamma => serde_json::to_value(run_gamma(cfg, cfg.k.unwrap_or(1))?)?,
        Mode::Stabilization | Mode::BoundPipeline => {
            serde_json::to_value(run_stabilization(cfg, cfg.k.unwrap_or(1))?)?
        }
    })
}

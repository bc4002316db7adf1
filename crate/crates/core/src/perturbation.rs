//! Difference operators, their `B_k`-local versions, and Monte Carlo
//! estimators of the stabilization quantities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::WeightedComplex;
use crate::error::{Error, Result};
use crate::harness::{mean_and_std_error, pairwise_sum, run_replicas, McOptions};
use crate::rng::{draw_unit, replica_seed, stream_key};
use crate::sampling::{ForcedBits, ModelParams, PairedSample};
use crate::statistics::{Lipschitz, Statistic};
use crate::topology::{ball_k, connected_within, Center};

/// `f(a) - f(b)`, subtracting per-face terms when the statistic has them.
pub fn difference(f: &dyn Statistic, a: &WeightedComplex, b: &WeightedComplex) -> f64 {
    match (f.face_terms(a), f.face_terms(b)) {
        (Some(ta), Some(tb)) => {
            let diffs: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x - y).collect();
            pairwise_sum(&diffs)
        }
        _ => f.evaluate(a) - f.evaluate(b),
    }
}

/// `Δ_τ f(X^F) = f(X^F) - f(X^{F ∪ {τ}})`.
pub fn randomized_derivative(f: &dyn Statistic, s: &PairedSample, set: &BTreeSet<u64>, tau: u64) -> Result<f64> {
    if set.contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must not belong to F")));
    }
    let xf = s.resample(set);
    Ok(difference(f, &xf, &swap_in_copy(s, &xf, tau)))
}

/// `X^F` with `τ`'s coordinates replaced by `(b'_τ, w'_τ)`.
fn swap_in_copy(s: &PairedSample, xf: &WeightedComplex, tau: u64) -> WeightedComplex {
    if s.b_prime(tau) {
        xf.with_simplex(tau, s.w_prime(tau))
    } else {
        xf.without_simplex(tau)
    }
}

/// `Δ_τ f(B_k(τ, X^F)) = f(B_k(τ, X^F)) - f(B_k(τ, X^{F ∪ {τ}}))`.
pub fn local_randomized_derivative(
    f: &dyn Statistic,
    s: &PairedSample,
    set: &BTreeSet<u64>,
    tau: u64,
    k: usize,
) -> Result<f64> {
    if set.contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must not belong to F")));
    }
    let xf = s.resample(set);
    let swapped = swap_in_copy(s, &xf, tau);
    let center = Center::Top(tau);
    Ok(difference(f, &ball_k(&xf, center, k).to_complex(), &ball_k(&swapped, center, k).to_complex()))
}

/// `D_τ f(X) = f(X + τ) - f(X - τ)` with `τ` carrying weight `w`.
pub fn add_one_cost(f: &dyn Statistic, x: &WeightedComplex, tau: u64, w: f64) -> f64 {
    difference(f, &x.with_simplex(tau, w), &x.without_simplex(tau))
}

/// `D_τ f(B_k(τ, X)) = f(B_k(τ, X + τ)) - f(B_k(τ, X - τ))`.
pub fn local_add_one_cost(f: &dyn Statistic, x: &WeightedComplex, tau: u64, w: f64, k: usize) -> f64 {
    let center = Center::Top(tau);
    let plus = ball_k(&x.with_simplex(tau, w), center, k).to_complex();
    let minus = ball_k(&x.without_simplex(tau), center, k).to_complex();
    difference(f, &plus, &minus)
}

/// `1[b ∨ b' = 1] H(w, w')`, zero when the two coordinates coincide.
pub fn lipschitz_envelope(h: &Lipschitz, b: bool, w: f64, b_prime: bool, w_prime: f64) -> f64 {
    if !(b || b_prime) || (b == b_prime && w == w_prime) {
        0.0
    } else {
        h.eval(w, w_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    DeltaTilde,
    /// The randomized-derivative counterpart of `DeltaTilde`.
    Delta,
    Gamma,
    RhoProbe,
    Variance,
    J,
    AddoneMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizationEstimate {
    pub quantity: Quantity,
    pub statistic: Option<String>,
    pub params: ModelParams,
    pub k: Option<usize>,
    pub seed: u64,
    pub replicas: usize,
    pub point_estimate: f64,
    pub std_error: f64,
    /// Forced presence bits behind the reported value.
    pub conditioning: String,
    /// True when every replica gave the same value.
    pub zero_variance: bool,
    pub note: Option<String>,
}

impl StabilizationEstimate {
    fn from_values(
        quantity: Quantity,
        statistic: Option<&dyn Statistic>,
        params: &ModelParams,
        k: Option<usize>,
        opts: &McOptions,
        values: &[f64],
        conditioning: String,
    ) -> Result<Self> {
        let (mean, se) = mean_and_std_error(values)?;
        Ok(Self {
            quantity,
            statistic: statistic.map(|f| f.name()),
            params: params.clone(),
            k,
            seed: opts.seed,
            replicas: values.len(),
            point_estimate: mean,
            std_error: se,
            conditioning,
            zero_variance: values.iter().all(|&v| v == values[0]),
            note: None,
        })
    }

    /// `point_estimate ± z * std_error`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.point_estimate - z * self.std_error, self.point_estimate + z * self.std_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

fn check_k(params: &ModelParams) -> Result<(u64, u64)> {
    params.ambient()?.canonical_disjoint_tops()
}

/// Larger of several conditional estimates; its standard error is the
/// largest among them.
fn max_case(mut cases: Vec<StabilizationEstimate>) -> StabilizationEstimate {
    let se = cases.iter().map(|c| c.std_error).fold(0.0, f64::max);
    let zero = cases.iter().all(|c| c.zero_variance);
    let best = cases
        .iter()
        .enumerate()
        .fold(0, |best, (i, c)| if c.point_estimate > cases[best].point_estimate { i } else { best });
    let mut out = cases.swap_remove(best);
    out.std_error = se;
    out.zero_variance = zero;
    out
}

/// `δ̃_{k,n} = max_i E[{D_τ f(X) - D_τ f(B_k(τ, X))}² | b_τ' = i]` for the
/// canonical disjoint pair, both costs taken on the same sample.
pub fn estimate_delta_tilde(
    f: &dyn Statistic,
    params: &ModelParams,
    k: usize,
    opts: &McOptions,
) -> Result<StabilizationEstimate> {
    let (tau, tau_prime) = check_k(params)?;
    let mut cases = Vec::new();
    for i in [false, true] {
        let forced = ForcedBits::new().force_b(tau_prime, i);
        let values = run_replicas(opts, |seed| {
            let s = PairedSample::new(params, seed)?.with_forced(forced.clone());
            let x = s.primary();
            let w = s.w(tau);
            let gap = add_one_cost(f, &x, tau, w) - local_add_one_cost(f, &x, tau, w, k);
            Ok(gap * gap)
        })?;
        cases.push(StabilizationEstimate::from_values(
            Quantity::DeltaTilde,
            Some(f),
            params,
            Some(k),
            opts,
            &values,
            forced.describe(),
        )?);
    }
    Ok(max_case(cases))
}

/// The randomized-derivative gap, conditioned on `b_τ + b'_τ = 1` and on
/// `b_τ'`; the maximum over the four cases.
pub fn estimate_delta(
    f: &dyn Statistic,
    params: &ModelParams,
    k: usize,
    opts: &McOptions,
) -> Result<StabilizationEstimate> {
    let (tau, tau_prime) = check_k(params)?;
    let empty = BTreeSet::new();
    let mut cases = Vec::new();
    for (b, b_prime) in [(true, false), (false, true)] {
        for i in [false, true] {
            let forced = ForcedBits::new().force_b(tau, b).force_b_prime(tau, b_prime).force_b(tau_prime, i);
            let values = run_replicas(opts, |seed| {
                let s = PairedSample::new(params, seed)?.with_forced(forced.clone());
                let gap = randomized_derivative(f, &s, &empty, tau)?
                    - local_randomized_derivative(f, &s, &empty, tau, k)?;
                Ok(gap * gap)
            })?;
            cases.push(StabilizationEstimate::from_values(
                Quantity::Delta,
                Some(f),
                params,
                Some(k),
                opts,
                &values,
                forced.describe(),
            )?);
        }
    }
    let mut out = max_case(cases);
    out.note = Some("conditional mean; a dominating constant only if the conditional quantity is a.s. constant".into());
    Ok(out)
}

/// Bernoulli estimate of `P(σ ↔ σ' within k)` for the canonical disjoint faces.
pub fn estimate_gamma(params: &ModelParams, k: usize, opts: &McOptions) -> Result<StabilizationEstimate> {
    let (sigma, sigma_prime) = params.ambient()?.canonical_disjoint_faces()?;
    let values = run_replicas(opts, |seed| {
        let x = PairedSample::new(params, seed)?.primary();
        Ok(f64::from(u8::from(connected_within(&x, sigma, sigma_prime, k))))
    })?;
    StabilizationEstimate::from_values(Quantity::Gamma, None, params, Some(k), opts, &values, "none".into())
}

/// Sample covariance of `D_τ f(B_k(τ,X)) D_τ f(B_k(τ,X^F))` and the same
/// product at `τ'` with `F'`, for one given pair `(F, F')`. Only a lower
/// probe of the supremum over all pairs.
pub fn estimate_rho_probe(
    f: &dyn Statistic,
    params: &ModelParams,
    k: usize,
    set: &BTreeSet<u64>,
    set_prime: &BTreeSet<u64>,
    opts: &McOptions,
) -> Result<StabilizationEstimate> {
    let (tau, tau_prime) = check_k(params)?;
    for t in [tau, tau_prime] {
        if set.contains(&t) || set_prime.contains(&t) {
            return Err(Error::InvalidParameter("F and F' must avoid tau and tau'".into()));
        }
    }
    let pairs = run_replicas(opts, |seed| {
        let s = PairedSample::new(params, seed)?;
        let x = s.primary();
        let product = |center: u64, resampled: &BTreeSet<u64>| {
            let w = s.w(center);
            let xf = s.resample_from(&x, resampled);
            local_add_one_cost(f, &x, center, w, k) * local_add_one_cost(f, &xf, center, w, k)
        };
        Ok((product(tau, set), product(tau_prime, set_prime)))
    })?;
    let m = pairs.len();
    if m < 2 {
        return Err(Error::InvalidParameter("need at least 2 replicas".into()));
    }
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ma, mb) = (pairwise_sum(&a) / m as f64, pairwise_sum(&b) / m as f64);
    let products: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let cov = pairwise_sum(&products) / (m - 1) as f64;
    let (_, se) = mean_and_std_error(&products)?;
    Ok(StabilizationEstimate {
        quantity: Quantity::RhoProbe,
        statistic: Some(f.name()),
        params: params.clone(),
        k: Some(k),
        seed: opts.seed,
        replicas: m,
        point_estimate: cov,
        std_error: se,
        conditioning: format!("|F|={} |F'|={}", set.len(), set_prime.len()),
        zero_variance: products.iter().all(|&p| p == 0.0),
        note: Some("probe for one (F, F'); a lower bound of the supremum, not an upper bound".into()),
    })
}

/// Sample variance of `f(X)` (standard error from the fourth moment) and
/// `J = 1 ∨ E[H(w, w')^6]`.
pub fn estimate_variance_and_j(
    f: &dyn Statistic,
    params: &ModelParams,
    opts: &McOptions,
) -> Result<(StabilizationEstimate, StabilizationEstimate)> {
    let values = run_replicas(opts, |seed| Ok(f.evaluate_sample(&PairedSample::new(params, seed)?)))?;
    let m = values.len();
    let (mean, _) = mean_and_std_error(&values)?;
    let dev2: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let dev4: Vec<f64> = dev2.iter().map(|v| v * v).collect();
    let var = pairwise_sum(&dev2) / (m - 1) as f64;
    let mu4 = pairwise_sum(&dev4) / m as f64;
    let var_se = ((mu4 - var * var).max(0.0) / m as f64).sqrt();
    let variance = StabilizationEstimate {
        quantity: Quantity::Variance,
        statistic: Some(f.name()),
        params: params.clone(),
        k: None,
        seed: opts.seed,
        replicas: m,
        point_estimate: var,
        std_error: var_se,
        conditioning: "none".into(),
        zero_variance: var == 0.0,
        note: None,
    };
    let h = f.lipschitz(params.d);
    let j = match h.constant() {
        Some(c) => StabilizationEstimate {
            quantity: Quantity::J,
            statistic: Some(f.name()),
            params: params.clone(),
            k: None,
            seed: opts.seed,
            replicas: m,
            point_estimate: 1f64.max(c.powi(6)),
            std_error: 0.0,
            conditioning: "none".into(),
            zero_variance: true,
            note: Some("closed form for constant H".into()),
        },
        None => {
            let (wk, wk2) = (stream_key(opts.seed, 0x4A), stream_key(opts.seed, 0x4B));
            let sixth: Vec<f64> = (0..m as u64)
                .map(|i| {
                    let w = params.dist.sample(draw_unit(wk, i));
                    let w2 = params.dist.sample(draw_unit(wk2, i));
                    h.eval(w, w2).powi(6)
                })
                .collect();
            let mut est = StabilizationEstimate::from_values(
                Quantity::J,
                Some(f),
                params,
                None,
                opts,
                &sixth,
                "none".into(),
            )?;
            est.point_estimate = est.point_estimate.max(1.0);
            est
        }
    };
    Ok((variance, j))
}

/// Mean add-one cost `E[D_τ f(X)]` at the canonical `τ`.
pub fn estimate_addone_mean(f: &dyn Statistic, params: &ModelParams, opts: &McOptions) -> Result<StabilizationEstimate> {
    let (tau, _) = check_k(params)?;
    let values = run_replicas(opts, |seed| {
        let s = PairedSample::new(params, seed)?;
        Ok(add_one_cost(f, &s.primary(), tau, s.w(tau)))
    })?;
    StabilizationEstimate::from_values(Quantity::AddoneMean, Some(f), params, None, opts, &values, "none".into())
}

/// Seed of replica `index`, exposed for callers reproducing single replicas.
pub fn seed_of(opts: &McOptions, index: u64) -> u64 {
    replica_seed(opts.seed, index)
}

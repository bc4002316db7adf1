//! Closed-form normal-approximation bounds and the moment formulas they use.
//!
//! The universal constant is an explicit multiplier `c` (default 1); every
//! value is a bound only up to that constant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: f64,
    pub d: usize,
    pub lambda: f64,
    pub k: usize,
    pub sigma_sq: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub delta: f64,
    pub rho: f64,
    pub gamma: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl BoundInputs {
    /// Zero stabilization inputs, `J = 1`, `C = 1`, `σ² = n^d`.
    pub fn new(n: f64, d: usize, lambda: f64, k: usize) -> Self {
        Self {
            n,
            d,
            lambda,
            k,
            sigma_sq: n.powi(d as i32),
            j: 1.0,
            delta: 0.0,
            rho: 0.0,
            gamma: 0.0,
            c: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [self.n, self.lambda, self.j, self.delta, self.rho, self.gamma, self.c];
        if nonneg.iter().any(|v| !(*v >= 0.0)) || !(self.sigma_sq > 0.0) || self.k < 1 || self.d < 1 {
            return Err(Error::InvalidParameter(format!(
                "bound inputs need nonnegative values, sigma_sq > 0, k >= 1, d >= 1: {self:?}"
            )));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.n.powi(self.d as i32) / self.sigma_sq
    }

    /// `(n^d/σ²)^{3/4} J^{1/4} λ^{1/2} / n^{d/4}`, shared by every bound.
    fn tail(&self) -> f64 {
        self.scale().powf(0.75) * self.j.powf(0.25) * self.lambda.sqrt() / self.n.powf(self.d as f64 / 4.0)
    }

    fn core(&self, gamma_term: f64) -> f64 {
        let (j, l, n) = (self.j, self.lambda, self.n);
        let nd = n.powi(self.d as i32);
        let bracket = (j.sqrt() * self.delta.sqrt() + self.rho + j.powf(2.0 / 3.0) * gamma_term) * l * l
            + j.powf(2.0 / 3.0) * (l * l / n + l / nd + l * l * l / n);
        self.c * self.scale().sqrt() * bracket.powf(0.25) + self.tail()
    }
}

/// Randomized-derivative bound, with `γ^{1/2}`.
pub fn bound_main(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    Ok(inputs.core(inputs.gamma.sqrt()))
}

/// Add-one cost bound, with `γ^{1/3}`.
pub fn bound_add_one(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    Ok(inputs.core(inputs.gamma.cbrt()))
}

/// `C J^{1/6} (1∨λ)^{1/2} (n^d/σ²)^{1/2} [δ̃^{1/8} + (k^5 (1∨dλ)^{2k}/n)^{1/12}]` plus the tail.
pub fn bound_corollary(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.k as f64 > inputs.n {
        return Err(Error::InvalidParameter(format!("k = {} exceeds n = {}", inputs.k, inputs.n)));
    }
    let i = inputs;
    let growth = (i.k as f64).powi(5) * (1f64.max(i.d as f64 * i.lambda)).powf(2.0 * i.k as f64) / i.n;
    let first = i.c
        * i.j.powf(1.0 / 6.0)
        * 1f64.max(i.lambda).sqrt()
        * i.scale().sqrt()
        * (i.delta.powf(0.125) + growth.powf(1.0 / 12.0));
    Ok(first + i.tail())
}

/// `min(k^{d+1}(1∨dλ)^k/n^d, k²(1∨dλ)^k/n)`, the second form only when `k <= n`.
pub fn gamma_bound(n: f64, d: usize, lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    let growth = 1f64.max(d as f64 * lambda).powf(kf);
    let general = kf.powi(d as i32 + 1) * growth / n.powi(d as i32);
    if kf <= n {
        general.min(kf * kf * growth / n)
    } else {
        general
    }
}

/// `C J^{2/3} (k^5 (1∨dλ)^{2k} / n)^{1/3}`.
pub fn rho_bound(j: f64, k: usize, n: f64, d: usize, lambda: f64, c: f64) -> Result<f64> {
    if k as f64 > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let growth = (k as f64).powi(5) * 1f64.max(d as f64 * lambda).powf(2.0 * k as f64) / n;
    Ok(c * j.powf(2.0 / 3.0) * growth.cbrt())
}

/// `C(n, k)` as a float, exact while it fits.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `2 C(n, d+1) p (1-p) E[D_τ f]²`.
pub fn variance_lower_unweighted(n: usize, d: usize, p: f64, addone_mean: f64) -> f64 {
    2.0 * binomial_f64(n, d + 1) * p * (1.0 - p) * addone_mean * addone_mean
}

/// `P(A) = (1 - λ/n)^{(n-d-1)(d+1)}`: all faces of `τ` are maximal without it.
pub fn local_betti_all_maximal_probability(n: usize, d: usize, lambda: f64) -> f64 {
    (1.0 - lambda / n as f64).powf(((n - d - 1) * (d + 1)) as f64)
}

/// `2λ / (d+1)! · e^{-2(d+1)λ}`.
pub fn local_betti_variance_limit(d: usize, lambda: f64) -> f64 {
    let fact: f64 = (1..=d + 1).map(|i| i as f64).product();
    2.0 * lambda / fact * (-2.0 * (d + 1) as f64 * lambda).exp()
}

/// Efron-Stein ceiling `n^d λ J^{1/3}`.
pub fn variance_upper_efron_stein(n: f64, d: usize, lambda: f64, j: f64) -> f64 {
    n.powi(d as i32) * lambda * j.cbrt()
}

/// `(1 + d/2) C(n, d)`.
pub fn nn_variance_asymptote(n: usize, d: usize) -> f64 {
    (1.0 + d as f64 / 2.0) * binomial_f64(n, d)
}

/// `E[NN(σ)] = n / (n - d)`; the variance is its square.
pub fn nn_face_mean(n: usize, d: usize) -> f64 {
    n as f64 / (n - d) as f64
}

/// `1 / (2n)`.
pub fn nn_cov_asymptote(n: usize) -> f64 {
    1.0 / (2.0 * n as f64)
}

/// Exact `cov(NN(σ), NN(σ'))` for faces sharing a cofacet, with mean-`n`
/// exponential weights:
/// `(n/(n-d-1))² (1 - 2/(n-d) + 1/(2n-2d-1)) - (n/(n-d))²`.
pub fn nn_cov_exact(n: usize, d: usize) -> Result<BigRational> {
    if n < d + 2 {
        return Err(Error::InvalidParameter(format!("need n >= d + 2, got n={n} d={d}")));
    }
    let r = |a: usize, b: usize| BigRational::new(BigInt::from(a), BigInt::from(b));
    let one = r(1, 1);
    let lead = r(n, n - d - 1);
    let joint = &lead * &lead * (&one - r(2, n - d) + r(1, 2 * n - 2 * d - 1));
    let mean = r(n, n - d);
    Ok(joint - &mean * &mean)
}

pub fn nn_cov_exact_f64(n: usize, d: usize) -> Result<f64> {
    nn_cov_exact(n, d)?
        .to_f64()
        .ok_or_else(|| Error::InvalidParameter("covariance not representable".into()))
}

/// `α = 64 (C2 + d) ln n`.
pub fn truncation_level(n: usize, d: usize, c2: f64) -> Result<f64> {
    if !(c2 > 0.0) {
        return Err(Error::InvalidParameter(format!("C2 = {c2} must be > 0")));
    }
    Ok(64.0 * (c2 + d as f64) * (n as f64).ln())
}

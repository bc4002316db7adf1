//! The randomly weighted d-complex and its independent copy.
//!
//! Each d-simplex rank `r` owns four independent coordinates: presence bit
//! `b`, weight `w`, and the copies `b'`, `w'`. They are drawn by keyed
//! counter hashing of `(seed, r, stream)`, so `X`, every resampled `X^F`, and
//! any forced-bit variant are coupled on one probability space without
//! storing `C(n, d+1)` values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{Ambient, WeightedComplex};
use crate::error::{Error, Result};
use crate::rng::{draw_unit, stream_key};

const TAG_B: u64 = 0;
const TAG_W: u64 = 1;
const TAG_B_PRIME: u64 = 2;
const TAG_W_PRIME: u64 = 3;
const TAG_EXTRA_COPIES: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum WeightDistribution {
    #[serde(rename = "exp")]
    Exponential { mean: f64 },
    Uniform { b: f64 },
    #[serde(rename = "const")]
    Constant { c: f64 },
    /// Exponential with the given mean, conditioned on `w <= cap`.
    #[serde(rename = "texp")]
    TruncatedExponential { mean: f64, cap: f64 },
}

impl WeightDistribution {
    /// Unweighted complexes carry weight 1 everywhere.
    pub const UNWEIGHTED: Self = Self::Constant { c: 1.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Exponential { mean } => mean > 0.0 && mean.is_finite(),
            Self::Uniform { b } => b > 0.0 && b.is_finite(),
            Self::Constant { c } => c >= 0.0 && c.is_finite(),
            Self::TruncatedExponential { mean, cap } => {
                mean > 0.0 && mean.is_finite() && cap > 0.0 && cap.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("weight distribution {self} out of range")))
        }
    }

    /// Inverse-CDF transform of `u` in `[0, 1)`.
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        match *self {
            // 1 - u is exact for u = j / 2^53
            Self::Exponential { mean } => -mean * (1.0 - u).ln(),
            Self::Uniform { b } => b * (1.0 - u),
            Self::Constant { c } => c,
            Self::TruncatedExponential { mean, cap } => {
                let mass = -(-cap / mean).exp_m1();
                (-mean * (-u * mass).ln_1p()).min(cap)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { mean } => -(-x / mean).exp_m1(),
            Self::Uniform { b } => (x / b).min(1.0),
            Self::Constant { c } => {
                if x >= c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::TruncatedExponential { mean, cap } => {
                if x >= cap {
                    1.0
                } else {
                    (-x / mean).exp_m1() / (-cap / mean).exp_m1()
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { mean } => mean,
            Self::Uniform { b } => b / 2.0,
            Self::Constant { c } => c,
            Self::TruncatedExponential { mean, cap } => {
                let q = (-cap / mean).exp();
                mean - cap * q / (1.0 - q)
            }
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { mean } => write!(f, "exp:mean={mean}"),
            Self::Uniform { b } => write!(f, "uniform:b={b}"),
            Self::Constant { c } => write!(f, "const:c={c}"),
            Self::TruncatedExponential { mean, cap } => write!(f, "texp:mean={mean},cap={cap}"),
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    /// `exp:mean=<θ>`, `uniform:b=<b>`, `const:c=<c>`, `texp:mean=<θ>,cap=<α>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse weight distribution {s:?}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for item in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            kv.insert(k.trim(), v);
        }
        let take = |kv: &mut BTreeMap<&str, f64>, key: &str| kv.remove(key).ok_or_else(bad);
        let dist = match kind {
            "exp" => Self::Exponential { mean: take(&mut kv, "mean")? },
            "uniform" => Self::Uniform { b: take(&mut kv, "b")? },
            "const" => Self::Constant { c: take(&mut kv, "c")? },
            "texp" => Self::TruncatedExponential { mean: take(&mut kv, "mean")?, cap: take(&mut kv, "cap")? },
            _ => return Err(bad()),
        };
        if !kv.is_empty() {
            return Err(bad());
        }
        dist.validate()?;
        Ok(dist)
    }
}

/// `(n, d, p, D)`; the derived `λ = n p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub dist: WeightDistribution,
}

impl ModelParams {
    pub fn new(n: usize, d: usize, p: f64, dist: WeightDistribution) -> Result<Self> {
        let params = Self { n, d, p, dist };
        params.validate()?;
        Ok(params)
    }

    pub fn from_lambda(n: usize, d: usize, lambda: f64, dist: WeightDistribution) -> Result<Self> {
        Self::new(n, d, lambda / n as f64, dist)
    }

    pub fn validate(&self) -> Result<()> {
        Ambient::new(self.n, self.d)?;
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {} not in (0, 1]", self.p)));
        }
        self.dist.validate()
    }

    pub fn lambda(&self) -> f64 {
        self.n as f64 * self.p
    }

    pub fn ambient(&self) -> Result<Ambient> {
        Ambient::new(self.n, self.d)
    }
}

/// Parameters of the thresholded complete complex `K_n^α`: presence
/// probability `1 - exp(-α/θ)` and weights conditioned on `w <= α`.
pub fn truncated_params(params: &ModelParams, alpha: f64) -> Result<ModelParams> {
    let WeightDistribution::Exponential { mean } = params.dist else {
        return Err(Error::InvalidParameter(format!(
            "truncation needs exponential weights, got {}",
            params.dist
        )));
    };
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be > 0")));
    }
    let p = -(-alpha / mean).exp_m1();
    ModelParams::new(
        params.n,
        params.d,
        p,
        WeightDistribution::TruncatedExponential { mean, cap: alpha },
    )
}

/// Overrides of presence bits, applied after sampling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForcedBits {
    pub b: BTreeMap<u64, bool>,
    pub b_prime: BTreeMap<u64, bool>,
}

impl ForcedBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn force_b(mut self, rank: u64, value: bool) -> Self {
        self.b.insert(rank, value);
        self
    }

    pub fn force_b_prime(mut self, rank: u64, value: bool) -> Self {
        self.b_prime.insert(rank, value);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty() && self.b_prime.is_empty()
    }

    pub fn describe(&self) -> String {
        let fmt = |name: &str, m: &BTreeMap<u64, bool>| {
            m.iter().map(|(r, v)| format!("{name}[{r}]={}", u8::from(*v))).collect::<Vec<_>>()
        };
        let mut parts = fmt("b", &self.b);
        parts.extend(fmt("b'", &self.b_prime));
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(",")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadruple {
    pub b: bool,
    pub w: f64,
    pub b_prime: bool,
    pub w_prime: f64,
}

/// `(B, W, B', W')` for one seed, materialized lazily per rank.
#[derive(Debug, Clone)]
pub struct PairedSample {
    params: ModelParams,
    ambient: Ambient,
    seed: u64,
    forced: ForcedBits,
    keys: [u64; 4],
}

impl PairedSample {
    pub fn new(params: &ModelParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            ambient: params.ambient()?,
            params: params.clone(),
            seed,
            forced: ForcedBits::default(),
            keys: [
                stream_key(seed, TAG_B),
                stream_key(seed, TAG_W),
                stream_key(seed, TAG_B_PRIME),
                stream_key(seed, TAG_W_PRIME),
            ],
        })
    }

    pub fn with_forced(mut self, forced: ForcedBits) -> Self {
        self.forced = forced;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn forced(&self) -> &ForcedBits {
        &self.forced
    }

    #[inline]
    fn raw_bit(&self, key: u64, r: u64) -> bool {
        self.params.p >= 1.0 || draw_unit(key, r) < self.params.p
    }

    pub fn b(&self, r: u64) -> bool {
        match self.forced.b.get(&r) {
            Some(&v) => v,
            None => self.raw_bit(self.keys[0], r),
        }
    }

    pub fn b_prime(&self, r: u64) -> bool {
        match self.forced.b_prime.get(&r) {
            Some(&v) => v,
            None => self.raw_bit(self.keys[2], r),
        }
    }

    #[inline]
    pub fn w(&self, r: u64) -> f64 {
        self.params.dist.sample(draw_unit(self.keys[1], r))
    }

    #[inline]
    pub fn w_prime(&self, r: u64) -> f64 {
        self.params.dist.sample(draw_unit(self.keys[3], r))
    }

    pub fn quadruple(&self, r: u64) -> Quadruple {
        Quadruple { b: self.b(r), w: self.w(r), b_prime: self.b_prime(r), w_prime: self.w_prime(r) }
    }

    /// Weight copy `j` of rank `r`: `0` is `w`, `1` is `w'`, higher indices
    /// are further independent copies.
    pub fn weight_copy(&self, r: u64, j: u64) -> f64 {
        match j {
            0 => self.w(r),
            1 => self.w_prime(r),
            _ => self.params.dist.sample(draw_unit(stream_key(self.seed, TAG_EXTRA_COPIES + j), r)),
        }
    }

    fn unforced(&self, presence_key: u64, weight_key: u64) -> (Vec<u64>, Vec<f64>) {
        let total = self.ambient.top_count();
        let mut present = Vec::new();
        let mut weights = Vec::new();
        if self.params.p >= 1.0 {
            present.reserve(total as usize);
            weights.reserve(total as usize);
        }
        for r in 0..total {
            if self.raw_bit(presence_key, r) {
                present.push(r);
                weights.push(self.params.dist.sample(draw_unit(weight_key, r)));
            }
        }
        (present, weights)
    }

    fn patch(&self, x: &mut WeightedComplex, forced: &BTreeMap<u64, bool>, weight_key: u64) {
        for (&r, &on) in forced {
            *x = if on {
                x.with_simplex(r, self.params.dist.sample(draw_unit(weight_key, r)))
            } else {
                x.without_simplex(r)
            };
        }
    }

    /// `X = X_{(B, W)}`.
    pub fn primary(&self) -> WeightedComplex {
        let (present, weights) = self.unforced(self.keys[0], self.keys[1]);
        let mut x = WeightedComplex::from_sorted(self.ambient.clone(), present, weights);
        self.patch(&mut x, &self.forced.b, self.keys[1]);
        x
    }

    /// `X_{(B', W')}`.
    pub fn copy(&self) -> WeightedComplex {
        let (present, weights) = self.unforced(self.keys[2], self.keys[3]);
        let mut x = WeightedComplex::from_sorted(self.ambient.clone(), present, weights);
        self.patch(&mut x, &self.forced.b_prime, self.keys[3]);
        x
    }

    /// `X^F`: the copy's coordinates on `F`, the primary ones elsewhere.
    pub fn resample(&self, f: &BTreeSet<u64>) -> WeightedComplex {
        self.resample_from(&self.primary(), f)
    }

    /// `X^F` starting from an already materialized primary complex.
    pub fn resample_from(&self, primary: &WeightedComplex, f: &BTreeSet<u64>) -> WeightedComplex {
        let mut x = primary.clone();
        for &r in f {
            x = if self.b_prime(r) { x.with_simplex(r, self.w_prime(r)) } else { x.without_simplex(r) };
        }
        x
    }

    /// The complete weighted complex thresholded at `alpha`: `τ` present iff
    /// `w_τ <= alpha`. Presence bits are ignored.
    pub fn threshold(&self, alpha: f64) -> WeightedComplex {
        let mut present = Vec::new();
        let mut weights = Vec::new();
        for r in 0..self.ambient.top_count() {
            let w = self.w(r);
            if w <= alpha {
                present.push(r);
                weights.push(w);
            }
        }
        WeightedComplex::from_sorted(self.ambient.clone(), present, weights)
    }
}

pub fn sample_complex(params: &ModelParams, seed: u64) -> Result<WeightedComplex> {
    Ok(PairedSample::new(params, seed)?.primary())
}

pub fn resample(s: &PairedSample, f: &BTreeSet<u64>) -> WeightedComplex {
    s.resample(f)
}

pub fn add_simplex(x: &WeightedComplex, tau: u64, w: f64) -> WeightedComplex {
    x.with_simplex(tau, w)
}

pub fn remove_simplex(x: &WeightedComplex, tau: u64) -> WeightedComplex {
    x.without_simplex(tau)
}

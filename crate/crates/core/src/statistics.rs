//! Statistics of weighted d-complexes and their Lipschitz moduli.
//!
//! Most statistics here are sums over all (d-1)-simplices. Those expose
//! their per-face terms, so difference operators can subtract term by term:
//! faces a perturbation cannot reach then cancel to an exact zero instead of
//! leaving rounding residue from two large sums.

use std::fmt;
use std::sync::Arc;

use crate::cohomology::{rank_pm1, CoboundaryMatrix};
use crate::complex::{SubComplexView, WeightedComplex};
use crate::error::{Error, Result};
use crate::harness::pairwise_sum;
use crate::sampling::PairedSample;
use crate::topology::{components_in, m_ball_in, Center, Incidence};

/// The modulus `H(w, w')` bounding the change of a statistic when one
/// d-simplex changes from weight `w` to `w'` (or appears or disappears).
#[derive(Clone)]
pub enum Lipschitz {
    Constant(f64),
    /// `c * max(w, w')`; valid when the simplex is present on both sides.
    MaxWeight(f64),
    Declared(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Lipschitz {
    pub fn eval(&self, w: f64, w_prime: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::MaxWeight(c) => c * w.max(w_prime),
            Self::Declared(h) => h(w, w_prime),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Self::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

impl fmt::Debug for Lipschitz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::MaxWeight(c) => write!(f, "MaxWeight({c})"),
            Self::Declared(_) => write!(f, "Declared(..)"),
        }
    }
}

pub trait Statistic: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, x: &WeightedComplex) -> f64;

    /// Per-face contributions in face-rank order, when the statistic is a
    /// face sum; `evaluate` then differs from their sum by a constant.
    fn face_terms(&self, _x: &WeightedComplex) -> Option<Vec<f64>> {
        None
    }

    fn lipschitz(&self, d: usize) -> Lipschitz;

    /// Value on the primary complex of a sample.
    fn evaluate_sample(&self, s: &PairedSample) -> f64 {
        self.evaluate(&s.primary())
    }
}

/// Per-face minimum weight over present cofacets, `init` where there is none.
fn face_minima(x: &WeightedComplex, init: f64) -> Vec<f64> {
    let amb = x.ambient();
    let mut terms = vec![init; amb.face_count() as usize];
    let mut top = Vec::with_capacity(x.d() + 1);
    let mut fr = vec![0u64; x.d() + 1];
    for (r, w) in x.iter() {
        amb.unrank_into(r, x.d(), &mut top);
        amb.face_ranks_into(&top, &mut fr);
        for &f in &fr {
            let t = &mut terms[f as usize];
            if w < *t {
                *t = w;
            }
        }
    }
    terms
}

/// `NN(σ)` for every face of the complete complex weighted by `w`, in one
/// pass over d-simplex ranks.
pub fn nn_faces_all(s: &PairedSample) -> Vec<f64> {
    let amb = s.ambient();
    let mut terms = vec![f64::INFINITY; amb.face_count() as usize];
    let mut fr = vec![0u64; amb.d() + 1];
    amb.for_each_top(|r, top| {
        let w = s.w(r);
        amb.face_ranks_into(top, &mut fr);
        for &f in &fr {
            let t = &mut terms[f as usize];
            if w < *t {
                *t = w;
            }
        }
    });
    terms
}

/// `NN(σ) = min_{τ ⊃ σ} w_τ` in the complete weighted complex.
pub fn nn_face(s: &PairedSample, sigma: u64) -> f64 {
    s.ambient().cofacet_ranks(sigma).into_iter().map(|t| s.w(t)).fold(f64::INFINITY, f64::min)
}

/// `NN_n(K_n) = Σ_σ NN(σ)`.
pub fn nn_total(s: &PairedSample) -> f64 {
    pairwise_sum(&nn_faces_all(s))
}

/// `f^α(X) = Σ_σ min(α, min_{τ ⊃ σ present} w_τ)`; isolated faces give `α`.
pub fn f_alpha(x: &WeightedComplex, alpha: f64) -> f64 {
    pairwise_sum(&face_minima(x, alpha))
}

pub fn isolated_count(x: &WeightedComplex) -> usize {
    x.degrees().iter().filter(|&&d| d == 0).count()
}

/// Per-component cocycle dimensions, credited to each component's smallest
/// face; components with more than `m` faces contribute nothing.
fn cocycle_terms(x: &WeightedComplex, m: usize) -> Vec<f64> {
    let inc = Incidence::new(x);
    let labels = components_in(&inc);
    let mut terms = vec![0.0; x.ambient().face_count() as usize];
    for (id, c) in labels.components.iter().enumerate() {
        if c.faces.len() > m {
            continue;
        }
        let dim = if c.tops.is_empty() {
            1
        } else {
            let view = labels.view(x, id);
            let matrix = CoboundaryMatrix::from_view(&view).expect("component lists all its faces");
            c.faces.len() - rank_pm1(&matrix)
        };
        terms[c.faces[0] as usize] = dim as f64;
    }
    terms
}

/// `Σ_C dim Z^{d-1}(C)` over strongly connected components with at most `m` faces.
pub fn cocycle_count_bounded(x: &WeightedComplex, m: usize) -> usize {
    cocycle_terms(x, m).iter().map(|&t| t as usize).sum()
}

/// `β^M_{d-1} = cocycle_count_bounded - C(n-1, d-1)`.
pub fn betti_bounded(x: &WeightedComplex, m: usize) -> i64 {
    cocycle_count_bounded(x, m) as i64 - x.ambient().binomial(x.n() - 1, x.d() - 1) as i64
}

/// A finite weighted complex with vertices relabelled `0..v` in increasing
/// order; the input handed to local functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalComplex {
    pub vertex_count: usize,
    /// Sorted (d-1)-simplices.
    pub faces: Vec<Vec<usize>>,
    /// Sorted d-simplices and their weights.
    pub tops: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

impl LocalComplex {
    pub fn from_view(view: &SubComplexView) -> Self {
        let amb = &view.ambient;
        let d = amb.d();
        let face_ranks = view.faces();
        let mut faces: Vec<Vec<usize>> = face_ranks.iter().map(|&f| amb.face_vertices(f)).collect();
        let mut tops: Vec<(Vec<usize>, f64)> = view
            .simplices
            .iter()
            .zip(&view.weights)
            .map(|(&t, &w)| (amb.top_vertices(t), w))
            .collect();
        let mut used: Vec<usize> = faces.iter().flatten().chain(tops.iter().flat_map(|t| &t.0)).copied().collect();
        used.sort_unstable();
        used.dedup();
        let relabel = |v: &mut usize| *v = used.binary_search(v).expect("vertex in use");
        faces.iter_mut().flatten().for_each(relabel);
        tops.iter_mut().flat_map(|t| t.0.iter_mut()).for_each(relabel);
        faces.sort_unstable();
        tops.sort_by(|a, b| a.0.cmp(&b.0));
        debug_assert!(faces.iter().all(|f| f.len() == d));
        let (tops, weights) = tops.into_iter().unzip();
        Self { vertex_count: used.len(), faces, tops, weights }
    }

    /// The complex generated by one (d-1)-simplex.
    pub fn singleton(d: usize) -> Self {
        Self { vertex_count: d, faces: vec![(0..d).collect()], tops: Vec::new(), weights: Vec::new() }
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn cocycle_dim(&self) -> usize {
        let m = CoboundaryMatrix::from_lists(&self.faces, &self.tops).expect("faces cover every d-simplex");
        self.faces.len() - rank_pm1(&m)
    }
}

/// `g` in `f^M(X) = Σ_σ g((X, σ)_M)`; must be invariant under weighted isomorphism.
pub trait LocalFunctional: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, c: &LocalComplex, m: usize) -> f64;
    /// Modulus of the induced face sum at radius `m`.
    fn lipschitz(&self, d: usize, m: usize) -> Lipschitz;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinG {
    /// `g ≡ 1`.
    One,
    /// `1` when the input has no d-simplex.
    Isolated,
    /// `dim Z^{d-1} / f_{d-1}` when `0 < f_{d-1} <= M`.
    Cocycle,
    /// `1 / f_{d-1}` when `0 < f_{d-1} <= M`: counts components of at most `M` faces.
    Components,
}

impl BuiltinG {
    pub const ALL: [Self; 4] = [Self::One, Self::Isolated, Self::Cocycle, Self::Components];

    pub fn key(&self) -> &'static str {
        match self {
            Self::One => "one",
            Self::Isolated => "isolated",
            Self::Cocycle => "cocycle",
            Self::Components => "components",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.key() == key)
    }
}

impl LocalFunctional for BuiltinG {
    fn name(&self) -> String {
        self.key().to_string()
    }

    fn eval(&self, c: &LocalComplex, m: usize) -> f64 {
        let f = c.face_count();
        match self {
            Self::One => 1.0,
            Self::Isolated => f64::from(u8::from(c.tops.is_empty())),
            Self::Cocycle if f > 0 && f <= m => c.cocycle_dim() as f64 / f as f64,
            Self::Components if f > 0 && f <= m => 1.0 / f as f64,
            Self::Cocycle | Self::Components => 0.0,
        }
    }

    fn lipschitz(&self, d: usize, m: usize) -> Lipschitz {
        Lipschitz::Constant(match self {
            Self::One => 0.0,
            Self::Isolated | Self::Components => (d + 1) as f64,
            Self::Cocycle => ((d + 1) * m) as f64,
        })
    }
}

/// A user-supplied `g` with a declared modulus, which cannot be derived.
pub struct CustomG {
    pub name: String,
    pub g: Arc<dyn Fn(&LocalComplex) -> f64 + Send + Sync>,
    pub h: Lipschitz,
}

impl LocalFunctional for CustomG {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, c: &LocalComplex, _m: usize) -> f64 {
        (self.g)(c)
    }

    fn lipschitz(&self, _d: usize, _m: usize) -> Lipschitz {
        self.h.clone()
    }
}

/// `g((X, σ)_M)` for every face, in face-rank order.
pub fn local_terms(x: &WeightedComplex, g: &dyn LocalFunctional, m: usize) -> Vec<f64> {
    let inc = Incidence::new(x);
    let isolated = g.eval(&LocalComplex::singleton(x.d()), m);
    (0..x.ambient().face_count())
        .map(|f| {
            if inc.degree(f) == 0 {
                isolated
            } else {
                g.eval(&LocalComplex::from_view(&m_ball_in(&inc, x, Center::Face(f), m)), m)
            }
        })
        .collect()
}

/// `f^M(X) = Σ_σ g((X, σ)_M)`.
pub fn local_statistic(x: &WeightedComplex, g: &dyn LocalFunctional, m: usize) -> f64 {
    pairwise_sum(&local_terms(x, g, m))
}

/// `NN` on a general complex: faces without cofacets contribute zero. Its
/// `MaxWeight(d + 1)` modulus holds on complete complexes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestFaceWeight;

impl Statistic for NearestFaceWeight {
    fn name(&self) -> String {
        "nn".into()
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        pairwise_sum(&self.face_terms(x).expect("face sum"))
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        let mut t = face_minima(x, f64::INFINITY);
        t.iter_mut().filter(|v| v.is_infinite()).for_each(|v| *v = 0.0);
        Some(t)
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        Lipschitz::MaxWeight((d + 1) as f64)
    }

    fn evaluate_sample(&self, s: &PairedSample) -> f64 {
        if s.params().p >= 1.0 && s.forced().b.is_empty() {
            nn_total(s)
        } else {
            self.evaluate(&s.primary())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaDiluted {
    pub alpha: f64,
}

impl Statistic for AlphaDiluted {
    fn name(&self) -> String {
        format!("nn-alpha:{}", self.alpha)
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        f_alpha(x, self.alpha)
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        Some(face_minima(x, self.alpha))
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        Lipschitz::Constant((d + 1) as f64 * self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolatedCount;

impl Statistic for IsolatedCount {
    fn name(&self) -> String {
        "isolated".into()
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        isolated_count(x) as f64
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        Some(x.degrees().iter().map(|&d| f64::from(u8::from(d == 0))).collect())
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        Lipschitz::Constant((d + 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleCount {
    pub m: usize,
}

impl Statistic for CocycleCount {
    fn name(&self) -> String {
        format!("cocycle:{}", self.m)
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        cocycle_count_bounded(x, self.m) as f64
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        Some(cocycle_terms(x, self.m))
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        Lipschitz::Constant(((d + 1) * self.m) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettiBounded {
    pub m: usize,
}

impl Statistic for BettiBounded {
    fn name(&self) -> String {
        format!("betti:{}", self.m)
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        betti_bounded(x, self.m) as f64
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        Some(cocycle_terms(x, self.m))
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        Lipschitz::Constant(((d + 1) * self.m) as f64)
    }
}

#[derive(Clone)]
pub struct LocalStatistic {
    pub g: Arc<dyn LocalFunctional>,
    pub m: usize,
}

impl LocalStatistic {
    pub fn builtin(g: BuiltinG, m: usize) -> Self {
        Self { g: Arc::new(g), m }
    }
}

impl Statistic for LocalStatistic {
    fn name(&self) -> String {
        format!("local:{}:{}", self.g.name(), self.m)
    }

    fn evaluate(&self, x: &WeightedComplex) -> f64 {
        local_statistic(x, self.g.as_ref(), self.m)
    }

    fn face_terms(&self, x: &WeightedComplex) -> Option<Vec<f64>> {
        Some(local_terms(x, self.g.as_ref(), self.m))
    }

    fn lipschitz(&self, d: usize) -> Lipschitz {
        self.g.lipschitz(d, self.m)
    }
}

fn parse_radius(value: &str, text: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(Error::InvalidParameter(format!("radius in {text:?} must be an integer >= 1"))),
    }
}

/// `nn`, `nn-alpha:<α>`, `isolated`, `cocycle:<M>`, `betti:<M>`, `local:<g>:<M>`
/// with `g` one of `one`, `isolated`, `cocycle`, `components`.
pub fn parse_statistic(text: &str) -> Result<Arc<dyn Statistic>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::InvalidParameter(format!("unknown statistic {text:?}"));
    Ok(match parts.as_slice() {
        ["nn"] => Arc::new(NearestFaceWeight),
        ["nn-alpha", a] => {
            let alpha: f64 = a.parse().map_err(|_| bad())?;
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter(format!("alpha in {text:?} must be > 0")));
            }
            Arc::new(AlphaDiluted { alpha })
        }
        ["isolated"] => Arc::new(IsolatedCount),
        ["cocycle", m] => Arc::new(CocycleCount { m: parse_radius(m, text)? }),
        ["betti", m] => Arc::new(BettiBounded { m: parse_radius(m, text)? }),
        ["local", g, m] => {
            let g = BuiltinG::from_key(g).ok_or_else(bad)?;
            Arc::new(LocalStatistic::builtin(g, parse_radius(m, text)?))
        }
        _ => return Err(bad()),
    })
}

//! Paths between (d-1)-simplices, `B_k` neighbourhoods, `M`-balls and
//! strongly connected components.
//!
//! Two (d-1)-simplices are adjacent when their union is a present
//! d-simplex. A path must use distinct d-simplices, but a shortest path never
//! repeats one (dropping the loop shortens it), so plain breadth-first
//! distances on this adjacency are exactly the minimal path lengths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::complex::{Ambient, Simplex, SubComplexView, WeightedComplex};
use crate::error::{Error, Result};
use crate::sampling::ModelParams;

/// Source of present cofacets of a (d-1)-simplex.
pub trait FaceGraph {
    fn ambient(&self) -> &Ambient;
    /// Appends the ranks of the present d-simplices containing `face`.
    fn present_cofacets_into(&self, face: u64, out: &mut Vec<u64>);
}

impl FaceGraph for WeightedComplex {
    fn ambient(&self) -> &Ambient {
        WeightedComplex::ambient(self)
    }

    fn present_cofacets_into(&self, face: u64, out: &mut Vec<u64>) {
        if self.is_empty() {
            return;
        }
        out.extend(self.ambient().cofacet_ranks(face).into_iter().filter(|&t| self.contains(t)));
    }
}

/// Face-to-cofacet incidence of a complex in compressed-row form, for
/// repeated neighbourhood queries on one complex.
#[derive(Debug, Clone)]
pub struct Incidence<'a> {
    x: &'a WeightedComplex,
    offsets: Vec<u32>,
    cofacets: Vec<u32>,
    top_faces: Vec<u64>,
}

impl<'a> Incidence<'a> {
    pub fn new(x: &'a WeightedComplex) -> Self {
        let amb = x.ambient();
        let k = x.d() + 1;
        let mut top_faces = vec![0u64; x.len() * k];
        let mut top = Vec::with_capacity(k);
        for (i, &r) in x.present().iter().enumerate() {
            amb.unrank_into(r, x.d(), &mut top);
            amb.face_ranks_into(&top, &mut top_faces[i * k..(i + 1) * k]);
        }
        let faces = amb.face_count() as usize;
        let mut offsets = vec![0u32; faces + 1];
        for &f in &top_faces {
            offsets[f as usize + 1] += 1;
        }
        for i in 0..faces {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut cofacets = vec![0u32; top_faces.len()];
        for (j, &f) in top_faces.iter().enumerate() {
            let slot = &mut fill[f as usize];
            cofacets[*slot as usize] = (j / k) as u32;
            *slot += 1;
        }
        Self { x, offsets, cofacets, top_faces }
    }

    pub fn complex(&self) -> &'a WeightedComplex {
        self.x
    }

    pub fn degree(&self, face: u64) -> usize {
        (self.offsets[face as usize + 1] - self.offsets[face as usize]) as usize
    }

    /// Indices into `complex().present()` of the cofacets of `face`.
    pub fn cofacet_indices(&self, face: u64) -> &[u32] {
        &self.cofacets[self.offsets[face as usize] as usize..self.offsets[face as usize + 1] as usize]
    }

    /// Face ranks of the present simplex with index `i`, in deletion order.
    pub fn faces_of(&self, i: usize) -> &[u64] {
        let k = self.x.d() + 1;
        &self.top_faces[i * k..(i + 1) * k]
    }
}

impl FaceGraph for Incidence<'_> {
    fn ambient(&self) -> &Ambient {
        self.x.ambient()
    }

    fn present_cofacets_into(&self, face: u64, out: &mut Vec<u64>) {
        let present = self.x.present();
        out.extend(self.cofacet_indices(face).iter().map(|&i| present[i as usize]));
    }
}

/// Minimal path lengths from a set of sources, truncated at a maximum depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDistanceMap {
    pub sources: Vec<u64>,
    pub dist: BTreeMap<u64, usize>,
}

impl PathDistanceMap {
    pub fn get(&self, face: u64) -> Option<usize> {
        self.dist.get(&face).copied()
    }
}

/// Breadth-first distances from `sources`, exploring up to `max_depth` steps.
pub fn distances<G: FaceGraph + ?Sized>(g: &G, sources: &[u64], max_depth: usize) -> PathDistanceMap {
    let amb = g.ambient();
    let mut dist = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    let mut tops = Vec::new();
    let mut verts = Vec::new();
    let mut fr = vec![0u64; amb.d() + 1];
    while let Some(face) = queue.pop_front() {
        let here = dist[&face];
        if here >= max_depth {
            continue;
        }
        tops.clear();
        g.present_cofacets_into(face, &mut tops);
        for &t in &tops {
            amb.unrank_into(t, amb.d(), &mut verts);
            amb.face_ranks_into(&verts, &mut fr);
            for &next in &fr {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(next) {
                    e.insert(here + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    PathDistanceMap { sources: sources.to_vec(), dist }
}

/// Whether a path of length at most `k` joins the faces `sigma` and `sigma_prime`.
pub fn connected_within<G: FaceGraph + ?Sized>(g: &G, sigma: u64, sigma_prime: u64, k: usize) -> bool {
    sigma == sigma_prime || distances(g, &[sigma], k).get(sigma_prime).is_some()
}

/// Centre of a neighbourhood: a (d-1)-simplex or a d-simplex, by rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Center {
    Face(u64),
    Top(u64),
}

impl Center {
    pub fn from_simplex(amb: &Ambient, s: &Simplex) -> Result<Self> {
        if s.vertices().last().is_some_and(|&v| v >= amb.n()) {
            return Err(Error::InvalidSimplex(format!("{s} has a vertex outside [0, {})", amb.n())));
        }
        if s.dim() + 1 == amb.d() {
            Ok(Self::Face(amb.rank_of(s.vertices())))
        } else if s.dim() == amb.d() {
            Ok(Self::Top(amb.rank_of(s.vertices())))
        } else {
            Err(Error::InvalidSimplex(format!("{s} is neither a {}- nor a {}-simplex", amb.d() - 1, amb.d())))
        }
    }

    pub fn sources(&self, amb: &Ambient) -> Vec<u64> {
        match *self {
            Self::Face(f) => vec![f],
            Self::Top(t) => amb.top_face_ranks(t),
        }
    }
}

/// Present d-simplices ending a path of length at most `k` from the centre.
///
/// `τ'` qualifies iff one of its faces lies within distance `k - 1`. For a
/// d-simplex centre the sources are all of its faces at once, which yields
/// the union of the per-face balls in a single traversal.
fn reachable_tops<G: FaceGraph + ?Sized>(g: &G, center: Center, k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    let sources = center.sources(g.ambient());
    let near = distances(g, &sources, k - 1);
    let mut tops = BTreeSet::new();
    let mut buf = Vec::new();
    for &face in near.dist.keys() {
        buf.clear();
        g.present_cofacets_into(face, &mut buf);
        tops.extend(buf.iter().copied());
    }
    tops.into_iter().collect()
}

fn weights_of(x: &WeightedComplex, tops: &[u64]) -> Vec<f64> {
    tops.iter().map(|&t| x.weight(t).expect("reachable simplices are present")).collect()
}

/// `B_k(center, X)`: reachable d-simplices over the full ambient skeleton.
pub fn ball_k(x: &WeightedComplex, center: Center, k: usize) -> SubComplexView {
    ball_k_in(x, x, center, k)
}

pub fn ball_k_in<G: FaceGraph + ?Sized>(g: &G, x: &WeightedComplex, center: Center, k: usize) -> SubComplexView {
    let simplices = reachable_tops(g, center, k);
    SubComplexView {
        ambient: x.ambient().clone(),
        weights: weights_of(x, &simplices),
        simplices,
        lower_faces: None,
    }
}

/// `(X, center)_M`: the reachable d-simplices with only the faces they
/// generate, plus the centre's own (d-1)-faces.
pub fn m_ball(x: &WeightedComplex, center: Center, m: usize) -> SubComplexView {
    m_ball_in(x, x, center, m)
}

pub fn m_ball_in<G: FaceGraph + ?Sized>(g: &G, x: &WeightedComplex, center: Center, m: usize) -> SubComplexView {
    let amb = x.ambient();
    let simplices = reachable_tops(g, center, m);
    let mut faces: BTreeSet<u64> = center.sources(amb).into_iter().collect();
    let mut verts = Vec::new();
    let mut fr = vec![0u64; amb.d() + 1];
    for &t in &simplices {
        amb.unrank_into(t, amb.d(), &mut verts);
        amb.face_ranks_into(&verts, &mut fr);
        faces.extend(fr.iter().copied());
    }
    SubComplexView {
        ambient: amb.clone(),
        weights: weights_of(x, &simplices),
        simplices,
        lower_faces: Some(faces.into_iter().collect()),
    }
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let up = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = up;
            a = up;
        }
        a
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller root so labels follow the smallest face rank
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else if rb < ra {
            self.parent[ra as usize] = rb;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Sorted (d-1)-simplex ranks.
    pub faces: Vec<u64>,
    /// Sorted d-simplex ranks.
    pub tops: Vec<u64>,
}

/// Partition of all (d-1)-simplices into strongly connected components.
///
/// Components are numbered by their smallest face rank; isolated faces are
/// singleton components.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabeling {
    pub ambient: Ambient,
    /// Component id of every face rank.
    pub labels: Vec<u32>,
    pub components: Vec<Component>,
}

impl ComponentLabeling {
    pub fn label(&self, face: u64) -> u32 {
        self.labels[face as usize]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// A component as an explicit subcomplex, weights taken from `x`.
    pub fn view(&self, x: &WeightedComplex, id: usize) -> SubComplexView {
        let c = &self.components[id];
        SubComplexView {
            ambient: self.ambient.clone(),
            simplices: c.tops.clone(),
            weights: weights_of(x, &c.tops),
            lower_faces: Some(c.faces.clone()),
        }
    }

    /// `component_id,simplex_rank,dim` rows, faces before d-simplices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("component_id,simplex_rank,dim\n");
        let d = self.ambient.d();
        for (id, c) in self.components.iter().enumerate() {
            for f in &c.faces {
                let _ = writeln!(out, "{id},{f},{}", d - 1);
            }
            for t in &c.tops {
                let _ = writeln!(out, "{id},{t},{d}");
            }
        }
        out
    }
}

pub fn components(x: &WeightedComplex) -> ComponentLabeling {
    components_in(&Incidence::new(x))
}

pub fn components_in(inc: &Incidence<'_>) -> ComponentLabeling {
    let x = inc.complex();
    let amb = x.ambient().clone();
    let faces = amb.face_count() as usize;
    let mut sets = DisjointSets::new(faces);
    for i in 0..x.len() {
        let fr = inc.faces_of(i);
        for &f in &fr[1..] {
            sets.union(fr[0] as u32, f as u32);
        }
    }
    let mut labels = vec![u32::MAX; faces];
    let mut components: Vec<Component> = Vec::new();
    for f in 0..faces {
        let root = sets.find(f as u32) as usize;
        if labels[root] == u32::MAX {
            labels[root] = components.len() as u32;
            components.push(Component { faces: Vec::new(), tops: Vec::new() });
        }
        let id = labels[root];
        labels[f] = id;
        components[id as usize].faces.push(f as u64);
    }
    for (i, &r) in x.present().iter().enumerate() {
        components[labels[inc.faces_of(i)[0] as usize] as usize].tops.push(r);
    }
    ComponentLabeling { ambient: amb, labels, components }
}

/// Largest number of d-simplex slots `gamma_exact` will enumerate.
pub const GAMMA_EXACT_MAX_SLOTS: u64 = 24;

/// For each `j`, the number of present-sets with `j` d-simplices in which
/// `sigma` and `sigma_prime` connect within `k` steps.
pub fn gamma_counts(amb: &Ambient, sigma: u64, sigma_prime: u64, k: usize) -> Result<Vec<u64>> {
    let slots = amb.top_count();
    if slots > GAMMA_EXACT_MAX_SLOTS {
        return Err(Error::Guard(format!(
            "C({}, {}) = {slots} d-simplices exceeds {GAMMA_EXACT_MAX_SLOTS}",
            amb.n(),
            amb.d() + 1
        )));
    }
    let slots = slots as usize;
    let face_count = amb.face_count();
    if sigma >= face_count || sigma_prime >= face_count {
        return Err(Error::RankOutOfRange { rank: sigma.max(sigma_prime), k: amb.d() - 1, n: amb.n() });
    }
    let top_faces: Vec<Vec<usize>> =
        (0..slots as u64).map(|t| amb.top_face_ranks(t).into_iter().map(|f| f as usize).collect()).collect();
    let mut counts = vec![0u64; slots + 1];
    let mut reached = vec![false; face_count as usize];
    let mut grow = Vec::with_capacity(slots);
    for mask in 0u32..(1u32 << slots) {
        let hit = if sigma == sigma_prime {
            true
        } else {
            reached.iter_mut().for_each(|r| *r = false);
            reached[sigma as usize] = true;
            let mut used = 0u32;
            let mut hit = false;
            for _ in 0..k {
                grow.clear();
                for (t, fs) in top_faces.iter().enumerate() {
                    let bit = 1u32 << t;
                    if mask & bit != 0 && used & bit == 0 && fs.iter().any(|&f| reached[f]) {
                        grow.push(t);
                    }
                }
                if grow.is_empty() {
                    break;
                }
                for &t in &grow {
                    used |= 1 << t;
                    for &f in &top_faces[t] {
                        reached[f] = true;
                    }
                }
                if reached[sigma_prime as usize] {
                    hit = true;
                    break;
                }
            }
            hit
        };
        if hit {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Ok(counts)
}

/// `sum_j counts[j] p^j (1-p)^(N-j)`.
pub fn gamma_from_counts(counts: &[u64], p: f64) -> f64 {
    let slots = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * p.powi(j as i32) * (1.0 - p).powi((slots - j) as i32))
        .sum()
}

/// Exact probability that the canonical disjoint pair of (d-1)-simplices
/// connects within `k` steps, by enumerating every present-set.
pub fn gamma_exact(params: &ModelParams, k: usize) -> Result<f64> {
    let amb = params.ambient()?;
    let (sigma, sigma_prime) = amb.canonical_disjoint_faces()?;
    Ok(gamma_from_counts(&gamma_counts(&amb, sigma, sigma_prime, k)?, params.p))
}

//! Simplices, colexicographic ranking and weighted d-complexes.
//!
//! Vertices are 0-based: vertex `i` here is vertex `i + 1` of `[n] = {1, ..., n}`.
//! A k-simplex `{v_0 < ... < v_k}` has colex rank `sum_i C(v_i, i + 1)`, which
//! does not depend on `n`.
//!
//! A [`WeightedComplex`] always carries the complete (d-1)-skeleton implicitly;
//! only its present d-simplices and their weights are stored.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(acc).ok()
}

/// Pascal table of `C(m, j)` for `m <= max_n`, `j <= max_k`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    cols: usize,
    values: Vec<u64>,
}

impl BinomialTable {
    pub fn new(max_n: usize, max_k: usize) -> Result<Self> {
        let cols = max_k + 1;
        let mut values = vec![0u64; (max_n + 1) * cols];
        for m in 0..=max_n {
            values[m * cols] = 1;
            for j in 1..=max_k.min(m) {
                let above = values[(m - 1) * cols + j - 1];
                let left = if j < m { values[(m - 1) * cols + j] } else { 0 };
                values[m * cols + j] = above
                    .checked_add(left)
                    .ok_or(Error::Overflow { n: m, k: j })?;
            }
        }
        Ok(Self { cols, values })
    }

    #[inline]
    pub fn get(&self, m: usize, j: usize) -> u64 {
        debug_assert!(j < self.cols);
        self.values[m * self.cols + j]
    }
}

/// A simplex given by its strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidSimplex("no vertices".into()));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSimplex(format!(
                "vertices {vertices:?} not strictly increasing"
            )));
        }
        Ok(Self { vertices })
    }

    /// Sorts and deduplicates-checks an arbitrary vertex set.
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, other: &Simplex) -> bool {
        other.vertices.iter().all(|v| self.vertices.binary_search(v).is_ok())
    }

    fn check_in(&self, n: usize) -> Result<()> {
        match self.vertices.last() {
            Some(&v) if v >= n => Err(Error::InvalidSimplex(format!(
                "vertex {v} outside [0, {n})"
            ))),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimplexRank {
    pub value: u64,
    pub k: usize,
    pub n: usize,
}

/// Colex rank of `simplex` among the k-simplices on `n` vertices.
pub fn rank(simplex: &Simplex, n: usize) -> Result<SimplexRank> {
    simplex.check_in(n)?;
    let k = simplex.dim();
    let mut value = 0u64;
    for (i, &v) in simplex.vertices.iter().enumerate() {
        let c = binomial(v, i + 1).ok_or(Error::Overflow { n: v, k: i + 1 })?;
        value = value.checked_add(c).ok_or(Error::Overflow { n, k: k + 1 })?;
    }
    Ok(SimplexRank { value, k, n })
}

pub fn unrank(r: SimplexRank) -> Result<Simplex> {
    let total = binomial(r.n, r.k + 1).ok_or(Error::Overflow { n: r.n, k: r.k + 1 })?;
    if r.value >= total {
        return Err(Error::RankOutOfRange { rank: r.value, k: r.k, n: r.n });
    }
    let mut rest = r.value;
    let mut vertices = vec![0usize; r.k + 1];
    let mut upper = r.n;
    for i in (0..=r.k).rev() {
        // largest v < upper with C(v, i + 1) <= rest
        let mut v = upper - 1;
        loop {
            let c = binomial(v, i + 1).expect("bounded by total");
            if c <= rest {
                rest -= c;
                break;
            }
            v -= 1;
        }
        vertices[i] = v;
        upper = v;
    }
    Ok(Simplex { vertices })
}

/// The codimension-1 faces of `tau`; face `i` deletes the i-th vertex.
pub fn faces(tau: &Simplex) -> Vec<Simplex> {
    (0..tau.vertices.len())
        .filter(|_| tau.vertices.len() > 1)
        .map(|i| {
            let mut vertices = tau.vertices.clone();
            vertices.remove(i);
            Simplex { vertices }
        })
        .collect()
}

/// All simplices `sigma ∪ {v}` of the complete complex on `n` vertices.
pub fn cofacets(sigma: &Simplex, n: usize) -> Vec<Simplex> {
    (0..n)
        .filter(|v| sigma.vertices.binary_search(v).is_err())
        .map(|v| {
            let mut vertices = sigma.vertices.clone();
            let at = vertices.partition_point(|&x| x < v);
            vertices.insert(at, v);
            Simplex { vertices }
        })
        .collect()
}

/// Number of present d-simplices of `x` containing the (d-1)-simplex `sigma`.
pub fn degree(x: &WeightedComplex, sigma: &Simplex) -> Result<usize> {
    if sigma.dim() + 1 != x.d() {
        return Err(Error::InvalidSimplex(format!(
            "{sigma} is not a {}-simplex",
            x.d() - 1
        )));
    }
    sigma.check_in(x.n())?;
    let amb = x.ambient();
    Ok(cofacets(sigma, x.n())
        .iter()
        .filter(|t| x.contains(amb.rank_of(t.vertices())))
        .count())
}

/// Shape of the ambient complete complex `K_n^{(d)}` with its binomial table.
#[derive(Debug, Clone)]
pub struct Ambient {
    n: usize,
    d: usize,
    top_count: u64,
    face_count: u64,
    binom: Arc<BinomialTable>,
}

impl PartialEq for Ambient {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d
    }
}

impl Ambient {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d == 0 || d >= n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= d < n, got n={n} d={d}"
            )));
        }
        let binom = BinomialTable::new(n, d + 2)?;
        let top_count = binom.get(n, d + 1);
        let face_count = binom.get(n, d);
        if usize::try_from(face_count).is_err() {
            return Err(Error::Overflow { n, k: d });
        }
        Ok(Self { n, d, top_count, face_count, binom: Arc::new(binom) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `C(n, d + 1)`.
    pub fn top_count(&self) -> u64 {
        self.top_count
    }

    /// `C(n, d)`.
    pub fn face_count(&self) -> u64 {
        self.face_count
    }

    pub fn binomial(&self, m: usize, j: usize) -> u64 {
        self.binom.get(m, j)
    }

    /// Colex rank of a sorted vertex list of length at most `d + 2`.
    #[inline]
    pub fn rank_of(&self, vertices: &[usize]) -> u64 {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| self.binom.get(v, i + 1))
            .sum()
    }

    /// Writes the vertices of the k-simplex with colex rank `r` into `out`.
    pub fn unrank_into(&self, mut r: u64, k: usize, out: &mut Vec<usize>) {
        out.clear();
        out.resize(k + 1, 0);
        let mut upper = self.n;
        for i in (0..=k).rev() {
            let mut v = upper - 1;
            while self.binom.get(v, i + 1) > r {
                v -= 1;
            }
            r -= self.binom.get(v, i + 1);
            out[i] = v;
            upper = v;
        }
    }

    pub fn top_vertices(&self, r: u64) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.d + 1);
        self.unrank_into(r, self.d, &mut out);
        out
    }

    pub fn face_vertices(&self, r: u64) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.d);
        self.unrank_into(r, self.d - 1, &mut out);
        out
    }

    /// Ranks of the d+1 faces of a d-simplex, in deletion-index order.
    #[inline]
    pub fn face_ranks_into(&self, top: &[usize], out: &mut [u64]) {
        debug_assert_eq!(top.len(), self.d + 1);
        // prefix[i] = sum_{j<i} C(v_j, j+1); suffix terms shift down by one
        let mut prefix = 0u64;
        let shifted: u64 = top.iter().enumerate().skip(1).map(|(j, &v)| self.binom.get(v, j)).sum();
        let mut suffix = shifted;
        for i in 0..top.len() {
            if i > 0 {
                prefix += self.binom.get(top[i - 1], i);
                suffix -= self.binom.get(top[i], i);
            }
            out[i] = prefix + suffix;
        }
    }

    pub fn top_face_ranks(&self, r: u64) -> Vec<u64> {
        let top = self.top_vertices(r);
        let mut out = vec![0; self.d + 1];
        self.face_ranks_into(&top, &mut out);
        out
    }

    /// Ranks of the n-d d-simplices containing the face with rank `face`.
    pub fn cofacet_ranks(&self, face: u64) -> Vec<u64> {
        let sigma = self.face_vertices(face);
        let mut out = Vec::with_capacity(self.n - self.d);
        let mut buf = Vec::with_capacity(self.d + 1);
        for v in 0..self.n {
            if sigma.binary_search(&v).is_ok() {
                continue;
            }
            buf.clear();
            buf.extend_from_slice(&sigma);
            let at = buf.partition_point(|&x| x < v);
            buf.insert(at, v);
            out.push(self.rank_of(&buf));
        }
        out
    }

    /// Iterates all d-simplices in colex order, yielding `(rank, vertices)`.
    pub fn for_each_top(&self, mut visit: impl FnMut(u64, &[usize])) {
        let k = self.d + 1;
        let mut comb: Vec<usize> = (0..k).collect();
        let mut r = 0u64;
        loop {
            visit(r, &comb);
            r += 1;
            // colex successor
            let mut i = 0;
            while i < k {
                let limit = if i + 1 < k { comb[i + 1] } else { self.n };
                if comb[i] + 1 < limit {
                    break;
                }
                i += 1;
            }
            if i == k {
                break;
            }
            comb[i] += 1;
            for (j, c) in comb.iter_mut().enumerate().take(i) {
                *c = j;
            }
        }
    }

    /// Colex-first pair of vertex-disjoint d-simplices: `{0..d}` and `{d+1..2d+1}`.
    pub fn canonical_disjoint_tops(&self) -> Result<(u64, u64)> {
        if self.n < 2 * (self.d + 1) {
            return Err(Error::NoDisjointPair { dim: self.d, n: self.n });
        }
        let a: Vec<usize> = (0..=self.d).collect();
        let b: Vec<usize> = (self.d + 1..=2 * self.d + 1).collect();
        Ok((self.rank_of(&a), self.rank_of(&b)))
    }

    /// Colex-first pair of vertex-disjoint (d-1)-simplices.
    pub fn canonical_disjoint_faces(&self) -> Result<(u64, u64)> {
        if self.n < 2 * self.d {
            return Err(Error::NoDisjointPair { dim: self.d - 1, n: self.n });
        }
        let a: Vec<usize> = (0..self.d).collect();
        let b: Vec<usize> = (self.d..2 * self.d).collect();
        Ok((self.rank_of(&a), self.rank_of(&b)))
    }
}

/// A d-complex in `K_n` with nonnegative weights on its present d-simplices.
///
/// `present` is sorted by rank and doubles as the membership index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedComplex {
    ambient: Ambient,
    present: Vec<u64>,
    weights: Vec<f64>,
}

impl WeightedComplex {
    pub fn new(ambient: Ambient, mut entries: Vec<(u64, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!("duplicate d-simplex rank {}", w[0].0)));
            }
        }
        for &(r, w) in &entries {
            if r >= ambient.top_count() {
                return Err(Error::RankOutOfRange { rank: r, k: ambient.d(), n: ambient.n() });
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(format!("weight {w} of rank {r} is not >= 0")));
            }
        }
        let (present, weights) = entries.into_iter().unzip();
        Ok(Self { ambient, present, weights })
    }

    pub(crate) fn from_sorted(ambient: Ambient, present: Vec<u64>, weights: Vec<f64>) -> Self {
        debug_assert!(present.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(present.len(), weights.len());
        Self { ambient, present, weights }
    }

    pub fn empty(ambient: Ambient) -> Self {
        Self { ambient, present: Vec::new(), weights: Vec::new() }
    }

    /// Every d-simplex present with the same weight.
    pub fn complete(ambient: Ambient, weight: f64) -> Self {
        let present: Vec<u64> = (0..ambient.top_count()).collect();
        let weights = vec![weight; present.len()];
        Self { ambient, present, weights }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn n(&self) -> usize {
        self.ambient.n
    }

    pub fn d(&self) -> usize {
        self.ambient.d
    }

    pub fn present(&self) -> &[u64] {
        &self.present
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.present.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn contains(&self, r: u64) -> bool {
        self.present.binary_search(&r).is_ok()
    }

    pub fn weight(&self, r: u64) -> Option<f64> {
        self.present.binary_search(&r).ok().map(|i| self.weights[i])
    }

    /// `X + tau`: `tau` present with weight `w`, everything else untouched.
    pub fn with_simplex(&self, r: u64, w: f64) -> Self {
        let mut out = self.clone();
        match out.present.binary_search(&r) {
            Ok(i) => out.weights[i] = w,
            Err(i) => {
                out.present.insert(i, r);
                out.weights.insert(i, w);
            }
        }
        out
    }

    /// `X - tau`.
    pub fn without_simplex(&self, r: u64) -> Self {
        let mut out = self.clone();
        if let Ok(i) = out.present.binary_search(&r) {
            out.present.remove(i);
            out.weights.remove(i);
        }
        out
    }

    /// Degree of every (d-1)-simplex, indexed by face rank.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.ambient.face_count() as usize];
        let mut top = Vec::with_capacity(self.d() + 1);
        let mut fr = vec![0u64; self.d() + 1];
        for &r in &self.present {
            self.ambient.unrank_into(r, self.d(), &mut top);
            self.ambient.face_ranks_into(&top, &mut fr);
            for &f in &fr {
                deg[f as usize] += 1;
            }
        }
        deg
    }

    /// Image under the vertex permutation `perm` (vertex `v` goes to `perm[v]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::InvalidParameter("permutation length differs from n".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        let mut top = Vec::new();
        let entries = self
            .iter()
            .map(|(r, w)| {
                self.ambient.unrank_into(r, self.d(), &mut top);
                let mut image: Vec<usize> = top.iter().map(|&v| perm[v]).collect();
                image.sort_unstable();
                (self.ambient.rank_of(&image), w)
            })
            .collect();
        Self::new(self.ambient.clone(), entries)
    }

    /// Line-oriented text form: `n=<n> d=<d>` then `v0,...,vd,weight` per simplex.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} d={}\n", self.n(), self.d());
        let mut top = Vec::new();
        for (r, w) in self.iter() {
            self.ambient.unrank_into(r, self.d(), &mut top);
            for v in &top {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{w:?}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let (n, d) = parse_header(header)?;
        let ambient = Ambient::new(n, d).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        let mut entries = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != d + 2 {
                return Err(err(format!("expected {} fields, found {}", d + 2, fields.len())));
            }
            let verts = fields[..=d]
                .iter()
                .map(|f| f.trim().parse::<usize>().map_err(|e| err(format!("bad vertex {f:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let w: f64 = fields[d + 1]
                .trim()
                .parse()
                .map_err(|e| err(format!("bad weight {:?}: {e}", fields[d + 1])))?;
            if !(w >= 0.0) || w.is_infinite() {
                return Err(err(format!("weight {w} must be finite and >= 0")));
            }
            let s = Simplex::new(verts).map_err(|e| err(e.to_string()))?;
            s.check_in(n).map_err(|e| err(e.to_string()))?;
            let r = ambient.rank_of(s.vertices());
            if !seen.insert(r) {
                return Err(err(format!("duplicate simplex {s}")));
            }
            entries.push((r, w));
        }
        Self::new(ambient, entries)
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let err = |msg: &str| Error::Parse { line: 1, msg: msg.to_string() };
    let mut n = None;
    let mut d = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => n = Some(v.parse().map_err(|_| err("bad n"))?),
            Some(("d", v)) => d = Some(v.parse().map_err(|_| err("bad d"))?),
            _ => return Err(err("header must be `n=<int> d=<int>`")),
        }
    }
    Ok((n.ok_or_else(|| err("missing n"))?, d.ok_or_else(|| err("missing d"))?))
}

/// A subcomplex of a weighted d-complex.
///
/// Without `lower_faces` the view carries the full ambient (d-1)-skeleton
/// (the `B_k` neighbourhoods). With `lower_faces` its (d-1)-simplices are
/// exactly that list (the `M`-balls and components).
#[derive(Debug, Clone, PartialEq)]
pub struct SubComplexView {
    pub ambient: Ambient,
    /// Sorted d-simplex ranks.
    pub simplices: Vec<u64>,
    pub weights: Vec<f64>,
    /// Sorted (d-1)-simplex ranks, when not the full skeleton.
    pub lower_faces: Option<Vec<u64>>,
}

impl SubComplexView {
    pub fn face_count(&self) -> usize {
        match &self.lower_faces {
            Some(f) => f.len(),
            None => self.ambient.face_count() as usize,
        }
    }

    /// The view as a d-complex in `K_n` (full skeleton, same d-simplices).
    pub fn to_complex(&self) -> WeightedComplex {
        WeightedComplex::from_sorted(self.ambient.clone(), self.simplices.clone(), self.weights.clone())
    }

    /// Explicit face list; the full skeleton is enumerated when implicit.
    pub fn faces(&self) -> Vec<u64> {
        match &self.lower_faces {
            Some(f) => f.clone(),
            None => (0..self.ambient.face_count()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&s(&[0, 1, 2]), 10).unwrap().value, 0);
        assert_eq!(rank(&s(&[1, 3]), 5).unwrap().value, 4);
        assert_eq!(rank(&s(&[2, 3, 4]), 5).unwrap().value, 9);
        assert!(rank(&s(&[2, 5]), 5).is_err());
        assert!(Simplex::new(vec![3, 1]).is_err());
    }

    #[test]
    fn unrank_examples() {
        let r = SimplexRank { value: 0, k: 2, n: 10 };
        assert_eq!(unrank(r).unwrap(), s(&[0, 1, 2]));
        assert_eq!(unrank(SimplexRank { value: 4, k: 1, n: 5 }).unwrap(), s(&[1, 3]));
        assert!(unrank(SimplexRank { value: 10, k: 1, n: 5 }).is_err());
        for v in 0..20 {
            let r = SimplexRank { value: v, k: 2, n: 6 };
            assert_eq!(rank(&unrank(r).unwrap(), 6).unwrap(), r);
        }
    }

    /// Independent enumeration: all k-subsets sorted colexicographically.
    fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        all
    }

    #[test]
    fn rank_matches_exhaustive_colex_enumeration() {
        for n in 1..=12 {
            for k in 0..n.min(5) {
                let subsets = colex_subsets(n, k + 1);
                assert_eq!(subsets.len() as u64, binomial(n, k + 1).unwrap());
                for (i, sub) in subsets.iter().enumerate() {
                    let r = rank(&s(sub), n).unwrap();
                    assert_eq!(r.value, i as u64, "n={n} {sub:?}");
                    assert_eq!(unrank(r).unwrap().vertices(), &sub[..]);
                }
            }
        }
    }

    #[test]
    fn for_each_top_is_colex_order() {
        let amb = Ambient::new(7, 2).unwrap();
        let mut expected = 0u64;
        amb.for_each_top(|r, v| {
            assert_eq!(r, expected);
            assert_eq!(amb.rank_of(v), r);
            expected += 1;
        });
        assert_eq!(expected, 35);
    }

    #[test]
    fn face_ranks_match_explicit_deletion() {
        let amb = Ambient::new(9, 3).unwrap();
        amb.for_each_top(|r, v| {
            let mut fr = vec![0; 4];
            amb.face_ranks_into(v, &mut fr);
            let tau = Simplex::new(v.to_vec()).unwrap();
            let expected: Vec<u64> = faces(&tau).iter().map(|f| rank(f, 9).unwrap().value).collect();
            assert_eq!(fr, expected, "rank {r}");
        });
    }

    #[test]
    fn faces_and_cofacets() {
        assert_eq!(faces(&s(&[0, 1, 2])), vec![s(&[1, 2]), s(&[0, 2]), s(&[0, 1])]);
        assert_eq!(faces(&s(&[0, 1])), vec![s(&[1]), s(&[0])]);
        assert_eq!(cofacets(&s(&[0]), 3), vec![s(&[0, 1]), s(&[0, 2])]);
        assert_eq!(cofacets(&s(&[0, 1]), 4), vec![s(&[0, 1, 2]), s(&[0, 1, 3])]);
        assert_eq!(cofacets(&s(&[2, 5]), 9).len(), 7);
        let amb = Ambient::new(6, 2).unwrap();
        let mut ranks = amb.cofacet_ranks(amb.rank_of(&[1, 4]));
        ranks.sort_unstable();
        let mut expected: Vec<u64> =
            cofacets(&s(&[1, 4]), 6).iter().map(|t| amb.rank_of(t.vertices())).collect();
        expected.sort_unstable();
        assert_eq!(ranks, expected);
    }

    #[test]
    fn degree_examples() {
        let amb = Ambient::new(4, 2).unwrap();
        let empty = WeightedComplex::empty(amb.clone());
        assert_eq!(degree(&empty, &s(&[0, 1])).unwrap(), 0);
        let full = WeightedComplex::complete(amb.clone(), 1.0);
        assert_eq!(degree(&full, &s(&[0, 1])).unwrap(), 2);
        let one = WeightedComplex::new(amb.clone(), vec![(amb.rank_of(&[0, 1, 2]), 1.0)]).unwrap();
        assert_eq!(degree(&one, &s(&[0, 1])).unwrap(), 1);
        assert_eq!(degree(&one, &s(&[0, 3])).unwrap(), 0);
        assert!(degree(&one, &s(&[0])).is_err());
    }

    #[test]
    fn binomial_table_overflow_is_an_error() {
        assert!(BinomialTable::new(70, 35).is_err());
        assert!(Ambient::new(10_000, 6).is_err());
        assert_eq!(binomial(60, 30), Some(118264581564861424));
        assert_eq!(binomial(200, 100), None);
    }

    #[test]
    fn text_round_trip_and_rejections() {
        let amb = Ambient::new(6, 2).unwrap();
        let x = WeightedComplex::new(amb, vec![(3, 0.5), (11, 1.0 / 3.0), (0, 2.0)]).unwrap();
        let text = x.to_text();
        assert!(text.starts_with("n=6 d=2\n0,1,2,2.0\n"));
        assert_eq!(WeightedComplex::from_text(&text).unwrap(), x);

        let dup = "n=5 d=1\n0,1,1.0\n0,1,2.0\n";
        assert!(matches!(WeightedComplex::from_text(dup), Err(Error::Parse { line: 3, .. })));
        assert!(WeightedComplex::from_text("n=5 d=1\n1,0,1.0\n").is_err());
        assert!(WeightedComplex::from_text("n=5 d=1\n0,7,1.0\n").is_err());
        assert!(WeightedComplex::from_text("n=5 d=1\n0,1,-1\n").is_err());
        assert!(WeightedComplex::from_text("n=5\n").is_err());
    }

    #[test]
    fn add_remove() {
        let amb = Ambient::new(5, 2).unwrap();
        let x = WeightedComplex::new(amb.clone(), vec![(1, 0.3), (4, 0.7)]).unwrap();
        assert_eq!(x.without_simplex(4).with_simplex(4, 0.7), x);
        assert_eq!(x.with_simplex(7, 1.0).len() - x.without_simplex(7).len(), 1);
        let full = WeightedComplex::complete(amb, 1.0);
        assert_eq!(full.with_simplex(3, 1.0), full);
    }
}

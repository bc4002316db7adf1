//! Brute-force oracles built on explicit vertex lists, sharing no code with
//! the rank-based implementation.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lmstab::{Ambient, ModelParams, PairedSample, WeightDistribution, WeightedComplex};

/// All k-subsets of `0..n` in lexicographic order.
pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Incidence between all (d-1)-simplices and all d-simplices of `K_n`.
pub struct Brute {
    pub faces: Vec<Vec<usize>>,
    pub tops: Vec<Vec<usize>>,
    pub top_faces: Vec<Vec<usize>>,
    pub face_tops: Vec<Vec<usize>>,
}

impl Brute {
    pub fn new(n: usize, d: usize) -> Self {
        let faces = combos(n, d);
        let tops = combos(n, d + 1);
        let mut face_tops = vec![Vec::new(); faces.len()];
        let top_faces: Vec<Vec<usize>> = tops
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                (0..t.len())
                    .map(|skip| {
                        let f: Vec<usize> = t.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                        let fi = faces.iter().position(|g| *g == f).unwrap();
                        face_tops[fi].push(ti);
                        fi
                    })
                    .collect()
            })
            .collect();
        Self { faces, tops, top_faces, face_tops }
    }

    pub fn face_index(&self, v: &[usize]) -> usize {
        self.faces.iter().position(|f| f == v).unwrap()
    }

    /// Shortest length of a path from `from` to `to` using distinct present
    /// d-simplices, searched exhaustively up to `max_k` steps.
    pub fn shortest_path(&self, present: &[bool], from: usize, to: usize, max_k: usize) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut used = vec![false; self.tops.len()];
        let mut best = None;
        self.dfs(present, from, to, 0, max_k, &mut used, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        present: &[bool],
        at: usize,
        to: usize,
        depth: usize,
        max_k: usize,
        used: &mut [bool],
        best: &mut Option<usize>,
    ) {
        let limit = best.map_or(max_k, |b| b - 1);
        if depth >= limit {
            return;
        }
        for &t in &self.face_tops[at] {
            if !present[t] || used[t] {
                continue;
            }
            used[t] = true;
            for &next in &self.top_faces[t] {
                if next == at {
                    continue;
                }
                if next == to {
                    *best = Some(depth + 1);
                } else {
                    self.dfs(present, next, to, depth + 1, max_k, used, best);
                }
            }
            used[t] = false;
        }
    }

    /// Terminal d-simplices of all paths of length at most `k` starting at
    /// any face in `from`.
    pub fn reachable_tops(&self, present: &[bool], from: &[usize], k: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut used = vec![false; self.tops.len()];
        for &f in from {
            self.collect(present, f, k, &mut used, &mut out);
        }
        out
    }

    fn collect(&self, present: &[bool], at: usize, left: usize, used: &mut [bool], out: &mut BTreeSet<usize>) {
        if left == 0 {
            return;
        }
        for &t in &self.face_tops[at] {
            if !present[t] || used[t] {
                continue;
            }
            out.insert(t);
            used[t] = true;
            for &next in &self.top_faces[t] {
                if next != at {
                    self.collect(present, next, left - 1, used, out);
                }
            }
            used[t] = false;
        }
    }

    /// Components of the face graph as sets of face indices.
    pub fn components(&self, present: &[bool]) -> Vec<BTreeSet<usize>> {
        let mut seen = vec![false; self.faces.len()];
        let mut out = Vec::new();
        for start in 0..self.faces.len() {
            if seen[start] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(f) = stack.pop() {
                comp.insert(f);
                for &t in &self.face_tops[f] {
                    if present[t] {
                        for &g in &self.top_faces[t] {
                            if !seen[g] {
                                seen[g] = true;
                                stack.push(g);
                            }
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn present_mask(&self, x: &WeightedComplex) -> Vec<bool> {
        let amb = x.ambient();
        self.tops.iter().map(|t| x.contains(amb.rank_of(t))).collect()
    }
}

/// `counts[k][j]`: present-sets with `j` d-simplices where faces `a` and `b`
/// connect within `k` steps, for `k` in `0..=max_k`.
pub fn gamma_counts_brute(n: usize, d: usize, a: &[usize], b: &[usize], max_k: usize) -> Vec<Vec<u64>> {
    let brute = Brute::new(n, d);
    let (fa, fb) = (brute.face_index(a), brute.face_index(b));
    let slots = brute.tops.len();
    let mut counts = vec![vec![0u64; slots + 1]; max_k + 1];
    let mut present = vec![false; slots];
    for mask in 0u64..(1u64 << slots) {
        for (t, p) in present.iter_mut().enumerate() {
            *p = mask >> t & 1 == 1;
        }
        if let Some(len) = brute.shortest_path(&present, fa, fb, max_k) {
            for row in counts.iter_mut().skip(len) {
                row[mask.count_ones() as usize] += 1;
            }
        }
    }
    counts
}

pub fn gamma_value(counts: &[u64], p: f64) -> f64 {
    let slots = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * p.powi(j as i32) * (1.0 - p).powi((slots - j) as i32))
        .sum()
}

pub fn random_complex(n: usize, d: usize, p: f64, seed: u64) -> WeightedComplex {
    let params = ModelParams::new(n, d, p, WeightDistribution::Exponential { mean: 1.0 }).unwrap();
    PairedSample::new(&params, seed).unwrap().primary()
}

pub fn ambient(n: usize, d: usize) -> Ambient {
    Ambient::new(n, d).unwrap()
}

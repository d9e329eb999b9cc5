//! Brute-force oracles shared by the integration tests. None of them call
//! the counting or enumeration code they are compared against.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cyclefrac::hypergraph::gen_random_min_codegree;
use cyclefrac::{Hypergraph, Rational, Vertex, WeightFunction};
use itertools::Itertools;
use num_bigint::BigInt;

fn is_edge(h: &Hypergraph, window: &[Vertex]) -> bool {
    let mut e = window.to_vec();
    e.sort_unstable();
    e.windows(2).all(|p| p[0] < p[1]) && h.edges().binary_search(&e).is_ok()
}

/// For every ordered edge `t`, the number of vertex sequences `s … t` of
/// length `ℓ + k − 1` whose every k-window is an edge, found by extending one
/// vertex at a time.
pub fn dfs_walk_counts(h: &Hypergraph, s: &[Vertex], ell: usize) -> BTreeMap<Vec<Vertex>, u128> {
    fn go(h: &Hypergraph, seq: &mut Vec<Vertex>, len: usize, out: &mut BTreeMap<Vec<Vertex>, u128>) {
        let k = h.k();
        if seq.len() == len {
            *out.entry(seq[len - k..].to_vec()).or_default() += 1;
            return;
        }
        for v in 1..=h.n() {
            seq.push(v);
            if is_edge(h, &seq[seq.len() - k..]) {
                go(h, seq, len, out);
            }
            seq.pop();
        }
    }
    let mut out = BTreeMap::new();
    if ell == 0 || !is_edge(h, s) {
        return out;
    }
    let mut seq = s.to_vec();
    go(h, &mut seq, ell + h.k() - 1, &mut out);
    out
}

/// Lexicographically least rotation or reflection.
pub fn canonical(vs: &[Vertex]) -> Vec<Vertex> {
    let n = vs.len();
    let mut best: Option<Vec<Vertex>> = None;
    let rev: Vec<Vertex> = vs.iter().rev().copied().collect();
    for base in [vs.to_vec(), rev] {
        for r in 0..n {
            let cand: Vec<Vertex> = (0..n).map(|i| base[(r + i) % n]).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// All tight ℓ-cycles by trying every ordered ℓ-tuple of distinct vertices.
pub fn brute_cycles(h: &Hypergraph, ell: usize) -> BTreeSet<Vec<Vertex>> {
    let k = h.k();
    (1..=h.n())
        .permutations(ell)
        .filter(|p| (0..ell).all(|i| {
            let w: Vec<Vertex> = (0..k).map(|j| p[(i + j) % ell]).collect();
            is_edge(h, &w)
        }))
        .map(|p| canonical(&p))
        .collect()
}

/// `n(n−1)…(n−ℓ+1) / (2ℓ)`.
pub fn complete_cycle_count(n: u64, ell: u64) -> u64 {
    (n - ell + 1..=n).product::<u64>() / (2 * ell)
}

/// Edge sums recomputed from each cycle's vertex list.
pub fn edge_sums(h: &Hypergraph, w: &WeightFunction) -> Vec<Rational> {
    let k = h.k();
    let mut sums = vec![Rational::from_integer(BigInt::from(0)); h.edge_count()];
    for (c, x) in w.iter() {
        let vs = c.vertices();
        for i in 0..vs.len() {
            let mut e: Vec<Vertex> = (0..k).map(|j| vs[(i + j) % vs.len()]).collect();
            e.sort_unstable();
            let id = h.edges().binary_search(&e).expect("cycle window is an edge");
            sums[id] += x;
        }
    }
    sums
}

pub fn all_one(sums: &[Rational]) -> bool {
    let one = Rational::from_integer(BigInt::from(1));
    sums.iter().all(|s| *s == one)
}

/// Ten small instances: five graphs and five 3-graphs on at most 8 vertices.
pub fn small_instances() -> Vec<Hypergraph> {
    let mut out = Vec::new();
    for seed in 0..5 {
        out.push(gen_random_min_codegree(6 + (seed as u32 % 3), 2, 2, seed).unwrap());
    }
    for seed in 0..5 {
        out.push(gen_random_min_codegree(6 + (seed as u32 % 3), 3, 1, 100 + seed).unwrap());
    }
    out
}

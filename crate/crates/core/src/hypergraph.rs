//! The k-uniform hypergraph model.
//!
//! Vertices are `1..=n`. Edges are stored as sorted k-tuples in lexicographic
//! order, so an edge id is stable for a given edge set. Vertex sets are also
//! kept as `u64` bitmasks (bit `v - 1` for vertex `v`), which bounds `n` by 64
//! and makes membership tests on windows a single hash lookup.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Vertex = u32;
pub type EdgeId = usize;
pub type Mask = u64;

pub const MAX_VERTICES: u32 = 64;

/// Bitmask of a vertex set. Duplicates collapse, so callers that care about
/// distinctness compare `count_ones` against the slice length.
pub fn mask_of(vertices: &[Vertex]) -> Mask {
    vertices.iter().fold(0, |m, &v| m | bit(v))
}

#[inline]
pub fn bit(v: Vertex) -> Mask {
    1u64 << (v - 1)
}

pub fn vertices_of(mask: Mask) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let tz = m.trailing_zeros();
        out.push(tz + 1);
        m &= m - 1;
    }
    out
}

#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: u32,
    k: usize,
    edges: Vec<Vec<Vertex>>,
    masks: Vec<Mask>,
    index: HashMap<Mask, EdgeId>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    pub fn new(n: u32, k: usize, edges: impl IntoIterator<Item = Vec<Vertex>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::input(format!("uniformity k = {k} must be at least 2")));
        }
        if n > MAX_VERTICES {
            return Err(Error::input(format!("n = {n} exceeds the supported maximum {MAX_VERTICES}")));
        }
        let mut sorted = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k {
                return Err(Error::input(format!("edge {e:?} does not have {k} vertices")));
            }
            if e.iter().any(|&v| v == 0 || v > n) {
                return Err(Error::input(format!("edge {e:?} has a vertex outside 1..={n}")));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::input(format!("edge {e:?} repeats a vertex")));
            }
            sorted.push(e);
        }
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate edge {:?}", w[0])));
        }
        let masks: Vec<Mask> = sorted.iter().map(|e| mask_of(e)).collect();
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self { n, k, edges: sorted, masks, index })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &[Vertex] {
        &self.edges[id]
    }

    pub fn edge_mask(&self, id: EdgeId) -> Mask {
        self.masks[id]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `k! · e(H)`, the number of ordered edges.
    pub fn ordered_edge_count(&self) -> usize {
        factorial(self.k) * self.edges.len()
    }

    pub fn edge_id_of_mask(&self, mask: Mask) -> Option<EdgeId> {
        self.index.get(&mask).copied()
    }

    pub fn edge_id(&self, vertices: &[Vertex]) -> Option<EdgeId> {
        if vertices.len() != self.k || vertices.iter().any(|&v| v == 0 || v > self.n) {
            return None;
        }
        let m = mask_of(vertices);
        if m.count_ones() as usize != self.k {
            return None;
        }
        self.edge_id_of_mask(m)
    }

    pub fn contains_mask(&self, mask: Mask) -> bool {
        self.index.contains_key(&mask)
    }

    /// True when the (unordered) vertex tuple is an edge; repeated vertices
    /// never form an edge.
    pub fn contains(&self, vertices: &[Vertex]) -> bool {
        self.edge_id(vertices).is_some()
    }

    fn check_set(&self, x: &[Vertex], size: usize) -> Result<Mask> {
        if x.len() != size {
            return Err(Error::input(format!("expected a {size}-set, got {x:?}")));
        }
        if x.iter().any(|&v| v == 0 || v > self.n) {
            return Err(Error::input(format!("{x:?} has a vertex outside 1..={}", self.n)));
        }
        let m = mask_of(x);
        if m.count_ones() as usize != size {
            return Err(Error::input(format!("{x:?} repeats a vertex")));
        }
        Ok(m)
    }

    pub fn codegree(&self, x: &[Vertex]) -> Result<usize> {
        let m = self.check_set(x, self.k - 1)?;
        Ok(self.codegree_mask(m))
    }

    /// Codegree of a (k−1)-set given as a mask; no validation.
    pub fn codegree_mask(&self, x: Mask) -> usize {
        self.neighborhood_mask(x).count_ones() as usize
    }

    pub fn neighborhood_mask(&self, x: Mask) -> Mask {
        let mut out = 0;
        for v in 1..=self.n {
            let b = bit(v);
            if x & b == 0 && self.index.contains_key(&(x | b)) {
                out |= b;
            }
        }
        out
    }

    pub fn neighborhood(&self, x: &[Vertex]) -> Result<Vec<Vertex>> {
        let m = self.check_set(x, self.k - 1)?;
        Ok(vertices_of(self.neighborhood_mask(m)))
    }

    /// Edge ids of the edges containing the (k−1)-set `x`, ascending.
    pub fn edges_containing(&self, x: Mask) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = (1..=self.n)
            .filter(|&v| x & bit(v) == 0)
            .filter_map(|v| self.edge_id_of_mask(x | bit(v)))
            .collect();
        ids.sort_unstable();
        ids
    }

    /// All (k−1)-subsets of the vertex set, as masks in lexicographic order.
    pub fn lower_sets(&self) -> impl Iterator<Item = Mask> + '_ {
        (1..=self.n)
            .combinations(self.k - 1)
            .map(|c| mask_of(&c))
    }

    pub fn min_codegree(&self) -> usize {
        self.lower_sets().map(|x| self.codegree_mask(x)).min().unwrap_or(0)
    }

    pub fn max_codegree(&self) -> usize {
        self.lower_sets().map(|x| self.codegree_mask(x)).max().unwrap_or(0)
    }

    /// The largest α for which H is α-intersecting:
    /// `min_{x,y} |N(x) ∩ N(y)| / n` over all pairs of (k−1)-sets.
    pub fn intersecting_parameter(&self) -> Rational {
        let hoods: Vec<Mask> = self.lower_sets().map(|x| self.neighborhood_mask(x)).collect();
        let mut min = u32::MAX;
        for (i, a) in hoods.iter().enumerate() {
            for b in &hoods[i..] {
                min = min.min((a & b).count_ones());
            }
        }
        if hoods.is_empty() || self.n == 0 {
            return Rational::from_integer(0.into());
        }
        Rational::new(min.into(), self.n.into())
    }

    pub fn is_alpha_intersecting(&self, alpha: &Rational) -> bool {
        if self.n == 0 {
            return false;
        }
        &self.intersecting_parameter() >= alpha
    }

    /// The link of `z`: a (k−1)-graph on `[n] \ {z}`, re-indexed order
    /// preservingly to `1..=n−1`. The returned map sends new index `i` to the
    /// original vertex `map[i - 1]`.
    pub fn link(&self, z: Vertex) -> Result<(Hypergraph, Vec<Vertex>)> {
        if self.k < 3 {
            return Err(Error::Unsupported(
                "the link of a graph (k = 2) would be 1-uniform".into(),
            ));
        }
        if z == 0 || z > self.n {
            return Err(Error::input(format!("vertex {z} outside 1..={}", self.n)));
        }
        let map: Vec<Vertex> = (1..=self.n).filter(|&v| v != z).collect();
        let relabel = |v: Vertex| if v < z { v } else { v - 1 };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.contains(&z))
            .map(|e| e.iter().filter(|&&v| v != z).map(|&v| relabel(v)).collect())
            .collect::<Vec<_>>();
        Ok((Hypergraph::new(self.n - 1, self.k - 1, edges)?, map))
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            k: self.k,
            edges: self.edges.clone(),
            a: None,
            classes: None,
            h02: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("instance JSON: {e}")))?;
        file.hypergraph()
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// On-disk instance format. The labeled-example fields are present only for
/// instances produced by [`gen_lowerbound_example`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub n: u32,
    pub k: usize,
    pub edges: Vec<Vec<Vertex>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vertex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<BTreeMap<String, Vec<Vec<Vertex>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h02: Option<Vec<Vec<Vertex>>>,
}

impl InstanceFile {
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.n, self.k, self.edges.clone())
    }

    pub fn labeled(&self) -> Result<LabeledExample> {
        let base = self.hypergraph()?;
        let (Some(a), Some(classes), Some(h02)) = (&self.a, &self.classes, &self.h02) else {
            return Err(Error::input("instance carries no A/classes/h02 labels"));
        };
        let mut by_index = vec![Vec::new(); base.k() + 1];
        for (key, edges) in classes {
            let i: usize = key
                .parse()
                .ok()
                .filter(|&i| i <= base.k())
                .ok_or_else(|| Error::input(format!("bad class key {key:?}")))?;
            by_index[i] = edges.iter().map(|e| e.iter().copied().sorted().collect()).collect();
        }
        let example = LabeledExample {
            base,
            a: a.iter().copied().sorted().collect(),
            classes: by_index,
            h02: h02.iter().map(|e| e.iter().copied().sorted().collect()).collect(),
        };
        example.check()?;
        Ok(example)
    }
}

pub fn gen_complete(n: u32, k: usize) -> Result<Hypergraph> {
    if k < 2 {
        return Err(Error::input(format!("uniformity k = {k} must be at least 2")));
    }
    Hypergraph::new(n, k, (1..=n).combinations(k))
}

const MIN_CODEGREE_ATTEMPTS: usize = 200;

/// Samples every k-set independently with probability p, raising p after each
/// failed attempt, until the minimum codegree reaches `delta_target`.
pub fn gen_random_min_codegree(n: u32, k: usize, delta_target: usize, seed: u64) -> Result<Hypergraph> {
    if k < 2 {
        return Err(Error::input(format!("uniformity k = {k} must be at least 2")));
    }
    if (n as usize) < k {
        return Err(Error::input(format!("n = {n} is smaller than k = {k}")));
    }
    let max_degree = n as usize - k + 1;
    if delta_target > max_degree {
        return Err(Error::GenerationFailed {
            attempts: 0,
            detail: format!("target codegree {delta_target} exceeds n − k + 1 = {max_degree}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<Vec<Vertex>> = (1..=n).combinations(k).collect();
    let mut p = (delta_target as f64 / max_degree as f64).max(0.05);
    let mut best = 0;
    for _ in 0..MIN_CODEGREE_ATTEMPTS {
        let edges: Vec<_> = all.iter().filter(|_| rng.gen_bool(p)).cloned().collect();
        let h = Hypergraph::new(n, k, edges)?;
        let delta = h.min_codegree();
        if delta >= delta_target {
            return Ok(h);
        }
        best = best.max(delta);
        p = (p + (1.0 - p) / 8.0).min(1.0);
    }
    Err(Error::GenerationFailed {
        attempts: MIN_CODEGREE_ATTEMPTS,
        detail: format!("best minimum codegree {best} < target {delta_target}, final p = {p:.4}"),
    })
}

/// The labeled lower-bound construction: a balanced bipartition `A ∪ B`, the
/// classes `E_i = {e : |e ∩ A| = i}` of the complete k-graph, a random subset
/// `h02` of `E_0 ∪ E_2`, and `base = h02 ∪ E_1 ∪ E_3 ∪ … ∪ E_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample {
    pub base: Hypergraph,
    /// Sorted; `B` is the complement.
    pub a: Vec<Vertex>,
    /// `classes[i]` is `E_i`, sorted.
    pub classes: Vec<Vec<Vec<Vertex>>>,
    pub h02: Vec<Vec<Vertex>>,
}

impl LabeledExample {
    pub fn a_mask(&self) -> Mask {
        mask_of(&self.a)
    }

    pub fn class_of(&self, edge: &[Vertex]) -> usize {
        (mask_of(edge) & self.a_mask()).count_ones() as usize
    }

    /// Re-checks the partition invariants.
    pub fn check(&self) -> Result<()> {
        let n = self.base.n();
        let k = self.base.k();
        if !n.is_multiple_of(2) || self.a.len() != n as usize / 2 {
            return Err(Error::input("A must contain exactly half of an even vertex set"));
        }
        if self.classes.len() != k + 1 {
            return Err(Error::input("expected k + 1 classes"));
        }
        for (i, class) in self.classes.iter().enumerate() {
            if class.iter().any(|e| self.class_of(e) != i) {
                return Err(Error::input(format!("class {i} holds an edge of another class")));
            }
        }
        if self.h02.iter().any(|e| !matches!(self.class_of(e), 0 | 2)) {
            return Err(Error::input("h02 must be a subset of E_0 ∪ E_2"));
        }
        let mut expected: Vec<Vec<Vertex>> = self.h02.clone();
        for i in (1..=k).filter(|&i| i != 2) {
            expected.extend(self.classes[i].iter().cloned());
        }
        expected.sort();
        if expected != self.base.edges() {
            return Err(Error::input("base edges differ from h02 ∪ E_1 ∪ E_3 ∪ … ∪ E_k"));
        }
        Ok(())
    }

    pub fn to_file(&self) -> InstanceFile {
        let mut file = self.base.to_file();
        file.a = Some(self.a.clone());
        file.classes = Some(
            self.classes
                .iter()
                .enumerate()
                .map(|(i, c)| (i.to_string(), c.clone()))
                .collect(),
        );
        file.h02 = Some(self.h02.clone());
        file
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::input(format!("instance JSON: {e}")))?;
        file.labeled()
    }
}

pub fn gen_lowerbound_example(n: u32, k: usize, eps: f64, zeta: f64, seed: u64) -> Result<LabeledExample> {
    if k < 2 {
        return Err(Error::input(format!("uniformity k = {k} must be at least 2")));
    }
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::input(format!("n = {n} must be even and positive")));
    }
    if !(0.0..1.0).contains(&eps) || !(0.0..1.0).contains(&zeta) {
        return Err(Error::input("eps and zeta must lie in [0, 1)"));
    }
    let half = n / 2;
    let a: Vec<Vertex> = (1..=half).collect();
    let a_mask = mask_of(&a);
    let mut classes = vec![Vec::new(); k + 1];
    for e in (1..=n).combinations(k) {
        let i = (mask_of(&e) & a_mask).count_ones() as usize;
        classes[i].push(e);
    }
    let p = (2.0 * (1.0 + zeta) * eps).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<&Vec<Vertex>> = classes[0].iter().collect();
    if k >= 2 {
        candidates.extend(classes[2].iter());
    }
    candidates.sort();
    let h02: Vec<Vec<Vertex>> = candidates
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .cloned()
        .collect();
    let mut edges = h02.clone();
    for i in (1..=k).filter(|&i| i != 2) {
        edges.extend(classes[i].iter().cloned());
    }
    let base = Hypergraph::new(n, k, edges)?;
    let example = LabeledExample { base, a, classes, h02 };
    debug_assert!(example.check().is_ok());
    Ok(example)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn h(n: u32, k: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(n, k, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(Hypergraph::new(4, 3, vec![vec![1, 2]]).is_err());
        assert!(Hypergraph::new(4, 3, vec![vec![1, 2, 5]]).is_err());
        assert!(Hypergraph::new(4, 3, vec![vec![1, 2, 2]]).is_err());
        assert!(Hypergraph::new(4, 3, vec![vec![1, 2, 3], vec![3, 2, 1]]).is_err());
        assert!(Hypergraph::new(4, 1, vec![vec![1]]).is_err());
        assert!(Hypergraph::new(65, 2, vec![]).is_err());
    }

    #[test]
    fn codegree_examples() {
        let k6 = gen_complete(6, 2).unwrap();
        assert_eq!(k6.codegree(&[3]).unwrap(), 5);
        let empty = Hypergraph::new(5, 3, vec![]).unwrap();
        assert_eq!(empty.codegree(&[1, 2]).unwrap(), 0);
        let g = h(4, 3, &[&[1, 2, 3], &[1, 2, 4], &[2, 3, 4]]);
        assert_eq!(g.codegree(&[2, 3]).unwrap(), 2);
        assert!(g.codegree(&[2]).is_err());
        assert!(g.codegree(&[2, 2]).is_err());
    }

    #[test]
    fn min_max_codegree() {
        let k5 = gen_complete(5, 2).unwrap();
        assert_eq!((k5.min_codegree(), k5.max_codegree()), (4, 4));
        let g = h(4, 3, &[&[1, 2, 3], &[1, 2, 4]]);
        assert_eq!(g.min_codegree(), 0);
        assert_eq!(g.codegree(&[3, 4]).unwrap(), 0);
        assert_eq!(g.max_codegree(), 2);
    }

    #[test]
    fn neighborhoods() {
        let k5 = gen_complete(5, 2).unwrap();
        assert_eq!(k5.neighborhood(&[2]).unwrap(), vec![1, 3, 4, 5]);
        let empty = Hypergraph::new(5, 2, vec![]).unwrap();
        assert!(empty.neighborhood(&[2]).unwrap().is_empty());
        let g = h(4, 3, &[&[1, 2, 3], &[2, 3, 4]]);
        assert_eq!(g.neighborhood(&[2, 3]).unwrap(), vec![1, 4]);
    }

    #[test]
    fn alpha_intersecting() {
        let k8 = gen_complete(8, 2).unwrap();
        assert!(k8.is_alpha_intersecting(&rat(1, 2)));
        // |N(x) ∩ N(y)| = 6 for x ≠ y, so 6/8 is the exact parameter
        assert_eq!(k8.intersecting_parameter(), rat(6, 8));
        let empty = Hypergraph::new(6, 2, vec![]).unwrap();
        assert!(!empty.is_alpha_intersecting(&rat(1, 100)));
    }

    #[test]
    fn dense_graphs_are_intersecting() {
        for seed in 0..5 {
            let g = gen_random_min_codegree(10, 2, 8, seed).unwrap();
            assert!(g.min_codegree() >= 8);
            // δ ≥ (1 + α) n / 2 with α = 1/2 needs δ ≥ 7.5
            assert!(g.is_alpha_intersecting(&rat(1, 2)));
            // exhaustive pair check against the mask-based answer
            let hoods: Vec<Vec<Vertex>> = (1..=10).map(|v| g.neighborhood(&[v]).unwrap()).collect();
            for a in &hoods {
                for b in &hoods {
                    let common = a.iter().filter(|v| b.contains(v)).count();
                    assert!(common * 2 >= 10);
                }
            }
        }
    }

    #[test]
    fn links() {
        let k5 = gen_complete(5, 3).unwrap();
        let (l, map) = k5.link(1).unwrap();
        assert_eq!(l, gen_complete(4, 2).unwrap());
        assert_eq!(map, vec![2, 3, 4, 5]);
        let g = h(3, 3, &[&[1, 2, 3]]);
        let (l, _) = g.link(3).unwrap();
        assert_eq!(l.edges(), &[vec![1, 2]]);
        assert!(gen_complete(4, 2).unwrap().link(1).is_err());
    }

    #[test]
    fn link_sizes_sum_to_k_times_edges() {
        for seed in 0..4 {
            let g = gen_random_min_codegree(8, 3, 3, seed).unwrap();
            let total: usize = (1..=8).map(|z| g.link(z).unwrap().0.edge_count()).sum();
            assert_eq!(total, 3 * g.edge_count());
        }
    }

    #[test]
    fn generators() {
        let k5 = gen_complete(5, 2).unwrap();
        assert_eq!(k5.edge_count(), 10);
        assert_eq!(k5.min_codegree(), 4);
        let g = gen_random_min_codegree(8, 2, 5, 7).unwrap();
        assert!(g.min_codegree() >= 5);
        assert_eq!(g, gen_random_min_codegree(8, 2, 5, 7).unwrap());
        assert!(gen_random_min_codegree(8, 2, 8, 7).is_err());
        assert!(gen_complete(5, 1).is_err());
    }

    #[test]
    fn lowerbound_example_classes() {
        let ex = gen_lowerbound_example(12, 2, 0.15, 0.05, 3).unwrap();
        ex.check().unwrap();
        assert_eq!(ex.classes[1].len(), 36);
        assert_eq!(ex.classes[0].len() + ex.classes[2].len(), 30);
        assert_eq!(ex.base.edge_count(), 36 + ex.h02.len());
        // same seed, same draw
        assert_eq!(ex, gen_lowerbound_example(12, 2, 0.15, 0.05, 3).unwrap());

        let none = gen_lowerbound_example(12, 2, 0.0, 0.05, 3).unwrap();
        assert!(none.h02.is_empty());
        assert_eq!(none.base.edges(), none.classes[1].as_slice());

        let k3 = gen_lowerbound_example(8, 3, 0.1, 0.1, 1).unwrap();
        k3.check().unwrap();
        for e in k3.base.edges() {
            let c = k3.class_of(e);
            assert!(c != 0 && c != 2 || k3.h02.contains(e));
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let ex = gen_lowerbound_example(8, 2, 0.2, 0.1, 5).unwrap();
        let back = LabeledExample::from_json(&ex.to_json()).unwrap();
        assert_eq!(back, ex);
        let g = gen_complete(5, 3).unwrap();
        assert_eq!(Hypergraph::from_json(&g.to_json()).unwrap(), g);
        assert!(Hypergraph::from_json(r#"{"n": 3, "k": 1, "edges": []}"#).is_err());
    }
}

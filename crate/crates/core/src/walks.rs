//! Walks, tight cycles, walk counting and connectivity.
//!
//! A walk of length ℓ is stored by its vertex sequence `v_1 … v_{ℓ+k−1}`; its
//! ordered edges are the consecutive k-windows. Counting uses the one-step
//! successor relation on ordered edges: `(e_1, …, e_k)` may be followed by
//! `(e_2, …, e_k, u)` whenever the underlying set is an edge.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{bit, mask_of, Hypergraph, Mask, Vertex};
use crate::rational::{self, Rational};

/// Indexing of the ordered edges `E⃗(H)`. Ordered edges of the same edge are
/// contiguous and listed in lexicographic permutation order.
#[derive(Clone, Debug)]
pub struct OrderedEdges {
    k: usize,
    flat: Vec<Vertex>,
    edge_of: Vec<usize>,
    index: HashMap<Vec<Vertex>, usize>,
}

impl OrderedEdges {
    pub fn new(h: &Hypergraph) -> Self {
        let k = h.k();
        let mut flat = Vec::with_capacity(h.ordered_edge_count() * k);
        let mut edge_of = Vec::with_capacity(h.ordered_edge_count());
        let mut index = HashMap::with_capacity(h.ordered_edge_count());
        for (id, e) in h.edges().iter().enumerate() {
            for p in e.iter().copied().permutations(k) {
                index.insert(p.clone(), edge_of.len());
                edge_of.push(id);
                flat.extend(p);
            }
        }
        Self { k, flat, edge_of, index }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.edge_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_of.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[Vertex] {
        &self.flat[i * self.k..(i + 1) * self.k]
    }

    pub fn edge_id(&self, i: usize) -> usize {
        self.edge_of[i]
    }

    pub fn index_of(&self, tuple: &[Vertex]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn require(&self, tuple: &[Vertex]) -> Result<usize> {
        self.index_of(tuple)
            .ok_or_else(|| Error::input(format!("{tuple:?} is not an ordered edge")))
    }

    /// Unrestricted one-step successors of every ordered edge, each list
    /// ascending.
    pub fn successors(&self, h: &Hypergraph) -> Vec<Vec<usize>> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let tail = &self.tuple(i)[1..];
                let hood = h.neighborhood_mask(mask_of(tail));
                let mut next = tail.to_vec();
                next.push(0);
                let mut out: Vec<usize> = crate::hypergraph::vertices_of(hood)
                    .into_iter()
                    .map(|u| {
                        *next.last_mut().unwrap() = u;
                        self.index[&next]
                    })
                    .collect();
                out.sort_unstable();
                out
            })
            .collect()
    }
}

/// Pushes a start vector `steps` times through a successor relation.
/// `out[v] = Σ_u start[u] · #{step-paths u → v}`.
pub fn propagate(successors: &[Vec<usize>], start: Vec<u128>, steps: usize) -> Result<Vec<u128>> {
    let mut cur = start;
    for _ in 0..steps {
        let mut next = vec![0u128; cur.len()];
        for (u, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &v in &successors[u] {
                next[v] = next[v]
                    .checked_add(c)
                    .ok_or_else(|| Error::Overflow("walk count exceeds u128".into()))?;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Counts of walks of length `ell` from `start` to every ordered edge.
pub fn counts_from(successors: &[Vec<usize>], start: usize, ell: usize) -> Result<Vec<u128>> {
    let mut v = vec![0u128; successors.len()];
    if ell == 0 {
        return Ok(v);
    }
    v[start] = 1;
    propagate(successors, v, ell - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    k: usize,
    vertices: Vec<Vertex>,
}

impl Walk {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of ordered edges.
    pub fn len(&self) -> usize {
        self.vertices.len() + 1 - self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.vertices[i..i + self.k]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[Vertex]> {
        self.vertices.windows(self.k)
    }

    pub fn is_self_avoiding(&self) -> bool {
        all_distinct(&self.vertices)
    }

    /// Both `e_1 … e_{ℓ−k}` and `e_{k+1} … e_ℓ` are self-avoiding. A sub-walk
    /// with no edges counts as self-avoiding.
    pub fn is_internally_self_avoiding(&self) -> bool {
        let ell = self.len();
        if ell <= self.k {
            return true;
        }
        let m = ell - self.k;
        // e_1 … e_m spans v_1 … v_{m+k−1}; e_{k+1} … e_ℓ spans v_{k+1} … v_{ℓ+k−1}
        all_distinct(&self.vertices[..m + self.k - 1]) && all_distinct(&self.vertices[self.k..])
    }

    /// The first and last ordered edges coincide.
    pub fn is_closed(&self) -> bool {
        self.edge(0) == self.edge(self.len() - 1)
    }

    /// A closed walk of length ℓ+1 traversing an ℓ-cycle: closed, and its
    /// first ℓ vertices are distinct.
    pub fn is_self_avoiding_closed(&self) -> bool {
        let ell = self.len();
        ell > self.k && self.is_closed() && all_distinct(&self.vertices[..ell - 1])
    }
}

pub fn all_distinct(vs: &[Vertex]) -> bool {
    let m = mask_of(vs);
    m.count_ones() as usize == vs.len()
}

pub fn walk_from_vertices(h: &Hypergraph, vs: &[Vertex]) -> Result<Walk> {
    let k = h.k();
    if vs.len() < k {
        return Err(Error::input(format!("a walk needs at least {k} vertices, got {}", vs.len())));
    }
    for (index, w) in vs.windows(k).enumerate() {
        if !h.contains(w) {
            return Err(Error::NotAWalk { index, window: w.to_vec() });
        }
    }
    Ok(Walk { k, vertices: vs.to_vec() })
}

/// A tight cycle, identified by its canonical vertex cycle: the
/// lexicographically least of its 2ℓ rotations and reflections.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TightCycle {
    vertices: Vec<Vertex>,
}

impl TightCycle {
    /// Validates distinctness, length ≥ k+1 and every cyclic window.
    pub fn new(h: &Hypergraph, vs: &[Vertex]) -> Result<Self> {
        let k = h.k();
        if vs.len() < k + 1 {
            return Err(Error::input(format!("a tight cycle in a {k}-graph needs at least {} vertices", k + 1)));
        }
        if !all_distinct(vs) {
            return Err(Error::input(format!("cycle {vs:?} repeats a vertex")));
        }
        for (index, w) in cyclic_windows(vs, k).enumerate() {
            if !h.contains(&w) {
                return Err(Error::NotAWalk { index, window: w });
            }
        }
        Ok(Self::canonical(vs))
    }

    /// Canonicalizes without checking membership in any hypergraph.
    pub fn canonical(vs: &[Vertex]) -> Self {
        Self { vertices: canonical_form(vs) }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The ℓ cyclic k-windows, in traversal order.
    pub fn windows(&self, k: usize) -> Vec<Vec<Vertex>> {
        cyclic_windows(&self.vertices, k).collect()
    }

    pub fn edge_masks(&self, k: usize) -> Vec<Mask> {
        cyclic_windows(&self.vertices, k).map(|w| mask_of(&w)).collect()
    }

    /// Edge ids of the ℓ edges, in traversal order. Panics if a window is not
    /// an edge of `h`.
    pub fn edge_ids(&self, h: &Hypergraph) -> Vec<usize> {
        self.edge_masks(h.k())
            .into_iter()
            .map(|m| h.edge_id_of_mask(m).expect("cycle window is an edge"))
            .collect()
    }

    /// Vertex sequence of the closed (ℓ+1)-walk starting at the first vertex.
    pub fn closed_walk(&self, k: usize) -> Vec<Vertex> {
        let mut vs = self.vertices.clone();
        vs.extend_from_slice(&self.vertices[..k]);
        vs
    }

    /// All 2ℓ rotations and reflections of the vertex cycle.
    pub fn representations(&self) -> Vec<Vec<Vertex>> {
        representations(&self.vertices)
    }
}

pub fn cyclic_windows(vs: &[Vertex], k: usize) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    let l = vs.len();
    (0..l).map(move |i| (0..k).map(|j| vs[(i + j) % l]).collect())
}

fn representations(vs: &[Vertex]) -> Vec<Vec<Vertex>> {
    let l = vs.len();
    let mut out = Vec::with_capacity(2 * l);
    for i in 0..l {
        out.push((0..l).map(|j| vs[(i + j) % l]).collect());
        out.push((0..l).map(|j| vs[(i + l - j) % l]).collect());
    }
    out
}

fn canonical_form(vs: &[Vertex]) -> Vec<Vertex> {
    representations(vs).into_iter().min().unwrap_or_default()
}

/// A transition filter on consecutive windows `(v_i … v_{i+k−1})` and
/// `(v_{i+1} … v_{i+k})`, given as the k+1 vertices they span.
pub type StepFilter<'a> = dyn Fn(&[Vertex]) -> bool + Sync + 'a;

/// All ℓ-cycles of `h`, sorted by canonical form.
pub fn enumerate_cycles(h: &Hypergraph, ell: usize) -> Result<Vec<TightCycle>> {
    enumerate_cycles_with(h, ell, &|_| true)
}

/// All ℓ-cycles all of whose ℓ cyclic transitions pass `step_ok`. The filter
/// receives the k+1 consecutive cycle vertices spanned by a transition; it
/// must be invariant under reversing that slice.
pub fn enumerate_cycles_with(h: &Hypergraph, ell: usize, step_ok: &StepFilter) -> Result<Vec<TightCycle>> {
    let k = h.k();
    if ell < k + 1 {
        return Err(Error::input(format!("cycle length {ell} must be at least k + 1 = {}", k + 1)));
    }
    let n = h.n();
    if (n as usize) < ell {
        return Ok(Vec::new());
    }
    let starts: Vec<(Vertex, Vertex)> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    let mut found: Vec<TightCycle> = starts
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            let mut out = Vec::new();
            let mut seq = vec![a, b];
            cycle_dfs(h, ell, step_ok, &mut seq, bit(a) | bit(b), &mut out);
            out
        })
        .collect();
    found.sort();
    Ok(found)
}

fn cycle_dfs(
    h: &Hypergraph,
    ell: usize,
    step_ok: &StepFilter,
    seq: &mut Vec<Vertex>,
    used: Mask,
    out: &mut Vec<TightCycle>,
) {
    let k = h.k();
    let len = seq.len();
    if len >= k && !h.contains_mask(mask_of(&seq[len - k..])) {
        return;
    }
    if len > k && !step_ok(&seq[len - k - 1..]) {
        return;
    }
    if len == ell {
        // canonical direction: second vertex below the last
        if seq[1] > seq[ell - 1] {
            return;
        }
        let mut ext = seq.clone();
        ext.extend_from_slice(&seq[..k]);
        for i in ell - k + 1..ell {
            if !h.contains_mask(mask_of(&ext[i..i + k])) {
                return;
            }
        }
        for i in ell - k..ell {
            if !step_ok(&ext[i..i + k + 1]) {
                return;
            }
        }
        out.push(TightCycle { vertices: seq.clone() });
        return;
    }
    let root = seq[0];
    for v in root + 1..=h.n() {
        if used & bit(v) != 0 {
            continue;
        }
        seq.push(v);
        cycle_dfs(h, ell, step_ok, seq, used | bit(v), out);
        seq.pop();
    }
}

/// Number of ℓ-walks from `s` to `t`.
pub fn count_walks(h: &Hypergraph, s: &[Vertex], t: &[Vertex], ell: usize) -> Result<u128> {
    let oe = OrderedEdges::new(h);
    let si = oe.require(s)?;
    let ti = oe.require(t)?;
    let succ = oe.successors(h);
    Ok(counts_from(&succ, si, ell)?[ti])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityCertificate {
    pub ell: usize,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    pub per_pair_min: u128,
    /// `n^{ℓ−1} / e⃗(H)`.
    #[serde(with = "rational::serde_str")]
    pub scaling: Rational,
    /// An ordered pair attaining the minimum.
    pub argmin: (Vec<Vertex>, Vec<Vertex>),
}

/// The largest α for which `h` is (α, ℓ)-connected.
pub fn connectivity(h: &Hypergraph, ell: usize) -> Result<ConnectivityCertificate> {
    if ell == 0 {
        return Err(Error::input("walk length must be at least 1"));
    }
    if h.edge_count() == 0 {
        return Err(Error::input("connectivity needs at least one edge"));
    }
    let oe = OrderedEdges::new(h);
    let succ = oe.successors(h);
    let (min, s, t) = min_pair_count(&succ, ell)?;
    let scaling = Rational::new(
        num_traits::pow(BigInt::from(h.n()), ell - 1),
        BigInt::from(oe.len()),
    );
    Ok(ConnectivityCertificate {
        ell,
        alpha: Rational::from_integer(min.into()) / &scaling,
        per_pair_min: min,
        scaling,
        argmin: (oe.tuple(s).to_vec(), oe.tuple(t).to_vec()),
    })
}

/// Minimum of the ℓ-walk count over all ordered pairs, with a witness pair.
pub fn min_pair_count(succ: &[Vec<usize>], ell: usize) -> Result<(u128, usize, usize)> {
    (0..succ.len())
        .into_par_iter()
        .map(|s| {
            let counts = counts_from(succ, s, ell)?;
            let (t, &c) = counts.iter().enumerate().min_by_key(|&(_, c)| *c).expect("nonempty");
            Ok((c, s, t))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().min().expect("at least one ordered edge"))
}

/// `(ℓ_k, a_k)` with `ℓ_k = k² − k + 2` and `a_k = (k−1)! Σ_{i=0}^{k−2} (i+1)/i!`.
pub fn lk_constants(k: usize) -> Result<(usize, u128)> {
    if k < 2 {
        return Err(Error::input(format!("k = {k} must be at least 2")));
    }
    if k > 30 {
        return Err(Error::Overflow(format!("a_k for k = {k}")));
    }
    let fact = |m: usize| -> u128 { (1..=m as u128).product() };
    let a: u128 = (0..=k - 2).map(|i| (i as u128 + 1) * (fact(k - 1) / fact(i))).sum();
    Ok((k * k - k + 2, a))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsertionCensus {
    /// Number of distinct ℓ_k-walks produced by the insertion construction.
    /// A lower bound on that number when `partial` is set.
    pub count: u128,
    pub partial: bool,
    pub nodes: u64,
    pub ell: usize,
    /// Size of the common neighbourhood `N({s_2..s_k}) ∩ N({t_1..t_{k−1}})`.
    pub common: usize,
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    /// `α^{a_k} · n^{ℓ_k − k − 1}`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub meets_bound: bool,
}

struct InsertionSearch<'a> {
    h: &'a Hypergraph,
    prefix: Vec<Vertex>,
    suffix: Vec<Vertex>,
    free: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
}

impl InsertionSearch<'_> {
    fn link_edge(&self, z: Vertex, window: &[Vertex]) -> bool {
        let m = mask_of(window);
        m & bit(z) == 0 && m.count_ones() as usize == window.len() && self.h.contains_mask(m | bit(z))
    }

    /// All x with `prefix x suffix` a walk in the link of z.
    fn fill(&mut self, z: Vertex, seq: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let w = self.h.k() - 1;
        let p = self.prefix.len();
        if seq.len() == p + self.free {
            let mut full = seq.clone();
            full.extend_from_slice(&self.suffix);
            if (seq.len() + 1..=full.len()).all(|end| self.link_edge(z, &full[end - w..end])) {
                out.push(seq[p..].to_vec());
            }
            return;
        }
        for v in 1..=self.h.n() {
            if v == z {
                continue;
            }
            seq.push(v);
            let len = seq.len();
            if self.link_edge(z, &seq[len - w..]) {
                self.fill(z, seq, out);
            }
            seq.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Census of the ℓ_k-walks from `s` to `t` given by inserting common
/// neighbours every k−1 positions into sequences that are walks in links.
///
/// Distinct `(x, z_1 … z_{k−1})` give distinct vertex sequences, so the
/// census is `Σ_x (Σ_z 1_z(x))^{k−1}`. `budget` bounds the number of search
/// nodes; when it runs out the census is a lower bound.
pub fn insertion_walks(h: &Hypergraph, s: &[Vertex], t: &[Vertex], budget: u64) -> Result<InsertionCensus> {
    let k = h.k();
    if k < 3 {
        return Err(Error::Unsupported("the insertion construction needs k ≥ 3".into()));
    }
    for e in [s, t] {
        if !h.contains(e) {
            return Err(Error::input(format!("{e:?} is not an ordered edge")));
        }
    }
    let (ell, a_k) = lk_constants(k)?;
    let left = &s[1..];
    let right = &t[..k - 1];
    let common = h.neighborhood_mask(mask_of(left)) & h.neighborhood_mask(mask_of(right));
    let mut search = InsertionSearch {
        h,
        prefix: left.to_vec(),
        suffix: right.to_vec(),
        free: (k - 1) * (k - 2),
        budget,
        nodes: 0,
        exhausted: false,
    };
    let mut per_x: HashMap<Vec<Vertex>, u128> = HashMap::new();
    for z in crate::hypergraph::vertices_of(common) {
        let mut found = Vec::new();
        search.fill(z, &mut left.to_vec(), &mut found);
        for x in found {
            *per_x.entry(x).or_default() += 1;
        }
        if search.exhausted {
            break;
        }
    }
    let mut count: u128 = 0;
    for &c in per_x.values() {
        let term = (0..k - 1).try_fold(1u128, |acc, _| acc.checked_mul(c));
        count = term
            .and_then(|t| count.checked_add(t))
            .ok_or_else(|| Error::Overflow("insertion census exceeds u128".into()))?;
    }
    let alpha = h.intersecting_parameter();
    let bound = rational::pow(&alpha, a_k as usize)
        * rational::int(num_traits::pow(BigInt::from(h.n()), ell - k - 1));
    Ok(InsertionCensus {
        meets_bound: Rational::from_integer(count.into()) >= bound,
        count,
        partial: search.exhausted,
        nodes: search.nodes,
        ell,
        common: common.count_ones() as usize,
        alpha,
        bound,
    })
}

/// The vertex sequence `s y t` built from `x` and inserted vertices
/// `z_1 … z_{k−1}`: `y_{k(i−1)+1} = z_i`, with `x` filling the other slots.
pub fn insertion_sequence(s: &[Vertex], x: &[Vertex], zs: &[Vertex], t: &[Vertex]) -> Vec<Vertex> {
    let k = s.len();
    let mut out = s.to_vec();
    let mut xs = x.iter();
    for pos in 0..(k - 1) * (k - 1) {
        if pos % k == 0 {
            out.push(zs[pos / k]);
        } else {
            out.push(*xs.next().expect("x has (k−1)(k−2) entries"));
        }
    }
    out.extend_from_slice(t);
    out
}

/// Every distinct walk from the insertion construction, for small instances.
pub fn insertion_walk_list(h: &Hypergraph, s: &[Vertex], t: &[Vertex]) -> Result<BTreeSet<Vec<Vertex>>> {
    let k = h.k();
    if k < 3 {
        return Err(Error::Unsupported("the insertion construction needs k ≥ 3".into()));
    }
    let left = &s[1..];
    let right = &t[..k - 1];
    let common = h.neighborhood_mask(mask_of(left)) & h.neighborhood_mask(mask_of(right));
    let mut search = InsertionSearch {
        h,
        prefix: left.to_vec(),
        suffix: right.to_vec(),
        free: (k - 1) * (k - 2),
        budget: u64::MAX,
        nodes: 0,
        exhausted: false,
    };
    let mut zs_of: HashMap<Vec<Vertex>, Vec<Vertex>> = HashMap::new();
    for z in crate::hypergraph::vertices_of(common) {
        let mut found = Vec::new();
        search.fill(z, &mut left.to_vec(), &mut found);
        for x in found {
            zs_of.entry(x).or_default().push(z);
        }
    }
    let mut out = BTreeSet::new();
    for (x, zs) in zs_of {
        for choice in (0..k - 1).map(|_| zs.iter().copied()).multi_cartesian_product() {
            out.insert(insertion_sequence(s, &x, &choice, t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::gen_complete;
    use crate::rational::rat;

    #[test]
    fn walks_from_vertices() {
        let k4 = gen_complete(4, 2).unwrap();
        let w = walk_from_vertices(&k4, &[1, 2, 3]).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.edges().collect::<Vec<_>>(), vec![&[1, 2][..], &[2, 3][..]]);

        let single = Hypergraph::new(4, 3, vec![vec![1, 2, 3]]).unwrap();
        match walk_from_vertices(&single, &[1, 2, 3, 4]) {
            Err(Error::NotAWalk { index, window }) => {
                assert_eq!(index, 1);
                assert_eq!(window, vec![2, 3, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }

        let k5 = gen_complete(5, 3).unwrap();
        let w = walk_from_vertices(&k5, &[1, 2, 3, 4, 5, 1]).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.edge(3), &[4, 5, 1]);
        assert!(walk_from_vertices(&k5, &[1, 2]).is_err());
    }

    #[test]
    fn self_avoidance() {
        let k5 = gen_complete(5, 2).unwrap();
        let w = walk_from_vertices(&k5, &[1, 2, 3, 4]).unwrap();
        assert!(w.is_self_avoiding());
        let closed = walk_from_vertices(&k5, &[1, 2, 3, 1]).unwrap();
        assert!(!closed.is_self_avoiding());
        assert!(closed.is_internally_self_avoiding());
        let back = walk_from_vertices(&k5, &[1, 2, 1, 2, 3]).unwrap();
        assert!(!back.is_internally_self_avoiding());
    }

    #[test]
    fn closed_self_avoiding_walks() {
        let k5 = gen_complete(5, 3).unwrap();
        let c = walk_from_vertices(&k5, &[1, 2, 3, 4, 1, 2, 3]).unwrap();
        assert!(c.is_self_avoiding_closed());
        let not_closed = walk_from_vertices(&k5, &[1, 2, 3, 4, 1, 2, 4]).unwrap();
        assert!(!not_closed.is_self_avoiding_closed());
    }

    #[test]
    fn count_walks_examples() {
        let k4 = gen_complete(4, 2).unwrap();
        assert_eq!(count_walks(&k4, &[1, 2], &[1, 2], 1).unwrap(), 1);
        assert_eq!(count_walks(&k4, &[1, 2], &[3, 4], 2).unwrap(), 0);
        // (1,2) (2,x) (x,3) with x ∉ {2,3}: x ∈ {1,4}
        assert_eq!(count_walks(&k4, &[1, 2], &[2, 3], 2).unwrap(), 1);
        assert_eq!(count_walks(&k4, &[1, 2], &[4, 3], 3).unwrap(), 1);
        assert_eq!(count_walks(&k4, &[1, 2], &[4, 3], 4).unwrap(), 2);
        assert!(count_walks(&k4, &[1, 1], &[4, 3], 3).is_err());
    }

    #[test]
    fn connectivity_alpha() {
        // two disjoint edges: no walks between them
        let h = Hypergraph::new(4, 2, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(connectivity(&h, 3).unwrap().alpha, rat(0, 1));
        let k73 = gen_complete(7, 3).unwrap();
        // a (k+1)-walk is s followed by t, so (1,2,3) cannot reach (3,2,1)
        assert_eq!(count_walks(&k73, &[1, 2, 3], &[3, 2, 1], 4).unwrap(), 0);
        assert_eq!(connectivity(&k73, 4).unwrap().per_pair_min, 0);
        let cert = connectivity(&k73, 7).unwrap();
        assert!(cert.alpha > rat(0, 1));
        assert_eq!(
            cert.alpha,
            Rational::from_integer(cert.per_pair_min.into()) / &cert.scaling
        );
    }

    #[test]
    fn cycle_counts_in_complete_graphs() {
        assert_eq!(enumerate_cycles(&gen_complete(5, 2).unwrap(), 5).unwrap().len(), 12);
        assert_eq!(enumerate_cycles(&gen_complete(6, 2).unwrap(), 4).unwrap().len(), 45);
        assert_eq!(enumerate_cycles(&gen_complete(7, 3).unwrap(), 4).unwrap().len(), 105);
        let path = Hypergraph::new(5, 2, vec![vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        assert!(enumerate_cycles(&path, 3).unwrap().is_empty());
        assert!(enumerate_cycles(&path, 2).is_err());
    }

    #[test]
    fn cycle_canonical_form() {
        let k6 = gen_complete(6, 3).unwrap();
        let c = TightCycle::new(&k6, &[4, 2, 6, 1, 3]).unwrap();
        assert_eq!(c.vertices(), &[1, 3, 4, 2, 6]);
        for rep in c.representations() {
            assert_eq!(TightCycle::new(&k6, &rep).unwrap(), c);
            walk_from_vertices(&k6, &TightCycle::canonical(&rep).closed_walk(3)).unwrap();
        }
        assert!(TightCycle::new(&k6, &[1, 2, 3]).is_err());
        assert!(TightCycle::new(&k6, &[1, 2, 3, 1]).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(lk_constants(2).unwrap(), (4, 1));
        assert_eq!(lk_constants(3).unwrap(), (8, 6));
        assert_eq!(lk_constants(4).unwrap(), (14, 27));
        assert!(lk_constants(1).is_err());
    }

    #[test]
    fn insertion_on_complete_3_graph() {
        let k7 = gen_complete(7, 3).unwrap();
        let census = insertion_walks(&k7, &[1, 2, 3], &[4, 5, 6], 1_000_000).unwrap();
        assert!(!census.partial);
        let total = count_walks(&k7, &[1, 2, 3], &[4, 5, 6], 8).unwrap();
        assert!(census.count > 0 && census.count <= total);
        let list = insertion_walk_list(&k7, &[1, 2, 3], &[4, 5, 6]).unwrap();
        assert_eq!(list.len() as u128, census.count);
        for vs in &list {
            assert_eq!(walk_from_vertices(&k7, vs).unwrap().len(), 8);
        }
        assert!(insertion_walks(&gen_complete(5, 2).unwrap(), &[1, 2], &[3, 4], 10).is_err());
    }

    #[test]
    fn insertion_with_empty_common_neighbourhood() {
        // {2,3} and {4,5} share no neighbour
        let h = Hypergraph::new(6, 3, vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let census = insertion_walks(&h, &[1, 2, 3], &[4, 5, 6], 1000).unwrap();
        assert_eq!(census.common, 0);
        assert_eq!(census.count, 0);
    }

    #[test]
    fn insertion_budget_flags_partial() {
        let k7 = gen_complete(7, 3).unwrap();
        let census = insertion_walks(&k7, &[1, 2, 3], &[4, 5, 6], 3).unwrap();
        assert!(census.partial);
    }
}

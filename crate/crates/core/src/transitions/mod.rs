//! Transition systems, the compatibility digraph and compatible walk/cycle
//! machinery.
//!
//! A transition system assigns to every (k−1)-set `x` of positive codegree a
//! graph `T_x` on the edges containing `x`. A step `(e_1, …, e_k) →
//! (e_2, …, e_k, u)` is allowed when the two underlying edges are adjacent in
//! `T_{e_2 … e_k}`. The full system allows every step of every walk.

pub mod regular;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{mask_of, vertices_of, EdgeId, Hypergraph, Mask, Vertex};
use crate::rational::{self, Rational};
use crate::walks::{self, OrderedEdges, TightCycle, Walk};

/// The graph `T_x`: `edges` lists the edge ids containing `x` in ascending
/// order and `adjacency[i]` is a bitmask over local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    pub edges: Vec<EdgeId>,
    pub adjacency: Vec<u64>,
}

impl TransitionGraph {
    fn local(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn adjacent(&self, e: EdgeId, f: EdgeId) -> bool {
        match (self.local(e), self.local(f)) {
            (Some(a), Some(b)) => self.adjacency[a] >> b & 1 == 1,
            _ => false,
        }
    }

    pub fn degree(&self, e: EdgeId) -> Option<usize> {
        self.local(e).map(|a| self.adjacency[a].count_ones() as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSystem {
    k: usize,
    full: bool,
    regularity: Option<usize>,
    graphs: BTreeMap<Mask, TransitionGraph>,
    /// Edge vertex masks, indexed by edge id, for adjacency lookups.
    edge_masks: Vec<Mask>,
}

impl TransitionSystem {
    /// The maximal system: every step is allowed, including stepping back onto
    /// the same edge.
    pub fn full(h: &Hypergraph) -> Self {
        let degrees: Vec<usize> = h
            .lower_sets()
            .map(|x| h.codegree_mask(x))
            .filter(|&d| d > 0)
            .collect();
        let regularity = match degrees.first() {
            Some(&d) if degrees.iter().all(|&e| e == d) => Some(d),
            _ => None,
        };
        Self {
            k: h.k(),
            full: true,
            regularity,
            graphs: BTreeMap::new(),
            edge_masks: (0..h.edge_count()).map(|i| h.edge_mask(i)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// Common degree of every `T_x`. For the full system this is the number
    /// of allowed successors of each ordered edge when that is constant.
    pub fn regularity(&self) -> Option<usize> {
        self.regularity
    }

    pub fn graph(&self, x: Mask) -> Option<&TransitionGraph> {
        self.graphs.get(&x)
    }

    pub fn graphs(&self) -> &BTreeMap<Mask, TransitionGraph> {
        &self.graphs
    }

    /// Whether stepping from edge `e` to edge `f` (given as vertex masks
    /// sharing k−1 vertices) is allowed.
    pub fn allows(&self, e: Mask, f: Mask) -> bool {
        if self.full {
            return true;
        }
        if e == f {
            return false;
        }
        let x = e & f;
        let Some(g) = self.graphs.get(&x) else {
            return false;
        };
        let (Some(a), Some(b)) = (self.id_of(g, e), self.id_of(g, f)) else {
            return false;
        };
        g.adjacency[a] >> b & 1 == 1
    }

    fn id_of(&self, g: &TransitionGraph, mask: Mask) -> Option<usize> {
        g.edges.iter().position(|&id| self.edge_masks[id] == mask)
    }

    /// Checks the step spanned by k+1 consecutive walk vertices.
    pub fn allows_step(&self, span: &[Vertex]) -> bool {
        let k = self.k;
        self.allows(mask_of(&span[..k]), mask_of(&span[1..=k]))
    }

    pub fn to_file(&self, h: &Hypergraph) -> TransitionFile {
        let graphs = self
            .graphs
            .iter()
            .map(|(&x, g)| {
                let key = vertices_of(x).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                let mut pairs = Vec::new();
                for (a, &ea) in g.edges.iter().enumerate() {
                    for (b, &eb) in g.edges.iter().enumerate().skip(a + 1) {
                        if g.adjacency[a] >> b & 1 == 1 {
                            pairs.push([h.edge(ea).to_vec(), h.edge(eb).to_vec()]);
                        }
                    }
                }
                (key, pairs)
            })
            .collect();
        TransitionFile { k: self.k, full: self.full, regularity: self.regularity, graphs }
    }

    pub fn to_json(&self, h: &Hypergraph) -> String {
        serde_json::to_string(&self.to_file(h)).expect("transition system serializes")
    }

    pub fn from_json(h: &Hypergraph, text: &str) -> Result<Self> {
        let file: TransitionFile = serde_json::from_str(text)
            .map_err(|e| Error::input(format!("transition system JSON: {e}")))?;
        file.system(h)
    }
}

/// On-disk transition system: for each sorted (k−1)-set (`"1,2"`), the list of
/// adjacent edge pairs of `T_x`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TransitionFile {
    pub k: usize,
    pub full: bool,
    pub regularity: Option<usize>,
    pub graphs: BTreeMap<String, Vec<[Vec<Vertex>; 2]>>,
}

impl TransitionFile {
    pub fn system(&self, h: &Hypergraph) -> Result<TransitionSystem> {
        if self.k != h.k() {
            return Err(Error::input("transition system and hypergraph disagree on k"));
        }
        if self.full {
            return Ok(TransitionSystem::full(h));
        }
        let mut graphs: BTreeMap<Mask, TransitionGraph> = h
            .lower_sets()
            .filter_map(|x| {
                let edges = h.edges_containing(x);
                (!edges.is_empty()).then(|| (x, TransitionGraph { adjacency: vec![0; edges.len()], edges }))
            })
            .collect();
        for (key, pairs) in &self.graphs {
            let x: Vec<Vertex> = key
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::input(format!("bad set key {key:?}"))))
                .collect::<Result<_>>()?;
            let g = graphs
                .get_mut(&mask_of(&x))
                .ok_or_else(|| Error::input(format!("{key:?} is not a (k−1)-set of positive codegree")))?;
            for [e, f] in pairs {
                let (ide, idf) = match (h.edge_id(e), h.edge_id(f)) {
                    (Some(a), Some(b)) if a != b => (a, b),
                    _ => return Err(Error::input(format!("bad transition {e:?} - {f:?} at {key:?}"))),
                };
                let (a, b) = match (g.local(ide), g.local(idf)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::input(format!("{e:?} - {f:?} do not contain {key:?}"))),
                };
                g.adjacency[a] |= 1 << b;
                g.adjacency[b] |= 1 << a;
            }
        }
        let regularity = self.regularity.filter(|&r| {
            graphs.values().all(|g| g.adjacency.iter().all(|a| a.count_ones() as usize == r))
        });
        if regularity != self.regularity {
            return Err(Error::input("declared regularity does not match the graphs"));
        }
        Ok(TransitionSystem {
            k: h.k(),
            full: false,
            regularity,
            graphs,
            edge_masks: (0..h.edge_count()).map(|i| h.edge_mask(i)).collect(),
        })
    }
}

/// Samples each `T_x` independently and uniformly among the simple r-regular
/// graphs on the edges containing `x`.
pub fn sample_transition_system(h: &Hypergraph, r: usize, seed: u64) -> Result<TransitionSystem> {
    if !r.is_multiple_of(2) {
        return Err(Error::input(format!("r = {r} must be even")));
    }
    let delta = h.min_codegree();
    if r > 0 && r + 1 > delta {
        return Err(Error::input(format!("r = {r} exceeds δ(H) − 1 = {}", delta as i64 - 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = BTreeMap::new();
    for x in h.lower_sets() {
        let edges = h.edges_containing(x);
        if edges.is_empty() {
            continue;
        }
        let adjacency = regular::sample_regular(edges.len(), r, &mut rng)?;
        graphs.insert(x, TransitionGraph { edges, adjacency });
    }
    Ok(TransitionSystem {
        k: h.k(),
        full: false,
        regularity: Some(r),
        graphs,
        edge_masks: (0..h.edge_count()).map(|i| h.edge_mask(i)).collect(),
    })
}

pub fn is_compatible_walk(w: &Walk, t: &TransitionSystem) -> bool {
    w.vertices().windows(w.k() + 1).all(|span| t.allows_step(span))
}

/// All ℓ cyclic transitions of the cycle are allowed. The condition is
/// invariant under rotation and reversal, so one traversal suffices.
pub fn is_compatible_cycle(c: &TightCycle, t: &TransitionSystem) -> bool {
    let k = t.k();
    let vs = c.vertices();
    let l = vs.len();
    (0..l).all(|i| {
        let span: Vec<Vertex> = (0..=k).map(|j| vs[(i + j) % l]).collect();
        t.allows_step(&span)
    })
}

/// The ℓ-cycles of `h` compatible with `t`, sorted.
pub fn enumerate_compatible_cycles(h: &Hypergraph, t: &TransitionSystem, ell: usize) -> Result<Vec<TightCycle>> {
    walks::enumerate_cycles_with(h, ell, &|span| t.allows_step(span))
}

/// Digraph on ordered edges whose arcs are the allowed one-step transitions.
#[derive(Clone, Debug)]
pub struct CompatibilityDigraph {
    n: u32,
    ordered: OrderedEdges,
    successors: Vec<Vec<usize>>,
    regularity: Option<usize>,
}

pub fn build_compatibility_digraph(h: &Hypergraph, t: &TransitionSystem) -> CompatibilityDigraph {
    let ordered = OrderedEdges::new(h);
    let all = ordered.successors(h);
    let successors: Vec<Vec<usize>> = all
        .into_par_iter()
        .enumerate()
        .map(|(i, next)| {
            let e = h.edge_mask(ordered.edge_id(i));
            next.into_iter()
                .filter(|&j| t.allows(e, h.edge_mask(ordered.edge_id(j))))
                .collect()
        })
        .collect();
    let regularity = match successors.first() {
        Some(s) if successors.iter().all(|o| o.len() == s.len()) => Some(s.len()),
        None => Some(0),
        _ => None,
    };
    CompatibilityDigraph { n: h.n(), ordered, successors, regularity }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatConnectivity {
    pub ell: usize,
    pub min_count: u128,
    pub max_count: u128,
    /// `min_count · e⃗(H) / r^{ℓ−1}`.
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    /// `max |count · e⃗(H) / r^{ℓ−1} − 1|`.
    #[serde(with = "rational::serde_str")]
    pub zeta: Rational,
}

impl CompatibilityDigraph {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ordered_edges(&self) -> &OrderedEdges {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn successors(&self) -> &[Vec<usize>] {
        &self.successors
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.successors[i].len()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for s in &self.successors {
            for &j in s {
                deg[j] += 1;
            }
        }
        deg
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.successors[i].binary_search(&j).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Common out-degree, if every ordered edge has the same one.
    pub fn regularity(&self) -> Option<usize> {
        self.regularity
    }

    fn require_regular(&self) -> Result<usize> {
        match self.regularity {
            Some(r) if r >= 1 => Ok(r),
            Some(_) => Err(Error::input("the compatibility digraph has no arcs (r = 0)")),
            None => Err(Error::input("the compatibility digraph is not out-regular")),
        }
    }

    pub fn count_compatible_walks(&self, s: &[Vertex], t: &[Vertex], ell: usize) -> Result<u128> {
        let si = self.ordered.require(s)?;
        let ti = self.ordered.require(t)?;
        Ok(walks::counts_from(&self.successors, si, ell)?[ti])
    }

    /// Counts of compatible ℓ-walks from ordered edge `s` to every ordered edge.
    pub fn counts_from(&self, s: usize, ell: usize) -> Result<Vec<u128>> {
        walks::counts_from(&self.successors, s, ell)
    }

    pub fn compatible_connectivity(&self, ell: usize) -> Result<CompatConnectivity> {
        if ell == 0 {
            return Err(Error::input("walk length must be at least 1"));
        }
        let r = self.require_regular()?;
        let per_start: Vec<(u128, u128)> = (0..self.len())
            .into_par_iter()
            .map(|s| {
                let c = self.counts_from(s, ell)?;
                Ok((*c.iter().min().unwrap(), *c.iter().max().unwrap()))
            })
            .collect::<Result<_>>()?;
        let min = per_start.iter().map(|p| p.0).min().unwrap_or(0);
        let max = per_start.iter().map(|p| p.1).max().unwrap_or(0);
        let scale = Rational::new(
            BigInt::from(self.len()),
            num_traits::pow(BigInt::from(r), ell - 1),
        );
        let norm = |c: u128| Rational::from_integer(c.into()) * &scale;
        let one = rational::one();
        let zeta = rational::abs(&(norm(min) - &one)).max(rational::abs(&(norm(max) - &one)));
        Ok(CompatConnectivity { ell, min_count: min, max_count: max, alpha: norm(min), zeta })
    }

    /// `Σ_{e⃗} #{self-avoiding compatible closed (ℓ+1)-walks e⃗ → e⃗}`, which
    /// equals `2ℓ · c_{T,ℓ}`.
    pub fn closed_walk_census(&self, ell: usize) -> Result<u128> {
        let k = self.ordered.k();
        if ell < k + 1 {
            return Err(Error::input(format!("cycle length {ell} must be at least k + 1")));
        }
        let total: u128 = (0..self.len())
            .into_par_iter()
            .map(|s| {
                let start = self.ordered.tuple(s).to_vec();
                let mut seq = start.clone();
                self.closed_dfs(ell, s, &mut seq, mask_of(&start))
            })
            .sum();
        Ok(total)
    }

    fn closed_dfs(&self, ell: usize, cur: usize, seq: &mut Vec<Vertex>, used: Mask) -> u128 {
        let k = self.ordered.k();
        let pos = seq.len();
        if pos == ell + k {
            return 1;
        }
        let mut total = 0;
        for &next in &self.successors[cur] {
            let v = self.ordered.tuple(next)[k - 1];
            let ok = if pos < ell { used & crate::hypergraph::bit(v) == 0 } else { v == seq[pos - ell] };
            if ok {
                seq.push(v);
                total += self.closed_dfs(ell, next, seq, used | crate::hypergraph::bit(v));
                seq.pop();
            }
        }
        total
    }

    /// Plain-text arc list: a header line, then one `tail -> head` line per
    /// arc with ordered edges written as space-separated vertices.
    pub fn to_arc_list(&self) -> String {
        let mut out = format!("# ordered_edges {} arcs {}\n", self.len(), self.arc_count());
        let fmt = |t: &[Vertex]| t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        for (i, s) in self.successors.iter().enumerate() {
            for &j in s {
                let _ = writeln!(out, "{} -> {}", fmt(self.ordered.tuple(i)), fmt(self.ordered.tuple(j)));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub seed: Option<u64>,
    pub r: usize,
    pub base_ell: usize,
    pub accepted: bool,
    pub lengths: Vec<CompatConnectivity>,
}

impl CertificationReport {
    pub fn at(&self, ell: usize) -> Option<&CompatConnectivity> {
        self.lengths.iter().find(|c| c.ell == ell)
    }
}

/// Computes (α_compat, ζ) at the base length and every extra length. The
/// system is accepted when α_compat > 0 at the base length.
pub fn certify_system(
    h: &Hypergraph,
    t: &TransitionSystem,
    base_ell: usize,
    extra: &[usize],
) -> Result<CertificationReport> {
    let dg = build_compatibility_digraph(h, t);
    certify_digraph(&dg, base_ell, extra)
}

pub fn certify_digraph(dg: &CompatibilityDigraph, base_ell: usize, extra: &[usize]) -> Result<CertificationReport> {
    let r = dg.regularity().unwrap_or(0);
    let mut ells = vec![base_ell];
    ells.extend(extra.iter().copied().filter(|&l| l != base_ell));
    if r == 0 || dg.regularity().is_none() {
        return Ok(CertificationReport { seed: None, r, base_ell, accepted: false, lengths: Vec::new() });
    }
    let lengths = ells
        .iter()
        .map(|&l| dg.compatible_connectivity(l))
        .collect::<Result<Vec<_>>>()?;
    let accepted = lengths[0].min_count > 0;
    Ok(CertificationReport { seed: None, r, base_ell, accepted, lengths })
}

/// The smallest ℓ₀ ≥ k+1 with `r^{ℓ₀−1} ≥ 8 · e⃗(H)`, a length at which a
/// random r-regular system typically connects every pair.
pub fn default_base_length(h: &Hypergraph, r: usize) -> usize {
    let target = 8u128 * h.ordered_edge_count() as u128;
    let mut ell = h.k() + 1;
    if r < 2 {
        return ell;
    }
    while (r as u128).saturating_pow(ell as u32 - 1) < target {
        ell += 1;
    }
    ell
}

pub const CERTIFY_ATTEMPTS: usize = 32;

/// Samples systems with seeds `seed, seed + 1, …` until one is accepted.
pub fn certify_and_resample(
    h: &Hypergraph,
    r: usize,
    base_ell: usize,
    seed: u64,
    attempts: usize,
) -> Result<(TransitionSystem, CertificationReport)> {
    let mut diagnostics = Vec::new();
    for i in 0..attempts as u64 {
        let s = seed.wrapping_add(i);
        let t = sample_transition_system(h, r, s)?;
        let mut report = certify_system(h, &t, base_ell, &[])?;
        report.seed = Some(s);
        if report.accepted {
            return Ok((t, report));
        }
        let min = report.lengths.first().map_or(0, |c| c.min_count);
        diagnostics.push(format!("seed {s}: min count {min} at ℓ = {base_ell}"));
        if r == 0 {
            break;
        }
    }
    Err(Error::Certification { attempts: diagnostics.len(), detail: diagnostics.join("; ") })
}

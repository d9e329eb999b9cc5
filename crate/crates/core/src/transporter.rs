//! Transporters: closed walks through every rotation of a source and a target
//! ordered edge whose spliced sending and receiving cycles move weight from
//! the source edge to the target edge.
//!
//! An order-`L` transporter is stored as its cyclic vertex array `x` of length
//! `k(L+1)`; the ordered edge `e_j` of the closed walk is the window
//! `x_j … x_{j+k−1}` (indices mod `k(L+1)`). With `M = L + 1` and
//! `h = ⌊M/2⌋`, block `i` occupies positions `iM … iM+M−1`:
//!
//! - slots `0..k` hold `s⟨i⟩`, slots `h..h+k` hold `t⟨i⟩`;
//! - the remaining slots are free and carry vertices outside `s ∪ t`;
//! - sending cycle `i` is the vertex cycle `x_{(i−1)M+h+1} … x_{iM+h−1}`;
//! - receiving cycle `i` is the vertex cycle `x_{iM+1} … x_{iM+M−1}`.
//!
//! Both cycles have `L` vertices and their cyclic windows are exactly walk
//! windows, which gives the membership pattern: `s` lies in all `k` sending
//! cycles, `t` in all `k` receiving cycles, every other walk edge in one of
//! each.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposer::WeightFunction;
use crate::error::{Error, Result};
use crate::hypergraph::{bit, mask_of, vertices_of, Hypergraph, Mask, Vertex};
use crate::rational::{self, Rational};
use crate::transitions::{is_compatible_cycle, TransitionSystem};
use crate::walks::{walk_from_vertices, TightCycle};

pub const NODE_BUDGET: u64 = 100_000;

/// `e⟨i⟩ = (e_{i+1}, …, e_{i+k})`, indices mod k.
pub fn rotate(e: &[Vertex], i: usize) -> Vec<Vertex> {
    let k = e.len();
    (0..k).map(|j| e[(i + j) % k]).collect()
}

/// Whether order-`L` transporters can exist in a k-graph: the source and
/// target windows of a block must not overlap, i.e. `⌊(L+1)/2⌋ ≥ k` and
/// `⌈(L+1)/2⌉ ≥ k`.
pub fn order_supported(k: usize, order: usize) -> bool {
    let m = order + 1;
    order >= 3 && m / 2 >= k && m - m / 2 >= k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transporter {
    pub order: usize,
    pub s: Vec<Vertex>,
    pub t: Vec<Vertex>,
    /// Cyclic vertex array of length `k(L+1)`.
    pub cyclic: Vec<Vertex>,
    pub sending: Vec<TightCycle>,
    pub receiving: Vec<TightCycle>,
}

impl Transporter {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// Vertex sequence of the closed `(k(L+1)+1)`-walk `e_0 … e_{k(L+1)}`.
    pub fn walk(&self) -> Vec<Vertex> {
        let mut w = self.cyclic.clone();
        w.extend_from_slice(&self.cyclic[..self.k()]);
        w
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TransporterFile::from(self)).expect("transporter serializes")
    }
}

/// On-disk transporter: `{s, t, walk, sending, receiving}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransporterFile {
    pub s: Vec<Vertex>,
    pub t: Vec<Vertex>,
    pub walk: Vec<Vertex>,
    pub sending: Vec<TightCycle>,
    pub receiving: Vec<TightCycle>,
}

impl From<&Transporter> for TransporterFile {
    fn from(tr: &Transporter) -> Self {
        Self {
            s: tr.s.clone(),
            t: tr.t.clone(),
            walk: tr.walk(),
            sending: tr.sending.clone(),
            receiving: tr.receiving.clone(),
        }
    }
}

fn violated(property: &'static str, detail: String) -> Error {
    Error::InvalidTransporter { property, detail }
}

fn slice_cyclic(x: &[Vertex], from: usize, len: usize) -> Vec<Vertex> {
    let n = x.len();
    (0..len).map(|j| x[(from + j) % n]).collect()
}

/// Checks properties (i)–(iii) and the membership pattern of the closed walk
/// with vertex sequence `walk` (length `k(L+1) + k`), and extracts the
/// sending and receiving cycles.
pub fn validate_transporter(
    h: &Hypergraph,
    walk: &[Vertex],
    s: &[Vertex],
    t: &[Vertex],
    order: usize,
) -> Result<Transporter> {
    let k = h.k();
    if s.len() != k || t.len() != k || !h.contains(s) || !h.contains(t) {
        return Err(Error::input("s and t must be ordered edges"));
    }
    if mask_of(s) & mask_of(t) != 0 {
        return Err(Error::input(format!("s = {s:?} and t = {t:?} intersect")));
    }
    if order < 3 {
        return Err(Error::input(format!("transporter order {order} must be at least 3")));
    }
    let m = order + 1;
    let half = m / 2;
    let len = k * m;
    if walk.len() != len + k {
        return Err(Error::input(format!(
            "a closed {}-walk has {} vertices, got {}",
            len + 1,
            len + k,
            walk.len()
        )));
    }
    if walk[..k] != walk[len..] {
        return Err(Error::input("the walk is not closed"));
    }
    walk_from_vertices(h, walk)?;
    let x = &walk[..len];

    for i in 0..k {
        let at_s = slice_cyclic(x, i * m, k);
        if at_s != rotate(s, i) {
            return Err(violated("i", format!("e_{} = {at_s:?} is not s⟨{i}⟩", i * m)));
        }
        let at_t = slice_cyclic(x, i * m + half, k);
        if at_t != rotate(t, i) {
            return Err(violated("i", format!("e_{} = {at_t:?} is not t⟨{i}⟩", i * m + half)));
        }
    }
    let st = mask_of(s) | mask_of(t);
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let block = &x[i * m..(i + 1) * m];
        if mask_of(block).count_ones() as usize != m {
            return Err(violated("ii", format!("segment {i} ({block:?}) repeats a vertex")));
        }
        blocks.push(mask_of(block));
    }
    for i in 0..k {
        for j in i + 1..k {
            let common = blocks[i] & blocks[j] & !st;
            if common != 0 {
                return Err(violated(
                    "iii",
                    format!("segments {i} and {j} share {:?} outside s ∪ t", vertices_of(common)),
                ));
            }
        }
    }

    let mut sending = Vec::with_capacity(k);
    let mut receiving = Vec::with_capacity(k);
    for i in 0..k {
        let from = (i * m + len - m + half + 1) % len;
        sending.push(TightCycle::new(h, &slice_cyclic(x, from, order))?);
        receiving.push(TightCycle::new(h, &slice_cyclic(x, i * m + 1, order))?);
    }

    let census = |cycles: &[TightCycle]| -> HashMap<Mask, usize> {
        let mut c = HashMap::new();
        for cy in cycles {
            for e in cy.edge_masks(k) {
                *c.entry(e).or_default() += 1;
            }
        }
        c
    };
    let send = census(&sending);
    let recv = census(&receiving);
    let (sm, tm) = (mask_of(s), mask_of(t));
    let walk_edges: BTreeSet<Mask> = (0..len).map(|j| mask_of(&slice_cyclic(x, j, k))).collect();
    for e in send.keys().chain(recv.keys()) {
        if !walk_edges.contains(e) {
            return Err(violated("census", format!("cycle edge {:?} is not a walk edge", vertices_of(*e))));
        }
    }
    for &e in &walk_edges {
        let expected = if e == sm {
            (k, 0)
        } else if e == tm {
            (0, k)
        } else {
            (1, 1)
        };
        let got = (send.get(&e).copied().unwrap_or(0), recv.get(&e).copied().unwrap_or(0));
        if got != expected {
            return Err(violated(
                "census",
                format!("edge {:?} lies in {}/{} sending/receiving cycles, expected {}/{}",
                    vertices_of(e), got.0, got.1, expected.0, expected.1),
            ));
        }
    }

    Ok(Transporter { order, s: s.to_vec(), t: t.to_vec(), cyclic: x.to_vec(), sending, receiving })
}

/// Constraint checked once all its positions are assigned.
#[derive(Clone, Debug)]
enum Check {
    /// Walk window starting at a position.
    Edge(Vec<usize>),
    /// Transition inside a sending cycle, spanning k+1 positions.
    Step(Vec<usize>),
}

struct Layout {
    k: usize,
    len: usize,
    /// Fixed vertex or 0 for a free slot.
    fixed: Vec<Vertex>,
    /// Free positions in assignment order.
    order: Vec<usize>,
    /// Checks that become decidable when `order[i]` is assigned.
    triggered: Vec<Vec<Check>>,
    /// Checks on fixed positions only.
    upfront: Vec<Check>,
}

impl Layout {
    fn new(k: usize, order_l: usize, s: &[Vertex], t: &[Vertex]) -> Self {
        let m = order_l + 1;
        let half = m / 2;
        let len = k * m;
        let mut fixed = vec![0; len];
        for i in 0..k {
            for j in 0..k {
                fixed[i * m + j] = s[(i + j) % k];
                fixed[i * m + half + j] = t[(i + j) % k];
            }
        }
        // sending cycle i draws on the tail of block i−1 and the head of block i
        let mut order = Vec::new();
        for i in 0..k {
            let prev = (i + k - 1) % k;
            order.extend((half + k..m).map(|j| prev * m + j));
            order.extend((k..half).map(|j| i * m + j));
        }
        let mut rank = vec![usize::MAX; len];
        for (r, &p) in order.iter().enumerate() {
            rank[p] = r;
        }
        let mut checks = Vec::new();
        for p in 0..len {
            checks.push(Check::Edge((0..k).map(|j| (p + j) % len).collect()));
        }
        for i in 0..k {
            let from = (i * m + len - m + half + 1) % len;
            let cyc: Vec<usize> = (0..order_l).map(|j| (from + j) % len).collect();
            for a in 0..order_l {
                checks.push(Check::Step((0..=k).map(|j| cyc[(a + j) % order_l]).collect()));
            }
        }
        let mut triggered = vec![Vec::new(); order.len()];
        let mut upfront = Vec::new();
        for c in checks {
            let positions = match &c {
                Check::Edge(p) | Check::Step(p) => p,
            };
            let last = positions.iter().filter(|&&p| rank[p] != usize::MAX).map(|&p| rank[p]).max();
            match last {
                Some(r) => triggered[r].push(c),
                None => upfront.push(c),
            }
        }
        Self { k, len, fixed, order, triggered, upfront }
    }
}

struct Search<'a> {
    h: &'a Hypergraph,
    sys: &'a TransitionSystem,
    layout: Layout,
    s: Vec<Vertex>,
    t: Vec<Vertex>,
    order_l: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    seen: BTreeSet<Vec<Vertex>>,
}

impl Search<'_> {
    fn passes(&self, x: &[Vertex], c: &Check) -> bool {
        match c {
            Check::Edge(p) => {
                let vs: Vec<Vertex> = p.iter().map(|&i| x[i]).collect();
                self.h.contains(&vs)
            }
            Check::Step(p) => {
                let vs: Vec<Vertex> = p.iter().map(|&i| x[i]).collect();
                self.sys.allows_step(&vs)
            }
        }
    }

    fn dfs(&mut self, x: &mut Vec<Vertex>, depth: usize, used: Mask, rng: &mut ChaCha8Rng) -> Option<Transporter> {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return None;
        }
        self.nodes += 1;
        if depth == self.layout.order.len() {
            if self.seen.contains(x) {
                return None;
            }
            let mut walk = x.clone();
            walk.extend_from_slice(&x[..self.layout.k]);
            let tr = validate_transporter(self.h, &walk, &self.s, &self.t, self.order_l).ok()?;
            return tr.sending.iter().all(|c| is_compatible_cycle(c, self.sys)).then_some(tr);
        }
        let pos = self.layout.order[depth];
        let k = self.layout.k;
        let len = self.layout.len;
        // the window ending at pos is assigned except for pos itself
        let prev: Vec<Vertex> = (1..k).map(|j| x[(pos + len - k + j) % len]).collect();
        let mut candidates: Vec<Vertex> = if prev.iter().all(|&v| v != 0) {
            vertices_of(self.h.neighborhood_mask(mask_of(&prev)) & !used)
        } else {
            (1..=self.h.n()).filter(|&v| used & bit(v) == 0).collect()
        };
        candidates.shuffle(rng);
        for v in candidates {
            x[pos] = v;
            let checks = std::mem::take(&mut self.layout.triggered[depth]);
            let ok = checks.iter().all(|c| self.passes(x, c));
            self.layout.triggered[depth] = checks;
            if ok {
                if let Some(tr) = self.dfs(x, depth + 1, used | bit(v), rng) {
                    return Some(tr);
                }
                if self.exhausted {
                    break;
                }
            }
        }
        x[pos] = 0;
        None
    }
}

/// Randomized search for up to `m_max` distinct order-`L` transporters from
/// `s` to `t` whose sending cycles are compatible with `sys`. Each attempt
/// is a depth-first search over the free slots with a fresh random candidate
/// order and a budget of [`NODE_BUDGET`] nodes. Deterministic given `seed`.
pub fn find_transporters(
    h: &Hypergraph,
    sys: &TransitionSystem,
    s: &[Vertex],
    t: &[Vertex],
    order: usize,
    m_max: usize,
    seed: u64,
) -> Result<Vec<Transporter>> {
    let k = h.k();
    if s.len() != k || t.len() != k || !h.contains(s) || !h.contains(t) {
        return Err(Error::input("s and t must be ordered edges"));
    }
    if mask_of(s) & mask_of(t) != 0 {
        return Err(Error::input(format!("s = {s:?} and t = {t:?} intersect")));
    }
    if order < 3 {
        return Err(Error::input(format!("transporter order {order} must be at least 3")));
    }
    if !order_supported(k, order) || m_max == 0 {
        return Ok(Vec::new());
    }
    let layout = Layout::new(k, order, s, t);
    let st = mask_of(s) | mask_of(t);
    let mut found: Vec<Transporter> = Vec::new();
    let attempts = 4 * m_max + 4;
    let mut search = Search {
        h,
        sys,
        layout,
        s: s.to_vec(),
        t: t.to_vec(),
        order_l: order,
        nodes: 0,
        budget: NODE_BUDGET,
        exhausted: false,
        seen: BTreeSet::new(),
    };
    if !search.layout.upfront.iter().all(|c| search.passes(&search.layout.fixed, c)) {
        return Ok(Vec::new());
    }
    for attempt in 0..attempts as u64 {
        if found.len() >= m_max {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut x = search.layout.fixed.clone();
        search.nodes = 0;
        search.exhausted = false;
        match search.dfs(&mut x, 0, st, &mut rng) {
            Some(tr) => {
                search.seen.insert(tr.cyclic.clone());
                found.push(tr);
            }
            // the whole space was searched: nothing further exists
            None if !search.exhausted => break,
            None => {}
        }
    }
    Ok(found)
}

/// Lowers the weight of every sending cycle by `w/k` and raises every
/// receiving cycle by `w/k`, in place.
pub fn apply_transporter_mut(omega: &mut WeightFunction, tr: &Transporter, w: &Rational) {
    if w.is_zero() {
        return;
    }
    let share = w / rational::int(tr.k() as i64);
    for c in &tr.sending {
        omega.add(c, &-share.clone());
    }
    for c in &tr.receiving {
        omega.add(c, &share);
    }
}

pub fn apply_transporter(omega: &WeightFunction, tr: &Transporter, w: &Rational) -> WeightFunction {
    let mut out = omega.clone();
    apply_transporter_mut(&mut out, tr, w);
    out
}

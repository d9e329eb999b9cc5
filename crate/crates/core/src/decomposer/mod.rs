//! The adjustment pipeline: uniform weights on compatible cycles, an exact
//! balancing flow on the disjointness digraph, and transporters that shift
//! the flow's weight between edges until every edge sum is exactly one.

mod example;
pub mod lp;

pub use example::{example_structure_check, ExampleReport};
pub use lp::{lp_oracle, OracleOutcome};

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::rational::{self, Rational};
use crate::transitions::{
    certify_and_resample, certify_system, default_base_length, enumerate_compatible_cycles, TransitionSystem,
    CERTIFY_ATTEMPTS,
};
use crate::transport::{balance_flow, verify_balance, WeightedDigraph};
use crate::transporter::{apply_transporter_mut, find_transporters, order_supported, Transporter};
use crate::walks::{enumerate_cycles, TightCycle};

/// Sparse cycle weights; absent cycles weigh zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightFunction {
    ell: usize,
    weights: BTreeMap<TightCycle, Rational>,
}

#[derive(Serialize, Deserialize)]
struct CycleWeight {
    vertices: Vec<Vertex>,
    #[serde(with = "rational::serde_str")]
    weight: Rational,
}

impl WeightFunction {
    pub fn new(ell: usize) -> Self {
        Self { ell, weights: BTreeMap::new() }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, c: &TightCycle) -> Rational {
        self.weights.get(c).cloned().unwrap_or_else(rational::zero)
    }

    pub fn set(&mut self, c: TightCycle, w: Rational) {
        if w.is_zero() {
            self.weights.remove(&c);
        } else {
            self.weights.insert(c, w);
        }
    }

    pub fn add(&mut self, c: &TightCycle, delta: &Rational) {
        let w = self.get(c) + delta;
        self.set(c.clone(), w);
    }

    /// Number of cycles with nonzero weight.
    pub fn support(&self) -> usize {
        self.weights.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TightCycle, &Rational)> {
        self.weights.iter()
    }

    pub fn total(&self) -> Rational {
        self.weights.values().sum()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        let mut out = Self::new(self.ell);
        for (c, w) in &self.weights {
            out.set(c.clone(), w * factor);
        }
        out
    }

    /// Uniform average of weight functions on the same cycle length.
    pub fn average(parts: &[WeightFunction]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::input("cannot average zero weight functions"))?;
        let mut out = Self::new(first.ell);
        for p in parts {
            if p.ell != first.ell {
                return Err(Error::input("weight functions on different cycle lengths"));
            }
            for (c, w) in &p.weights {
                out.add(c, w);
            }
        }
        Ok(out.scaled(&Rational::new(1.into(), parts.len().into())))
    }

    /// `Σ_{C ∋ e} ω(C)` for every edge id, recomputed from scratch.
    pub fn edge_sums(&self, h: &Hypergraph) -> Result<Vec<Rational>> {
        let mut sums = vec![rational::zero(); h.edge_count()];
        for (c, w) in &self.weights {
            if c.len() != self.ell {
                return Err(Error::input(format!("cycle {:?} has length {}, expected {}", c.vertices(), c.len(), self.ell)));
            }
            for m in c.edge_masks(h.k()) {
                let id = h.edge_id_of_mask(m).ok_or_else(|| {
                    Error::input(format!("cycle {:?} uses a non-edge", c.vertices()))
                })?;
                sums[id] += w;
            }
        }
        Ok(sums)
    }

    /// `{"ell": ℓ, "cycles": [{"vertices": [...], "weight": "p/q"}]}`
    pub fn to_json_value(&self) -> serde_json::Value {
        let cycles: Vec<CycleWeight> = self
            .weights
            .iter()
            .map(|(c, w)| CycleWeight { vertices: c.vertices().to_vec(), weight: w.clone() })
            .collect();
        serde_json::json!({ "ell": self.ell, "cycles": cycles })
    }

    pub fn from_json_value(h: &Hypergraph, value: &serde_json::Value) -> Result<Self> {
        let ell = value
            .get("ell")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::input("weights JSON needs an integer \"ell\""))? as usize;
        let cycles: Vec<CycleWeight> = serde_json::from_value(
            value.get("cycles").cloned().ok_or_else(|| Error::input("weights JSON needs \"cycles\""))?,
        )
        .map_err(|e| Error::input(format!("weights JSON: {e}")))?;
        let mut out = Self::new(ell);
        for cw in cycles {
            let c = TightCycle::new(h, &cw.vertices)?;
            if c.len() != ell {
                return Err(Error::input(format!("cycle {:?} does not have length {ell}", cw.vertices)));
            }
            out.add(&c, &cw.weight);
        }
        Ok(out)
    }
}

/// ω₀: weight `e(H)/(ℓ·c)` on each of the `c` compatible ℓ-cycles.
pub fn initial_weights(h: &Hypergraph, t: &TransitionSystem, ell: usize) -> Result<WeightFunction> {
    let cycles = enumerate_compatible_cycles(h, t, ell)?;
    if cycles.is_empty() {
        return Err(Error::Aborted(format!("no compatible {ell}-cycles")));
    }
    let w = Rational::new(h.edge_count().into(), (ell * cycles.len()).into());
    let mut omega = WeightFunction::new(ell);
    for c in cycles {
        omega.set(c, w.clone());
    }
    Ok(omega)
}

/// ξ(e) = Σ_{C ∋ e} ω(C) − 1.
pub fn edge_deviation(h: &Hypergraph, omega: &WeightFunction) -> Result<Vec<Rational>> {
    let one = rational::one();
    Ok(omega.edge_sums(h)?.into_iter().map(|s| s - &one).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemChoice {
    Full,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ell: usize,
    pub r: usize,
    pub runs: usize,
    pub m_cap: usize,
    #[serde(with = "rational::serde_str")]
    pub mu: Rational,
    pub seed: u64,
    pub system: SystemChoice,
    /// Certification length; defaults to [`default_base_length`].
    pub base_ell: Option<usize>,
}

impl PipelineConfig {
    pub fn new(ell: usize, r: usize, m_cap: usize, seed: u64) -> Self {
        Self {
            ell,
            r,
            runs: 1,
            m_cap,
            mu: rational::rat(1, 2),
            seed,
            system: SystemChoice::Sampled,
            base_ell: None,
        }
    }

    pub fn full(ell: usize, m_cap: usize, seed: u64) -> Self {
        Self { system: SystemChoice::Full, ..Self::new(ell, 0, m_cap, seed) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSum {
    pub edge: Vec<Vertex>,
    #[serde(with = "rational::serde_str")]
    pub sum: Rational,
}

/// Weights of a family of cycles compared with `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    /// Absent when the bound is infinite.
    #[serde(with = "rational::serde_opt_str")]
    pub upper: Option<Rational>,
    pub checked: usize,
    pub within: usize,
    pub holds: bool,
}

impl Envelope {
    fn check<'a>(lower: Rational, upper: Option<Rational>, weights: impl Iterator<Item = &'a Rational>) -> Self {
        let (mut checked, mut within) = (0, 0);
        for w in weights {
            checked += 1;
            if *w >= lower && upper.as_ref().is_none_or(|u| w <= u) {
                within += 1;
            }
        }
        Self { lower, upper, checked, within, holds: checked == within }
    }
}

/// Hypothesis conditions of the asymptotic statements, evaluated in floating
/// point. They are reported, never enforced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub base_ell: usize,
    pub alpha: f64,
    pub zeta: f64,
    /// `180k(ℓ₀/α)·ln(ℓ₀/α)·ln(1/μ)` against ℓ.
    pub length_lhs: f64,
    pub length_condition: bool,
    /// `ℓ(1−ζ/2)^{ℓ+1}` against `δ^{k+1}μ/(400k)` with `δ = δ(H)/n`.
    pub adjustment_lhs: f64,
    pub adjustment_rhs: f64,
    pub adjustment_condition: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub compatible_cycles: usize,
    #[serde(with = "rational::serde_opt_str")]
    pub initial_weight: Option<Rational>,
    /// `max |ξ|`.
    #[serde(with = "rational::serde_opt_str")]
    pub beta: Option<Rational>,
    pub flow_arcs: usize,
    #[serde(with = "rational::serde_opt_str")]
    pub flow_bound: Option<Rational>,
    pub flow_balanced: bool,
    pub ordered_pairs: usize,
    /// Ordered pairs without any transporter; their share went to the
    /// other orderings of the same arc.
    pub empty_pairs: usize,
    /// Arcs whose flow went through an intermediate edge.
    pub relayed_arcs: usize,
    pub transporters_applied: usize,
    pub min_transporters_per_pair: Option<usize>,
    /// `max_C |ω(C) − ω₀(C)|`.
    #[serde(with = "rational::serde_opt_str")]
    pub max_shift: Option<Rational>,
    /// `½δ^k n^k r^{kℓ}/e⃗(H)^{2k}` with `δ = δ(H)/n`.
    pub transporter_lower_bound: Option<f64>,
    pub hypotheses: Option<HypothesisFlags>,
}

/// One row of a multi-run summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: Option<u64>,
    pub zeta: Option<f64>,
    pub alpha_compat: Option<f64>,
    #[serde(with = "rational::serde_opt_str")]
    pub min_weight: Option<Rational>,
    pub exact_cover: bool,
    pub length_condition: Option<bool>,
    pub adjustment_condition: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub ell: usize,
    pub edges: usize,
    pub support: usize,
    pub edge_sums: Vec<EdgeSum>,
    pub is_exact_cover: bool,
    pub offending_edges: Vec<Vec<Vertex>>,
    pub is_nonnegative: bool,
    pub negative_cycles: usize,
    #[serde(with = "rational::serde_opt_str")]
    pub min_weight: Option<Rational>,
    #[serde(with = "rational::serde_opt_str")]
    pub max_weight: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub total_weight: Rational,
    #[serde(with = "rational::serde_str")]
    pub mu: Rational,
    pub r: Option<usize>,
    /// Compatible cycles (all ℓ-cycles without a system) against
    /// `(1 ± μ)·2e(H)/r^ℓ`.
    pub r_envelope: Option<Envelope>,
    /// All ℓ-cycles against `[(1−μ)·2e(H)/Δ^ℓ, (1+μ)·2e(H)/δ^ℓ]`.
    pub codegree_envelope: Envelope,
    pub diagnostics: Option<Diagnostics>,
    pub runs: Vec<RunSummary>,
}

impl DecompositionReport {
    /// A valid fractional decomposition: exact cover with nonnegative weights.
    pub fn is_decomposition(&self) -> bool {
        self.is_exact_cover && self.is_nonnegative
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Recomputes every edge sum and checks exactness, nonnegativity and both
/// weight envelopes.
pub fn verify(
    h: &Hypergraph,
    omega: &WeightFunction,
    ell: usize,
    mu: &Rational,
    r: Option<usize>,
    system: Option<&TransitionSystem>,
) -> Result<DecompositionReport> {
    if omega.ell() != ell {
        return Err(Error::input(format!("weights are on {}-cycles, not {ell}-cycles", omega.ell())));
    }
    let sums = omega.edge_sums(h)?;
    let one = rational::one();
    let offending_edges: Vec<Vec<Vertex>> = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != one)
        .map(|(e, _)| h.edge(e).to_vec())
        .collect();
    let negative_cycles = omega.iter().filter(|(_, w)| w.is_negative()).count();
    let all_cycles = enumerate_cycles(h, ell)?;
    let all_weights: Vec<Rational> = all_cycles.iter().map(|c| omega.get(c)).collect();
    let min_weight = all_weights.iter().min().cloned();
    let max_weight = all_weights.iter().max().cloned();

    let two_e = rational::int(2 * h.edge_count() as i64);
    let lo = &one - mu;
    let hi = &one + mu;
    let r_envelope = match r {
        Some(r) if r > 0 => {
            let base = &two_e / rational::pow(&rational::int(r as i64), ell);
            let (lower, upper) = (&lo * &base, &hi * &base);
            Some(match system {
                Some(t) => {
                    let compat = enumerate_compatible_cycles(h, t, ell)?;
                    let ws: Vec<Rational> = compat.iter().map(|c| omega.get(c)).collect();
                    Envelope::check(lower, Some(upper), ws.iter())
                }
                None => Envelope::check(lower, Some(upper), all_weights.iter()),
            })
        }
        _ => None,
    };
    let (delta, big_delta) = (h.min_codegree(), h.max_codegree());
    let lower = if big_delta == 0 {
        rational::zero()
    } else {
        &lo * &two_e / rational::pow(&rational::int(big_delta as i64), ell)
    };
    let upper = (delta > 0).then(|| &hi * &two_e / rational::pow(&rational::int(delta as i64), ell));
    let codegree_envelope = Envelope::check(lower, upper, all_weights.iter());

    Ok(DecompositionReport {
        ell,
        edges: h.edge_count(),
        support: omega.support(),
        edge_sums: sums
            .iter()
            .enumerate()
            .map(|(e, s)| EdgeSum { edge: h.edge(e).to_vec(), sum: s.clone() })
            .collect(),
        is_exact_cover: offending_edges.is_empty(),
        offending_edges,
        is_nonnegative: negative_cycles == 0,
        negative_cycles,
        min_weight,
        max_weight,
        total_weight: omega.total(),
        mu: mu.clone(),
        r,
        r_envelope,
        codegree_envelope,
        diagnostics: None,
        runs: Vec::new(),
    })
}

fn seed_for(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed ^ 0x51_7CC1_B727_220A, |acc, &p| {
        (acc ^ p).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29)
    })
}

/// Statistics of the transport and transporter stage.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdjustStats {
    pub beta: Rational,
    pub flow_arcs: usize,
    pub flow_bound: Option<Rational>,
    pub flow_balanced: bool,
    pub ordered_pairs: usize,
    pub empty_pairs: usize,
    pub relayed_arcs: usize,
    pub transporters_applied: usize,
    pub min_transporters_per_pair: Option<usize>,
}

/// Runs only the transport and transporter stage on `omega`: balances the
/// deviations `ξ` on the disjointness digraph with 2-paths and spreads each
/// arc's flow over transporters of order ℓ for all `(k!)²` ordered pairs.
/// Requires `Σ_e ξ(e) = 0`.
pub fn adjust_weights(
    h: &Hypergraph,
    t: &TransitionSystem,
    omega: &WeightFunction,
    m_cap: usize,
    seed: u64,
) -> Result<(WeightFunction, AdjustStats)> {
    let ell = omega.ell();
    let xi = edge_deviation(h, omega)?;
    let beta = xi.iter().map(rational::abs).max().unwrap_or_else(rational::zero);
    let mut stats = AdjustStats { beta: beta.clone(), flow_balanced: true, ..Default::default() };
    if beta.is_zero() {
        return Ok((omega.clone(), stats));
    }
    if !xi.iter().sum::<Rational>().is_zero() {
        return Err(Error::input("edge deviations must sum to zero"));
    }
    if m_cap == 0 {
        return Err(Error::input("m_cap must be at least 1"));
    }
    let wdg = WeightedDigraph::disjointness(h, xi)?;
    let flow = balance_flow(&wdg, 2)?;
    stats.flow_balanced = verify_balance(&wdg, &flow);
    stats.flow_bound = Some(flow.bound.clone());
    stats.flow_arcs = flow.eta.len();

    let k = h.k();
    let arcs: Vec<((usize, usize), Rational)> =
        flow.eta.iter().filter(|(_, v)| !v.is_zero()).map(|(a, v)| (*a, v.clone())).collect();
    if !arcs.is_empty() && !order_supported(k, ell) {
        return Err(Error::Aborted(format!(
            "transporters of order {ell} do not exist for k = {k}: need ⌊(ℓ+1)/2⌋ ≥ k; flow arcs {}",
            arcs.len()
        )));
    }
    let routed: Vec<ArcRoute> = arcs
        .par_iter()
        .map(|((s, tt), eta)| route_arc(h, t, *s, *tt, eta, ell, m_cap, seed))
        .collect::<Result<_>>()?;
    let mut out = omega.clone();
    for route in routed {
        for (tr, w) in &route.applications {
            apply_transporter_mut(&mut out, tr, w);
        }
        stats.ordered_pairs += route.ordered_pairs;
        stats.empty_pairs += route.empty_pairs;
        stats.relayed_arcs += usize::from(route.relayed);
        stats.transporters_applied += route.applications.len();
        if let Some(m) = route.min_per_pair {
            stats.min_transporters_per_pair = Some(stats.min_transporters_per_pair.map_or(m, |x| x.min(m)));
        }
    }
    Ok((out, stats))
}

#[derive(Default)]
struct ArcRoute {
    applications: Vec<(Transporter, Rational)>,
    ordered_pairs: usize,
    empty_pairs: usize,
    min_per_pair: Option<usize>,
    relayed: bool,
}

/// Transporters for every ordering of `(s, t)`, each weighted so that the
/// arc moves exactly `eta`. Orderings without transporters hand their share
/// to the other orderings; `None` when no ordering has one.
#[allow(clippy::too_many_arguments)]
fn direct_route(
    h: &Hypergraph,
    t: &TransitionSystem,
    s: usize,
    tt: usize,
    eta: &Rational,
    ell: usize,
    m_cap: usize,
    seed: u64,
) -> Result<Option<ArcRoute>> {
    let k = h.k();
    let perms_of = |e: &[Vertex]| -> Vec<Vec<Vertex>> { e.iter().copied().permutations(k).collect() };
    let mut found = Vec::new();
    for (i, sp) in perms_of(h.edge(s)).into_iter().enumerate() {
        for (j, tp) in perms_of(h.edge(tt)).into_iter().enumerate() {
            let key = [s as u64, tt as u64, i as u64, j as u64];
            found.push(find_transporters(h, t, &sp, &tp, ell, m_cap, seed_for(seed, &key))?);
        }
    }
    let served = found.iter().filter(|f| !f.is_empty()).count();
    if served == 0 {
        return Ok(None);
    }
    let mut route = ArcRoute { ordered_pairs: found.len(), empty_pairs: found.len() - served, ..Default::default() };
    for trs in found.into_iter().filter(|f| !f.is_empty()) {
        let w = eta / rational::int((served * trs.len()) as i64);
        route.min_per_pair = Some(route.min_per_pair.map_or(trs.len(), |m| m.min(trs.len())));
        route.applications.extend(trs.into_iter().map(|tr| (tr, w.clone())));
    }
    Ok(Some(route))
}

/// Moves `eta` from edge `s` to edge `tt`, directly when some ordering has
/// transporters and otherwise through the first edge `m` disjoint from both
/// for which `s → m` and `m → tt` both do.
#[allow(clippy::too_many_arguments)]
fn route_arc(
    h: &Hypergraph,
    t: &TransitionSystem,
    s: usize,
    tt: usize,
    eta: &Rational,
    ell: usize,
    m_cap: usize,
    seed: u64,
) -> Result<ArcRoute> {
    if let Some(route) = direct_route(h, t, s, tt, eta, ell, m_cap, seed)? {
        return Ok(route);
    }
    let outside = h.edge_mask(s) | h.edge_mask(tt);
    for m in (0..h.edge_count()).filter(|&m| h.edge_mask(m) & outside == 0) {
        let Some(first) = direct_route(h, t, s, m, eta, ell, m_cap, seed)? else { continue };
        let Some(second) = direct_route(h, t, m, tt, eta, ell, m_cap, seed)? else { continue };
        let min_per_pair = first.min_per_pair.into_iter().chain(second.min_per_pair).min();
        let mut applications = first.applications;
        applications.extend(second.applications);
        return Ok(ArcRoute {
            applications,
            ordered_pairs: first.ordered_pairs + second.ordered_pairs,
            empty_pairs: first.empty_pairs + second.empty_pairs,
            min_per_pair,
            relayed: true,
        });
    }
    Err(Error::Aborted(format!(
        "no transporter from any ordering of {:?} to any ordering of {:?}, directly or through one edge",
        h.edge(s),
        h.edge(tt)
    )))
}

fn hypothesis_flags(h: &Hypergraph, t: &TransitionSystem, ell: usize, mu: &Rational, base_ell: Option<usize>) -> Option<HypothesisFlags> {
    let r = t.regularity()?;
    if r == 0 {
        return None;
    }
    let base = base_ell.unwrap_or_else(|| default_base_length(h, r));
    let report = certify_system(h, t, base, &[]).ok()?;
    let c = report.at(base)?;
    let alpha = rational::to_f64(&c.alpha);
    let zeta = rational::to_f64(&c.zeta);
    let mu = rational::to_f64(mu);
    let k = h.k() as f64;
    let ratio = base as f64 / alpha;
    let length_lhs = if alpha > 0.0 { 180.0 * k * ratio * ratio.ln() * (1.0 / mu).ln() } else { f64::INFINITY };
    let delta = h.min_codegree() as f64 / h.n() as f64;
    let adjustment_lhs = ell as f64 * (1.0 - zeta / 2.0).powi(ell as i32 + 1);
    let adjustment_rhs = delta.powi(h.k() as i32 + 1) * mu / (400.0 * k);
    Some(HypothesisFlags {
        base_ell: base,
        alpha,
        zeta,
        length_lhs,
        length_condition: length_lhs <= ell as f64,
        adjustment_lhs,
        adjustment_rhs,
        adjustment_condition: adjustment_lhs <= adjustment_rhs,
    })
}

/// The full pipeline for one transition system.
pub fn adjust_with(h: &Hypergraph, t: &TransitionSystem, cfg: &PipelineConfig) -> Result<(WeightFunction, DecompositionReport)> {
    let ell = cfg.ell;
    let omega0 = initial_weights(h, t, ell)?;
    let (omega, stats) = adjust_weights(h, t, &omega0, cfg.m_cap, cfg.seed)?;
    let r = if t.is_full() { None } else { t.regularity().filter(|&r| r > 0) };
    let mut report = verify(h, &omega, ell, &cfg.mu, r, Some(t))?;

    let max_shift = omega
        .iter()
        .map(|(c, w)| rational::abs(&(w - omega0.get(c))))
        .chain(omega0.iter().map(|(c, w)| rational::abs(&(omega.get(c) - w))))
        .max();
    let initial = omega0.iter().next().map(|(_, w)| w.clone());
    let lower_bound = r.map(|r| {
        let k = h.k() as i32;
        let delta = h.min_codegree() as f64 / h.n() as f64;
        let n = h.n() as f64;
        let oe = h.ordered_edge_count() as f64;
        0.5 * delta.powi(k) * n.powi(k) * (r as f64).powi(k * ell as i32) / oe.powi(2 * k)
    });
    let hypotheses = hypothesis_flags(h, t, ell, &cfg.mu, cfg.base_ell);
    report.runs.push(RunSummary {
        seed: Some(cfg.seed),
        zeta: hypotheses.as_ref().map(|f| f.zeta),
        alpha_compat: hypotheses.as_ref().map(|f| f.alpha),
        min_weight: report.min_weight.clone(),
        exact_cover: report.is_exact_cover,
        length_condition: hypotheses.as_ref().map(|f| f.length_condition),
        adjustment_condition: hypotheses.as_ref().map(|f| f.adjustment_condition),
    });
    report.diagnostics = Some(Diagnostics {
        compatible_cycles: omega0.support(),
        initial_weight: initial,
        beta: Some(stats.beta),
        flow_arcs: stats.flow_arcs,
        flow_bound: stats.flow_bound,
        flow_balanced: stats.flow_balanced,
        ordered_pairs: stats.ordered_pairs,
        empty_pairs: stats.empty_pairs,
        relayed_arcs: stats.relayed_arcs,
        transporters_applied: stats.transporters_applied,
        min_transporters_per_pair: stats.min_transporters_per_pair,
        max_shift,
        transporter_lower_bound: lower_bound,
        hypotheses,
    });
    Ok((omega, report))
}

pub fn adjust(
    h: &Hypergraph,
    t: &TransitionSystem,
    ell: usize,
    m_cap: usize,
    seed: u64,
) -> Result<(WeightFunction, DecompositionReport)> {
    let r = t.regularity().unwrap_or(0);
    adjust_with(h, t, &PipelineConfig::new(ell, r, m_cap, seed))
}

pub const RUN_RETRIES: u64 = 4;

fn single_run(h: &Hypergraph, cfg: &PipelineConfig, run: u64) -> Result<(WeightFunction, DecompositionReport)> {
    let mut failures = Vec::new();
    for retry in 0..RUN_RETRIES {
        let seed = seed_for(cfg.seed, &[run, retry]);
        let attempt = match cfg.system {
            SystemChoice::Full => {
                let t = TransitionSystem::full(h);
                adjust_with(h, &t, &PipelineConfig { seed, ..cfg.clone() })
            }
            SystemChoice::Sampled => {
                let base = cfg.base_ell.unwrap_or_else(|| default_base_length(h, cfg.r));
                let (t, cert) = certify_and_resample(h, cfg.r, base, seed, CERTIFY_ATTEMPTS)?;
                let run_cfg = PipelineConfig { seed: cert.seed.unwrap_or(seed), base_ell: Some(base), ..cfg.clone() };
                adjust_with(h, &t, &run_cfg)
            }
        };
        match attempt {
            Ok(out) => return Ok(out),
            Err(e) if e.is_input_error() => return Err(e),
            Err(e) => failures.push(e.to_string()),
        }
        if cfg.system == SystemChoice::Full {
            break;
        }
    }
    Err(Error::Aborted(format!("run {run} failed {} times: {}", failures.len(), failures.join("; "))))
}

/// Averages `cfg.runs` independent pipeline runs, each on its own
/// certified transition system.
pub fn average_decompositions(h: &Hypergraph, cfg: &PipelineConfig) -> Result<(WeightFunction, DecompositionReport)> {
    if cfg.runs == 0 {
        return Err(Error::input("the number of runs must be at least 1"));
    }
    if cfg.system == SystemChoice::Sampled && (cfg.r == 0 || !cfg.r.is_multiple_of(2)) {
        return Err(Error::input(format!("r = {} must be even and positive", cfg.r)));
    }
    let results: Vec<(WeightFunction, DecompositionReport)> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| single_run(h, cfg, i))
        .collect::<Result<_>>()?;
    if results.len() == 1 {
        return Ok(results.into_iter().next().unwrap());
    }
    let parts: Vec<WeightFunction> = results.iter().map(|(w, _)| w.clone()).collect();
    let avg = WeightFunction::average(&parts)?;
    let r = (cfg.system == SystemChoice::Sampled).then_some(cfg.r);
    let mut report = verify(h, &avg, cfg.ell, &cfg.mu, r, None)?;
    report.runs = results.into_iter().flat_map(|(_, rep)| rep.runs).collect();
    Ok((avg, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::gen_complete;
    use crate::rational::rat;
    use crate::transitions::sample_transition_system;

    #[test]
    fn uniform_weights_on_k5() {
        let k5 = gen_complete(5, 2).unwrap();
        let full = TransitionSystem::full(&k5);
        let w = initial_weights(&k5, &full, 5).unwrap();
        assert_eq!(w.support(), 12);
        assert!(w.iter().all(|(_, x)| *x == rat(1, 6)));
        assert!(edge_deviation(&k5, &w).unwrap().iter().all(Zero::is_zero));
        let zero = WeightFunction::new(5);
        assert!(edge_deviation(&k5, &zero).unwrap().iter().all(|x| *x == rat(-1, 1)));
    }

    #[test]
    fn no_compatible_cycles_aborts() {
        let k5 = gen_complete(5, 2).unwrap();
        let none = sample_transition_system(&k5, 0, 0).unwrap();
        assert!(matches!(initial_weights(&k5, &none, 5), Err(Error::Aborted(_))));
    }

    #[test]
    fn normalization_on_k8() {
        let k8 = gen_complete(8, 2).unwrap();
        let t = sample_transition_system(&k8, 4, 3).unwrap();
        let w = initial_weights(&k8, &t, 6).unwrap();
        assert_eq!(w.total(), rat(28, 6));
        assert!(edge_deviation(&k8, &w).unwrap().iter().sum::<Rational>().is_zero());
    }

    #[test]
    fn k5_pipeline_is_the_uniform_decomposition() {
        let k5 = gen_complete(5, 2).unwrap();
        let full = TransitionSystem::full(&k5);
        let (w, report) = adjust(&k5, &full, 5, 3, 1).unwrap();
        assert_eq!(w, initial_weights(&k5, &full, 5).unwrap());
        assert!(report.is_decomposition());
        assert_eq!(report.diagnostics.unwrap().transporters_applied, 0);
    }

    #[test]
    fn verify_reports_envelope_failure_and_offenders() {
        let k5 = gen_complete(5, 2).unwrap();
        let full = TransitionSystem::full(&k5);
        let w = initial_weights(&k5, &full, 5).unwrap();
        let rep = verify(&k5, &w, 5, &rat(1, 2), Some(4), None).unwrap();
        assert!(rep.is_exact_cover && rep.is_nonnegative);
        assert!(!rep.r_envelope.unwrap().holds);

        let mut bumped = w.clone();
        let c = w.iter().next().unwrap().0.clone();
        bumped.add(&c, &rat(1, 10));
        let rep = verify(&k5, &bumped, 5, &rat(1, 2), None, None).unwrap();
        assert!(!rep.is_exact_cover);
        assert_eq!(rep.offending_edges.len(), 5);
    }

    #[test]
    fn transport_stage_restores_exact_cover() {
        let k12 = gen_complete(12, 2).unwrap();
        let t = sample_transition_system(&k12, 6, 5).unwrap();
        let w0 = initial_weights(&k12, &t, 5).unwrap();
        let mut it = w0.iter();
        let a = it.next().unwrap().0.clone();
        let b = it.find(|(c, _)| c.edge_masks(2).iter().all(|m| !a.edge_masks(2).contains(m))).unwrap().0.clone();
        let mut perturbed = w0.clone();
        perturbed.add(&a, &rat(1, 10));
        perturbed.add(&b, &rat(-1, 10));
        let (w, stats) = adjust_weights(&k12, &t, &perturbed, 2, 9).unwrap();
        assert!(stats.transporters_applied > 0);
        assert!(w.edge_sums(&k12).unwrap().iter().all(|s| *s == rational::one()));

        let mut unbalanced = w0.clone();
        unbalanced.add(&a, &rat(1, 10));
        assert!(adjust_weights(&k12, &t, &unbalanced, 2, 9).unwrap_err().is_input_error());
    }

    #[test]
    fn averaging_is_linear_and_idempotent() {
        let k5 = gen_complete(5, 2).unwrap();
        let cfg = PipelineConfig { runs: 3, ..PipelineConfig::full(5, 2, 4) };
        let (avg, rep) = average_decompositions(&k5, &cfg).unwrap();
        let single = initial_weights(&k5, &TransitionSystem::full(&k5), 5).unwrap();
        assert_eq!(avg, single);
        assert!(rep.is_decomposition());
        assert_eq!(rep.runs.len(), 3);
    }

    #[test]
    fn weights_json_round_trip() {
        let k5 = gen_complete(5, 2).unwrap();
        let w = initial_weights(&k5, &TransitionSystem::full(&k5), 5).unwrap();
        let v = w.to_json_value();
        assert_eq!(v["cycles"][0]["weight"], "1/6");
        assert_eq!(WeightFunction::from_json_value(&k5, &v).unwrap(), w);
    }
}

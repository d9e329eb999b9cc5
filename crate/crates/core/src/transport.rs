//! Flow balancing on a symmetric digraph.
//!
//! Every vertex `u` spreads `ξ(u)/n` to every other vertex `v`, split evenly
//! over all directed ℓ-paths from `u` to `v`. Opposite arc values are then
//! cancelled, which leaves a nonnegative flow whose divergence is exactly `ξ`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};

/// A digraph on `0..n` with symmetric arcs and zero-sum vertex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDigraph {
    out: Vec<Vec<usize>>,
    xi: Vec<Rational>,
}

impl WeightedDigraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>, xi: Vec<Rational>) -> Result<Self> {
        if xi.len() != n {
            return Err(Error::input(format!("ξ has {} entries for {n} vertices", xi.len())));
        }
        let mut out = vec![Vec::new(); n];
        for (u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(Error::input(format!("bad arc ({u}, {v})")));
            }
            out[u].push(v);
        }
        for list in &mut out {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(out, xi)
    }

    pub fn from_adjacency(out: Vec<Vec<usize>>, xi: Vec<Rational>) -> Result<Self> {
        if xi.len() != out.len() {
            return Err(Error::input("ξ and the vertex set differ in size"));
        }
        for (u, list) in out.iter().enumerate() {
            for &v in list {
                if out[v].binary_search(&u).is_err() {
                    return Err(Error::input(format!("arc ({u}, {v}) has no reverse")));
                }
            }
        }
        if !xi.iter().sum::<Rational>().is_zero() {
            return Err(Error::input("ξ does not sum to zero"));
        }
        Ok(Self { out, xi })
    }

    /// The disjointness digraph of `h` (vertices are edge ids, arcs join
    /// disjoint edges) carrying the weights `xi`.
    pub fn disjointness(h: &Hypergraph, xi: Vec<Rational>) -> Result<Self> {
        Self::from_adjacency(disjointness_adjacency(h), xi)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn xi(&self) -> &[Rational] {
        &self.xi
    }

    pub fn out(&self) -> &[Vec<usize>] {
        &self.out
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn with_xi(&self, xi: Vec<Rational>) -> Result<Self> {
        Self::from_adjacency(self.out.clone(), xi)
    }
}

pub fn disjointness_adjacency(h: &Hypergraph) -> Vec<Vec<usize>> {
    let m = h.edge_count();
    (0..m)
        .map(|i| (0..m).filter(|&j| h.edge_mask(i) & h.edge_mask(j) == 0).collect())
        .collect()
}

/// Visits every directed path with `ell` arcs and distinct vertices starting
/// at `u`, passing the vertex sequence.
fn for_each_path(out: &[Vec<usize>], u: usize, ell: usize, f: &mut impl FnMut(&[usize])) {
    fn go(out: &[Vec<usize>], ell: usize, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if path.len() == ell + 1 {
            f(path);
            return;
        }
        let last = *path.last().unwrap();
        for &w in &out[last] {
            if !path.contains(&w) {
                path.push(w);
                go(out, ell, path, f);
                path.pop();
            }
        }
    }
    go(out, ell, &mut vec![u], f);
}

/// `|𝒫_{u,v}|` for all `v`, paths starting at `u`.
fn family_sizes_from(out: &[Vec<usize>], u: usize, ell: usize) -> Vec<u64> {
    let mut sizes = vec![0u64; out.len()];
    for_each_path(out, u, ell, &mut |p| sizes[*p.last().unwrap()] += 1);
    sizes
}

/// Sizes of all path families, indexed `[u][v]`; the diagonal is unused.
pub fn path_families(wdg: &WeightedDigraph, ell: usize) -> Result<Vec<Vec<u64>>> {
    if ell == 0 {
        return Err(Error::input("path length must be at least 1"));
    }
    Ok((0..wdg.n())
        .into_par_iter()
        .map(|u| family_sizes_from(&wdg.out, u, ell))
        .collect())
}

/// The paths of `𝒫_{u,v}` as vertex sequences.
pub fn paths_between(wdg: &WeightedDigraph, u: usize, v: usize, ell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_path(&wdg.out, u, ell, &mut |p| {
        if *p.last().unwrap() == v {
            out.push(p.to_vec());
        }
    });
    out
}

/// `min_{u≠v} |𝒫_{u,v}| / n^{ℓ−1}`.
pub fn alpha_paths(wdg: &WeightedDigraph, ell: usize) -> Result<Rational> {
    let sizes = path_families(wdg, ell)?;
    Ok(alpha_from_sizes(&sizes, ell))
}

fn alpha_from_sizes(sizes: &[Vec<u64>], ell: usize) -> Rational {
    let n = sizes.len();
    let min = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .map(|(u, v)| sizes[u][v])
        .min();
    match min {
        Some(m) => Rational::new(m.into(), num_traits::pow(BigInt::from(n), ell - 1)),
        None => rational::zero(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalancedFlow {
    /// Nonzero arc values only.
    pub eta: BTreeMap<(usize, usize), Rational>,
    pub ell: usize,
    pub alpha: Rational,
    pub beta: Rational,
    /// `2βℓ / (αn)`.
    pub bound: Rational,
}

impl BalancedFlow {
    pub fn value(&self, u: usize, v: usize) -> Rational {
        self.eta.get(&(u, v)).cloned().unwrap_or_else(rational::zero)
    }

    pub fn max_value(&self) -> Rational {
        self.eta.values().max().cloned().unwrap_or_else(rational::zero)
    }

    pub fn arcs(&self) -> Vec<FlowArc> {
        self.eta
            .iter()
            .map(|(&(from, to), value)| FlowArc { from, to, value: value.clone() })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.arcs()).expect("flow serializes")
    }
}

pub fn balance_flow(wdg: &WeightedDigraph, ell: usize) -> Result<BalancedFlow> {
    let n = wdg.n();
    let sizes = path_families(wdg, ell)?;
    for u in 0..n {
        for v in 0..n {
            if u != v && sizes[u][v] == 0 {
                return Err(Error::FlowRefused(format!("no directed {ell}-path from {u} to {v}")));
            }
        }
    }
    let alpha = alpha_from_sizes(&sizes, ell);
    let beta = wdg.xi.iter().map(|x| x.abs()).max().unwrap_or_else(rational::zero);
    let nr = rational::int(n as i64);
    let signed: HashMap<(usize, usize), Rational> = (0..n)
        .into_par_iter()
        .filter(|&u| !wdg.xi[u].is_zero())
        .map(|u| {
            let share: Vec<Rational> = sizes[u]
                .iter()
                .map(|&s| if s == 0 { rational::zero() } else { &wdg.xi[u] / (&nr * rational::int(s as i64)) })
                .collect();
            let mut local: HashMap<(usize, usize), Rational> = HashMap::new();
            for_each_path(&wdg.out, u, ell, &mut |p| {
                let c = &share[*p.last().unwrap()];
                for a in p.windows(2) {
                    *local.entry((a[0], a[1])).or_insert_with(rational::zero) += c;
                }
            });
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert_with(rational::zero) += v;
            }
            a
        });
    let mut eta = BTreeMap::new();
    for (&(x, y), val) in &signed {
        let back = signed.get(&(y, x)).cloned().unwrap_or_else(rational::zero);
        let net = val - back;
        if net.is_positive() {
            eta.insert((x, y), net);
        }
    }
    let bound = if alpha.is_zero() || n == 0 {
        rational::zero()
    } else {
        rational::int(2) * &beta * rational::int(ell as i64) / (&alpha * &nr)
    };
    Ok(BalancedFlow { eta, ell, alpha, beta, bound })
}

/// `ξ(v) + Σ_u η(u,v) − Σ_u η(v,u)` for every vertex.
pub fn balance_residuals(wdg: &WeightedDigraph, flow: &BalancedFlow) -> Vec<Rational> {
    let mut res = wdg.xi.clone();
    for (&(u, v), val) in &flow.eta {
        res[v] += val;
        res[u] -= val;
    }
    res
}

/// Exact balance at every vertex, support on arcs, and `0 ≤ η ≤ bound`.
pub fn verify_balance(wdg: &WeightedDigraph, flow: &BalancedFlow) -> bool {
    let on_arcs = flow.eta.keys().all(|&(u, v)| u < wdg.n() && v < wdg.n() && wdg.has_arc(u, v));
    on_arcs
        && flow.eta.values().all(|x| !x.is_negative() && x <= &flow.bound)
        && balance_residuals(wdg, flow).iter().all(Zero::is_zero)
}

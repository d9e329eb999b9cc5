//! Exact phase-one simplex over `ω(C) ≥ 0` with `Σ_{C ∋ e} ω(C) = 1`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use super::WeightFunction;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};
use crate::walks::{enumerate_cycles, TightCycle};

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    Feasible(WeightFunction),
    /// `dual[e] = y_e` with `Σ y_e < 0` and `Σ_{e ∈ C} y_e ≥ 0` for every
    /// ℓ-cycle `C`.
    Infeasible { dual: Vec<Rational> },
    BudgetExceeded { pivots: usize },
}

impl OracleOutcome {
    pub fn to_json_value(&self, h: &Hypergraph) -> serde_json::Value {
        match self {
            OracleOutcome::Feasible(w) => serde_json::json!({ "status": "feasible", "weights": w.to_json_value() }),
            OracleOutcome::Infeasible { dual } => {
                let map: BTreeMap<String, String> = dual
                    .iter()
                    .enumerate()
                    .map(|(e, y)| (edge_key(h, e), rational::to_string(y)))
                    .collect();
                serde_json::json!({ "status": "infeasible", "dual": map })
            }
            OracleOutcome::BudgetExceeded { pivots } => {
                serde_json::json!({ "status": "inconclusive", "pivots": pivots })
            }
        }
    }
}

fn edge_key(h: &Hypergraph, e: usize) -> String {
    h.edge(e).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Checks a Farkas certificate exactly against every ℓ-cycle.
pub fn check_certificate(h: &Hypergraph, cycles: &[TightCycle], dual: &[Rational]) -> bool {
    if dual.len() != h.edge_count() || !dual.iter().sum::<Rational>().is_negative() {
        return false;
    }
    cycles.iter().all(|c| {
        let s: Rational = c.edge_ids(h).into_iter().map(|e| &dual[e]).sum();
        !s.is_negative()
    })
}

struct Tableau {
    /// `rows × (vars + 1)`, last column is the right-hand side.
    a: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-one objective, last entry is `−z`.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col].clone();
        for x in self.a[row].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.a[row].clone();
        for (i, r) in self.a.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let f = self.cost[col].clone();
        if !f.is_zero() {
            for (x, y) in self.cost.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[row] = col;
    }
}

/// Decides whether `H` has a fractional decomposition into tight ℓ-cycles.
/// Variables are all ℓ-cycles; artificial variables start as the basis and
/// pivots follow Bland's rule.
pub fn lp_oracle(h: &Hypergraph, ell: usize, time_budget: Duration) -> Result<OracleOutcome> {
    let start = Instant::now();
    let cycles = enumerate_cycles(h, ell)?;
    let m = h.edge_count();
    let nvars = cycles.len();
    let width = nvars + m + 1;
    let mut a = vec![vec![rational::zero(); width]; m];
    for (j, c) in cycles.iter().enumerate() {
        for e in c.edge_ids(h) {
            a[e][j] += rational::one();
        }
    }
    for (e, row) in a.iter_mut().enumerate() {
        row[nvars + e] = rational::one();
        row[width - 1] = rational::one();
    }
    // reduced costs with the artificials basic: c_j − Σ_i a_ij
    let mut cost = vec![rational::zero(); width];
    for row in &a {
        for (j, x) in row.iter().enumerate() {
            if j < nvars || j == width - 1 {
                cost[j] -= x;
            }
        }
    }
    let mut tab = Tableau { a, cost, basis: (nvars..nvars + m).collect() };
    let mut pivots = 0;
    loop {
        if start.elapsed() > time_budget {
            return Ok(OracleOutcome::BudgetExceeded { pivots });
        }
        let Some(col) = (0..width - 1).find(|&j| tab.cost[j].is_negative()) else {
            break;
        };
        let mut best: Option<(Rational, usize)> = None;
        for (i, row) in tab.a.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[width - 1] / &row[col];
                let better = match &best {
                    None => true,
                    Some((r, bi)) => ratio < *r || (ratio == *r && tab.basis[i] < tab.basis[*bi]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
        }
        let Some((_, row)) = best else {
            return Err(Error::Aborted("phase-one simplex reported an unbounded ray".into()));
        };
        tab.pivot(row, col);
        pivots += 1;
    }

    let objective = -tab.cost[width - 1].clone();
    if objective.is_zero() {
        let mut w = WeightFunction::new(ell);
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < nvars {
                w.set(cycles[b].clone(), tab.a[i][width - 1].clone());
            }
        }
        return Ok(OracleOutcome::Feasible(w));
    }
    // y = c_B B⁻¹, read off the artificial columns; the certificate is −y
    let dual: Vec<Rational> = (0..m)
        .map(|e| {
            let y: Rational = tab
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= nvars)
                .map(|(i, _)| tab.a[i][nvars + e].clone())
                .sum();
            -y
        })
        .collect();
    if !check_certificate(h, &cycles, &dual) {
        return Err(Error::Aborted("phase-one dual failed its exact check".into()));
    }
    Ok(OracleOutcome::Infeasible { dual })
}

//! Structural checks on the lower-bound construction: walks inside `E₁`
//! place their `A`-vertices exactly `k` apart, so no tight ℓ-cycle with
//! `k ∤ ℓ` lives in `E₁`, and every ℓ-cycle that meets `E₁` needs an edge of
//! `H₀,₂`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{bit, mask_of, vertices_of, Hypergraph, LabeledExample, Vertex};
use crate::walks::enumerate_cycles;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub ell: usize,
    pub k: usize,
    pub e1: usize,
    pub h02: usize,
    /// (k+1)-vertex walks in `E₁` examined for the spacing property.
    pub spacing_walks: usize,
    pub spacing_holds: bool,
    pub cycles: usize,
    pub cycles_meeting_e1: usize,
    pub cycles_meeting_e1_and_h02: usize,
    /// Cycles meeting `E₁` but no `H₀,₂` edge.
    pub violations: Vec<Vec<Vertex>>,
    pub cycle_property_holds: bool,
    /// `(ℓ−1)·e(H₀,₂)`.
    pub budget_lhs: usize,
    /// `|E₁|`.
    pub budget_rhs: usize,
    /// The cycle property holds and `(ℓ−1)·e(H₀,₂) < |E₁|`, so no fractional
    /// decomposition exists.
    pub witnesses_non_decomposability: bool,
}

pub fn example_structure_check(le: &LabeledExample, ell: usize) -> Result<ExampleReport> {
    let h = &le.base;
    let k = h.k();
    if ell.is_multiple_of(k) {
        return Err(Error::input(format!("cycle length {ell} must not be a multiple of k = {k}")));
    }
    let a = le.a_mask();
    let mut e1: Vec<u64> = le.classes[1].iter().map(|e| mask_of(e)).collect();
    e1.sort_unstable();
    let h02: Vec<u64> = le.h02.iter().map(|e| mask_of(e)).collect();

    // every E₁ edge followed by every E₁ step: the A-vertex of the first
    // window reappears exactly k positions later
    let mut spacing_walks = 0;
    let mut spacing_holds = true;
    let sub = Hypergraph::new(h.n(), k, le.classes[1].clone())?;
    for e in le.classes[1].iter() {
        for tuple in e.iter().copied().permutations(k) {
            let tail = mask_of(&tuple[1..]);
            for u in vertices_of(sub.neighborhood_mask(tail)) {
                spacing_walks += 1;
                let mut seq = tuple.clone();
                seq.push(u);
                let in_a: Vec<bool> = seq.iter().map(|&v| a & bit(v) != 0).collect();
                let ok = (0..=1).all(|s| in_a[s..s + k].iter().filter(|&&x| x).count() == 1)
                    && (!in_a[0] || (in_a[1..k].iter().all(|&x| !x) && in_a[k]));
                spacing_holds &= ok;
            }
        }
    }

    let cycles = enumerate_cycles(h, ell)?;
    let mut meeting = 0;
    let mut with_h02 = 0;
    let mut violations = Vec::new();
    for c in &cycles {
        let masks = c.edge_masks(k);
        if !masks.iter().any(|&m| e1.binary_search(&m).is_ok()) {
            continue;
        }
        meeting += 1;
        if masks.iter().any(|m| h02.contains(m)) {
            with_h02 += 1;
        } else {
            violations.push(c.vertices().to_vec());
        }
    }
    let cycle_property_holds = violations.is_empty();
    let budget_lhs = (ell - 1) * le.h02.len();
    let budget_rhs = le.classes[1].len();
    Ok(ExampleReport {
        ell,
        k,
        e1: budget_rhs,
        h02: le.h02.len(),
        spacing_walks,
        spacing_holds,
        cycles: cycles.len(),
        cycles_meeting_e1: meeting,
        cycles_meeting_e1_and_h02: with_h02,
        violations,
        cycle_property_holds,
        budget_lhs,
        budget_rhs,
        witnesses_non_decomposability: cycle_property_holds && budget_lhs < budget_rhs,
    })
}

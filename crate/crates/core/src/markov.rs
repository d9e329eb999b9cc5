//! Exact finite Markov chains and the quantitative mixing bound.
//!
//! Powers are taken on a common-denominator integer form `P = A / d`, so
//! `P^t = A^t / d^t` needs only big-integer arithmetic until the final
//! comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::transitions::CompatibilityDigraph;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteChain {
    p: Vec<Vec<Rational>>,
    sigma: Vec<Rational>,
}

impl FiniteChain {
    /// Validates stochasticity; computes σ exactly when not given, and checks
    /// `σP = σ` when it is.
    pub fn new(p: Vec<Vec<Rational>>, sigma: Option<Vec<Rational>>) -> Result<Self> {
        let m = p.len();
        if m == 0 {
            return Err(Error::input("a chain needs at least one state"));
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != m {
                return Err(Error::input(format!("row {i} has {} entries, expected {m}", row.len())));
            }
            if row.iter().any(|x| x.is_negative()) {
                return Err(Error::input(format!("row {i} has a negative entry")));
            }
            if row.iter().sum::<Rational>() != rational::one() {
                return Err(Error::input(format!("row {i} does not sum to 1")));
            }
        }
        let sigma = match sigma {
            Some(s) => s,
            None => stationary(&p)?,
        };
        let chain = Self { p, sigma };
        if chain.sigma.len() != m
            || chain.sigma.iter().any(|x| x.is_negative())
            || chain.sigma.iter().sum::<Rational>() != rational::one()
        {
            return Err(Error::input("σ is not a probability vector on the states"));
        }
        if chain.left_multiply(&chain.sigma) != chain.sigma {
            return Err(Error::input("σ is not stationary"));
        }
        Ok(chain)
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[Vec<Rational>] {
        &self.p
    }

    pub fn sigma(&self) -> &[Rational] {
        &self.sigma
    }

    /// `v P`.
    pub fn left_multiply(&self, v: &[Rational]) -> Vec<Rational> {
        let m = self.dim();
        (0..m)
            .map(|j| (0..m).map(|i| &v[i] * &self.p[i][j]).sum())
            .collect()
    }

    fn integer_form(&self) -> IntMatrix {
        let d = self
            .p
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let a = self
            .p
            .iter()
            .map(|row| row.iter().map(|x| x.numer() * (&d / x.denom())).collect())
            .collect();
        IntMatrix { a, d }
    }

    /// `P^t` in common-denominator form.
    fn power_int(&self, t: u64) -> IntMatrix {
        self.integer_form().pow(t)
    }

    /// The chain `(X_0, X_step, X_{2 step}, …)`: transition matrix `P^step`.
    pub fn block_chain(&self, step: u64) -> Result<FiniteChain> {
        if step == 0 {
            return Err(Error::input("block step must be at least 1"));
        }
        Ok(FiniteChain { p: self.power_int(step).to_rational(), sigma: self.sigma.clone() })
    }

    /// `(α, β)` with `α = min p_ij / σ_k` and `β = max p_ij / σ_k`.
    pub fn mixing_params(&self) -> Result<(Rational, Rational)> {
        if self.p.iter().flatten().any(Zero::is_zero) {
            return Err(Error::Inapplicable("the transition matrix has a zero entry".into()));
        }
        if self.sigma.iter().any(Zero::is_zero) {
            return Err(Error::Inapplicable("the stationary distribution has a zero entry".into()));
        }
        let pmin = self.p.iter().flatten().min().unwrap();
        let pmax = self.p.iter().flatten().max().unwrap();
        let smin = self.sigma.iter().min().unwrap();
        let smax = self.sigma.iter().max().unwrap();
        Ok((pmin / smax, pmax / smin))
    }

    /// Exact check of `|P^t_ij − σ_j| ≤ (1 − α/2)^t σ_j` for every start `i`
    /// and state `j`.
    pub fn verify_mixing(&self, t: u64) -> Result<MixingCheck> {
        let (alpha, beta) = self.mixing_params()?;
        let t_min = mixing_threshold(&alpha, &beta)?;
        let pt = self.power_int(t);
        Ok(self.check_power(&pt, t, &alpha, t_min))
    }

    /// Runs the check for every `t` in `from..=to`, reusing powers.
    pub fn verify_mixing_range(&self, from: u64, to: u64) -> Result<MixingReport> {
        let (alpha, beta) = self.mixing_params()?;
        let t_min = mixing_threshold(&alpha, &beta)?;
        let base = self.integer_form();
        let mut pt = base.pow(from);
        let mut checks = Vec::new();
        for t in from..=to {
            if t > from {
                pt = pt.mul(&base);
            }
            checks.push(self.check_power(&pt, t, &alpha, t_min));
        }
        Ok(MixingReport {
            alpha,
            beta,
            t_min,
            t_from: from,
            holds: checks.iter().all(|c| c.holds),
            worst_ratio_by_t: checks.into_iter().map(|c| c.worst_ratio).collect(),
        })
    }

    /// Checks every `t` in `t_min ..= t_min + horizon`.
    pub fn verify_mixing_from_threshold(&self, horizon: u64) -> Result<MixingReport> {
        let (alpha, beta) = self.mixing_params()?;
        let t_min = mixing_threshold(&alpha, &beta)?;
        self.verify_mixing_range(t_min, t_min + horizon)
    }

    fn check_power(&self, pt: &IntMatrix, t: u64, alpha: &Rational, t_min: u64) -> MixingCheck {
        let m = self.dim();
        let dt = &pt.d;
        let decay = rational::pow(&(rational::one() - alpha / rational::int(2)), t as usize);
        // column j: max_i |A_ij − σ_j d| / (σ_j d)
        let worst = (0..m)
            .into_par_iter()
            .map(|j| {
                let target = &self.sigma[j] * Rational::from_integer(dt.clone());
                let dev = (0..m)
                    .map(|i| (Rational::from_integer(pt.a[i][j].clone()) - &target).abs())
                    .max()
                    .unwrap();
                dev / target
            })
            .max()
            .unwrap();
        let ratio = worst / &decay;
        MixingCheck { t, holds: ratio <= rational::one(), guaranteed: t >= t_min, worst_ratio: ratio }
    }
}

/// Solves `σ(P − I) = 0`, `Σσ = 1` by exact Gaussian elimination.
fn stationary(p: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let m = p.len();
    // rows: equations j (column j of P^T − I), last replaced by normalization
    let mut a: Vec<Vec<Rational>> = (0..m)
        .map(|j| {
            let mut row: Vec<Rational> = (0..m).map(|i| p[i][j].clone()).collect();
            row[j] -= rational::one();
            row.push(rational::zero());
            row
        })
        .collect();
    a[m - 1] = vec![rational::one(); m + 1];
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::input("the stationary distribution is not unique"))?;
        a.swap(col, pivot);
        let inv = rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[m].clone()).collect())
}

#[derive(Clone, Debug)]
struct IntMatrix {
    a: Vec<Vec<BigInt>>,
    d: BigInt,
}

impl IntMatrix {
    fn identity(m: usize) -> Self {
        let a = (0..m)
            .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        Self { a, d: BigInt::one() }
    }

    fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let m = self.a.len();
        let a = (0..m)
            .into_par_iter()
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut s = BigInt::zero();
                        for l in 0..m {
                            if !self.a[i][l].is_zero() && !other.a[l][j].is_zero() {
                                s += &self.a[i][l] * &other.a[l][j];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        IntMatrix { a, d: &self.d * &other.d }
    }

    fn pow(&self, mut e: u64) -> IntMatrix {
        let mut result = IntMatrix::identity(self.a.len());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    fn to_rational(&self) -> Vec<Vec<Rational>> {
        self.a
            .iter()
            .map(|row| row.iter().map(|x| Rational::new(x.clone(), self.d.clone())).collect())
            .collect()
    }
}

/// Simple random walk on an r-out-regular compatibility digraph with uniform σ.
pub fn chain_from_digraph(dg: &CompatibilityDigraph) -> Result<FiniteChain> {
    let r = match dg.regularity() {
        Some(r) if r >= 1 => r,
        Some(_) => return Err(Error::input("r = 0: the digraph has no arcs")),
        None => return Err(Error::input("the digraph is not out-regular")),
    };
    let m = dg.len();
    let step = rational::rat(1, r as i64);
    let p = (0..m)
        .map(|i| {
            let mut row = vec![rational::zero(); m];
            for &j in &dg.successors()[i] {
                row[j] = step.clone();
            }
            row
        })
        .collect();
    FiniteChain::new(p, Some(vec![rational::rat(1, m as i64); m]))
}

/// `⌈2 + 2α⁻¹ ln β⌉`, evaluated in floating point and nudged upward so that
/// rounding can only overshoot.
pub fn mixing_threshold(alpha: &Rational, beta: &Rational) -> Result<u64> {
    if !alpha.is_positive() {
        return Err(Error::Inapplicable("α must be positive".into()));
    }
    if beta.is_one() {
        return Ok(2);
    }
    // ln β is irrational for rational β ≠ 1, so x is never an integer here
    let a = alpha.to_f64().unwrap_or(0.0);
    let ln_beta = ln_rational(beta);
    let x = 2.0 + 2.0 * ln_beta / a;
    if !x.is_finite() {
        return Err(Error::Overflow(format!("mixing threshold for α = {alpha}, β = {beta}")));
    }
    let nudged = x + 1e-9 * x.abs().max(1.0);
    Ok(nudged.ceil().max(0.0) as u64)
}

/// Natural logarithm of a positive rational, robust for huge numerators and
/// denominators.
fn ln_rational(x: &Rational) -> f64 {
    fn ln_big(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap().ln();
        }
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_big(x.numer()) - ln_big(x.denom())
}

/// `(1 − α/(3ℓ₀))^ℓ`.
pub fn predicted_exactness(alpha: &Rational, ell0: usize, ell: usize) -> Result<Rational> {
    if !alpha.is_positive() || alpha > &rational::one() {
        return Err(Error::input("α must lie in (0, 1]"));
    }
    if ell0 < 2 || ell < ell0 {
        return Err(Error::input("need ℓ ≥ ℓ₀ ≥ 2"));
    }
    let base = rational::one() - alpha / rational::int(3 * ell0 as i64);
    Ok(rational::pow(&base, ell))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingCheck {
    pub t: u64,
    pub holds: bool,
    /// Whether `t ≥ t_min`, i.e. the bound is promised.
    pub guaranteed: bool,
    /// `max_{i,j} |P^t_ij − σ_j| / ((1 − α/2)^t σ_j)`; the bound holds iff ≤ 1.
    #[serde(with = "rational::serde_str")]
    pub worst_ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
    pub t_min: u64,
    pub t_from: u64,
    pub holds: bool,
    #[serde(with = "rational::serde_vec_str")]
    pub worst_ratio_by_t: Vec<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::gen_complete;
    use crate::rational::{int, rat};
    use crate::transitions::{build_compatibility_digraph, sample_transition_system, TransitionSystem};

    fn two_state(a: i64, b: i64, q: i64) -> FiniteChain {
        FiniteChain::new(
            vec![vec![rat(a, q), rat(b, q)], vec![rat(b, q), rat(a, q)]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(FiniteChain::new(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 2), rat(1, 2)]], None).is_err());
        assert!(FiniteChain::new(vec![vec![int(1)]], Some(vec![rat(1, 2)])).is_err());
        let c = two_state(1, 1, 2);
        assert_eq!(c.sigma(), &[rat(1, 2), rat(1, 2)]);
        let skew = FiniteChain::new(
            vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 4), rat(3, 4)]],
            None,
        )
        .unwrap();
        assert_eq!(skew.sigma(), &[rat(1, 3), rat(2, 3)]);
        // reducible: two absorbing states
        assert!(FiniteChain::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]], None).is_err());
    }

    #[test]
    fn digraph_chain() {
        let k4 = gen_complete(4, 2).unwrap();
        let dg = build_compatibility_digraph(&k4, &TransitionSystem::full(&k4));
        let c = chain_from_digraph(&dg).unwrap();
        assert_eq!(c.dim(), 12);
        assert!(c.p().iter().all(|row| row.iter().sum::<Rational>() == int(1)));
        let t = sample_transition_system(&k4, 0, 0).unwrap();
        assert!(chain_from_digraph(&build_compatibility_digraph(&k4, &t)).is_err());
    }

    #[test]
    fn block_chains() {
        let c = two_state(1, 2, 3);
        assert_eq!(c.block_chain(1).unwrap(), c);
        let flip = FiniteChain::new(vec![vec![int(0), int(1)], vec![int(1), int(0)]], None).unwrap();
        assert_eq!(flip.block_chain(2).unwrap().p(), &[vec![int(1), int(0)], vec![int(0), int(1)]]);
        assert_eq!(
            c.block_chain(6).unwrap(),
            c.block_chain(2).unwrap().block_chain(3).unwrap()
        );
        assert!(c.block_chain(0).is_err());
    }

    #[test]
    fn block_entries_are_walk_counts() {
        let k6 = gen_complete(6, 2).unwrap();
        let t = sample_transition_system(&k6, 2, 3).unwrap();
        let dg = build_compatibility_digraph(&k6, &t);
        let block = chain_from_digraph(&dg).unwrap().block_chain(3).unwrap();
        for s in 0..dg.len() {
            let counts = dg.counts_from(s, 4).unwrap();
            for (j, &c) in counts.iter().enumerate() {
                assert_eq!(block.p()[s][j], rat(c as i64, 8));
            }
        }
    }

    #[test]
    fn mixing_parameters() {
        let m = 5;
        let uniform = FiniteChain::new(vec![vec![rat(1, m); m as usize]; m as usize], None).unwrap();
        assert_eq!(uniform.mixing_params().unwrap(), (int(1), int(1)));
        let c = two_state(1, 2, 3);
        assert_eq!(c.mixing_params().unwrap(), (rat(2, 3), rat(4, 3)));
        let flip = FiniteChain::new(vec![vec![int(0), int(1)], vec![int(1), int(0)]], None).unwrap();
        assert!(matches!(flip.mixing_params(), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn threshold_and_two_state_check() {
        assert_eq!(mixing_threshold(&rat(2, 3), &rat(4, 3)).unwrap(), 3);
        assert_eq!(mixing_threshold(&int(1), &int(1)).unwrap(), 2);
        let c = two_state(1, 2, 3);
        let p3 = c.block_chain(3).unwrap();
        assert_eq!(p3.p()[0][0], rat(13, 27));
        let check = c.verify_mixing(3).unwrap();
        assert!(check.holds && check.guaranteed);
        // deviation 1/54 against the bound 4/27
        assert_eq!(check.worst_ratio, rat(1, 54) / rat(4, 27));
        let early = c.verify_mixing(1).unwrap();
        assert!(!early.guaranteed);
    }

    #[test]
    fn uniform_chain_has_zero_deviation() {
        let uniform = FiniteChain::new(vec![vec![rat(1, 4); 4]; 4], None).unwrap();
        let report = uniform.verify_mixing_range(2, 6).unwrap();
        assert!(report.holds);
        assert!(report.worst_ratio_by_t.iter().all(Zero::is_zero));
        let json = serde_json::to_string(&report).unwrap();
        let back: MixingReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn exactness_prediction() {
        assert_eq!(predicted_exactness(&int(1), 2, 2).unwrap(), rat(25, 36));
        let a = predicted_exactness(&rat(1, 2), 4, 10).unwrap();
        let b = predicted_exactness(&rat(1, 2), 4, 20).unwrap();
        assert!(b < a);
        assert!(predicted_exactness(&int(0), 4, 10).is_err());
    }
}

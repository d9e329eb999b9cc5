mod common;

use std::sync::OnceLock;

use cyclefrac::hypergraph::gen_complete;
use cyclefrac::markov::FiniteChain;
use cyclefrac::rational::{rat, zero};
use cyclefrac::transport::{balance_flow, verify_balance};
use cyclefrac::transporter::{apply_transporter, find_transporters, rotate};
use cyclefrac::{Hypergraph, Rational, TightCycle, TransitionSystem, Transporter, WeightFunction, WeightedDigraph};
use num_traits::Zero;
use proptest::prelude::*;

fn k12() -> &'static Hypergraph {
    static H: OnceLock<Hypergraph> = OnceLock::new();
    H.get_or_init(|| gen_complete(12, 2).unwrap())
}

fn transporters() -> &'static Vec<Transporter> {
    static T: OnceLock<Vec<Transporter>> = OnceLock::new();
    T.get_or_init(|| {
        let h = k12();
        find_transporters(h, &TransitionSystem::full(h), &[1, 2], &[5, 9], 5, 8, 3).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_compose(e in proptest::sample::subsequence((1u32..=9).collect::<Vec<_>>(), 4).prop_shuffle(), i in 0usize..8, j in 0usize..8) {
        prop_assert_eq!(rotate(&e, e.len()), e.clone());
        prop_assert_eq!(rotate(&rotate(&e, i), j), rotate(&e, i + j));
    }

    #[test]
    fn canonical_cycle_ignores_representation(vs in proptest::sample::subsequence((1u32..=12).collect::<Vec<_>>(), 6).prop_shuffle(), r in 0usize..6, flip: bool) {
        let mut w: Vec<u32> = (0..6).map(|i| vs[(i + r) % 6]).collect();
        if flip {
            w.reverse();
        }
        prop_assert_eq!(TightCycle::canonical(&w), TightCycle::canonical(&vs));
        prop_assert_eq!(TightCycle::canonical(&vs).vertices().to_vec(), common::canonical(&vs));
    }

    #[test]
    fn transporters_shift_exactly(idx in 0usize..8, p in 0i64..50, q in 1i64..50) {
        let h = k12();
        let trs = transporters();
        let tr = &trs[idx % trs.len()];
        let w = rat(p, q);
        let before = WeightFunction::new(5);
        let after = apply_transporter(&before, tr, &w);
        let sums = common::edge_sums(h, &after);
        let s = h.edge_id(&tr.s).unwrap();
        let t = h.edge_id(&tr.t).unwrap();
        for (e, x) in sums.iter().enumerate() {
            let expected = if e == s { -w.clone() } else if e == t { w.clone() } else { zero() };
            prop_assert_eq!(x, &expected);
        }
    }

    #[test]
    fn balance_is_exact_and_capped(values in proptest::collection::vec(-20i64..20, 15), scale in 1i64..5) {
        let h = gen_complete(6, 2).unwrap();
        let mean: i64 = values.iter().sum();
        let mut xi: Vec<Rational> = values.iter().map(|&v| rat(v, 7)).collect();
        xi[0] -= rat(mean, 7);
        let wdg = WeightedDigraph::disjointness(&h, xi.clone()).unwrap();
        let flow = balance_flow(&wdg, 2).unwrap();
        prop_assert!(verify_balance(&wdg, &flow));
        prop_assert!(flow.max_value() <= flow.bound);
        for (&(u, v), x) in &flow.eta {
            prop_assert!(!x.is_zero());
            prop_assert!(flow.value(v, u).is_zero());
        }
        let scaled: Vec<Rational> = xi.iter().map(|x| x * rat(scale, 1)).collect();
        let flow2 = balance_flow(&wdg.with_xi(scaled).unwrap(), 2).unwrap();
        for (arc, x) in &flow.eta {
            prop_assert_eq!(&flow2.eta[arc], &(x * rat(scale, 1)));
        }
    }

    #[test]
    fn block_chains_compose(entries in proptest::collection::vec(1i64..9, 9), a in 1u64..4, b in 1u64..4) {
        let rows: Vec<Vec<Rational>> = entries
            .chunks(3)
            .map(|r| {
                let total: i64 = r.iter().sum();
                r.iter().map(|&x| rat(x, total)).collect()
            })
            .collect();
        let chain = FiniteChain::new(rows, None).unwrap();
        let direct = chain.block_chain(a * b).unwrap();
        let nested = chain.block_chain(a).unwrap().block_chain(b).unwrap();
        prop_assert_eq!(direct.p(), nested.p());
        let stationary = chain.left_multiply(chain.sigma());
        prop_assert_eq!(stationary.as_slice(), chain.sigma());
    }
}

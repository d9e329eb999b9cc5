mod common;

use common::{dfs_walk_counts, small_instances};
use cyclefrac::hypergraph::gen_complete;
use cyclefrac::markov::chain_from_digraph;
use cyclefrac::rational::{int, pow};
use cyclefrac::transitions::{build_compatibility_digraph, sample_transition_system};
use cyclefrac::walks::{connectivity, count_walks, counts_from};
use cyclefrac::{OrderedEdges, TransitionSystem};

#[test]
fn operator_counts_match_dfs_on_small_instances() {
    for h in small_instances() {
        let oe = OrderedEdges::new(&h);
        let succ = oe.successors(&h);
        for ell in 1..=4 {
            for s in 0..oe.len() {
                let counts = counts_from(&succ, s, ell).unwrap();
                let oracle = dfs_walk_counts(&h, oe.tuple(s), ell);
                for t in 0..oe.len() {
                    let expected = oracle.get(oe.tuple(t)).copied().unwrap_or(0);
                    assert_eq!(counts[t], expected, "{:?} -> {:?}, ℓ = {ell}", oe.tuple(s), oe.tuple(t));
                }
            }
        }
    }
}

#[test]
fn full_system_counts_equal_unrestricted_counts() {
    let k5 = gen_complete(5, 2).unwrap();
    let dg = build_compatibility_digraph(&k5, &TransitionSystem::full(&k5));
    for ell in 1..=5 {
        assert_eq!(
            dg.count_compatible_walks(&[1, 2], &[3, 4], ell).unwrap(),
            count_walks(&k5, &[1, 2], &[3, 4], ell).unwrap()
        );
    }
}

#[test]
fn chain_powers_count_compatible_walks() {
    let k6 = gen_complete(6, 2).unwrap();
    let t = sample_transition_system(&k6, 2, 4).unwrap();
    let dg = build_compatibility_digraph(&k6, &t);
    let chain = chain_from_digraph(&dg).unwrap();
    let ell = 4;
    let block = chain.block_chain(ell as u64 - 1).unwrap();
    let oe = dg.ordered_edges();
    for s in 0..oe.len() {
        let counts = dg.counts_from(s, ell).unwrap();
        for (t, c) in counts.iter().enumerate() {
            assert_eq!(&block.p()[s][t] * pow(&int(2), ell - 1), int(*c as i64));
        }
    }
}

#[test]
fn k5_connectivity_from_walk_counts() {
    let k5 = gen_complete(5, 2).unwrap();
    let cert = connectivity(&k5, 3).unwrap();
    let oe = OrderedEdges::new(&k5);
    let mut min = u128::MAX;
    for s in 0..oe.len() {
        let oracle = dfs_walk_counts(&k5, oe.tuple(s), 3);
        for t in 0..oe.len() {
            min = min.min(oracle.get(oe.tuple(t)).copied().unwrap_or(0));
        }
    }
    assert_eq!(cert.per_pair_min, min);
}

//! Uniform sampling of simple r-regular graphs on a small labeled vertex set.
//!
//! Graphs are adjacency bitmasks, one `u64` per vertex. Up to
//! [`ENUMERATION_LIMIT`] vertices all r-regular graphs are enumerated once and
//! one is drawn uniformly; above it the configuration model is used, retrying
//! until the pairing is simple. Degrees above `(d − 1)/2` are sampled through
//! the complement, which keeps rejection rates low.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const ENUMERATION_LIMIT: usize = 8;
pub const PAIRING_ATTEMPTS: usize = 1_000_000;

pub type Adjacency = Vec<u64>;

type Cache = Mutex<HashMap<(usize, usize), Arc<Vec<Adjacency>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Every simple r-regular graph on `d` labeled vertices, in a fixed order.
pub fn all_regular(d: usize, r: usize) -> Arc<Vec<Adjacency>> {
    let mut guard = cache().lock().expect("regular graph cache poisoned");
    guard
        .entry((d, r))
        .or_insert_with(|| {
            let mut out = Vec::new();
            if r < d.max(1) && (d * r).is_multiple_of(2) {
                let mut adj = vec![0u64; d];
                enumerate_from(0, d, r, &mut adj, &mut out);
            } else if r == 0 {
                out.push(vec![0; d]);
            }
            Arc::new(out)
        })
        .clone()
}

fn enumerate_from(i: usize, d: usize, r: usize, adj: &mut Adjacency, out: &mut Vec<Adjacency>) {
    if i == d {
        out.push(adj.clone());
        return;
    }
    let need = r - adj[i].count_ones() as usize;
    let candidates: Vec<usize> = (i + 1..d).filter(|&j| (adj[j].count_ones() as usize) < r).collect();
    if candidates.len() < need {
        return;
    }
    choose(i, d, r, &candidates, 0, need, adj, out);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    i: usize,
    d: usize,
    r: usize,
    candidates: &[usize],
    from: usize,
    need: usize,
    adj: &mut Adjacency,
    out: &mut Vec<Adjacency>,
) {
    if need == 0 {
        enumerate_from(i + 1, d, r, adj, out);
        return;
    }
    for c in from..candidates.len() {
        if candidates.len() - c < need {
            break;
        }
        let j = candidates[c];
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
        choose(i, d, r, candidates, c + 1, need - 1, adj, out);
        adj[i] &= !(1 << j);
        adj[j] &= !(1 << i);
    }
}

fn complement(adj: &Adjacency) -> Adjacency {
    let d = adj.len();
    let full = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    adj.iter().enumerate().map(|(i, &a)| full & !a & !(1u64 << i)).collect()
}

/// A uniform simple r-regular graph on `d` vertices.
pub fn sample_regular<R: Rng>(d: usize, r: usize, rng: &mut R) -> Result<Adjacency> {
    if d > 64 {
        return Err(Error::Sampling(format!("{d} vertices exceed the 64-vertex limit")));
    }
    if r == 0 {
        return Ok(vec![0; d]);
    }
    if r >= d || !(d * r).is_multiple_of(2) {
        return Err(Error::Sampling(format!("no {r}-regular graph on {d} vertices")));
    }
    if 2 * r > d - 1 {
        return sample_regular(d, d - 1 - r, rng).map(|g| complement(&g));
    }
    if d <= ENUMERATION_LIMIT {
        let all = all_regular(d, r);
        return Ok(all[rng.gen_range(0..all.len())].clone());
    }
    let mut stubs: Vec<usize> = (0..d).flat_map(|v| std::iter::repeat_n(v, r)).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(rng);
        let mut adj = vec![0u64; d];
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || adj[a] & (1 << b) != 0 {
                continue 'attempt;
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        return Ok(adj);
    }
    Err(Error::Sampling(format!(
        "no simple pairing for a {r}-regular graph on {d} vertices in {PAIRING_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn is_regular(adj: &Adjacency, r: usize) -> bool {
        adj.iter().enumerate().all(|(i, &a)| {
            a.count_ones() as usize == r
                && a & (1 << i) == 0
                && (0..adj.len()).all(|j| (a >> j) & 1 == (adj[j] >> i) & 1)
        })
    }

    #[test]
    fn enumeration_counts() {
        // labeled 2-regular graphs on 3..=8 vertices; cubic graphs on 4, 6, 8
        assert_eq!(all_regular(5, 2).len(), 12);
        assert_eq!(all_regular(6, 2).len(), 70);
        assert_eq!(all_regular(7, 2).len(), 465);
        assert_eq!(all_regular(8, 2).len(), 3507);
        assert_eq!(all_regular(4, 3).len(), 1);
        assert_eq!(all_regular(6, 3).len(), 70);
        assert_eq!(all_regular(8, 3).len(), 19355);
        assert!(all_regular(5, 3).is_empty());
        for g in all_regular(7, 4).iter() {
            assert!(is_regular(g, 4));
        }
    }

    #[test]
    fn samples_are_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, r) in [(5, 2), (9, 4), (11, 6), (12, 3), (20, 4), (30, 2), (13, 12)] {
            for _ in 0..20 {
                assert!(is_regular(&sample_regular(d, r, &mut rng).unwrap(), r), "d={d} r={r}");
            }
        }
        assert!(sample_regular(5, 3, &mut rng).is_err());
        assert!(sample_regular(4, 4, &mut rng).is_err());
    }
}

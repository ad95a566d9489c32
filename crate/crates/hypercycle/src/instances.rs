//! Seeded random instance generators for experiment drivers, benches, and
//! acceptance sweeps. All randomness flows through labeled sub-seeds of one
//! root seed, so every instance is replayable.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypergraph::{supported_codegree, Hypergraph};
use crate::matching::{BipartiteGraph, Digraph};
use crate::util::{binomial, for_each_subset, seeded_rng};
use crate::{Error, Result};

fn check_prob(keep: (u32, u32)) -> Result<()> {
    if keep.1 == 0 || keep.0 > keep.1 {
        return Err(Error::Parameter(format!(
            "keep probability {}/{} is not in [0, 1]",
            keep.0, keep.1
        )));
    }
    Ok(())
}

/// A k-graph on n vertices keeping each k-set independently with
/// probability `keep.0 / keep.1`.
pub fn random_kgraph(n: usize, k: usize, keep: (u32, u32), seed: u64) -> Result<Hypergraph> {
    check_prob(keep)?;
    let mut rng = seeded_rng("random-kgraph", seed);
    let mut edges: Vec<Vec<u32>> = Vec::new();
    for_each_subset(n, k, |s| {
        if rng.gen_ratio(keep.0, keep.1) {
            edges.push(s.to_vec());
        }
        true
    });
    Hypergraph::new(n, k, edges)
}

/// The complete k-graph on n vertices minus `remove` uniformly random
/// edges.
pub fn complete_minus_random(n: usize, k: usize, remove: usize, seed: u64) -> Result<Hypergraph> {
    let total = binomial(n, k);
    if (remove as u128) > total {
        return Err(Error::Parameter(format!(
            "cannot remove {remove} of {total} edges"
        )));
    }
    let mut rng = seeded_rng("complete-minus", seed);
    let mut edges: Vec<Vec<u32>> = Vec::with_capacity(total as usize);
    for_each_subset(n, k, |s| {
        edges.push(s.to_vec());
        true
    });
    edges.shuffle(&mut rng);
    edges.truncate(edges.len() - remove);
    Hypergraph::new(n, k, edges)
}

/// Rejection-samples [`random_kgraph`] until the minimum supported
/// co-degree reaches `floor`, deriving one sub-seed per attempt.
pub fn random_kgraph_with_min_codegree(
    n: usize,
    k: usize,
    keep: (u32, u32),
    floor: usize,
    attempts: usize,
    seed: u64,
) -> Result<Hypergraph> {
    check_prob(keep)?;
    for attempt in 0..attempts {
        let g = random_kgraph(n, k, keep, seed.wrapping_add(attempt as u64))?;
        if supported_codegree(&g).is_some_and(|d| d >= floor) {
            return Ok(g);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no sample reached supported co-degree {floor} in {attempts} attempts"
    )))
}

/// Rejection-samples digraphs keeping each arc independently until the
/// minimum semi-degree reaches `floor`.
pub fn random_digraph_with_min_semi_degree(
    n: usize,
    keep: (u32, u32),
    floor: usize,
    attempts: usize,
    seed: u64,
) -> Result<Digraph> {
    check_prob(keep)?;
    for attempt in 0..attempts {
        let mut rng = seeded_rng("random-digraph", seed.wrapping_add(attempt as u64));
        let mut arcs: Vec<(u32, u32)> = Vec::new();
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v && rng.gen_ratio(keep.0, keep.1) {
                    arcs.push((u, v));
                }
            }
        }
        let d = Digraph::new(n, &arcs)?;
        if d.min_semi_degree() >= floor {
            return Ok(d);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no sample reached semi-degree {floor} in {attempts} attempts"
    )))
}

/// The complete bipartite graph with parts of size n minus `remove`
/// uniformly random edges (right part labeled n..2n).
pub fn random_bipartite_minus(n: usize, remove: usize, seed: u64) -> Result<BipartiteGraph> {
    if remove > n * n {
        return Err(Error::Parameter(format!(
            "cannot remove {remove} of {} edges",
            n * n
        )));
    }
    let mut rng = seeded_rng("bipartite-minus", seed);
    let mut edges: Vec<(u32, u32)> =
        (0..n as u32).flat_map(|x| (n as u32..2 * n as u32).map(move |y| (x, y))).collect();
    edges.shuffle(&mut rng);
    edges.truncate(edges.len() - remove);
    BipartiteGraph::new(n, n, &edges)
}

/// A random subgraph of a bipartite host keeping each edge independently
/// with probability `keep.0 / keep.1`.
pub fn random_bipartite_subgraph(
    h: &BipartiteGraph,
    keep: (u32, u32),
    seed: u64,
) -> Result<BipartiteGraph> {
    check_prob(keep)?;
    let mut rng = seeded_rng("bipartite-subgraph", seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for x in 0..h.nx() as u32 {
        for &y in h.neighbours(x) {
            if rng.gen_ratio(keep.0, keep.1) {
                edges.push((x, y));
            }
        }
    }
    BipartiteGraph::new(h.nx(), h.ny(), &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kgraph_respects_probability_extremes() {
        let empty = random_kgraph(8, 3, (0, 1), 1).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = random_kgraph(8, 3, (1, 1), 1).unwrap();
        assert_eq!(full.edge_count(), 56);
    }

    #[test]
    fn generators_replay_from_the_seed() {
        let a = random_kgraph(10, 3, (1, 2), 99).unwrap();
        let b = random_kgraph(10, 3, (1, 2), 99).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = random_kgraph(10, 3, (1, 2), 100).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn complete_minus_removes_exactly() {
        let g = complete_minus_random(10, 3, 7, 5).unwrap();
        assert_eq!(g.edge_count(), 120 - 7);
    }

    #[test]
    fn digraph_sampler_meets_the_floor() {
        let d = random_digraph_with_min_semi_degree(12, (3, 4), 6, 50, 2).unwrap();
        assert!(d.min_semi_degree() >= 6);
    }

    #[test]
    fn codegree_sampler_meets_the_floor() {
        let g = random_kgraph_with_min_codegree(14, 3, (9, 10), 8, 50, 3).unwrap();
        assert!(supported_codegree(&g).unwrap() >= 8);
    }

    #[test]
    fn bipartite_samplers_compose() {
        let host = random_bipartite_minus(40, 16, 7).unwrap();
        assert_eq!(host.edge_count(), 1600 - 16);
        let sub = random_bipartite_subgraph(&host, (99, 100), 8).unwrap();
        assert!(host.contains_subgraph(&sub));
        assert!(sub.edge_count() <= host.edge_count());
    }

    #[test]
    fn probability_validation() {
        assert!(random_kgraph(5, 3, (3, 2), 0).is_err());
        assert!(random_kgraph(5, 3, (1, 0), 0).is_err());
    }
}

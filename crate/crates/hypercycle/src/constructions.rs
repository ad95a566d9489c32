//! Generators for the three lower-bound constructions and the explicit
//! spanning l-cycle in complete k-partite k-graphs.
//!
//! Every generator self-checks its structural predicate and its minimum
//! supported co-degree at construction time and panics on mismatch, so the
//! outputs double as trusted fixtures for other modules.

use crate::hypergraph::{
    compute_t, supported_codegree, verify_strong_independent, CycleParams, HostGraph, Hypergraph,
};
use crate::walks::{VertexSeq, WalkKind};
use crate::{Error, Result};

/// Which lower-bound family a witness belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    WeakBound,
    StrongBound,
    LooseThreeUniform,
}

/// A generated lower-bound instance: the graph, the special set A, its
/// complement B, and recorded structure for downstream tests.
#[derive(Clone, Debug)]
pub struct ExtremalWitness {
    pub graph: Hypergraph,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub kind: WitnessKind,
    pub params: CycleParams,
    pub delta_star: usize,
    /// The matched pairs inside A (strong-bound family only).
    pub matched_pairs: Option<Vec<(u32, u32)>>,
}

fn split_top(n: usize, a_size: usize) -> (Vec<u32>, Vec<u32>) {
    let b: Vec<u32> = (0..(n - a_size) as u32).collect();
    let a: Vec<u32> = ((n - a_size) as u32..n as u32).collect();
    (a, b)
}

/// All k-sets meeting the set A (the floor(n/t)+1 highest ids) in at most
/// one vertex. A is strongly independent, so the graph has no Hamilton
/// l-cycle despite a minimum supported co-degree of n - floor(n/t) - (k-1).
pub fn gen_weak_lower_bound(k: usize, ell: usize, n: usize) -> Result<ExtremalWitness> {
    let params = compute_t(k, ell)?;
    if n % params.step() != 0 {
        return Err(Error::Parameter(format!(
            "n = {n} must be divisible by k-l = {}",
            params.step()
        )));
    }
    let a_size = n / params.t + 1;
    // |B| >= k-1 keeps the one-A-vertex supported sets at positive co-degree.
    if a_size + (k - 1) > n {
        return Err(Error::Parameter(format!(
            "n = {n} too small: |A| = {a_size} must be at most n-k+1"
        )));
    }
    let (a, b) = split_top(n, a_size);
    let a_min = (n - a_size) as u32;
    let mut edges = Vec::new();
    crate::util::for_each_subset(n, k, |s| {
        if s.iter().filter(|&&v| v >= a_min).count() <= 1 {
            edges.push(s.to_vec());
        }
        true
    });
    let graph = Hypergraph::new(n, k, edges)?;
    let delta_star = n - n / params.t - (k - 1);
    assert_eq!(
        supported_codegree(&graph),
        Some(delta_star),
        "weak bound co-degree self-check"
    );
    assert!(verify_strong_independent(&graph, &a), "A must be strongly independent");
    Ok(ExtremalWitness {
        graph,
        a,
        b,
        kind: WitnessKind::WeakBound,
        params,
        delta_star,
        matched_pairs: None,
    })
}

/// For odd k and l = (k-1)/2 (so t = (k+1)/2): A is the n/t + 1 highest
/// ids, paired up consecutively, and edges are the k-sets whose A-part lies
/// inside a single matched pair. The 2-shadow restricted to A is a perfect
/// matching and the minimum supported co-degree is |B| - (k-3).
pub fn gen_strong_lower_bound(k: usize, n: usize) -> Result<ExtremalWitness> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::Parameter(format!("k must be odd and at least 3, got {k}")));
    }
    let ell = (k - 1) / 2;
    let params = compute_t(k, ell)?;
    debug_assert_eq!(params.t, (k + 1) / 2);
    if n % params.t != 0 {
        return Err(Error::Parameter(format!("t = {} must divide n = {n}", params.t)));
    }
    let a_size = n / params.t + 1;
    if a_size % 2 != 0 {
        return Err(Error::Parameter(format!("n/t + 1 = {a_size} must be even")));
    }
    let b_size = n - a_size;
    if b_size < k - 1 {
        return Err(Error::Parameter(format!(
            "n = {n} too small: |B| = {b_size} must be at least k-1"
        )));
    }
    let (a, b) = split_top(n, a_size);
    let pairs: Vec<(u32, u32)> = a.chunks(2).map(|c| (c[0], c[1])).collect();
    let a_min = (n - a_size) as u32;
    let pair_id = |v: u32| (v - a_min) / 2;
    let mut edges = Vec::new();
    crate::util::for_each_subset(n, k, |s| {
        let in_a: Vec<u32> = s.iter().copied().filter(|&v| v >= a_min).collect();
        let ok = match in_a.as_slice() {
            [] | [_] => true,
            [x, y] => pair_id(*x) == pair_id(*y),
            _ => false,
        };
        if ok {
            edges.push(s.to_vec());
        }
        true
    });
    let graph = Hypergraph::new(n, k, edges)?;
    let delta_star = b_size - (k - 3);
    assert_eq!(
        supported_codegree(&graph),
        Some(delta_star),
        "strong bound co-degree self-check"
    );
    // The 2-shadow restricted to A must be exactly the matched pairs.
    for (i, &u) in a.iter().enumerate() {
        for &v in &a[i + 1..] {
            let expect = pair_id(u) == pair_id(v);
            assert_eq!(graph.is_supported(&[u, v]), expect, "A-shadow matching self-check");
        }
    }
    Ok(ExtremalWitness {
        graph,
        a,
        b,
        kind: WitnessKind::StrongBound,
        params,
        delta_star,
        matched_pairs: Some(pairs),
    })
}

/// Two complete 3-graphs on n/2 + 1 vertices sharing exactly two vertices
/// (requires n = 2 mod 4). Minimum supported co-degree n/2 - 1, yet no loose
/// Hamilton cycle: each clique has even order while loose paths are odd.
pub fn gen_loose_3uniform(n: usize) -> Result<ExtremalWitness> {
    if n % 4 != 2 {
        return Err(Error::Parameter(format!("n = {n} must be 2 mod 4")));
    }
    if n < 6 {
        return Err(Error::Parameter(format!("n = {n} too small, need n >= 6")));
    }
    let params = compute_t(3, 1)?;
    let half = n / 2;
    // H1 on {0..half}, H2 on {half-1..n-1}; shared pair {half-1, half}.
    let h1: Vec<u32> = (0..=half as u32).collect();
    let h2: Vec<u32> = (half as u32 - 1..n as u32).collect();
    let mut edges = Vec::new();
    for block in [&h1, &h2] {
        let m = block.len();
        crate::util::for_each_subset(m, 3, |s| {
            edges.push(s.iter().map(|&i| block[i as usize]).collect());
            true
        });
    }
    let graph = Hypergraph::new(n, 3, edges)?;
    let delta_star = half - 1;
    assert_eq!(
        supported_codegree(&graph),
        Some(delta_star),
        "loose bound co-degree self-check"
    );
    let shared: Vec<u32> = h1.iter().copied().filter(|v| h2.contains(v)).collect();
    assert_eq!(shared.len(), 2, "cliques must share exactly two vertices");
    let a = shared;
    let b: Vec<u32> = (0..n as u32).filter(|v| !a.contains(v)).collect();
    Ok(ExtremalWitness {
        graph,
        a,
        b,
        kind: WitnessKind::LooseThreeUniform,
        params,
        delta_star,
        matched_pairs: None,
    })
}

/// A complete k-partite k-graph given implicitly by its vertex partition:
/// edges are exactly the transversals (one vertex per part). Kept implicit
/// because materializing the edge set is infeasible already at moderate part
/// sizes.
#[derive(Clone, Debug)]
pub struct KPartiteComplete {
    n: usize,
    part_of: Vec<u32>,
    parts: Vec<Vec<u32>>,
}

impl KPartiteComplete {
    /// Parts must be non-empty and partition 0..n.
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::Parameter("need at least two parts".into()));
        }
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Parameter("parts must be non-empty".into()));
        }
        let n: usize = parts.iter().map(|p| p.len()).sum();
        let mut part_of = vec![u32::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            for &v in p {
                if v as usize >= n || part_of[v as usize] != u32::MAX {
                    return Err(Error::Parameter(format!(
                        "parts must partition 0..{n}; vertex {v} repeats or is out of range"
                    )));
                }
                part_of[v as usize] = i as u32;
            }
        }
        Ok(KPartiteComplete { n, part_of, parts })
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn part_of(&self, v: u32) -> u32 {
        self.part_of[v as usize]
    }

    pub fn edge_count(&self) -> u128 {
        self.parts.iter().map(|p| p.len() as u128).product()
    }

    /// Explicit edge list, refused above the cap.
    pub fn materialize(&self, cap: usize) -> Result<Hypergraph> {
        if self.edge_count() > cap as u128 {
            return Err(Error::Resource(format!(
                "{} edges exceed the materialization cap {cap}",
                self.edge_count()
            )));
        }
        let k = self.parts.len();
        let mut edges = Vec::with_capacity(self.edge_count() as usize);
        let mut idx = vec![0usize; k];
        loop {
            edges.push((0..k).map(|i| self.parts[i][idx[i]]).collect());
            let mut d = k;
            loop {
                if d == 0 {
                    return Hypergraph::new(self.n, k, edges);
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.parts[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    fn parts_distinct(&self, s: &[u32]) -> bool {
        let mut seen = 0u64;
        for &v in s {
            if v as usize >= self.n {
                return false;
            }
            let p = self.part_of[v as usize];
            if seen >> p & 1 == 1 {
                return false;
            }
            seen |= 1 << p;
        }
        true
    }
}

impl HostGraph for KPartiteComplete {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.parts.len()
    }

    fn has_edge(&self, e: &[u32]) -> bool {
        e.len() == self.parts.len() && self.parts_distinct(e)
    }

    fn supports(&self, s: &[u32]) -> bool {
        !s.is_empty() && s.len() <= self.parts.len() && self.parts_distinct(s)
    }
}

/// Builds the complete k-partite k-graph with |A| = r/t and
/// |B_i| = r(t-1)/(t(k-1)), and emits the explicit spanning l-cycle whose
/// label pattern puts A at positions divisible by t and walks the B-indices
/// cyclically, together with the marked ordered edge formed by the first k
/// vertices (one from each of B_1, ..., B_{t-1}, A, B_t, ..., B_{k-1}).
///
/// The host is returned implicitly (see [`KPartiteComplete`]) since the
/// transversal edge set is far too large to materialize at the upper end of
/// the supported parameter range.
pub fn construct_kpartite_ell_cycle(
    params: CycleParams,
    r: usize,
) -> Result<(KPartiteComplete, VertexSeq, Vec<u32>)> {
    let (k, t) = (params.k, params.t);
    if r == 0 || r % (t * (k - 1)) != 0 {
        return Err(Error::Parameter(format!(
            "r = {r} must be a positive multiple of t(k-1) = {}",
            t * (k - 1)
        )));
    }
    let a_size = r / t;
    let b_size = r * (t - 1) / (t * (k - 1));
    // Parts: B_1..B_{k-1} occupy ascending contiguous blocks, A the top ids.
    let mut parts: Vec<Vec<u32>> = (0..k - 1)
        .map(|i| ((i * b_size) as u32..((i + 1) * b_size) as u32).collect())
        .collect();
    parts.push(((r - a_size) as u32..r as u32).collect());
    let a_part = k - 1;
    let host = KPartiteComplete::new(parts)?;

    let mut next = vec![0usize; k];
    let mut seq = Vec::with_capacity(r);
    let mut b_count = 0usize;
    for p in 1..=r {
        let part = if p % t == 0 {
            a_part
        } else {
            let part = b_count % (k - 1);
            b_count += 1;
            part
        };
        seq.push(host.parts()[part][next[part]]);
        next[part] += 1;
    }
    for (part, &used) in next.iter().enumerate() {
        assert_eq!(used, host.parts()[part].len(), "part {part} not exhausted");
    }
    let marked: Vec<u32> = seq[..k].to_vec();
    for (i, &v) in marked.iter().enumerate() {
        let expect = match i + 1 {
            p if p < t => p - 1,
            p if p == t => a_part,
            p => p - 2,
        };
        assert_eq!(host.part_of(v) as usize, expect, "marked edge part pattern");
    }
    let cycle = VertexSeq::tagged(&host, seq, WalkKind::EllCycle, params)
        .expect("k-partite construction must verify as an l-cycle");
    assert_eq!(cycle.len(), r);
    Ok((host, cycle, marked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks;

    #[test]
    fn weak_bound_instances() {
        let w = gen_weak_lower_bound(3, 2, 12).unwrap();
        assert_eq!(w.a.len(), 5);
        assert_eq!(w.delta_star, 6);
        assert_eq!(w.a, vec![7, 8, 9, 10, 11]);

        let w = gen_weak_lower_bound(3, 1, 8).unwrap();
        assert_eq!(w.a.len(), 5);

        // Boundary case |B| = k-1: only the one-A-vertex edges survive.
        let w = gen_weak_lower_bound(3, 1, 6).unwrap();
        assert_eq!(w.a.len(), 4);
        assert_eq!(w.delta_star, 1);
        assert_eq!(w.graph.edge_count(), 4);

        let w = gen_weak_lower_bound(4, 2, 12).unwrap();
        assert_eq!(w.a.len(), 4);

        // n = 6 is the smallest valid (3,2) instance: |A| = 3 = n - k.
        let w = gen_weak_lower_bound(3, 2, 6).unwrap();
        assert_eq!(w.a.len(), 3);
        assert_eq!(w.delta_star, 2);

        assert!(gen_weak_lower_bound(3, 1, 7).is_err(), "step must divide n");
        assert!(gen_weak_lower_bound(3, 2, 3).is_err(), "A would swallow too much");
    }

    #[test]
    fn strong_bound_instances() {
        let w = gen_strong_lower_bound(5, 9).unwrap();
        assert_eq!(w.a.len(), 4);
        assert_eq!(w.b.len(), 5);
        assert_eq!(w.delta_star, 3);
        assert_eq!(w.matched_pairs.as_deref(), Some(&[(5, 6), (7, 8)][..]));

        let w = gen_strong_lower_bound(3, 6).unwrap();
        assert_eq!(w.a.len(), 4);
        assert_eq!(w.delta_star, 2);

        assert!(gen_strong_lower_bound(5, 12).is_err()); // 12/3+1 odd
        assert!(gen_strong_lower_bound(4, 8).is_err()); // even k
    }

    #[test]
    fn loose_instances() {
        let w = gen_loose_3uniform(6).unwrap();
        assert_eq!(w.delta_star, 2);
        assert_eq!(w.a, vec![2, 3]);
        assert_eq!(w.graph.edge_count(), 8); // C(4,3) from each clique, no common triple
        let w = gen_loose_3uniform(10).unwrap();
        assert_eq!(w.delta_star, 4);
        assert!(gen_loose_3uniform(8).is_err());
    }

    #[test]
    fn kpartite_cycle_small_cases() {
        // (k=3, l=1): t=2, r=4 -> pattern B1 A B2 A.
        let p = compute_t(3, 1).unwrap();
        let (host, cycle, marked) = construct_kpartite_ell_cycle(p, 4).unwrap();
        assert_eq!(cycle.len(), 4);
        assert_eq!(marked.len(), 3);
        assert!(walks::verify_hamilton_ell_cycle(&host, cycle.vertices(), p));

        // (k=3, l=2): t=3, r=6 -> tight 6-cycle.
        let p = compute_t(3, 2).unwrap();
        let (host, cycle, _) = construct_kpartite_ell_cycle(p, 6).unwrap();
        assert!(walks::verify_hamilton_ell_cycle(&host, cycle.vertices(), p));

        // (k=4, l=2): t=4, r=12 -> |A| = 3, |B_i| = 3.
        let p = compute_t(4, 2).unwrap();
        let (host, cycle, marked) = construct_kpartite_ell_cycle(p, 12).unwrap();
        assert_eq!(host.parts()[3].len(), 3);
        assert_eq!(host.parts()[0].len(), 3);
        assert!(walks::verify_hamilton_ell_cycle(&host, cycle.vertices(), p));
        assert_eq!(&cycle.vertices()[..4], marked.as_slice());

        assert!(construct_kpartite_ell_cycle(p, 13).is_err());
    }

    #[test]
    fn kpartite_host_membership() {
        let host = KPartiteComplete::new(vec![vec![0, 1], vec![2], vec![3, 4]]).unwrap();
        assert!(host.has_edge(&[0, 2, 4]));
        assert!(host.has_edge(&[4, 0, 2]));
        assert!(!host.has_edge(&[0, 1, 2]));
        assert!(!host.has_edge(&[0, 2, 2]));
        assert!(host.supports(&[1, 4]));
        assert!(!host.supports(&[3, 4]));
        assert_eq!(host.edge_count(), 4);
        let g = host.materialize(100).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!(host.materialize(3).is_err());
    }
}

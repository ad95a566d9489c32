//! Bipartite Hall matchings, randomized matchings with per-subgraph
//! intersection guarantees, the sequential k-partite perfect matching, and
//! an exact directed Hamilton cycle solver for dense digraphs.

use num::{BigRational, One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cleaning::clean_relative_codeg;
use crate::hypergraph::Hypergraph;
use crate::util::{ratio, ratio_ge, ratio_int, seeded_rng, sub_seed, BitSet};
use crate::{Error, Result};

/// A bipartite graph on two disjoint id ranges: the left part X occupies
/// ids 0..nx and the right part Y occupies nx..nx+ny. Every edge crosses.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    nx: usize,
    ny: usize,
    adj: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    pub fn new(nx: usize, ny: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); nx + ny];
        for &(x, y) in edges {
            if (x as usize) >= nx || (y as usize) < nx || (y as usize) >= nx + ny {
                return Err(Error::Parameter(format!(
                    "edge ({x}, {y}) does not cross the parts 0..{nx} and {nx}..{}",
                    nx + ny
                )));
            }
            adj[x as usize].push(y);
            adj[y as usize].push(x);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(BipartiteGraph { nx, ny, adj })
    }

    pub fn complete(nx: usize, ny: usize) -> Self {
        let mut adj = vec![Vec::new(); nx + ny];
        for x in 0..nx {
            adj[x] = (nx as u32..(nx + ny) as u32).collect();
        }
        for y in nx..nx + ny {
            adj[y] = (0..nx as u32).collect();
        }
        BipartiteGraph { nx, ny, adj }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        (x as usize) < self.nx && self.adj[x as usize].binary_search(&y).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj[..self.nx].iter().map(|l| l.len()).sum()
    }

    /// Minimum degree over all vertices of both parts.
    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(|l| l.len()).min().unwrap_or(0)
    }

    /// True when every edge of `other` (same part sizes) is an edge here.
    pub fn contains_subgraph(&self, other: &BipartiteGraph) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (0..self.nx).all(|x| {
                other.adj[x].iter().all(|y| self.adj[x].binary_search(y).is_ok())
            })
    }
}

/// True when `pairs` is a perfect matching of the graph: every vertex of
/// both parts covered exactly once and every pair an edge.
pub fn verify_perfect_matching(g: &BipartiteGraph, pairs: &[(u32, u32)]) -> bool {
    if pairs.len() != g.nx() || g.nx() != g.ny() {
        return false;
    }
    let mut seen_x = BitSet::new(g.nx());
    let mut seen_y = BitSet::new(g.nx() + g.ny());
    for &(x, y) in pairs {
        if !g.has_edge(x, y) || seen_x.contains(x as usize) || seen_y.contains(y as usize) {
            return false;
        }
        seen_x.insert(x as usize);
        seen_y.insert(y as usize);
    }
    true
}

fn augment(
    g: &BipartiteGraph,
    x: usize,
    match_of_y: &mut [Option<u32>],
    visited: &mut BitSet,
) -> bool {
    for &y in g.neighbours(x as u32) {
        let yi = y as usize - g.nx();
        if visited.contains(yi) {
            continue;
        }
        visited.insert(yi);
        let free = match match_of_y[yi] {
            None => true,
            Some(x2) => augment(g, x2 as usize, match_of_y, visited),
        };
        if free {
            match_of_y[yi] = Some(x as u32);
            return true;
        }
    }
    false
}

/// A perfect matching via augmenting paths. Requires equal part sizes and
/// minimum degree at least half the part size, which guarantees success.
pub fn hall_perfect_matching(g: &BipartiteGraph) -> Result<Vec<(u32, u32)>> {
    if g.nx() != g.ny() {
        return Err(Error::Parameter(format!(
            "parts must have equal sizes, got {} and {}",
            g.nx(),
            g.ny()
        )));
    }
    let n = g.nx();
    if n == 0 {
        return Ok(Vec::new());
    }
    if 2 * g.min_degree() < n {
        return Err(Error::Parameter(format!(
            "minimum degree {} is below half the part size {n}",
            g.min_degree()
        )));
    }
    let mut match_of_y: Vec<Option<u32>> = vec![None; n];
    for x in 0..n {
        let mut visited = BitSet::new(n);
        let ok = augment(g, x, &mut match_of_y, &mut visited);
        assert!(ok, "matching must exist at minimum degree >= n/2");
    }
    let mut pairs: Vec<(u32, u32)> = match_of_y
        .iter()
        .enumerate()
        .map(|(yi, x)| (x.unwrap(), (yi + n) as u32))
        .collect();
    pairs.sort_unstable();
    debug_assert!(verify_perfect_matching(g, &pairs));
    Ok(pairs)
}

/// Outcome of the randomized matching: the matching itself, the exact
/// intersection count with each requested subgraph, and the random order
/// in which the left part was processed (first `greedy_len` greedily).
#[derive(Clone, Debug)]
pub struct RandomMatching {
    pub pairs: Vec<(u32, u32)>,
    pub counts: Vec<usize>,
    pub order: Vec<u32>,
    pub greedy_len: usize,
}

/// Random perfect matching meeting each near-complete subgraph in almost
/// all of its edges: matches a random (1-beta) fraction of the left part
/// to uniformly random unused neighbours, finishes the rest by augmenting
/// paths, then reports exact per-subgraph intersection counts.
pub fn random_matching_with_families(
    h: &BipartiteGraph,
    families: &[BipartiteGraph],
    beta: &BigRational,
    eps: &BigRational,
    seed: u64,
) -> Result<RandomMatching> {
    if h.nx() != h.ny() {
        return Err(Error::Parameter(format!(
            "parts must have equal sizes, got {} and {}",
            h.nx(),
            h.ny()
        )));
    }
    let n = h.nx();
    if n == 0 {
        return Ok(RandomMatching { pairs: Vec::new(), counts: vec![0; families.len()], order: Vec::new(), greedy_len: 0 });
    }
    if beta < &BigRational::zero() || beta > &BigRational::one() {
        return Err(Error::Parameter("beta must lie in [0, 1]".into()));
    }
    let need_deg = (BigRational::one() - eps) * ratio_int(n);
    if !ratio_ge(&ratio_int(h.min_degree()), &need_deg) {
        return Err(Error::Parameter(format!(
            "minimum degree {} is below the required (1 - eps) * {n}",
            h.min_degree()
        )));
    }
    let need_edges = (BigRational::one() - eps) * ratio_int(n * n);
    for (i, f) in families.iter().enumerate() {
        if !h.contains_subgraph(f) {
            return Err(Error::Parameter(format!("family member {i} is not a subgraph")));
        }
        if !ratio_ge(&ratio_int(f.edge_count()), &need_edges) {
            return Err(Error::Parameter(format!(
                "family member {i} has {} edges, below (1 - eps) * {n}^2",
                f.edge_count()
            )));
        }
    }

    let mut rng = seeded_rng("random-matching", seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);
    let m = ((BigRational::one() - beta) * ratio_int(n)).floor().to_integer();
    let m: usize = usize::try_from(&m).expect("greedy prefix fits in usize");

    let mut match_of_x: Vec<Option<u32>> = vec![None; n];
    let mut used_y = BitSet::new(n + n);
    for &x in &order[..m] {
        let free: Vec<u32> = h
            .neighbours(x)
            .iter()
            .copied()
            .filter(|&y| !used_y.contains(y as usize))
            .collect();
        if free.is_empty() {
            return Err(Error::SearchExhausted(format!(
                "greedy matching starved at left vertex {x}"
            )));
        }
        let y = free[rng.gen_range(0..free.len())];
        match_of_x[x as usize] = Some(y);
        used_y.insert(y as usize);
    }

    if m < n {
        let rest_x: Vec<u32> = order[m..].to_vec();
        let rest_y: Vec<u32> =
            (n..2 * n).filter(|&y| !used_y.contains(y)).map(|y| y as u32).collect();
        let r = rest_x.len();
        debug_assert_eq!(r, rest_y.len());
        let mut sub_edges: Vec<(u32, u32)> = Vec::new();
        let y_index: std::collections::BTreeMap<u32, usize> =
            rest_y.iter().enumerate().map(|(i, &y)| (y, i)).collect();
        for (xi, &x) in rest_x.iter().enumerate() {
            for &y in h.neighbours(x) {
                if let Some(&yi) = y_index.get(&y) {
                    sub_edges.push((xi as u32, (r + yi) as u32));
                }
            }
        }
        let sub = BipartiteGraph::new(r, r, &sub_edges)?;
        let finish = hall_perfect_matching(&sub)?;
        for &(xi, yi) in &finish {
            let x = rest_x[xi as usize];
            let y = rest_y[yi as usize - r];
            match_of_x[x as usize] = Some(y);
            used_y.insert(y as usize);
        }
    }

    let pairs: Vec<(u32, u32)> =
        (0..n as u32).map(|x| (x, match_of_x[x as usize].unwrap())).collect();
    debug_assert!(verify_perfect_matching(h, &pairs));
    let counts: Vec<usize> = families
        .iter()
        .map(|f| pairs.iter().filter(|&&(x, y)| f.has_edge(x, y)).count())
        .collect();
    Ok(RandomMatching { pairs, counts, order, greedy_len: m })
}

/// Validates a balanced partition of the vertex range into k parts crossed
/// by every edge; returns (part size, part id of each vertex).
fn validate_parts(h: &Hypergraph, parts: &[Vec<u32>]) -> Result<(usize, Vec<usize>)> {
    let k = h.k();
    if parts.len() != k {
        return Err(Error::Parameter(format!(
            "need {k} parts to match the uniformity, got {}",
            parts.len()
        )));
    }
    let size = parts[0].len();
    if size == 0 || parts.iter().any(|p| p.len() != size) {
        return Err(Error::Parameter("parts must be non-empty and of equal size".into()));
    }
    if size * k != h.n() {
        return Err(Error::Parameter(format!(
            "parts cover {} vertices but the graph has {}",
            size * k,
            h.n()
        )));
    }
    let mut part_of = vec![usize::MAX; h.n()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            if (v as usize) >= h.n() || part_of[v as usize] != usize::MAX {
                return Err(Error::Parameter(format!(
                    "vertex {v} is out of range or appears in two parts"
                )));
            }
            part_of[v as usize] = i;
        }
    }
    for e in h.edges() {
        let mut seen = vec![false; k];
        for &v in e {
            let p = part_of[v as usize];
            if seen[p] {
                return Err(Error::Parameter(format!(
                    "edge {e:?} has two vertices in part {p}"
                )));
            }
            seen[p] = true;
        }
    }
    Ok((size, part_of))
}

/// Exact check of the crossing co-degree condition: every supported set
/// disjoint from a part extends into that part in all but an eps fraction
/// of its vertices.
fn check_cross_codegree(
    h: &Hypergraph,
    parts: &[Vec<u32>],
    part_of: &[usize],
    size: usize,
    eps: &BigRational,
    label: &str,
) -> Result<()> {
    if h.has_isolated_vertices() {
        return Err(Error::Parameter(format!("{label} has isolated vertices")));
    }
    let k = h.k();
    let need = (BigRational::one() - eps) * ratio_int(size);
    for s in 1..k {
        for set in h.supported_sets(s) {
            let mut per_part = vec![0usize; k];
            for v in h.n1(&set) {
                per_part[part_of[v as usize]] += 1;
            }
            let mut touched = vec![false; k];
            for &v in &set {
                touched[part_of[v as usize]] = true;
            }
            for i in 0..k {
                if touched[i] {
                    continue;
                }
                if !ratio_ge(&ratio_int(per_part[i]), &need) {
                    return Err(Error::Parameter(format!(
                        "{label}: supported set {set:?} reaches only {} of {} vertices in part {i}",
                        per_part[i],
                        parts[i].len()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the sequential k-partite matching: a perfect matching of
/// edges (sorted k-sets), exact per-family intersection counts, and the
/// minimum auxiliary-graph degree observed at each level.
#[derive(Clone, Debug)]
pub struct KPartiteMatching {
    pub matching: Vec<Vec<u32>>,
    pub counts: Vec<usize>,
    pub level_min_degrees: Vec<usize>,
}

/// Perfect matching in a balanced k-partite k-graph whose supported sets
/// have near-full co-degree into every missed part, sharing almost all
/// edges with each family member satisfying the same condition. Builds the
/// matching one part at a time through auxiliary bipartite graphs, using
/// the randomized matching at every level.
pub fn kpartite_matching(
    h: &Hypergraph,
    parts: &[Vec<u32>],
    families: &[Hypergraph],
    eps: &BigRational,
    seed: u64,
) -> Result<KPartiteMatching> {
    let (size, part_of) = validate_parts(h, parts)?;
    let k = h.k();
    check_cross_codegree(h, parts, &part_of, size, eps, "host")?;
    for (fi, f) in families.iter().enumerate() {
        if f.n() != h.n() || f.k() != k {
            return Err(Error::Parameter(format!(
                "family member {fi} does not live on the host's vertex set"
            )));
        }
        for e in f.edges() {
            if !h.contains_edge(e) {
                return Err(Error::Parameter(format!(
                    "family member {fi} has the non-host edge {e:?}"
                )));
            }
        }
        check_cross_codegree(f, parts, &part_of, size, eps, &format!("family member {fi}"))?;
    }

    // Supported-set test per family, with the host itself tracked too so
    // each level's guarantees can be re-established for the next one.
    let mut tracked: Vec<&Hypergraph> = Vec::with_capacity(families.len() + 1);
    tracked.push(h);
    tracked.extend(families.iter());

    let mut matching: Vec<Vec<u32>> = parts[0].iter().map(|&v| vec![v]).collect();
    matching.sort();
    let mut gamma = eps.clone();
    let mut level_min_degrees: Vec<usize> = Vec::new();
    let half = ratio(1, 2);

    for level in 1..k {
        let part = &parts[level];
        let probe = |set: &[u32], extra: &[u32], g: &Hypergraph| -> bool {
            let mut s: Vec<u32> = set.to_vec();
            s.extend_from_slice(extra);
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
            if s.len() == g.k() {
                g.contains_edge(&s)
            } else {
                g.is_supported(&s)
            }
        };

        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (si, set) in matching.iter().enumerate() {
            for (xi, &x) in part.iter().enumerate() {
                if probe(set, &[x], h) {
                    edges.push((si as u32, (size + xi) as u32));
                }
            }
        }
        let aux = BipartiteGraph::new(size, size, &edges)?;
        level_min_degrees.push(aux.min_degree());
        let need = (BigRational::one() - &gamma) * ratio_int(size);
        if !ratio_ge(&ratio_int(aux.min_degree()), &need) {
            return Err(Error::Stage {
                stage: format!("k-partite level {}", level + 1),
                reason: format!(
                    "auxiliary bipartite degree {} fell below the scheduled (1 - {}) * {size}",
                    aux.min_degree(),
                    crate::util::format_ratio(&gamma)
                ),
            });
        }

        // Family graphs for this level: on the last level the criterion is
        // membership in each family; before it, joint support with every
        // vertex still to be matched keeps the recursion alive.
        let mut fam_graphs: Vec<BipartiteGraph> = Vec::new();
        if level + 1 < k {
            for g in &tracked {
                for later in &parts[level + 1..] {
                    for &v in later.iter() {
                        let mut fedges: Vec<(u32, u32)> = Vec::new();
                        for (si, set) in matching.iter().enumerate() {
                            for (xi, &x) in part.iter().enumerate() {
                                if probe(set, &[x, v], g) {
                                    fedges.push((si as u32, (size + xi) as u32));
                                }
                            }
                        }
                        fam_graphs.push(BipartiteGraph::new(size, size, &fedges)?);
                    }
                }
            }
        } else {
            for g in tracked[1..].iter() {
                let mut fedges: Vec<(u32, u32)> = Vec::new();
                for (si, set) in matching.iter().enumerate() {
                    for (xi, &x) in part.iter().enumerate() {
                        if probe(set, &[x], g) {
                            fedges.push((si as u32, (size + xi) as u32));
                        }
                    }
                }
                fam_graphs.push(BipartiteGraph::new(size, size, &fedges)?);
            }
        }

        let beta = {
            let b = ratio(2, 1) * &gamma;
            if b > half { half.clone() } else { b }
        };
        let eps_level = ratio(2, 1) * &gamma;
        let sub = sub_seed(&format!("kpartite-level-{}", level + 1), seed);
        let rm = random_matching_with_families(&aux, &fam_graphs, &beta, &eps_level, sub)
            .map_err(|e| Error::Stage {
                stage: format!("k-partite level {}", level + 1),
                reason: e.to_string(),
            })?;

        let mut next: Vec<Vec<u32>> = rm
            .pairs
            .iter()
            .map(|&(si, yi)| {
                let mut s = matching[si as usize].clone();
                s.push(part[yi as usize - size]);
                s.sort_unstable();
                s
            })
            .collect();
        next.sort();
        // Re-verify: perfect on the first (level+1) parts, every set
        // supported (an edge once complete).
        let mut covered = BitSet::new(h.n());
        for s in &next {
            assert_eq!(s.len(), level + 1);
            if s.len() == k {
                assert!(h.contains_edge(s), "completed set must be an edge");
            } else {
                assert!(h.is_supported(s), "partial set must be supported");
            }
            for &v in s {
                assert!(!covered.contains(v as usize), "matching must be disjoint");
                covered.insert(v as usize);
            }
        }
        for p in &parts[..=level] {
            for &v in p {
                assert!(covered.contains(v as usize), "matching must cover the used parts");
            }
        }
        matching = next;
        let next_gamma = ratio(8, 1) * &gamma;
        gamma = if next_gamma > BigRational::one() { BigRational::one() } else { next_gamma };
    }

    let counts: Vec<usize> = families
        .iter()
        .map(|f| matching.iter().filter(|e| f.contains_edge(e)).count())
        .collect();
    Ok(KPartiteMatching { matching, counts, level_min_degrees })
}

/// Variant accepting merely near-complete families: each family member is
/// first cleaned against the complete k-partite host so that the cleaned
/// subgraph satisfies the crossing co-degree condition, then the matching
/// runs against the cleaned family. Counts refer to the original members.
pub fn kpartite_matching_near_complete(
    h: &Hypergraph,
    parts: &[Vec<u32>],
    families: &[Hypergraph],
    eps: &BigRational,
    mu: &BigRational,
    seed: u64,
) -> Result<KPartiteMatching> {
    let (size, _) = validate_parts(h, parts)?;
    let k = h.k();
    let mut full_edges: Vec<Vec<u32>> = Vec::new();
    fn rec(parts: &[Vec<u32>], i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == parts.len() {
            let mut e = cur.clone();
            e.sort_unstable();
            out.push(e);
            return;
        }
        for &v in &parts[i] {
            cur.push(v);
            rec(parts, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(parts, 0, &mut cur, &mut full_edges);
    let complete = Hypergraph::new(h.n(), k, full_edges)?;

    let total = size.checked_pow(k as u32).ok_or_else(|| {
        Error::Resource("complete k-partite edge count overflows".into())
    })?;
    let need = (BigRational::one() - eps) * ratio_int(total);
    let mut cleaned: Vec<Hypergraph> = Vec::with_capacity(families.len());
    for (fi, f) in families.iter().enumerate() {
        if !ratio_ge(&ratio_int(f.edge_count()), &need) {
            return Err(Error::Parameter(format!(
                "family member {fi} has {} edges, below (1 - eps) * {total}",
                f.edge_count()
            )));
        }
        let report = clean_relative_codeg(&complete, f, mu, &ratio(1, k as i64))?;
        cleaned.push(report.output);
    }
    let eps_inner = {
        let scaled = ratio(k as i64, 1) * mu;
        if &scaled > eps { scaled } else { eps.clone() }
    };
    let mut result = kpartite_matching(h, parts, &cleaned, &eps_inner, seed)?;
    result.counts = families
        .iter()
        .map(|f| result.matching.iter().filter(|e| f.contains_edge(e)).count())
        .collect();
    Ok(result)
}

/// A simple digraph: no self-loops, no parallel arcs.
#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn new(n: usize, arcs: &[(u32, u32)]) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in arcs {
            if (u as usize) >= n || (v as usize) >= n {
                return Err(Error::Parameter(format!("arc ({u}, {v}) leaves the vertex range")));
            }
            if u == v {
                return Err(Error::Parameter(format!("self-loop at {u}")));
            }
            out[u as usize].push(v);
            inn[v as usize].push(u);
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Digraph { n, out, inn })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|l| l.len()).sum()
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        (u as usize) < self.n && self.out[u as usize].binary_search(&v).is_ok()
    }

    pub fn out_neighbours(&self, u: u32) -> &[u32] {
        &self.out[u as usize]
    }

    pub fn in_neighbours(&self, u: u32) -> &[u32] {
        &self.inn[u as usize]
    }

    /// Minimum over all vertices of the smaller of out- and in-degree.
    pub fn min_semi_degree(&self) -> usize {
        (0..self.n)
            .map(|v| self.out[v].len().min(self.inn[v].len()))
            .min()
            .unwrap_or(0)
    }
}

/// True when `cycle` visits every vertex exactly once along arcs and the
/// closing arc exists.
pub fn verify_directed_hamilton(d: &Digraph, cycle: &[u32]) -> bool {
    if cycle.len() != d.n() || d.n() < 2 {
        return false;
    }
    let mut seen = BitSet::new(d.n());
    for &v in cycle {
        if (v as usize) >= d.n() || seen.contains(v as usize) {
            return false;
        }
        seen.insert(v as usize);
    }
    (0..cycle.len()).all(|i| d.has_arc(cycle[i], cycle[(i + 1) % cycle.len()]))
}

/// Default size cap for unconditional exact search.
pub const EXACT_SIZE_CAP: usize = 16;

/// Greedy path growth with vertex insertion and random restarts; cheap and
/// almost always sufficient on dense digraphs.
fn hamilton_heuristic(d: &Digraph, restarts: usize) -> Option<Vec<u32>> {
    let n = d.n();
    let mut rng = seeded_rng("directed-hamilton-heuristic", 0);
    for _ in 0..restarts {
        let start = rng.gen_range(0..n) as u32;
        let mut path = vec![start];
        let mut used = BitSet::new(n);
        used.insert(start as usize);
        loop {
            let head = *path.last().unwrap();
            let free: Vec<u32> = d
                .out_neighbours(head)
                .iter()
                .copied()
                .filter(|&v| !used.contains(v as usize))
                .collect();
            if !free.is_empty() {
                let v = free[rng.gen_range(0..free.len())];
                path.push(v);
                used.insert(v as usize);
                continue;
            }
            // Try to insert an unused vertex between consecutive path
            // vertices; repeat while progress is made.
            let mut inserted = false;
            for v in 0..n as u32 {
                if used.contains(v as usize) {
                    continue;
                }
                if let Some(pos) = (0..path.len() - 1)
                    .find(|&i| d.has_arc(path[i], v) && d.has_arc(v, path[i + 1]))
                {
                    path.insert(pos + 1, v);
                    used.insert(v as usize);
                    inserted = true;
                    break;
                }
                if d.has_arc(v, path[0]) {
                    path.insert(0, v);
                    used.insert(v as usize);
                    inserted = true;
                    break;
                }
            }
            if inserted {
                continue;
            }
            break;
        }
        if path.len() == n && d.has_arc(*path.last().unwrap(), path[0]) {
            return Some(path);
        }
    }
    None
}

/// Exact reachability sweep over subsets (vertex count at most 16): finds
/// a Hamilton cycle or proves none exists.
fn hamilton_exact_small(d: &Digraph) -> Option<Vec<u32>> {
    let n = d.n();
    debug_assert!((2..=16).contains(&n));
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut dp = vec![0u16; 1usize << n];
    dp[1] = 1; // path = [0]
    for mask in 1u32..=full {
        if mask & 1 == 0 {
            continue;
        }
        let ends = dp[mask as usize];
        if ends == 0 {
            continue;
        }
        for v in 0..n {
            if ends & (1 << v) == 0 {
                continue;
            }
            for &w in d.out_neighbours(v as u32) {
                if mask & (1 << w) == 0 {
                    dp[(mask | (1 << w)) as usize] |= 1 << w;
                }
            }
        }
    }
    let ends = dp[full as usize];
    let last = (0..n).find(|&v| ends & (1 << v) != 0 && d.has_arc(v as u32, 0))?;
    // Reconstruct backwards.
    let mut cycle_rev = vec![last as u32];
    let mut mask = full;
    let mut cur = last;
    while cycle_rev.len() < n {
        let prev_mask = mask & !(1 << cur);
        let prev = (0..n)
            .find(|&u| {
                prev_mask & (1 << u) != 0
                    && dp[prev_mask as usize] & (1 << u) != 0
                    && d.has_arc(u as u32, cur as u32)
            })
            .expect("reachable end set must have a predecessor");
        cycle_rev.push(prev as u32);
        mask = prev_mask;
        cur = prev;
    }
    cycle_rev.reverse();
    Some(cycle_rev)
}

/// Depth-first exact search with degree pruning for larger instances where
/// existence is guaranteed; ordered by fewest onward choices.
fn hamilton_exact_dfs(d: &Digraph) -> Option<Vec<u32>> {
    let n = d.n();
    let mut path = vec![0u32];
    let mut used = BitSet::new(n);
    used.insert(0);
    fn rec(d: &Digraph, path: &mut Vec<u32>, used: &mut BitSet) -> bool {
        let n = d.n();
        if path.len() == n {
            return d.has_arc(*path.last().unwrap(), path[0]);
        }
        let head = *path.last().unwrap();
        // Prune: every unused vertex must retain an unused (or closing)
        // out-neighbour and an unused (or head) in-neighbour.
        for v in 0..n as u32 {
            if used.contains(v as usize) {
                continue;
            }
            let out_ok = d
                .out_neighbours(v)
                .iter()
                .any(|&w| !used.contains(w as usize) || w == path[0]);
            let in_ok = d
                .in_neighbours(v)
                .iter()
                .any(|&w| !used.contains(w as usize) || w == head);
            if !out_ok || !in_ok {
                return false;
            }
        }
        let mut cands: Vec<(usize, u32)> = d
            .out_neighbours(head)
            .iter()
            .copied()
            .filter(|&v| !used.contains(v as usize))
            .map(|v| {
                let onward = d
                    .out_neighbours(v)
                    .iter()
                    .filter(|&&w| !used.contains(w as usize))
                    .count();
                (onward, v)
            })
            .collect();
        cands.sort_unstable();
        for (_, v) in cands {
            path.push(v);
            used.insert(v as usize);
            if rec(d, path, used) {
                return true;
            }
            path.pop();
            used.remove(v as usize);
        }
        false
    }
    if rec(d, &mut path, &mut used) {
        Some(path)
    } else {
        None
    }
}

/// A directed Hamilton cycle, or a definitive answer that none exists.
/// Exact exhaustion is unconditional up to `cap` vertices (default 16);
/// above that the instance must have minimum semi-degree at least half the
/// order, which guarantees a cycle exists — a greedy heuristic runs first
/// and a pruned exact search backs it up.
pub fn directed_hamilton(d: &Digraph, cap: Option<usize>) -> Result<Option<Vec<u32>>> {
    let n = d.n();
    let cap = cap.unwrap_or(EXACT_SIZE_CAP).min(16);
    if n == 0 {
        return Err(Error::Parameter("digraph has no vertices".into()));
    }
    if n == 1 {
        return Ok(None);
    }
    if n <= cap {
        if let Some(c) = hamilton_heuristic(d, 30) {
            debug_assert!(verify_directed_hamilton(d, &c));
            return Ok(Some(c));
        }
        let res = hamilton_exact_small(d);
        if let Some(c) = &res {
            assert!(verify_directed_hamilton(d, c));
        }
        return Ok(res);
    }
    if 2 * d.min_semi_degree() < n {
        return Err(Error::Resource(format!(
            "exact search capped at {cap} vertices; {n} vertices allowed only when the minimum semi-degree reaches n/2"
        )));
    }
    if let Some(c) = hamilton_heuristic(d, 200) {
        debug_assert!(verify_directed_hamilton(d, &c));
        return Ok(Some(c));
    }
    let res = hamilton_exact_dfs(d);
    if let Some(c) = &res {
        assert!(verify_directed_hamilton(d, c));
        Ok(res)
    } else {
        Err(Error::SearchExhausted(
            "no Hamilton cycle found despite the semi-degree guarantee; the instance is degenerate".into(),
        ))
    }
}

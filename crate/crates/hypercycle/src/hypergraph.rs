//! Canonical k-uniform hypergraph representation with supported-set,
//! shadow, co-degree, blow-up, and extremal/non-extremal classification
//! primitives.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::util::{binomial, check_unit_interval, for_each_subset, ratio_int, BitSet};
use crate::{Error, Result};

/// Cap on exact subset enumeration in [`classify_non_extremal`]: the exact
/// definition is exponential, so enumeration is refused past this many
/// subsets and only the polynomial sufficient test is available.
pub const EXACT_ENUM_CAP: u128 = 10_000_000;

/// A k-uniform hypergraph on vertices `0..n` with a canonical (sorted,
/// duplicate-free) edge set. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<u32>>,
    /// Number of edges containing each supported subset (sizes 1..=k).
    subset_count: HashMap<Vec<u32>, u32>,
}

impl Hypergraph {
    /// Builds a hypergraph, canonicalizing edges (each sorted ascending, the
    /// edge list sorted lexicographically, duplicates merged).
    pub fn new(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("uniformity k must be at least 2, got {k}")));
        }
        let mut canon: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
        for (pos, e) in edges.into_iter().enumerate() {
            canon.push(canonical_edge(n, k, e, pos)?);
        }
        canon.sort();
        canon.dedup();
        Ok(Self::from_canonical(n, k, canon))
    }

    fn from_canonical(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Self {
        let mut subset_count: HashMap<Vec<u32>, u32> = HashMap::new();
        for e in &edges {
            for_each_nonempty_subset(e, |s| {
                *subset_count.entry(s.to_vec()).or_insert(0) += 1;
            });
        }
        Hypergraph { n, k, edges, subset_count }
    }

    /// The complete k-graph on n vertices.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("uniformity k must be at least 2, got {k}")));
        }
        let mut edges = Vec::new();
        crate::util::for_each_subset(n, k, |s| {
            edges.push(s.to_vec());
            true
        });
        Ok(Self::from_canonical(n, k, edges))
    }

    /// The edgeless k-graph on n vertices.
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge membership for a candidate in any order; false on repeats or
    /// out-of-range vertices.
    pub fn contains_edge(&self, e: &[u32]) -> bool {
        if e.len() != self.k {
            return false;
        }
        match sorted_distinct(e) {
            Some(s) => self.subset_count.get(&s).is_some_and(|_| s.len() == self.k),
            None => false,
        }
    }

    /// True iff some edge contains all of `s` (any order; repeats collapse).
    pub fn is_supported(&self, s: &[u32]) -> bool {
        match sorted_distinct(s) {
            Some(s) if !s.is_empty() && s.len() <= self.k => self.subset_count.contains_key(&s),
            _ => false,
        }
    }

    /// Number of edges containing `s` (0 when unsupported or oversized).
    pub fn degree(&self, s: &[u32]) -> usize {
        match sorted_distinct(s) {
            Some(s) if !s.is_empty() && s.len() <= self.k => {
                self.subset_count.get(&s).copied().unwrap_or(0) as usize
            }
            _ => 0,
        }
    }

    /// All supported i-sets, sorted lexicographically.
    pub fn supported_sets(&self, i: usize) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> =
            self.subset_count.keys().filter(|s| s.len() == i).cloned().collect();
        out.sort();
        out
    }

    /// Vertex neighbourhood of a supported set: all v outside `s` for which
    /// s + v is supported. Sorted ascending.
    pub fn n1(&self, s: &[u32]) -> Vec<u32> {
        let mut base = s.to_vec();
        base.sort_unstable();
        let mut out = Vec::new();
        let mut probe = Vec::with_capacity(base.len() + 1);
        for v in 0..self.n as u32 {
            if base.binary_search(&v).is_ok() {
                continue;
            }
            probe.clear();
            probe.extend_from_slice(&base);
            let pos = probe.partition_point(|&x| x < v);
            probe.insert(pos, v);
            if self.subset_count.contains_key(&probe) {
                out.push(v);
            }
        }
        out
    }

    /// Vertex co-degree d1 of a supported set.
    pub fn d1(&self, s: &[u32]) -> usize {
        self.n1(s).len()
    }

    /// Vertex co-degree restricted to the vertices of `within`.
    pub fn d1_in(&self, s: &[u32], within: &BitSet) -> usize {
        self.n1(s).into_iter().filter(|&v| within.contains(v as usize)).count()
    }

    /// Vertices not contained in any edge, sorted ascending.
    pub fn isolated_vertices(&self) -> Vec<u32> {
        let mut covered = BitSet::new(self.n);
        for e in &self.edges {
            for &v in e {
                covered.insert(v as usize);
            }
        }
        (0..self.n as u32).filter(|&v| !covered.contains(v as usize)).collect()
    }

    pub fn has_isolated_vertices(&self) -> bool {
        !self.isolated_vertices().is_empty()
    }

    /// Subgraph induced by a vertex set, on the same vertex universe.
    pub fn induced(&self, keep: &BitSet) -> Hypergraph {
        let edges: Vec<Vec<u32>> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| keep.contains(v as usize)))
            .cloned()
            .collect();
        Hypergraph::from_canonical(self.n, self.k, edges)
    }

    /// The complement: all k-sets of the same universe that are not edges.
    pub fn complement(&self) -> Result<Hypergraph> {
        let total = binomial(self.n, self.k);
        if total > EXACT_ENUM_CAP {
            return Err(Error::Resource(format!(
                "complement would enumerate {total} k-sets, above the cap of {EXACT_ENUM_CAP}"
            )));
        }
        let mut edges = Vec::with_capacity((total as usize).saturating_sub(self.edges.len()));
        for_each_subset(self.n, self.k, |s| {
            if !self.contains_edge(s) {
                edges.push(s.to_vec());
            }
            true
        });
        Ok(Hypergraph::from_canonical(self.n, self.k, edges))
    }

    /// Adjacency bitsets of the 2-shadow (supported pairs).
    pub fn pair_adjacency(&self) -> Vec<BitSet> {
        let mut adj = vec![BitSet::new(self.n); self.n];
        for (s, _) in self.subset_count.iter().filter(|(s, _)| s.len() == 2) {
            adj[s[0] as usize].insert(s[1] as usize);
            adj[s[1] as usize].insert(s[0] as usize);
        }
        adj
    }

    /// Number of supported pairs lying inside the given vertex set.
    pub fn supported_pairs_within(&self, set: &BitSet) -> usize {
        let adj = self.pair_adjacency();
        let mut count = 0;
        for v in set.iter() {
            count += adj[v].intersect_count(set);
        }
        count / 2
    }

    /// Serializes to the canonical JSON form.
    pub fn to_json_string(&self) -> String {
        let raw = RawHypergraph {
            k: self.k,
            n: self.n,
            edges: self.edges.clone(),
        };
        serde_json::to_string(&raw).expect("hypergraph serialization cannot fail")
    }

    /// Reads the JSON form, rejecting malformed edges with the offending
    /// position. Inner lists must be sorted ascending and duplicate-free.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawHypergraph = serde_json::from_str(s)?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (pos, e) in raw.edges.iter().enumerate() {
            let canon = canonical_edge(raw.n, raw.k, e.clone(), pos)?;
            if canon != *e {
                return Err(Error::Parameter(format!(
                    "edge at index {pos} is not sorted ascending"
                )));
            }
            edges.push(canon);
        }
        let before = edges.len();
        edges.sort();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::Parameter("edge list contains duplicates".into()));
        }
        Ok(Self::from_canonical(raw.n, raw.k, edges))
    }

    /// DOT rendering of the 2-shadow, for inspection.
    pub fn shadow_dot(&self) -> String {
        let mut out = String::from("graph shadow2 {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for s in self.supported_sets(2) {
            let _ = writeln!(out, "  {} -- {};", s[0], s[1]);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct RawHypergraph {
    k: usize,
    n: usize,
    edges: Vec<Vec<u32>>,
}

fn canonical_edge(n: usize, k: usize, mut e: Vec<u32>, pos: usize) -> Result<Vec<u32>> {
    if e.len() != k {
        return Err(Error::Parameter(format!(
            "edge at index {pos} has {} vertices, expected {k}",
            e.len()
        )));
    }
    e.sort_unstable();
    for w in e.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Parameter(format!(
                "edge at index {pos} repeats vertex {}",
                w[0]
            )));
        }
    }
    if let Some(&v) = e.last() {
        if v as usize >= n {
            return Err(Error::Parameter(format!(
                "edge at index {pos} mentions vertex {v} outside 0..{n}"
            )));
        }
    }
    Ok(e)
}

/// Sorted copy of `s` if its entries are distinct, None otherwise.
fn sorted_distinct(s: &[u32]) -> Option<Vec<u32>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(v)
    }
}

fn for_each_nonempty_subset(edge: &[u32], mut f: impl FnMut(&[u32])) {
    let k = edge.len();
    let mut buf = Vec::with_capacity(k);
    for mask in 1u32..(1 << k) {
        buf.clear();
        for (i, &v) in edge.iter().enumerate() {
            if mask >> i & 1 == 1 {
                buf.push(v);
            }
        }
        f(&buf);
    }
}

/// Edge-membership interface shared by explicit hypergraphs and implicit
/// families (for example complete k-partite graphs), so verifiers do not
/// force materialization of very large edge sets.
pub trait HostGraph {
    fn n(&self) -> usize;
    fn k(&self) -> usize;
    /// Membership for a candidate given in any order; false on repeats.
    fn has_edge(&self, e: &[u32]) -> bool;
    /// True iff some edge contains the given set (any order).
    fn supports(&self, s: &[u32]) -> bool;
}

impl HostGraph for Hypergraph {
    fn n(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.k
    }

    fn has_edge(&self, e: &[u32]) -> bool {
        self.contains_edge(e)
    }

    fn supports(&self, s: &[u32]) -> bool {
        self.is_supported(s)
    }
}

/// The (k, l) pair together with the derived period t = floor(k/(k-l))(k-l).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleParams {
    pub k: usize,
    pub ell: usize,
    pub t: usize,
}

/// Derives t from (k, l), validating the parameter ranges.
pub fn compute_t(k: usize, ell: usize) -> Result<CycleParams> {
    if k < 3 {
        return Err(Error::Parameter(format!("k must be at least 3, got {k}")));
    }
    if ell < 1 || ell > k - 1 {
        return Err(Error::Parameter(format!("l must lie in [1, {}], got {ell}", k - 1)));
    }
    let t = (k / (k - ell)) * (k - ell);
    debug_assert!(ell + 1 <= t && t <= k);
    debug_assert!(2 * t >= k + 1);
    debug_assert!(t >= 3 || (k, ell) == (3, 1));
    Ok(CycleParams { k, ell, t })
}

impl CycleParams {
    /// The window step k - l.
    pub fn step(&self) -> usize {
        self.k - self.ell
    }
}

/// Exact rational tolerances. The asymptotic hierarchy 1/n << eps << mu is
/// never defaulted; callers choose every value.
#[derive(Clone, Debug)]
pub struct ToleranceConfig {
    pub eps: BigRational,
    pub mu: BigRational,
    pub mu_prime: Option<BigRational>,
    pub gamma: Option<BigRational>,
    pub delta: Option<BigRational>,
    pub eps_a: Option<BigRational>,
    pub eps_km1: Option<BigRational>,
}

impl ToleranceConfig {
    pub fn new(eps: BigRational, mu: BigRational) -> Result<Self> {
        check_unit_interval("eps", &eps)?;
        check_unit_interval("mu", &mu)?;
        if mu <= eps {
            return Err(Error::Parameter("mu must exceed eps".into()));
        }
        Ok(ToleranceConfig {
            eps,
            mu,
            mu_prime: None,
            gamma: None,
            delta: None,
            eps_a: None,
            eps_km1: None,
        })
    }

    pub fn with_mu_prime(mut self, v: BigRational) -> Result<Self> {
        check_unit_interval("mu_prime", &v)?;
        self.mu_prime = Some(v);
        Ok(self)
    }

    pub fn with_gamma(mut self, v: BigRational) -> Result<Self> {
        check_unit_interval("gamma", &v)?;
        self.gamma = Some(v);
        Ok(self)
    }

    pub fn with_delta(mut self, v: BigRational) -> Result<Self> {
        check_unit_interval("delta", &v)?;
        self.delta = Some(v);
        Ok(self)
    }

    pub fn with_eps_a(mut self, v: BigRational) -> Result<Self> {
        check_unit_interval("eps_a", &v)?;
        self.eps_a = Some(v);
        Ok(self)
    }

    pub fn with_eps_km1(mut self, v: BigRational) -> Result<Self> {
        check_unit_interval("eps_km1", &v)?;
        self.eps_km1 = Some(v);
        Ok(self)
    }
}

/// Minimum supported co-degree: the minimum over supported (k-1)-sets of the
/// number of edges containing the set. None (undefined) for edgeless graphs,
/// where the minimum ranges over an empty family.
pub fn supported_codegree(g: &Hypergraph) -> Option<usize> {
    g.subset_count
        .iter()
        .filter(|(s, _)| s.len() == g.k() - 1)
        .map(|(_, &c)| c as usize)
        .min()
}

/// The i-shadow: the i-graph on V(G) whose edges are the supported i-sets.
pub fn shadow(g: &Hypergraph, i: usize) -> Result<Hypergraph> {
    if i < 1 || i >= g.k() {
        return Err(Error::Parameter(format!("shadow order {i} outside [1, {}]", g.k() - 1)));
    }
    Ok(Hypergraph::from_canonical(g.n(), i, g.supported_sets(i)))
}

/// Vertex neighbourhood of a supported set; distinguishes "unsupported"
/// (a domain error) from an empty neighbourhood.
pub fn vertex_neighbourhood(g: &Hypergraph, s: &[u32]) -> Result<Vec<u32>> {
    if s.is_empty() || s.len() > g.k() - 1 {
        return Err(Error::Parameter(format!(
            "set size {} outside [1, {}]",
            s.len(),
            g.k() - 1
        )));
    }
    if !g.is_supported(s) {
        return Err(Error::Domain("set is not supported".into()));
    }
    Ok(g.n1(s))
}

/// Result of the strong-independent-set search.
#[derive(Clone, Debug)]
pub struct StrongIndependentSet {
    pub size: usize,
    pub witness: Vec<u32>,
    /// True when the size is the exact maximum; false for the greedy bound.
    pub exact: bool,
}

/// Maximum (or greedy lower bound) strong independent set: a vertex set
/// meeting every edge in at most one vertex, equivalently an independent set
/// in the 2-shadow. Exact branch-and-bound when n <= exact_limit. The
/// witness is always verified.
pub fn max_strong_independent_set(g: &Hypergraph, exact_limit: usize) -> StrongIndependentSet {
    let n = g.n();
    let adj = g.pair_adjacency();
    let result = if n <= exact_limit {
        let mut best: Vec<usize> = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        let all = BitSet::from_iter(n, 0..n);
        branch_max_independent(&adj, all, &mut chosen, &mut best);
        StrongIndependentSet {
            size: best.len(),
            witness: best.into_iter().map(|v| v as u32).collect(),
            exact: true,
        }
    } else {
        let mut remaining = BitSet::from_iter(n, 0..n);
        let mut witness = Vec::new();
        while let Some(v) = remaining
            .iter()
            .min_by_key(|&v| (adj[v].intersect_count(&remaining), v))
        {
            witness.push(v as u32);
            remaining.remove(v);
            remaining.difference_with(&adj[v]);
        }
        witness.sort_unstable();
        StrongIndependentSet { size: witness.len(), witness, exact: false }
    };
    debug_assert!(verify_strong_independent(g, &result.witness));
    result
}

/// Checks that no two witness vertices lie in a common edge.
pub fn verify_strong_independent(g: &Hypergraph, set: &[u32]) -> bool {
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            if g.is_supported(&[u, v]) {
                return false;
            }
        }
    }
    true
}

fn branch_max_independent(
    adj: &[BitSet],
    candidates: BitSet,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    if chosen.len() + candidates.count() <= best.len() {
        return;
    }
    let Some(v) = candidates.iter().next() else {
        if chosen.len() > best.len() {
            *best = chosen.clone();
            best.sort_unstable();
        }
        return;
    };
    // Include v.
    let mut with_v = candidates.clone();
    with_v.remove(v);
    with_v.difference_with(&adj[v]);
    chosen.push(v);
    branch_max_independent(adj, with_v, chosen, best);
    chosen.pop();
    // Exclude v.
    let mut without_v = candidates;
    without_v.remove(v);
    branch_max_independent(adj, without_v, chosen, best);
}

/// Purely positional check: with positions 1..r cyclic, every window of k
/// consecutive positions starting at an index congruent to 1 mod (k-l) must
/// contain exactly one position divisible by t.
pub fn check_special_vertex_property(w: &[u32], params: CycleParams) -> Result<bool> {
    let r = w.len();
    let step = params.step();
    if r == 0 || r % step != 0 {
        return Err(Error::Parameter(format!(
            "sequence length {r} not a positive multiple of k-l = {step}"
        )));
    }
    for s in 0..r / step {
        let start = s * step; // 0-based
        let mut hits = 0;
        for off in 0..params.k {
            let pos_one_based = (start + off) % r + 1;
            if pos_one_based % params.t == 0 {
                hits += 1;
            }
        }
        if hits != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classification mode for membership in the non-extremal family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyMode {
    /// Enumerates all floor(n/t)-subsets; refused above [`EXACT_ENUM_CAP`].
    Exact,
    /// The polynomial per-vertex surrogate; can only certify membership.
    Sufficient,
}

/// Verdict of [`classify_non_extremal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonExtremalVerdict {
    Member,
    NonMember { reason: String, witness: Option<Vec<u32>> },
    Inconclusive { reason: String },
}

/// Membership test for the non-extremal family: n divisible by k-l, no
/// isolated vertices, supported co-degree at least (1-1/t-eps)n, and every
/// floor(n/t)-set containing at least mu n^2 supported pairs. The sufficient
/// mode instead applies the per-vertex test (d1(v) large, or the complement
/// of the vertex neighbourhood rich in supported pairs), which certifies the
/// pair condition at level mu_prime.
pub fn classify_non_extremal(
    g: &Hypergraph,
    params: CycleParams,
    tol: &ToleranceConfig,
    mode: ClassifyMode,
) -> Result<NonExtremalVerdict> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Parameter("empty vertex set".into()));
    }
    if n % params.step() != 0 {
        return Ok(NonExtremalVerdict::NonMember {
            reason: format!("n = {n} is not divisible by k-l = {}", params.step()),
            witness: None,
        });
    }
    let isolated = g.isolated_vertices();
    if !isolated.is_empty() {
        return Ok(NonExtremalVerdict::NonMember {
            reason: format!("isolated vertex {}", isolated[0]),
            witness: None,
        });
    }
    let delta = supported_codegree(g).expect("graph with no isolated vertices has an edge");
    let n_rat = ratio_int(n);
    let one = BigRational::one();
    let inv_t = BigRational::new(BigInt::one(), BigInt::from(params.t));
    let degree_floor = (&one - &inv_t - &tol.eps) * &n_rat;
    if ratio_int(delta) < degree_floor {
        return Ok(NonExtremalVerdict::NonMember {
            reason: format!("supported co-degree {delta} is below (1-1/t-eps)n"),
            witness: None,
        });
    }
    let subset_size = n / params.t;
    match mode {
        ClassifyMode::Exact => {
            if binomial(n, subset_size) > EXACT_ENUM_CAP {
                return Err(Error::Resource(format!(
                    "C({n},{subset_size}) exceeds the exact enumeration cap"
                )));
            }
            let threshold = &tol.mu * &n_rat * &n_rat;
            let adj = g.pair_adjacency();
            let mut witness: Option<(usize, Vec<u32>)> = None;
            enumerate_min_pairs(&adj, n, subset_size, &mut witness, &threshold);
            match witness {
                None => Ok(NonExtremalVerdict::Member),
                Some((pairs, set)) => Ok(NonExtremalVerdict::NonMember {
                    reason: format!(
                        "a {subset_size}-set contains only {pairs} supported pairs, below mu n^2"
                    ),
                    witness: Some(set),
                }),
            }
        }
        ClassifyMode::Sufficient => {
            let mu_prime = tol.mu_prime.as_ref().ok_or_else(|| {
                Error::Parameter("sufficient mode requires mu_prime in the tolerances".into())
            })?;
            let t_rat = ratio_int(params.t);
            let degree_branch =
                (&one - &inv_t + BigRational::from_integer(BigInt::from(3)) * mu_prime * &t_rat)
                    * &n_rat;
            let pair_branch = &tol.mu * &n_rat * &n_rat;
            for v in 0..n as u32 {
                let nbhd = g.n1(&[v]);
                if ratio_int(nbhd.len()) >= degree_branch {
                    continue;
                }
                let mut complement = BitSet::from_iter(n, 0..n);
                for u in nbhd {
                    complement.remove(u as usize);
                }
                let pairs = g.supported_pairs_within(&complement);
                if ratio_int(pairs) >= pair_branch {
                    continue;
                }
                return Ok(NonExtremalVerdict::Inconclusive {
                    reason: format!(
                        "vertex {v} fails both branches of the per-vertex test"
                    ),
                });
            }
            Ok(NonExtremalVerdict::Member)
        }
    }
}

/// Recursively enumerates subsets of the given size, tracking the supported
/// pair count incrementally; records the first subset falling below the
/// threshold and stops.
fn enumerate_min_pairs(
    adj: &[BitSet],
    n: usize,
    size: usize,
    witness: &mut Option<(usize, Vec<u32>)>,
    threshold: &BigRational,
) {
    fn rec(
        adj: &[BitSet],
        n: usize,
        size: usize,
        start: usize,
        cur: &mut Vec<u32>,
        cur_mask: &mut BitSet,
        pairs: usize,
        witness: &mut Option<(usize, Vec<u32>)>,
        threshold: &BigRational,
    ) -> bool {
        if cur.len() == size {
            if ratio_int(pairs) < *threshold {
                *witness = Some((pairs, cur.clone()));
                return false;
            }
            return true;
        }
        let remaining = size - cur.len();
        for v in start..=n.saturating_sub(remaining) {
            let added = adj[v].intersect_count(cur_mask);
            cur.push(v as u32);
            cur_mask.insert(v);
            let ok = rec(adj, n, size, v + 1, cur, cur_mask, pairs + added, witness, threshold);
            cur_mask.remove(v);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    if size == 0 {
        return;
    }
    let mut cur = Vec::with_capacity(size);
    let mut mask = BitSet::new(n);
    rec(adj, n, size, 0, &mut cur, &mut mask, 0, witness, threshold);
}

/// Validity test of the counting primitives: every supported set S with
/// |S| <= k-1 must satisfy d(S) (k-|S|)! >= delta*^(k-|S|), exactly.
pub fn codeg_to_deg_bound_check(g: &Hypergraph) -> Result<bool> {
    let Some(delta) = supported_codegree(g) else {
        return Err(Error::Parameter("graph has no edges".into()));
    };
    let delta = BigInt::from(delta);
    for i in 1..g.k() {
        let fact = crate::util::factorial_big(g.k() - i);
        let bound = num::pow::pow(delta.clone(), g.k() - i);
        for s in g.supported_sets(i) {
            let d = BigInt::from(g.degree(&s));
            if d * &fact < bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A blow-up of a base graph: each base vertex v becomes an independent set
/// B_v, each base edge the complete k-partite k-graph across its parts.
#[derive(Clone, Debug)]
pub struct BlowupSpec {
    pub base: Hypergraph,
    /// Parts indexed by base vertex id; contiguous ascending id blocks.
    pub parts: Vec<Vec<u32>>,
    pub gamma: BigRational,
    pub m: usize,
}

impl BlowupSpec {
    /// Total number of blow-up vertices.
    pub fn total(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    /// Projection from blow-up vertices to base vertices.
    pub fn phi(&self, v: u32) -> u32 {
        for (base_v, part) in self.parts.iter().enumerate() {
            if part.binary_search(&v).is_ok() {
                return base_v as u32;
            }
        }
        panic!("vertex {v} outside the blow-up");
    }

    fn part_in_interval(&self, idx: usize, gamma: &BigRational, m: usize) -> bool {
        let sz = ratio_int(self.parts[idx].len());
        let m_rat = ratio_int(m);
        let lo = (BigRational::one() - gamma) * &m_rat;
        let hi = (BigRational::one() + gamma) * &m_rat;
        sz >= lo && sz <= hi
    }

    /// All parts within [(1-gamma)m, (1+gamma)m].
    pub fn is_regular(&self, gamma: &BigRational, m: usize) -> bool {
        (0..self.parts.len()).all(|i| self.part_in_interval(i, gamma, m))
    }

    /// All but at most one part in the interval, the exception of size 1.
    pub fn is_nearly_regular(&self, gamma: &BigRational, m: usize) -> bool {
        let off: Vec<usize> =
            (0..self.parts.len()).filter(|&i| !self.part_in_interval(i, gamma, m)).collect();
        match off.as_slice() {
            [] => true,
            [i] => self.parts[*i].len() == 1,
            _ => false,
        }
    }
}

/// Implicit host-graph view of a blow-up: a tuple is an edge exactly when
/// its projection to the base is an edge (which forces distinct parts, and
/// hence distinct vertices).
pub struct BlowupHost<'a> {
    pub spec: &'a BlowupSpec,
}

impl<'a> BlowupHost<'a> {
    fn project(&self, vs: &[u32]) -> Option<Vec<u32>> {
        let mut out = Vec::with_capacity(vs.len());
        for &v in vs {
            if (v as usize) >= self.spec.total() {
                return None;
            }
            out.push(self.spec.phi(v));
        }
        Some(out)
    }
}

impl<'a> HostGraph for BlowupHost<'a> {
    fn n(&self) -> usize {
        self.spec.total()
    }

    fn k(&self) -> usize {
        self.spec.base.k()
    }

    fn has_edge(&self, vs: &[u32]) -> bool {
        if vs.len() != self.k() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        if !vs.iter().all(|v| seen.insert(*v)) {
            return false;
        }
        match self.project(vs) {
            Some(base) => {
                let mut sorted = base.clone();
                sorted.sort_unstable();
                sorted.windows(2).all(|p| p[0] != p[1]) && self.spec.base.contains_edge(&base)
            }
            None => false,
        }
    }

    fn supports(&self, vs: &[u32]) -> bool {
        if vs.is_empty() || vs.len() > self.k() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        if !vs.iter().all(|v| seen.insert(*v)) {
            return false;
        }
        match self.project(vs) {
            Some(mut base) => {
                base.sort_unstable();
                base.windows(2).all(|p| p[0] != p[1]) && self.spec.base.is_supported(&base)
            }
            None => false,
        }
    }
}

/// Builds the blow-up with the given part sizes (indexed by base vertex).
/// Parts occupy contiguous ascending id blocks in base-vertex order.
pub fn build_blowup(f: &Hypergraph, sizes: &[usize]) -> Result<(Hypergraph, BlowupSpec)> {
    if sizes.len() != f.n() {
        return Err(Error::Parameter(format!(
            "need {} part sizes, got {}",
            f.n(),
            sizes.len()
        )));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::Parameter("part sizes must be positive".into()));
    }
    let mut parts: Vec<Vec<u32>> = Vec::with_capacity(f.n());
    let mut next = 0u32;
    for &s in sizes {
        parts.push((next..next + s as u32).collect());
        next += s as u32;
    }
    let total = next as usize;
    let mut edges = Vec::new();
    for e in f.edges() {
        let tuple_parts: Vec<&Vec<u32>> = e.iter().map(|&v| &parts[v as usize]).collect();
        let mut stack = vec![0usize; e.len()];
        let mut depth = 0usize;
        let mut cur = Vec::with_capacity(e.len());
        loop {
            if depth == e.len() {
                edges.push(cur.clone());
                depth -= 1;
                cur.pop();
                stack[depth] += 1;
                continue;
            }
            if stack[depth] == tuple_parts[depth].len() {
                stack[depth] = 0;
                if depth == 0 {
                    break;
                }
                depth -= 1;
                cur.pop();
                stack[depth] += 1;
                continue;
            }
            cur.push(tuple_parts[depth][stack[depth]]);
            depth += 1;
        }
    }
    let graph = Hypergraph::new(total, f.k(), edges)?;
    let m = sizes.iter().copied().max().unwrap_or(1);
    let spec = BlowupSpec {
        base: f.clone(),
        parts,
        gamma: BigRational::zero(),
        m,
    };
    Ok((graph, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::ratio;

    fn k5_3() -> Hypergraph {
        Hypergraph::complete(5, 3).unwrap()
    }

    #[test]
    fn compute_t_examples() {
        assert_eq!(compute_t(3, 2).unwrap().t, 3);
        assert_eq!(compute_t(3, 1).unwrap().t, 2);
        assert_eq!(compute_t(5, 2).unwrap().t, 3);
        assert_eq!(compute_t(4, 2).unwrap().t, 4);
        assert_eq!(compute_t(6, 3).unwrap().t, 6);
        assert!(compute_t(2, 1).is_err());
        assert!(compute_t(4, 0).is_err());
        assert!(compute_t(4, 4).is_err());
    }

    #[test]
    fn t_invariants_sweep() {
        for k in 3..=12 {
            for ell in 1..k {
                let p = compute_t(k, ell).unwrap();
                assert!(ell + 1 <= p.t && p.t <= k, "(k,l)=({k},{ell})");
                assert!(2 * p.t >= k + 1);
                assert!(p.t >= 3 || (k, ell) == (3, 1));
            }
        }
    }

    #[test]
    fn shadow_of_complete_graph_is_complete() {
        let g = k5_3();
        let s = shadow(&g, 2).unwrap();
        assert_eq!(s.edge_count(), 10);
        assert!(shadow(&g, 0).is_err());
        assert!(shadow(&g, 3).is_err());
        let empty = Hypergraph::empty(5, 3).unwrap();
        assert_eq!(shadow(&empty, 2).unwrap().edge_count(), 0);
    }

    #[test]
    fn codegree_of_complete_graphs() {
        for k in 3..=5 {
            for n in k + 1..=9 {
                let g = Hypergraph::complete(n, k).unwrap();
                assert_eq!(supported_codegree(&g), Some(n - k + 1), "n={n} k={k}");
            }
        }
        assert_eq!(supported_codegree(&Hypergraph::empty(5, 3).unwrap()), None);
    }

    #[test]
    fn neighbourhood_and_errors() {
        let g = k5_3();
        assert_eq!(vertex_neighbourhood(&g, &[0, 1]).unwrap(), vec![2, 3, 4]);
        let sparse = Hypergraph::new(5, 3, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            vertex_neighbourhood(&sparse, &[3, 4]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            vertex_neighbourhood(&g, &[0, 1, 2]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn strong_independent_set_basics() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let r = max_strong_independent_set(&g, 16);
        assert!(r.exact);
        assert_eq!(r.size, 1);

        let empty = Hypergraph::empty(7, 3).unwrap();
        let r = max_strong_independent_set(&empty, 16);
        assert_eq!(r.size, 7);

        // Greedy mode still produces a verified witness.
        let r = max_strong_independent_set(&g, 2);
        assert!(!r.exact);
        assert!(r.size >= 1);
        assert!(verify_strong_independent(&g, &r.witness));
    }

    #[test]
    fn special_vertex_property_positionally() {
        let p32 = compute_t(3, 2).unwrap();
        assert!(check_special_vertex_property(&[0; 6], p32).unwrap());
        assert!(check_special_vertex_property(&[0; 9], p32).unwrap());
        // Length 4 is divisible by k-l = 1 but not by t, so a window misses.
        assert!(!check_special_vertex_property(&[0; 4], p32).unwrap());
        let p31 = compute_t(3, 1).unwrap();
        assert!(check_special_vertex_property(&[0; 6], p31).unwrap());
        assert!(check_special_vertex_property(&[0; 5], p31).is_err());
    }

    #[test]
    fn classification_on_complete_graph() {
        let g = Hypergraph::complete(12, 3).unwrap();
        let params = compute_t(3, 2).unwrap();
        let tol = ToleranceConfig::new(ratio(1, 200), ratio(1, 100)).unwrap();
        let v = classify_non_extremal(&g, params, &tol, ClassifyMode::Exact).unwrap();
        assert_eq!(v, NonExtremalVerdict::Member);
        let tol = tol.with_mu_prime(ratio(1, 1000)).unwrap();
        let v = classify_non_extremal(&g, params, &tol, ClassifyMode::Sufficient).unwrap();
        assert_eq!(v, NonExtremalVerdict::Member);
    }

    #[test]
    fn codeg_to_deg_holds_on_examples() {
        assert!(codeg_to_deg_bound_check(&Hypergraph::complete(6, 3).unwrap()).unwrap());
        let single = Hypergraph::new(5, 3, vec![vec![0, 1, 2]]).unwrap();
        assert!(codeg_to_deg_bound_check(&single).unwrap());
        assert!(codeg_to_deg_bound_check(&Hypergraph::empty(4, 3).unwrap()).is_err());
    }

    #[test]
    fn blowup_of_single_edge() {
        let f = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let (g, spec) = build_blowup(&f, &[2, 2, 2]).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 8);
        assert_eq!(spec.phi(0), 0);
        assert_eq!(spec.phi(5), 2);
        assert!(spec.is_regular(&ratio(0, 1), 2));

        let (iso, _) = build_blowup(&f, &[1, 1, 1]).unwrap();
        assert_eq!(iso.edge_count(), 1);

        let k4 = Hypergraph::complete(4, 3).unwrap();
        let (g, _) = build_blowup(&k4, &[3, 3, 3, 3]).unwrap();
        assert_eq!(g.edge_count(), 4 * 27);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let g = k5_3();
        let s = g.to_json_string();
        let back = Hypergraph::from_json_str(&s).unwrap();
        assert_eq!(g, back);

        let bad = r#"{"k":3,"n":5,"edges":[[0,1,2],[2,1,3]]}"#;
        let err = Hypergraph::from_json_str(bad).unwrap_err();
        assert!(err.to_string().contains("index 1"));

        let dup = r#"{"k":3,"n":5,"edges":[[0,1,2],[0,1,2]]}"#;
        assert!(Hypergraph::from_json_str(dup).is_err());

        let oob = r#"{"k":3,"n":5,"edges":[[0,1,7]]}"#;
        let err = Hypergraph::from_json_str(oob).unwrap_err();
        assert!(err.to_string().contains("vertex 7"));
    }

    #[test]
    fn dot_export_mentions_pairs() {
        let g = Hypergraph::new(4, 3, vec![vec![0, 1, 2]]).unwrap();
        let dot = g.shadow_dot();
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("1 -- 2;"));
        assert!(!dot.contains("2 -- 3;"));
    }
}

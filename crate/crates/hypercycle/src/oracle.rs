//! Exact brute-force Hamilton l-cycle and l-path existence oracle for small
//! instances; ground truth for all non-existence claims.
//!
//! The search backtracks over positions in increasing order, pruning every
//! partially-filled designated window whose placed vertices are no longer a
//! supported set. Cyclic symmetry is broken by pinning vertex 0 to one
//! position per residue class modulo k-l (rotations of a valid cycle by
//! multiples of k-l stay valid, so one branch per residue is complete), and
//! direction reversal is eliminated exactly when (k-l) | k, which is when
//! reversal preserves the window pattern.

use std::time::{Duration, Instant};

use crate::hypergraph::{max_strong_independent_set, CycleParams, HostGraph, Hypergraph};
use crate::walks;
use crate::{Error, Result};

/// Hard cap on oracle instance size (vertex masks are u128).
const MAX_ORACLE_N: usize = 128;

/// Node/time limits plus the symmetry-breaking toggle.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
    pub symmetry_breaking: bool,
}

impl OracleBudget {
    pub fn new(node_limit: u64, time_limit: Duration) -> Result<Self> {
        if node_limit == 0 || time_limit.is_zero() {
            return Err(Error::Parameter("oracle budget limits must be positive".into()));
        }
        Ok(OracleBudget { node_limit, time_limit, symmetry_breaking: true })
    }

    /// Ample limits for desk-scale instances.
    pub fn generous() -> Self {
        OracleBudget {
            node_limit: 2_000_000_000,
            time_limit: Duration::from_secs(600),
            symmetry_breaking: true,
        }
    }

    pub fn without_symmetry_breaking(mut self) -> Self {
        self.symmetry_breaking = false;
        self
    }
}

/// One of three definitive verdicts; budget exhaustion is never conflated
/// with non-existence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Found(Vec<u32>),
    Absent,
    Exhausted { nodes: u64 },
}

impl OracleOutcome {
    pub fn found(&self) -> Option<&[u32]> {
        match self {
            OracleOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
}

struct SearchCtx<'a> {
    g: &'a Hypergraph,
    r: usize,
    /// Window position lists; each window must become an edge.
    windows: Vec<Vec<usize>>,
    /// Indices into `windows` touching each position.
    windows_at: Vec<Vec<usize>>,
    placed: Vec<u32>,
    filled: Vec<bool>,
    used: u128,
    nodes: u64,
    node_limit: u64,
    deadline: Instant,
    exhausted: bool,
    /// Direction tiebreak: require placed[lo_pos] < placed[hi_pos] once both
    /// are filled (reflection elimination within an aligned branch).
    tiebreak: Option<(usize, usize)>,
}

impl<'a> SearchCtx<'a> {
    fn new(
        g: &'a Hypergraph,
        r: usize,
        windows: Vec<Vec<usize>>,
        budget: &OracleBudget,
        deadline: Instant,
        nodes_used: u64,
    ) -> Self {
        let mut windows_at = vec![Vec::new(); r];
        for (wi, w) in windows.iter().enumerate() {
            for &p in w {
                windows_at[p].push(wi);
            }
        }
        SearchCtx {
            g,
            r,
            windows,
            windows_at,
            placed: vec![u32::MAX; r],
            filled: vec![false; r],
            used: 0,
            nodes: nodes_used,
            node_limit: budget.node_limit,
            deadline,
            exhausted: false,
            tiebreak: None,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes >= self.node_limit {
            self.exhausted = true;
            return false;
        }
        if self.nodes % 1024 == 0 && Instant::now() >= self.deadline {
            self.exhausted = true;
            return false;
        }
        true
    }

    /// Places v at position p and checks every window containing p:
    /// fully-filled windows must be edges, partial ones supported sets.
    fn place_ok(&mut self, p: usize, v: u32) -> bool {
        self.placed[p] = v;
        self.filled[p] = true;
        self.used |= 1u128 << v;
        let mut buf: Vec<u32> = Vec::with_capacity(self.g.k());
        for wi in 0..self.windows_at[p].len() {
            let w = self.windows_at[p][wi];
            buf.clear();
            let mut full = true;
            for &q in &self.windows[w] {
                if self.filled[q] {
                    buf.push(self.placed[q]);
                } else {
                    full = false;
                }
            }
            let ok = if full { self.g.has_edge(&buf) } else { self.g.is_supported(&buf) };
            if !ok {
                return false;
            }
        }
        if let Some((lo, hi)) = self.tiebreak {
            if self.filled[lo] && self.filled[hi] && self.placed[lo] >= self.placed[hi] {
                return false;
            }
        }
        true
    }

    fn unplace(&mut self, p: usize, v: u32) {
        self.placed[p] = u32::MAX;
        self.filled[p] = false;
        self.used &= !(1u128 << v);
    }

    /// DFS over unfilled positions in increasing order. Returns the full
    /// assignment on success.
    fn dfs(&mut self, next: usize) -> Option<Vec<u32>> {
        let mut p = next;
        while p < self.r && self.filled[p] {
            p += 1;
        }
        if p == self.r {
            return Some(self.placed.clone());
        }
        for v in 0..self.g.n() as u32 {
            if self.used >> v & 1 == 1 {
                continue;
            }
            if !self.tick() {
                return None;
            }
            if self.place_ok(p, v) {
                if let Some(found) = self.dfs(p + 1) {
                    return Some(found);
                }
                if self.exhausted {
                    self.unplace(p, v);
                    return None;
                }
            }
            self.unplace(p, v);
        }
        None
    }
}

fn cycle_windows(r: usize, k: usize, step: usize) -> Vec<Vec<usize>> {
    (0..r / step)
        .map(|s| (0..k).map(|o| (s * step + o) % r).collect())
        .collect()
}

fn path_windows(r: usize, k: usize, step: usize) -> Vec<Vec<usize>> {
    (0..=(r - k) / step)
        .map(|s| (0..k).map(|o| s * step + o).collect())
        .collect()
}

/// Searches for a Hamilton l-cycle. Returns the cycle, a definitive
/// non-existence verdict, or budget exhaustion.
pub fn hamilton_ell_cycle(
    g: &Hypergraph,
    params: CycleParams,
    budget: &OracleBudget,
) -> Result<OracleOutcome> {
    let n = g.n();
    let step = params.step();
    if params.k != g.k() {
        return Err(Error::Parameter(format!(
            "params are for k = {} but the graph has k = {}",
            params.k,
            g.k()
        )));
    }
    if n == 0 || n % step != 0 {
        return Err(Error::Parameter(format!(
            "n = {n} must be a positive multiple of k-l = {step}"
        )));
    }
    if n > MAX_ORACLE_N {
        return Err(Error::Resource(format!("oracle instances are capped at {MAX_ORACLE_N} vertices")));
    }
    if n < params.k || g.edge_count() == 0 {
        return Ok(OracleOutcome::Absent);
    }
    // A strong independent set larger than floor(n/t) rules out a Hamilton
    // l-cycle outright; any verified witness (exact or greedy) is a valid
    // lower bound on the maximum.
    let sis = max_strong_independent_set(g, 24);
    if sis.size > n / params.t {
        return Ok(OracleOutcome::Absent);
    }
    let deadline = Instant::now() + budget.time_limit;
    let windows = cycle_windows(n, params.k, step);
    let mut nodes_used = 0u64;
    let mut any_exhausted = false;
    let reversal_preserves_pattern = params.k % step == 0;
    let branches: Vec<(usize, bool)> = if budget.symmetry_breaking {
        (0..step)
            .filter_map(|j| {
                let j_star = (2 * step - 1 - j) % step;
                if reversal_preserves_pattern && j > j_star {
                    None
                } else {
                    Some((j, reversal_preserves_pattern && j == j_star))
                }
            })
            .collect()
        } else {
            vec![(usize::MAX, false)]
        };
    for (j, tiebreak) in branches {
        let mut ctx = SearchCtx::new(g, n, windows.clone(), budget, deadline, nodes_used);
        if j != usize::MAX {
            if !ctx.place_ok(j, 0) {
                nodes_used = ctx.nodes;
                continue;
            }
            if tiebreak && n > 2 {
                let lo = (j + 1) % n;
                let hi = (j + n - 1) % n;
                ctx.tiebreak = Some((lo, hi));
            }
        }
        let found = ctx.dfs(0);
        nodes_used = ctx.nodes;
        if let Some(w) = found {
            debug_assert!(walks::verify_hamilton_ell_cycle(g, &w, params));
            return Ok(OracleOutcome::Found(w));
        }
        if ctx.exhausted {
            any_exhausted = true;
            break;
        }
    }
    if any_exhausted {
        Ok(OracleOutcome::Exhausted { nodes: nodes_used })
    } else {
        Ok(OracleOutcome::Absent)
    }
}

fn check_ordered_edge(g: &Hypergraph, e: &[u32], name: &str) -> Result<()> {
    if e.len() != g.k() {
        return Err(Error::Parameter(format!("{name} must list exactly k = {} vertices", g.k())));
    }
    if e.iter().any(|&v| v as usize >= g.n()) {
        return Err(Error::Parameter(format!("{name} mentions a vertex outside 0..{}", g.n())));
    }
    if !g.contains_edge(e) {
        return Err(Error::Parameter(format!("{name} is not an edge of the graph")));
    }
    Ok(())
}

/// Searches for a spanning l-path whose first k vertices are exactly e1 (in
/// order) and last k vertices exactly e2.
pub fn hamilton_ell_path_between(
    g: &Hypergraph,
    e1: &[u32],
    e2: &[u32],
    params: CycleParams,
    budget: &OracleBudget,
) -> Result<OracleOutcome> {
    let n = g.n();
    let step = params.step();
    if params.k != g.k() {
        return Err(Error::Parameter(format!(
            "params are for k = {} but the graph has k = {}",
            params.k,
            g.k()
        )));
    }
    check_ordered_edge(g, e1, "e1")?;
    check_ordered_edge(g, e2, "e2")?;
    if e1.iter().any(|v| e2.contains(v)) {
        return Err(Error::Parameter("e1 and e2 must be disjoint".into()));
    }
    if n % step != params.k % step {
        return Err(Error::Parameter(format!(
            "n = {n} must be congruent to k = {} modulo k-l = {step}",
            params.k
        )));
    }
    if n > MAX_ORACLE_N {
        return Err(Error::Resource(format!("oracle instances are capped at {MAX_ORACLE_N} vertices")));
    }
    if n < 2 * params.k {
        return Err(Error::Parameter(
            "the graph must have at least 2k vertices to host both ordered ends".into(),
        ));
    }
    let deadline = Instant::now() + budget.time_limit;
    let windows = path_windows(n, params.k, step);
    let mut ctx = SearchCtx::new(g, n, windows, budget, deadline, 0);
    let mut feasible = true;
    for (p, &v) in e1.iter().enumerate() {
        if !ctx.place_ok(p, v) {
            feasible = false;
            break;
        }
    }
    if feasible {
        for (off, &v) in e2.iter().enumerate() {
            if !ctx.place_ok(n - params.k + off, v) {
                feasible = false;
                break;
            }
        }
    }
    if !feasible {
        return Ok(OracleOutcome::Absent);
    }
    match ctx.dfs(0) {
        Some(w) => {
            debug_assert!(walks::verify_ell_path(g, &w, params) && w.len() == n);
            Ok(OracleOutcome::Found(w))
        }
        None if ctx.exhausted => Ok(OracleOutcome::Exhausted { nodes: ctx.nodes }),
        None => Ok(OracleOutcome::Absent),
    }
}

/// Naive reference: enumerates every permutation of the vertex set and runs
/// the cycle verifier. Only for cross-checking the oracle at tiny scale.
pub fn naive_hamilton_ell_cycle(g: &Hypergraph, params: CycleParams) -> Option<Vec<u32>> {
    use itertools::Itertools;
    let n = g.n();
    if n == 0 || n % params.step() != 0 {
        return None;
    }
    (0..n as u32)
        .permutations(n)
        .find(|w| walks::verify_ell_cycle(g, w, params))
}

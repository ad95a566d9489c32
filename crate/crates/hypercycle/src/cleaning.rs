//! Dense-subgraph extraction: iteratively prunes low co-degree subsets
//! level by level, producing a subgraph whose minimum supported co-degree
//! is close to n, plus relative-degree variants obtained through a
//! complement trick.

use std::collections::{HashMap, HashSet};

use num::rational::BigRational;
use num::One;

use crate::hypergraph::Hypergraph;
use crate::util::{binomial_big, check_unit_interval, ratio_int};
use crate::{Error, Result};

/// Outcome of a cleaning run. The output graph lives on the same vertex
/// universe as the input; `removed_vertices` lists everything left without
/// an incident edge.
#[derive(Clone, Debug)]
pub struct CleaningReport {
    pub output: Hypergraph,
    pub removed_vertices: Vec<u32>,
    /// (level i, count) pairs from level k down to level 1; the level-1
    /// entry counts surviving vertices, every other entry counts i-sets.
    pub level_counts: Vec<(usize, usize)>,
    pub mu: BigRational,
    /// Exhaustive max over supported sets of the co-degree lost relative to
    /// the host graph; only present for the relative co-degree variant.
    pub codegree_margin: Option<usize>,
}

impl CleaningReport {
    pub fn kept_vertex_count(&self) -> usize {
        self.output.n() - self.removed_vertices.len()
    }
}

fn subsets_dropping_one(s: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    (0..s.len()).map(move |skip| {
        s.iter()
            .enumerate()
            .filter(move |&(i, _)| i != skip)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Extracts a dense subgraph: level i keeps an i-set when at most mu*n of
/// its possible n-i one-vertex extensions are missing from level i+1, and
/// the output consists of the k-edges all of whose subsets survived their
/// level. The missing-extension form of the threshold keeps complete
/// graphs fixed at every scale while bounding each subset's disallowed
/// vertices by mu*n exactly as the density recursion requires.
pub fn clean_dense(f: &Hypergraph, mu: &BigRational) -> Result<CleaningReport> {
    check_unit_interval("mu", mu)?;
    let n = f.n();
    let k = f.k();
    let mu_n = mu * ratio_int(n);
    // levels[i] holds E(F_i) for 2 <= i <= k.
    let mut levels: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); k + 1];
    levels[k] = f.edges().iter().cloned().collect();
    let mut level_counts = vec![(k, levels[k].len())];
    for i in (2..k).rev() {
        let mut ext_count: HashMap<Vec<u32>, usize> = HashMap::new();
        for t in &levels[i + 1] {
            for s in subsets_dropping_one(t) {
                *ext_count.entry(s).or_insert(0) += 1;
            }
        }
        levels[i] = ext_count
            .into_iter()
            .filter(|&(_, c)| ratio_int(n - i - c) <= mu_n)
            .map(|(s, _)| s)
            .collect();
        level_counts.push((i, levels[i].len()));
    }
    let mut vertex_deg = vec![0usize; n];
    if k >= 2 {
        for s in &levels[2] {
            for &v in s {
                vertex_deg[v as usize] += 1;
            }
        }
    }
    let f1: HashSet<u32> = (0..n as u32)
        .filter(|&v| ratio_int(n - 1 - vertex_deg[v as usize]) <= mu_n)
        .collect();
    level_counts.push((1, f1.len()));

    // Bottom-up marking: a set is good when it survived its level and all
    // its one-smaller subsets are good.
    let mut good: HashSet<Vec<u32>> = f1.iter().map(|&v| vec![v]).collect();
    for i in 2..=k {
        good = levels[i]
            .iter()
            .filter(|s| subsets_dropping_one(s).all(|sub| good.contains(&sub)))
            .cloned()
            .collect();
    }
    let edges: Vec<Vec<u32>> =
        f.edges().iter().filter(|e| good.contains(*e)).cloned().collect();
    let output = Hypergraph::new(n, k, edges)?;
    let removed_vertices = output.isolated_vertices();
    Ok(CleaningReport {
        output,
        removed_vertices,
        level_counts,
        mu: mu.clone(),
        codegree_margin: None,
    })
}

fn require_subgraph(f: &Hypergraph, fp: &Hypergraph) -> Result<()> {
    if fp.n() != f.n() || fp.k() != f.k() {
        return Err(Error::Parameter(format!(
            "subgraph shape mismatch: ({}, {}) inside ({}, {})",
            fp.n(),
            fp.k(),
            f.n(),
            f.k()
        )));
    }
    for e in fp.edges() {
        if !f.contains_edge(e) {
            return Err(Error::Parameter(format!(
                "edge {e:?} of the candidate subgraph is not an edge of the host"
            )));
        }
    }
    Ok(())
}

/// Relative-degree cleaning: runs the dense extraction on the complement
/// of the host united with the subgraph, then strips complement edges.
/// The result is a subgraph of `fp` whose plain degrees stay close to the
/// host's.
pub fn clean_relative_deg(
    f: &Hypergraph,
    fp: &Hypergraph,
    mu: &BigRational,
) -> Result<CleaningReport> {
    require_subgraph(f, fp)?;
    let h = f.complement()?;
    let mut union_edges = h.edges().to_vec();
    union_edges.extend(fp.edges().iter().cloned());
    let g_prime = Hypergraph::new(f.n(), f.k(), union_edges)?;
    let inner = clean_dense(&g_prime, mu)?;
    let edges: Vec<Vec<u32>> = inner
        .output
        .edges()
        .iter()
        .filter(|e| !h.contains_edge(e))
        .cloned()
        .collect();
    let output = Hypergraph::new(f.n(), f.k(), edges)?;
    let removed_vertices = output.isolated_vertices();
    Ok(CleaningReport {
        output,
        removed_vertices,
        level_counts: inner.level_counts,
        mu: mu.clone(),
        codegree_margin: None,
    })
}

/// Relative co-degree cleaning: as `clean_relative_deg`, but requires the
/// host to have minimum supported co-degree at least alpha*n and reports
/// the exhaustively computed worst co-degree loss of the output against
/// the host.
pub fn clean_relative_codeg(
    f: &Hypergraph,
    fp: &Hypergraph,
    mu: &BigRational,
    alpha: &BigRational,
) -> Result<CleaningReport> {
    let Some(delta_star) = crate::hypergraph::supported_codegree(f) else {
        return Err(Error::Parameter(
            "host graph has no edges, so its supported co-degree is undefined".into(),
        ));
    };
    if ratio_int(delta_star) < alpha * ratio_int(f.n()) {
        return Err(Error::Parameter(format!(
            "host supported co-degree {delta_star} is below alpha*n"
        )));
    }
    let mut report = clean_relative_deg(f, fp, mu)?;
    let mut margin = 0usize;
    for size in 1..f.k() {
        for s in report.output.supported_sets(size) {
            let host = f.d1(&s);
            let out = report.output.d1(&s);
            margin = margin.max(host.saturating_sub(out));
        }
    }
    report.codegree_margin = Some(margin);
    Ok(report)
}

/// Checks the density recursion: given e(F) >= (1-eps)*C(n,k), every
/// recorded level must satisfy e(F_i) >= (1-mu_i)*C(n,i) with
/// mu_i = 2^(k-i) * eps / mu^(k-i).
pub fn verify_level_recursion(report: &CleaningReport, eps: &BigRational) -> bool {
    let n = report.output.n();
    let k = report.output.k();
    for &(i, count) in &report.level_counts {
        let mut mu_i = eps.clone();
        for _ in 0..k - i {
            mu_i = mu_i * ratio_int(2) / &report.mu;
        }
        let total = BigRational::from_integer(binomial_big(n, i));
        let bound = (BigRational::one() - mu_i) * total;
        if ratio_int(count) < bound {
            return false;
        }
    }
    true
}

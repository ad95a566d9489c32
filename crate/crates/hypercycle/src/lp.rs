//! Exact-rational LP engine for weighted perfect fractional matchings,
//! Farkas infeasibility certificates, the t-blow-up lift, and the
//! matching-driven blow-up partition.
//!
//! Everything is exact: the solver is a phase-1 simplex with Bland's rule
//! over arbitrary-precision rationals, and both possible outcomes (matching
//! or certificate) are re-verified before being returned.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::hypergraph::{BlowupSpec, CycleParams, Hypergraph};
use crate::util::ratio_int;
use crate::{Error, Result};

type Rat = BigRational;

/// Per-position edge weights. The canonical vector puts k-1 on the first
/// position and t-1 on every other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    w: Vec<Rat>,
}

impl WeightVector {
    pub fn new(w: Vec<Rat>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::Parameter("weight vector needs at least two entries".into()));
        }
        if w.iter().any(|x| x.is_negative()) {
            return Err(Error::Parameter("weights must be non-negative".into()));
        }
        Ok(WeightVector { w })
    }

    /// w* = (k-1, t-1, ..., t-1).
    pub fn canonical(params: CycleParams) -> Self {
        let mut w = vec![ratio_int(params.t - 1); params.k];
        w[0] = ratio_int(params.k - 1);
        WeightVector { w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Weight of the (0-based) position.
    pub fn at(&self, i: usize) -> &Rat {
        &self.w[i]
    }

    /// True when all positions after the first carry equal weight — the
    /// condition under which one column per (edge, distinguished position)
    /// covers all orderings.
    pub fn tail_uniform(&self) -> bool {
        self.w[1..].windows(2).all(|p| p[0] == p[1])
    }

    pub fn scaled(&self, c: &Rat) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Parameter("scale must be positive".into()));
        }
        WeightVector::new(self.w.iter().map(|x| x * c).collect())
    }
}

/// Sparse weighted fractional matching: ordered edges mapped to positive
/// rationals (absent means zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalMatching {
    pub weights: BTreeMap<Vec<u32>, Rat>,
    pub w: WeightVector,
}

impl FractionalMatching {
    /// The weighted sum this matching places on a vertex.
    pub fn vertex_sum(&self, v: u32) -> Rat {
        let mut sum = Rat::zero();
        for (e, q) in &self.weights {
            for (i, &u) in e.iter().enumerate() {
                if u == v {
                    sum += self.w.at(i) * q;
                }
            }
        }
        sum
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }
}

/// Farkas infeasibility certificate: A^T y >= 0 over every column and
/// 1^T y < 0, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub y: Vec<Rat>,
}

/// Outcome of the feasibility solve: exactly one side of the dichotomy.
#[derive(Clone, Debug)]
pub enum PfmResult {
    Feasible(FractionalMatching),
    Infeasible(FarkasCertificate),
}

impl PfmResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PfmResult::Feasible(_))
    }

    pub fn matching(&self) -> Option<&FractionalMatching> {
        match self {
            PfmResult::Feasible(m) => Some(m),
            PfmResult::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            PfmResult::Infeasible(c) => Some(c),
            PfmResult::Feasible(_) => None,
        }
    }
}

/// The canonical ordered edge for (edge, distinguished position): the
/// distinguished vertex moved to the front, the rest ascending.
fn canonical_ordered(edge: &[u32], j: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(edge.len());
    out.push(edge[j]);
    out.extend(edge.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
    out
}

/// Exact check of every per-vertex constraint (equality when `perfect`) and
/// of key/value well-formedness.
pub fn verify_matching(h: &Hypergraph, m: &FractionalMatching, perfect: bool) -> bool {
    if m.w.len() != h.k() {
        return false;
    }
    let mut sums = vec![Rat::zero(); h.n()];
    for (e, q) in &m.weights {
        if e.len() != h.k() || !h.contains_edge(e) || q.is_negative() {
            return false;
        }
        for (i, &v) in e.iter().enumerate() {
            sums[v as usize] += m.w.at(i) * q;
        }
    }
    let one = Rat::one();
    sums.iter().all(|s| if perfect { *s == one } else { *s <= one })
}

/// Exact check of the certificate against every canonical column.
pub fn verify_certificate(h: &Hypergraph, w: &WeightVector, cert: &FarkasCertificate) -> bool {
    if cert.y.len() != h.n() || w.len() != h.k() {
        return false;
    }
    let total: Rat = cert.y.iter().sum();
    if !total.is_negative() {
        return false;
    }
    for e in h.edges() {
        for j in 0..h.k() {
            let mut dot = Rat::zero();
            dot += w.at(0) * &cert.y[e[j] as usize];
            let tail = w.at(1);
            for (i, &v) in e.iter().enumerate() {
                if i != j {
                    dot += tail * &cert.y[v as usize];
                }
            }
            if dot.is_negative() {
                return false;
            }
        }
    }
    true
}

struct Simplex {
    rows: usize,
    n_real: usize,
    width: usize,
    tab: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
}

impl Simplex {
    /// Phase-1 tableau for A x = 1 with artificial identity columns.
    fn new(rows: usize, columns: &[Vec<(usize, Rat)>]) -> Self {
        let n_real = columns.len();
        let width = n_real + rows + 1;
        let mut tab = vec![vec![Rat::zero(); width]; rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col {
                tab[*i][j] = c.clone();
            }
        }
        for i in 0..rows {
            tab[i][n_real + i] = Rat::one();
            tab[i][width - 1] = Rat::one();
        }
        // Reduced costs with the all-artificial basis (cost 1 each):
        // real columns get -(column sum), artificials 0.
        let mut obj = vec![Rat::zero(); width];
        for j in 0..n_real {
            let mut s = Rat::zero();
            for row in tab.iter() {
                s += &row[j];
            }
            obj[j] = -s;
        }
        obj[width - 1] = -ratio_int(rows);
        Simplex { rows, n_real, width, tab, obj, basis: (n_real..n_real + rows).collect() }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.tab[r][c].clone();
        for x in self.tab[r].iter_mut() {
            *x /= &piv;
        }
        let row_r = self.tab[r].clone();
        for i in 0..self.rows {
            if i == r || self.tab[i][c].is_zero() {
                continue;
            }
            let f = self.tab[i][c].clone();
            for (x, rx) in self.tab[i].iter_mut().zip(row_r.iter()) {
                *x -= &f * rx;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (x, rx) in self.obj.iter_mut().zip(row_r.iter()) {
                *x -= &f * rx;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality; returns true iff the artificial
    /// objective reached exactly zero.
    fn run(&mut self) -> Result<bool> {
        loop {
            let Some(c) = (0..self.width - 1).find(|&j| self.obj[j].is_negative()) else {
                break;
            };
            let mut pick: Option<(usize, Rat)> = None;
            for i in 0..self.rows {
                if !self.tab[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.tab[i][self.width - 1] / &self.tab[i][c];
                let better = match &pick {
                    None => true,
                    Some((pi, pr)) => {
                        ratio < *pr || (ratio == *pr && self.basis[i] < self.basis[*pi])
                    }
                };
                if better {
                    pick = Some((i, ratio));
                }
            }
            let Some((r, _)) = pick else {
                return Err(Error::Parameter(
                    "phase-1 simplex became unbounded; inputs are inconsistent".into(),
                ));
            };
            self.pivot(r, c);
        }
        Ok(self.obj[self.width - 1].is_zero())
    }
}

/// Solves for a w-weighted perfect fractional matching using one canonical
/// column per (edge, distinguished position). Returns either an exactly
/// verified matching or an exactly verified Farkas certificate.
///
/// The canonical column set only covers all edge orderings when the weight
/// vector's tail is uniform, so non-uniform tails are rejected.
pub fn solve_weighted_pfm(h: &Hypergraph, w: &WeightVector) -> Result<PfmResult> {
    if h.n() == 0 {
        return Err(Error::Parameter("graph has no vertices".into()));
    }
    if w.len() != h.k() {
        return Err(Error::Parameter(format!(
            "weight vector has {} entries, expected k = {}",
            w.len(),
            h.k()
        )));
    }
    if !w.tail_uniform() {
        return Err(Error::Parameter(
            "canonical columns require equal weights on positions 2..k".into(),
        ));
    }
    if h.edge_count() == 0 {
        let cert = FarkasCertificate { y: vec![-Rat::one(); h.n()] };
        debug_assert!(verify_certificate(h, w, &cert));
        return Ok(PfmResult::Infeasible(cert));
    }
    let k = h.k();
    let mut columns: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(h.edge_count() * k);
    for e in h.edges() {
        for j in 0..k {
            let mut col = Vec::with_capacity(k);
            col.push((e[j] as usize, w.at(0).clone()));
            for (i, &v) in e.iter().enumerate() {
                if i != j {
                    col.push((v as usize, w.at(1).clone()));
                }
            }
            columns.push(col);
        }
    }
    let mut sx = Simplex::new(h.n(), &columns);
    if sx.run()? {
        let mut weights = BTreeMap::new();
        for (i, &b) in sx.basis.iter().enumerate() {
            if b < sx.n_real {
                let val = sx.tab[i][sx.width - 1].clone();
                if val.is_positive() {
                    let edge = &h.edges()[b / k];
                    let key = canonical_ordered(edge, b % k);
                    let slot = weights.entry(key).or_insert_with(Rat::zero);
                    *slot += val;
                }
            }
        }
        let m = FractionalMatching { weights, w: w.clone() };
        if !verify_matching(h, &m, true) {
            return Err(Error::Parameter(
                "internal: solver output failed exact verification".into(),
            ));
        }
        Ok(PfmResult::Feasible(m))
    } else {
        let y: Vec<Rat> =
            (0..h.n()).map(|v| self_sub_one(&sx.obj[sx.n_real + v])).collect();
        let cert = FarkasCertificate { y };
        if !verify_certificate(h, w, &cert) {
            return Err(Error::Parameter(
                "internal: certificate failed exact verification".into(),
            ));
        }
        Ok(PfmResult::Infeasible(cert))
    }
}

fn self_sub_one(x: &Rat) -> Rat {
    x - Rat::one()
}

/// Lifts a matching on the t-blow-up of `f` (parts are the contiguous
/// blocks v*t .. v*t + t - 1) back to `f` by averaging the preimages of
/// each ordered edge. Returns the lifted matching and whether it verifies
/// as perfect on `f`.
pub fn lift_pfm_through_blowup(
    f: &Hypergraph,
    t: usize,
    q_star: &FractionalMatching,
) -> Result<(FractionalMatching, bool)> {
    if t == 0 {
        return Err(Error::Parameter("blow-up factor t must be positive".into()));
    }
    let blow_n = f.n() * t;
    let mut acc: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
    for (e_star, q) in &q_star.weights {
        if e_star.len() != f.k() {
            return Err(Error::Parameter(format!(
                "ordered edge {e_star:?} has wrong arity for the base graph"
            )));
        }
        if e_star.iter().any(|&u| u as usize >= blow_n) {
            return Err(Error::Parameter(format!(
                "ordered edge {e_star:?} leaves the {t}-blow-up vertex range"
            )));
        }
        let base: Vec<u32> = e_star.iter().map(|&u| u / t as u32).collect();
        let mut sorted = base.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) || !f.contains_edge(&base) {
            return Err(Error::Parameter(format!(
                "ordered edge {e_star:?} does not project to an edge of the base graph"
            )));
        }
        *acc.entry(base).or_insert_with(Rat::zero) += q;
    }
    let t_rat = ratio_int(t);
    let weights: BTreeMap<Vec<u32>, Rat> =
        acc.into_iter().map(|(e, s)| (e, s / &t_rat)).collect();
    let lifted = FractionalMatching { weights, w: q_star.w.clone() };
    let perfect = verify_matching(f, &lifted, true);
    Ok((lifted, perfect))
}

/// The matching-driven partition of a blow-up: for each canonical ordered
/// base edge e with floor(q_hat(e)) >= 1 (where q_hat(e) = m * q(e)), a
/// complete k-partite sub-blow-up T_e whose i-th part takes w_i *
/// floor(q_hat(e)) fresh vertices from the part of e's i-th vertex; all
/// unused vertices are collected as leftovers.
#[derive(Clone, Debug)]
pub struct EdgeBlowupPartition {
    /// (ordered base edge, floor(q_hat), parts of T_e in edge order).
    pub tes: Vec<(Vec<u32>, usize, Vec<Vec<u32>>)>,
    /// Leftover blow-up vertices indexed by base vertex.
    pub leftover: Vec<Vec<u32>>,
}

impl EdgeBlowupPartition {
    pub fn total_te_size(&self) -> usize {
        self.tes.iter().map(|(_, _, parts)| parts.iter().map(|p| p.len()).sum::<usize>()).sum()
    }

    pub fn leftover_count(&self) -> usize {
        self.leftover.iter().map(|l| l.len()).sum()
    }

    /// A spanning l-cycle of T_e (its parts form a complete k-partite
    /// k-graph with the exact part ratios the explicit construction needs),
    /// together with its marked ordered edge: a blow-up copy of the base
    /// edge rotated so positions 2..t come first.
    pub fn spanning_cycle(&self, idx: usize, params: CycleParams) -> Result<(Vec<u32>, Vec<u32>)> {
        let (_, _, parts) = &self.tes[idx];
        let r: usize = parts.iter().map(|p| p.len()).sum();
        let (host, cycle, marked) = crate::constructions::construct_kpartite_ell_cycle(params, r)?;
        // The construction's part A is the distinguished (first) part here;
        // its B_j is our part j+1. Build the vertex translation.
        let mut map = vec![0u32; r];
        let hparts = host.parts();
        for j in 0..params.k - 1 {
            for (src, &dst) in hparts[j].iter().zip(parts[j + 1].iter()) {
                map[*src as usize] = dst;
            }
        }
        for (src, &dst) in hparts[params.k - 1].iter().zip(parts[0].iter()) {
            map[*src as usize] = dst;
        }
        let seq: Vec<u32> = cycle.vertices().iter().map(|&v| map[v as usize]).collect();
        let mk: Vec<u32> = marked.iter().map(|&v| map[v as usize]).collect();
        Ok((seq, mk))
    }
}

pub fn partition_blowup_by_pfm(
    spec: &BlowupSpec,
    q: &FractionalMatching,
) -> Result<EdgeBlowupPartition> {
    if !verify_matching(&spec.base, q, true) {
        return Err(Error::Parameter(
            "matching must be perfect on the base graph of the blow-up".into(),
        ));
    }
    for i in 0..q.w.len() {
        if !q.w.at(i).is_integer() {
            return Err(Error::Parameter(
                "partitioning requires integer weights (the canonical vector qualifies)".into(),
            ));
        }
    }
    let m_rat = ratio_int(spec.m);
    let mut cursor = vec![0usize; spec.base.n()];
    let mut tes = Vec::new();
    for (e, qe) in &q.weights {
        let q_hat = qe * &m_rat;
        let fl = q_hat.floor().to_integer();
        let fl: usize = match fl.try_into() {
            Ok(v) => v,
            Err(_) => return Err(Error::Parameter("q_hat floor does not fit usize".into())),
        };
        if fl == 0 {
            continue;
        }
        let mut parts = Vec::with_capacity(e.len());
        for (i, &v) in e.iter().enumerate() {
            let wi: usize = q.w.at(i).to_integer().try_into().map_err(|_| {
                Error::Parameter("weights must be small non-negative integers".into())
            })?;
            let take = wi * fl;
            let pool = &spec.parts[v as usize];
            if cursor[v as usize] + take > pool.len() {
                return Err(Error::Parameter(format!(
                    "capacity violation at base vertex {v}: part of size {} cannot supply {} more vertices",
                    pool.len(),
                    take
                )));
            }
            let slice = pool[cursor[v as usize]..cursor[v as usize] + take].to_vec();
            cursor[v as usize] += take;
            parts.push(slice);
        }
        tes.push((e.clone(), fl, parts));
    }
    let leftover: Vec<Vec<u32>> = spec
        .parts
        .iter()
        .enumerate()
        .map(|(v, pool)| pool[cursor[v]..].to_vec())
        .collect();
    Ok(EdgeBlowupPartition { tes, leftover })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_blowup, compute_t};
    use crate::util::ratio;
    use crate::walks;

    #[test]
    fn complete_graph_is_feasible() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        let r = solve_weighted_pfm(&g, &w).unwrap();
        let m = r.matching().expect("K6 must be feasible");
        assert!(verify_matching(&g, m, true));
    }

    #[test]
    fn isolated_vertex_gives_certificate() {
        let g = Hypergraph::new(5, 3, vec![vec![0, 1, 2]]).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        let r = solve_weighted_pfm(&g, &w).unwrap();
        let c = r.certificate().expect("isolated vertex forces infeasibility");
        assert!(verify_certificate(&g, &w, c));
    }

    #[test]
    fn edgeless_and_empty_inputs() {
        let g = Hypergraph::empty(4, 3).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        assert!(!solve_weighted_pfm(&g, &w).unwrap().is_feasible());
        let g0 = Hypergraph::empty(0, 3).unwrap();
        assert!(solve_weighted_pfm(&g0, &w).is_err());
    }

    #[test]
    fn weak_bound_instance_is_infeasible() {
        let wb = crate::constructions::gen_weak_lower_bound(3, 2, 12).unwrap();
        let w = WeightVector::canonical(wb.params);
        let r = solve_weighted_pfm(&wb.graph, &w).unwrap();
        assert!(!r.is_feasible());
        assert!(verify_certificate(&wb.graph, &w, r.certificate().unwrap()));
    }

    #[test]
    fn verifier_rejects_perturbations() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        let m = solve_weighted_pfm(&g, &w).unwrap().matching().unwrap().clone();
        let mut bad = m.clone();
        let key = bad.weights.keys().next().unwrap().clone();
        *bad.weights.get_mut(&key).unwrap() += ratio(1, 1_000_000);
        assert!(!verify_matching(&g, &bad, true));

        let zero = FractionalMatching { weights: BTreeMap::new(), w: w.clone() };
        assert!(verify_matching(&g, &zero, false));
        assert!(!verify_matching(&g, &zero, true));
    }

    #[test]
    fn lift_through_t_blowup() {
        let p = compute_t(3, 2).unwrap();
        let f = Hypergraph::complete(4, 3).unwrap();
        let (blown, _) = build_blowup(&f, &[3, 3, 3, 3]).unwrap();
        let w = WeightVector::canonical(p);
        let q_star = solve_weighted_pfm(&blown, &w).unwrap().matching().unwrap().clone();
        let (lifted, perfect) = lift_pfm_through_blowup(&f, 3, &q_star).unwrap();
        assert!(perfect, "lift of a perfect matching stays perfect");
        assert!(verify_matching(&f, &lifted, true));

        let zero = FractionalMatching { weights: BTreeMap::new(), w };
        let (l0, perfect0) = lift_pfm_through_blowup(&f, 3, &zero).unwrap();
        assert!(l0.weights.is_empty());
        assert!(!perfect0);
    }

    #[test]
    fn partition_single_edge_base() {
        // Base = one edge, q(e) = 1/2 on one ordering, m = 4 -> q_hat = 2.
        let f = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let p = compute_t(3, 2).unwrap(); // t = 3, w* = (2,2,2)
        let w = WeightVector::canonical(p);
        let mut weights = BTreeMap::new();
        weights.insert(vec![0u32, 1, 2], ratio(1, 2));
        let q = FractionalMatching { weights, w };
        assert!(verify_matching(&f, &q, true));
        let (_, spec) = build_blowup(&f, &[8, 8, 8]).unwrap();
        let mut spec = spec;
        spec.m = 4;
        let part = partition_blowup_by_pfm(&spec, &q).unwrap();
        assert_eq!(part.tes.len(), 1);
        let (_, fl, parts) = &part.tes[0];
        assert_eq!(*fl, 2);
        assert_eq!(parts.iter().map(|p| p.len()).collect::<Vec<_>>(), vec![4, 4, 4]);
        assert_eq!(part.total_te_size(), 12);
        assert_eq!(part.leftover_count(), 12);

        let (cycle, marked) = part.spanning_cycle(0, p).unwrap();
        assert_eq!(cycle.len(), 12);
        assert_eq!(marked.len(), 3);
        // The cycle must be valid in the complete 3-partite host over T_e.
        let host =
            crate::constructions::KPartiteComplete::new(relabelled_parts(parts)).unwrap();
        let relab = relabel(&cycle, parts);
        assert!(walks::verify_hamilton_ell_cycle(&host, &relab, p));
    }

    // Maps T_e vertices onto a dense 0..|T_e| universe for host-based checks.
    fn relabelled_parts(parts: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let mut next = 0u32;
        parts
            .iter()
            .map(|p| {
                let out: Vec<u32> = (next..next + p.len() as u32).collect();
                next += p.len() as u32;
                out
            })
            .collect()
    }

    fn relabel(seq: &[u32], parts: &[Vec<u32>]) -> Vec<u32> {
        let flat: Vec<u32> = parts.iter().flatten().copied().collect();
        seq.iter()
            .map(|v| flat.iter().position(|x| x == v).unwrap() as u32)
            .collect()
    }

    #[test]
    fn partition_with_small_q_hat_leaves_everything_over() {
        let f = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        let mut weights = BTreeMap::new();
        weights.insert(vec![0u32, 1, 2], ratio(1, 2));
        let q = FractionalMatching { weights, w };
        let (_, mut spec) = build_blowup(&f, &[8, 8, 8]).unwrap();
        spec.m = 1; // q_hat = 1/2 < 1 everywhere
        let part = partition_blowup_by_pfm(&spec, &q).unwrap();
        assert!(part.tes.is_empty());
        assert_eq!(part.leftover_count(), 24);
    }

    #[test]
    fn partition_covers_blowup_up_to_bounded_leftover() {
        let f = Hypergraph::complete(4, 3).unwrap();
        let p = compute_t(3, 2).unwrap();
        let w = WeightVector::canonical(p);
        let q = solve_weighted_pfm(&f, &w).unwrap().matching().unwrap().clone();
        let (_, spec) = build_blowup(&f, &[20, 20, 20, 20]).unwrap();
        assert_eq!(spec.m, 20);
        let part = partition_blowup_by_pfm(&spec, &q).unwrap();
        assert_eq!(part.total_te_size() + part.leftover_count(), 80);
        // Leftover stays under k^2 * s^(k-1) with s the base vertex count.
        assert!(part.leftover_count() <= 9 * 16);
        assert!(!part.tes.is_empty());
        for (i, (_, fl, parts)) in part.tes.iter().enumerate() {
            let sz: usize = parts.iter().map(|p| p.len()).sum();
            assert_eq!(sz, fl * 6);
            let (cycle, _) = part.spanning_cycle(i, p).unwrap();
            assert_eq!(cycle.len(), sz);
        }
    }

    #[test]
    fn scaling_preserves_verdicts() {
        let p = compute_t(3, 2).unwrap();
        let feas = Hypergraph::complete(6, 3).unwrap();
        let infeas = crate::constructions::gen_weak_lower_bound(3, 2, 9).unwrap().graph;
        let w = WeightVector::canonical(p);
        let w_scaled = w.scaled(&ratio(3, 7)).unwrap();
        assert!(solve_weighted_pfm(&feas, &w).unwrap().is_feasible());
        assert!(solve_weighted_pfm(&feas, &w_scaled).unwrap().is_feasible());
        assert!(!solve_weighted_pfm(&infeas, &w).unwrap().is_feasible());
        assert!(!solve_weighted_pfm(&infeas, &w_scaled).unwrap().is_feasible());
    }
}

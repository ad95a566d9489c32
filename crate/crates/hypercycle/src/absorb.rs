//! Constructive connectivity and absorption for dense hypergraphs: tight
//! walks joining ordered supported sets, vertex and sequence absorbers,
//! length-controlled joins, the bookkeeping master walk, and its blow-up
//! into a path. Every construction is re-verified by the independent walk
//! verifiers before being returned.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::{
    supported_codegree, BlowupHost, BlowupSpec, CycleParams, HostGraph, Hypergraph,
};
use crate::util::{seeded_rng, BitSet};
use crate::walks::{self, VertexSeq, WalkKind};
use crate::{Error, Result};

/// How ties between candidate vertices are broken: smallest id first
/// (reproducible fixtures) or uniformly at random from a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Lex,
    Seeded(u64),
}

struct Picker {
    rng: Option<ChaCha8Rng>,
}

impl Picker {
    fn new(strategy: Strategy) -> Self {
        let rng = match strategy {
            Strategy::Lex => None,
            Strategy::Seeded(seed) => Some(seeded_rng("absorb-picker", seed)),
        };
        Picker { rng }
    }

    fn pick(&mut self, cands: &[u32], what: &str) -> Result<u32> {
        if cands.is_empty() {
            return Err(Error::SearchExhausted(format!("no candidate vertex for {what}")));
        }
        Ok(match &mut self.rng {
            None => cands[0],
            Some(r) => cands[r.gen_range(0..cands.len())],
        })
    }

    fn pick_index(&mut self, len: usize) -> usize {
        match &mut self.rng {
            None => 0,
            Some(r) => r.gen_range(0..len),
        }
    }
}

fn check_ordered_supported(g: &Hypergraph, s: &[u32], name: &str) -> Result<()> {
    if s.is_empty() || s.len() > g.k() {
        return Err(Error::Parameter(format!(
            "{name} must have between 1 and k = {} vertices, got {}",
            g.k(),
            s.len()
        )));
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Parameter(format!("{name} has repeated vertices: {s:?}")));
    }
    if sorted.last().map_or(false, |&v| v as usize >= g.n()) {
        return Err(Error::Parameter(format!("{name} leaves the vertex range: {s:?}")));
    }
    if !g.is_supported(&sorted) {
        return Err(Error::Parameter(format!("{name} is not a supported set: {s:?}")));
    }
    Ok(())
}

fn require_dense(g: &Hypergraph) -> Result<usize> {
    let Some(d) = supported_codegree(g) else {
        return Err(Error::Parameter("graph has no edges".into()));
    };
    if 2 * d <= g.n() {
        return Err(Error::Parameter(format!(
            "minimum supported co-degree {d} is not above n/2 = {}/2",
            g.n()
        )));
    }
    Ok(d)
}

fn require_no_isolated(g: &Hypergraph) -> Result<()> {
    let iso = g.isolated_vertices();
    if !iso.is_empty() {
        return Err(Error::Parameter(format!("graph has isolated vertices: {iso:?}")));
    }
    Ok(())
}

/// Vertices v (ascending) such that set + v is supported for every given
/// set. With each set of size k-1 this means set + v is an edge.
fn common_extensions(g: &Hypergraph, sets: &[Vec<u32>]) -> Vec<u32> {
    let mut sorted_sets: Vec<Vec<u32>> = Vec::with_capacity(sets.len());
    for s in sets {
        let mut c = s.clone();
        c.sort_unstable();
        if c.windows(2).any(|p| p[0] == p[1]) {
            return Vec::new();
        }
        sorted_sets.push(c);
    }
    let mut out = Vec::new();
    let mut probe = Vec::new();
    'outer: for v in 0..g.n() as u32 {
        for s in &sorted_sets {
            if s.binary_search(&v).is_ok() {
                continue 'outer;
            }
            probe.clear();
            probe.extend_from_slice(s);
            let pos = probe.partition_point(|&x| x < v);
            probe.insert(pos, v);
            if !g.is_supported(&probe) {
                continue 'outer;
            }
        }
        out.push(v);
    }
    out
}

/// An edge containing `prefix` as a set, returned ordered as prefix +
/// remainder ascending. Edges disjoint from `avoid` are preferred; when
/// none exists the search falls back to an arbitrary containing edge, which
/// keeps the construction available on small hosts.
fn find_extension_edge(
    g: &Hypergraph,
    prefix: &[u32],
    avoid: &[&[u32]],
    picker: &mut Picker,
) -> Result<Vec<u32>> {
    let mut set = prefix.to_vec();
    set.sort_unstable();
    let containing: Vec<&Vec<u32>> = g
        .edges()
        .iter()
        .filter(|e| set.iter().all(|v| e.binary_search(v).is_ok()))
        .collect();
    if containing.is_empty() {
        return Err(Error::SearchExhausted(format!("no edge contains {prefix:?}")));
    }
    let clean: Vec<&&Vec<u32>> = containing
        .iter()
        .filter(|e| {
            avoid.iter().all(|a| {
                a.iter().all(|v| !e.contains(v) || set.binary_search(v).is_ok())
            })
        })
        .collect();
    let edge: &Vec<u32> = if clean.is_empty() {
        containing[picker.pick_index(containing.len())]
    } else {
        clean[picker.pick_index(clean.len())]
    };
    let mut out = prefix.to_vec();
    out.extend(edge.iter().filter(|v| set.binary_search(v).is_err()));
    Ok(out)
}

/// Any edge, preferring one disjoint from all `avoid` sets.
fn find_edge_avoiding(
    g: &Hypergraph,
    avoid: &[&[u32]],
    picker: &mut Picker,
) -> Result<Vec<u32>> {
    if g.edge_count() == 0 {
        return Err(Error::SearchExhausted("graph has no edges".into()));
    }
    let clean: Vec<&Vec<u32>> = g
        .edges()
        .iter()
        .filter(|e| avoid.iter().all(|a| a.iter().all(|v| !e.contains(v))))
        .collect();
    Ok(if clean.is_empty() {
        g.edges()[picker.pick_index(g.edge_count())].clone()
    } else {
        clean[picker.pick_index(clean.len())].clone()
    })
}

/// Tight walk from the ordered set `s` to the ordered edge `f`: completes
/// `s` to an edge e_S, threads connector vertices z_1..z_k with
/// z_i extending both the u-suffix and the x-suffix, then unrolls
/// W_k..W_1 where W_i = z_1..z_{i-1} x_i..x_k. Ends with exactly `f`.
fn half_join(
    g: &Hypergraph,
    s: &[u32],
    f: &[u32],
    also_avoid: &[u32],
    picker: &mut Picker,
) -> Result<Vec<u32>> {
    let k = g.k();
    let e_s = find_extension_edge(g, s, &[f, also_avoid], picker)?;
    let mut z: Vec<u32> = Vec::with_capacity(k);
    for i in 1..=k {
        let mut a: Vec<u32> = e_s[i..].to_vec();
        a.extend_from_slice(&z);
        let mut b: Vec<u32> = f[i..].to_vec();
        b.extend_from_slice(&z);
        let cands = common_extensions(g, &[a, b]);
        z.push(picker.pick(&cands, "connector thread vertex")?);
    }
    let mut walk = e_s;
    walk.extend_from_slice(&z);
    for i in (1..=k).rev() {
        walk.extend_from_slice(&z[..i - 1]);
        walk.extend_from_slice(&f[i - 1..]);
    }
    Ok(walk)
}

/// A tight walk starting with the ordered supported set `s` and ending with
/// the ordered supported set `t`, with at least k vertices strictly between.
///
/// Preconditions: minimum supported co-degree above n/2 and no isolated
/// vertices. The guaranteed-success regime is n >= 4k, but the search is
/// attempted on smaller hosts too (falling back to overlapping auxiliary
/// edges) and fails with a search-exhausted error rather than refusing.
pub fn join_tight_walk(
    g: &Hypergraph,
    s: &[u32],
    t: &[u32],
    params: CycleParams,
    strategy: Strategy,
) -> Result<VertexSeq> {
    if params.k != g.k() {
        return Err(Error::Parameter(format!(
            "parameter k = {} does not match the graph's k = {}",
            params.k,
            g.k()
        )));
    }
    check_ordered_supported(g, s, "start set")?;
    check_ordered_supported(g, t, "end set")?;
    require_dense(g)?;
    require_no_isolated(g)?;
    let mut picker = Picker::new(strategy);
    let f = find_edge_avoiding(g, &[s, t], &mut picker)?;
    let r1 = half_join(g, s, &f, t, &mut picker)?;
    let t_rev: Vec<u32> = t.iter().rev().copied().collect();
    let f_rev: Vec<u32> = f.iter().rev().copied().collect();
    let r2 = half_join(g, &t_rev, &f_rev, s, &mut picker)?;
    let mut w = r1;
    w.extend(r2.iter().rev());
    debug_assert!(w.len() >= s.len() + t.len() + g.k());
    VertexSeq::tagged(g, w, WalkKind::TightWalk, params)
}

/// A pair of flanking sequences around a target multiset: removing the
/// targets or splicing them back in both yield valid walks.
#[derive(Clone, Debug)]
pub struct Absorber {
    segments: Vec<VertexSeq>,
    target: Vec<u32>,
}

impl Absorber {
    /// Builds and verifies: |segments| = |target| + 1, every segment at
    /// least k-1 long, and both the plain and interleaved forms tight walks.
    pub fn new(
        g: &Hypergraph,
        segments: Vec<Vec<u32>>,
        target: Vec<u32>,
        params: CycleParams,
    ) -> Result<Self> {
        if segments.len() != target.len() + 1 {
            return Err(Error::Parameter(format!(
                "absorber needs {} segments for {} targets, got {}",
                target.len() + 1,
                target.len(),
                segments.len()
            )));
        }
        if segments.iter().any(|w| w.len() < g.k() - 1) {
            return Err(Error::Parameter("every absorber segment needs >= k-1 vertices".into()));
        }
        let tagged: Result<Vec<VertexSeq>> = segments
            .into_iter()
            .map(|w| VertexSeq::tagged(g, w, WalkKind::TightWalk, params))
            .collect();
        let abs = Absorber { segments: tagged?, target };
        VertexSeq::tagged(g, abs.plain(), WalkKind::TightWalk, params)?;
        VertexSeq::tagged(g, abs.interleaved(), WalkKind::TightWalk, params)?;
        Ok(abs)
    }

    pub fn segments(&self) -> &[VertexSeq] {
        &self.segments
    }

    pub fn target(&self) -> &[u32] {
        &self.target
    }

    /// W_0 W_1 ... W_s: the walk with the targets left out.
    pub fn plain(&self) -> Vec<u32> {
        self.segments.iter().flat_map(|w| w.vertices().iter().copied()).collect()
    }

    /// W_0 v_1 W_1 ... v_s W_s: the walk with the targets spliced in.
    pub fn interleaved(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.segments[0].vertices().to_vec();
        for (v, w) in self.target.iter().zip(self.segments[1..].iter()) {
            out.push(*v);
            out.extend_from_slice(w.vertices());
        }
        out
    }

    /// Independent re-verification: both forms tight walks, segment sizes,
    /// and the length bookkeeping.
    pub fn verify_tight(&self, g: &impl HostGraph) -> bool {
        self.segments.iter().all(|w| w.len() >= g.k() - 1)
            && walks::verify_tight_walk(g, &self.plain())
            && walks::verify_tight_walk(g, &self.interleaved())
            && self.interleaved().len() == self.plain().len() + self.target.len()
    }

    /// The designated-window variant used after converting tight walks.
    pub fn verify_ell(&self, g: &impl HostGraph, params: CycleParams) -> bool {
        self.segments.iter().all(|w| w.len() >= g.k() - 1)
            && walks::verify_ell_walk(g, &self.plain(), params)
            && walks::verify_ell_walk(g, &self.interleaved(), params)
    }
}

/// Flanking pairs W_1, W_2 of size exactly k-1 such that W_1 W_2 and
/// W_1 v W_2 are both tight walks.
pub fn find_vertex_absorber(
    g: &Hypergraph,
    v: u32,
    params: CycleParams,
    strategy: Strategy,
) -> Result<Absorber> {
    if params.k != g.k() {
        return Err(Error::Parameter("parameter k does not match the graph".into()));
    }
    require_dense(g)?;
    if v as usize >= g.n() {
        return Err(Error::Parameter(format!("vertex {v} outside the graph")));
    }
    if g.degree(&[v]) == 0 {
        return Err(Error::Domain(format!("vertex {v} lies in no edge")));
    }
    let mut picker = Picker::new(strategy);
    let containing: Vec<&Vec<u32>> = g.edges().iter().filter(|e| e.contains(&v)).collect();
    let e = containing[picker.pick_index(containing.len())];
    let us: Vec<u32> = e.iter().copied().filter(|&u| u != v).collect();
    let k = g.k();
    let mut ws: Vec<u32> = Vec::with_capacity(k - 1);
    for i in 1..k {
        let mut a: Vec<u32> = us[i..].to_vec();
        a.push(v);
        a.extend_from_slice(&ws);
        let mut b: Vec<u32> = us[i - 1..].to_vec();
        b.extend_from_slice(&ws);
        let cands = common_extensions(g, &[a, b]);
        ws.push(picker.pick(&cands, "absorber flank vertex")?);
    }
    Absorber::new(g, vec![us, ws], vec![v], params)
}

/// A tight absorber for the whole sequence `u`, with total order congruent
/// to q modulo k-l: per-vertex absorbers chained by joining walks, then
/// prefix-padded to tune the length.
pub fn find_sequence_absorber(
    g: &Hypergraph,
    u: &[u32],
    q: usize,
    params: CycleParams,
    strategy: Strategy,
) -> Result<Absorber> {
    let step = params.step();
    if q >= step {
        return Err(Error::Parameter(format!("q = {q} must lie in [0, {})", step)));
    }
    if u.is_empty() {
        return Err(Error::Parameter("target sequence must be non-empty".into()));
    }
    if u.iter().any(|&v| v as usize >= g.n()) {
        return Err(Error::Parameter("target sequence leaves the vertex range".into()));
    }
    require_dense(g)?;
    require_no_isolated(g)?;
    let mut picker = Picker::new(strategy);
    let k = g.k();
    let pairs: Result<Vec<(Vec<u32>, Vec<u32>)>> = u
        .iter()
        .map(|&v| {
            find_vertex_absorber(g, v, params, strategy).map(|a| {
                (a.segments()[0].vertices().to_vec(), a.segments()[1].vertices().to_vec())
            })
        })
        .collect();
    let pairs = pairs?;
    let s = u.len();
    let mut segments: Vec<Vec<u32>> = Vec::with_capacity(s + 1);
    segments.push(pairs[0].0.clone());
    for i in 0..s - 1 {
        let join = join_tight_walk(g, &pairs[i].1, &pairs[i + 1].0, params, strategy)?;
        segments.push(join.into_vertices());
    }
    segments.push(pairs[s - 1].1.clone());

    let plain_len: usize = segments.iter().map(|w| w.len()).sum();
    let p = (q + step - plain_len % step) % step;
    let a1 = segments[0].clone();
    let mut ys: Vec<u32> = Vec::with_capacity(p);
    for j in 1..=p {
        let mut arg: Vec<u32> = ys.clone();
        arg.extend_from_slice(&a1[..k - j]);
        let cands = common_extensions(g, &[arg]);
        ys.push(picker.pick(&cands, "length padding vertex")?);
    }
    let mut w0: Vec<u32> = ys.iter().rev().copied().collect();
    w0.extend_from_slice(&a1);
    segments[0] = w0;
    let abs = Absorber::new(g, segments, u.to_vec(), params)?;
    debug_assert_eq!(abs.plain().len() % step, q);
    Ok(abs)
}

/// A tight walk joining `s` and `t` whose order is at least 2k and
/// congruent to q modulo k-l. Routes through a sequence absorber and
/// splices in just enough of its targets to hit the congruence.
pub fn join_with_congruence(
    g: &Hypergraph,
    s: &[u32],
    t: &[u32],
    q: usize,
    params: CycleParams,
    strategy: Strategy,
) -> Result<VertexSeq> {
    let step = params.step();
    if q >= step {
        return Err(Error::Parameter(format!("q = {q} must lie in [0, {})", step)));
    }
    check_ordered_supported(g, s, "start set")?;
    check_ordered_supported(g, t, "end set")?;
    require_dense(g)?;
    require_no_isolated(g)?;
    let k = g.k();
    let u: Vec<u32> = (0..step as u32).collect();
    let abs = find_sequence_absorber(g, &u, k % step, params, strategy)?;
    let w0 = abs.segments()[0].vertices().to_vec();
    let s_prime = &w0[..k - 1];
    let t_prime = abs.segments().last().unwrap().vertices();
    let t_prime = &t_prime[t_prime.len() - (k - 1)..];
    let r_s = join_tight_walk(g, s, s_prime, params, strategy)?;
    let r_t = join_tight_walk(g, t_prime, t, params, strategy)?;

    let seg_total: usize = abs.segments().iter().map(|w| w.len()).sum();
    let base_len = r_s.len() + (seg_total - (k - 1)) + (r_t.len() - (k - 1));
    let p = (q + step - base_len % step) % step;

    let mut out: Vec<u32> = r_s.into_vertices();
    out.extend_from_slice(&w0[k - 1..]);
    for (i, seg) in abs.segments()[1..].iter().enumerate() {
        if i < p {
            out.push(abs.target()[i]);
        }
        out.extend_from_slice(seg.vertices());
    }
    let r_t = r_t.into_vertices();
    out.extend_from_slice(&r_t[k - 1..]);
    debug_assert_eq!(out.len() % step, q);
    debug_assert!(out.len() >= 2 * k);
    VertexSeq::tagged(g, out, WalkKind::TightWalk, params)
}

/// Location of an absorber inside a longer walk: the subwalk starts at
/// `start` and consists of consecutive segments of the given lengths;
/// targets splice in at the internal segment boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorberSite {
    pub start: usize,
    pub segment_lens: Vec<usize>,
}

impl AbsorberSite {
    pub fn len(&self) -> usize {
        self.segment_lens.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segment_lens.is_empty()
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len()
    }
}

/// A tight walk that joins two ordered supported sets while carrying, at
/// controlled positions, a subwalk for every catalogued ordered edge and at
/// least d absorber subwalks for every (k-l)-sequence, all pairwise
/// disjoint by index range.
#[derive(Clone, Debug)]
pub struct MasterWalk {
    pub walk: VertexSeq,
    pub source: Vec<u32>,
    pub sink: Vec<u32>,
    pub edge_subwalks: BTreeMap<Vec<u32>, Range<usize>>,
    pub absorber_subwalks: BTreeMap<Vec<u32>, Vec<AbsorberSite>>,
    pub params: CycleParams,
    pub multiplicity: usize,
}

enum Planned {
    Edge(Vec<u32>),
    Absorb { key: Vec<u32>, abs: Absorber },
}

impl Planned {
    fn seq(&self) -> Vec<u32> {
        match self {
            Planned::Edge(e) => e.clone(),
            Planned::Absorb { abs, .. } => abs.plain(),
        }
    }
}

/// Builds the master walk. The ordered-edge catalogue defaults to every
/// ordering of every edge; callers with structured hosts can restrict it.
/// `budget` caps the total walk length (a cheap lower bound is checked
/// before construction starts).
pub fn build_master_walk(
    g: &Hypergraph,
    s: &[u32],
    t: &[u32],
    d: usize,
    params: CycleParams,
    budget: usize,
    catalogue: Option<&[Vec<u32>]>,
    strategy: Strategy,
) -> Result<MasterWalk> {
    if d == 0 {
        return Err(Error::Parameter("absorber multiplicity d must be positive".into()));
    }
    check_ordered_supported(g, s, "start set")?;
    check_ordered_supported(g, t, "end set")?;
    require_dense(g)?;
    require_no_isolated(g)?;
    let k = g.k();
    let step = params.step();

    let cat: Vec<Vec<u32>> = match catalogue {
        Some(list) => {
            for e in list {
                if !g.contains_edge(e) || e.len() != k {
                    return Err(Error::Parameter(format!(
                        "catalogue entry {e:?} is not an ordered edge of the graph"
                    )));
                }
            }
            list.to_vec()
        }
        None => {
            use itertools::Itertools;
            let mut all = Vec::with_capacity(g.edge_count() * (1..=k).product::<usize>());
            for e in g.edges() {
                for perm in e.iter().copied().permutations(k) {
                    all.push(perm);
                }
            }
            all
        }
    };
    let seq_count = (g.n() as u128).checked_pow(step as u32).unwrap_or(u128::MAX);
    let x = cat.len() as u128 + (d as u128).saturating_mul(seq_count);
    let lower_bound = x.saturating_mul(k as u128);
    if lower_bound > budget as u128 {
        return Err(Error::Resource(format!(
            "master walk needs at least {lower_bound} vertices for {x} subwalks, budget is {budget}"
        )));
    }

    let mut plan: Vec<Planned> = Vec::new();
    for e in &cat {
        plan.push(Planned::Edge(e.clone()));
    }
    let mut seq = vec![0u32; step];
    loop {
        let abs = find_sequence_absorber(g, &seq, k % step, params, strategy)?;
        for _ in 0..d {
            plan.push(Planned::Absorb { key: seq.clone(), abs: abs.clone() });
        }
        // Next (k-l)-sequence in lexicographic order.
        let mut pos = step;
        while pos > 0 {
            pos -= 1;
            if (seq[pos] as usize) + 1 < g.n() {
                seq[pos] += 1;
                seq[pos + 1..].fill(0);
                break;
            }
            if pos == 0 {
                seq.clear();
            }
        }
        if seq.is_empty() {
            break;
        }
    }
    if plan.is_empty() {
        return Err(Error::Parameter("nothing to include in the master walk".into()));
    }

    let mut walk: Vec<u32> = Vec::new();
    let mut edge_subwalks: BTreeMap<Vec<u32>, Range<usize>> = BTreeMap::new();
    let mut absorber_subwalks: BTreeMap<Vec<u32>, Vec<AbsorberSite>> = BTreeMap::new();
    let first_seq = plan[0].seq();
    let q0 = join_with_congruence(g, s, &first_seq[..k - 1], (k - 1) % step, params, strategy)?;
    let q0 = q0.vertices();
    walk.extend_from_slice(&q0[..q0.len() - (k - 1)]);
    for (i, item) in plan.iter().enumerate() {
        let body = item.seq();
        let start = walk.len();
        debug_assert_eq!(start % step, 0);
        walk.extend_from_slice(&body);
        match item {
            Planned::Edge(e) => {
                if edge_subwalks.insert(e.clone(), start..start + body.len()).is_some() {
                    return Err(Error::Parameter(format!(
                        "catalogue lists the ordered edge {e:?} twice"
                    )));
                }
            }
            Planned::Absorb { key, abs } => {
                absorber_subwalks.entry(key.clone()).or_default().push(AbsorberSite {
                    start,
                    segment_lens: abs.segments().iter().map(|w| w.len()).collect(),
                });
            }
        }
        let from = body[body.len() - (k - 1)..].to_vec();
        if i + 1 < plan.len() {
            let next = plan[i + 1].seq();
            let qi =
                join_with_congruence(g, &from, &next[..k - 1], (k - 2) % step, params, strategy)?;
            let qi = qi.vertices();
            walk.extend_from_slice(&qi[k - 1..qi.len() - (k - 1)]);
        } else {
            // Final connector: order k-1 mod k-l, so the trimmed remainder
            // contributes 0 and the whole walk stays congruent to k.
            let qx = join_with_congruence(g, &from, t, (k - 1) % step, params, strategy)?;
            let qx = qx.vertices();
            walk.extend_from_slice(&qx[k - 1..]);
        }
        if walk.len() > budget {
            return Err(Error::Resource(format!(
                "master walk exceeded the budget of {budget} vertices"
            )));
        }
    }
    debug_assert_eq!(walk.len() % step, k % step);
    let walk = VertexSeq::tagged(g, walk, WalkKind::TightWalk, params)?;
    Ok(MasterWalk {
        walk,
        source: s.to_vec(),
        sink: t.to_vec(),
        edge_subwalks,
        absorber_subwalks,
        params,
        multiplicity: d,
    })
}

fn ranges_disjoint(mut ranges: Vec<Range<usize>>) -> bool {
    ranges.sort_by_key(|r| r.start);
    ranges.windows(2).all(|w| w[0].end <= w[1].start)
}

impl MasterWalk {
    /// Full independent verification of the catalogue walk: joins the
    /// endpoints, has the right length class, every recorded subwalk
    /// matches its key at an aligned position, absorbers absorb, and all
    /// ranges are pairwise disjoint.
    pub fn verify(&self, g: &Hypergraph) -> bool {
        let w = self.walk.vertices();
        let step = self.params.step();
        let k = self.params.k;
        if !walks::verify_tight_walk(g, w) {
            return false;
        }
        if !w.starts_with(&self.source) || !w.ends_with(&self.sink) {
            return false;
        }
        if w.len() % step != k % step {
            return false;
        }
        let mut all_ranges: Vec<Range<usize>> = Vec::new();
        for (e, r) in &self.edge_subwalks {
            if r.start % step != 0 || r.end > w.len() || &w[r.clone()] != e.as_slice() {
                return false;
            }
            all_ranges.push(r.clone());
        }
        for (u, sites) in &self.absorber_subwalks {
            if sites.len() < self.multiplicity {
                return false;
            }
            for site in sites {
                let r = site.range();
                if site.start % step != 0 || r.end > w.len() {
                    return false;
                }
                if site.segment_lens.len() != u.len() + 1
                    || site.segment_lens.iter().any(|&l| l < k - 1)
                {
                    return false;
                }
                let mut segs = Vec::new();
                let mut at = site.start;
                for &len in &site.segment_lens {
                    segs.push(w[at..at + len].to_vec());
                    at += len;
                }
                let Ok(abs) = Absorber::new(g, segs, u.clone(), self.params) else {
                    return false;
                };
                if !abs.verify_tight(g) {
                    return false;
                }
                all_ranges.push(r);
            }
        }
        ranges_disjoint(all_ranges)
    }

    /// Splices target sequences into chosen absorber sites (each used at
    /// most once); returns the longer walk.
    pub fn splice(&self, choices: &[(Vec<u32>, usize)]) -> Result<Vec<u32>> {
        splice_impl(self.walk.vertices(), &self.absorber_subwalks, choices, None)
    }
}

fn splice_impl(
    walk: &[u32],
    sites: &BTreeMap<Vec<u32>, Vec<AbsorberSite>>,
    choices: &[(Vec<u32>, usize)],
    replacements: Option<&[Vec<u32>]>,
) -> Result<Vec<u32>> {
    let mut inserts: Vec<(usize, u32)> = Vec::new();
    let mut used: Vec<(Vec<u32>, usize)> = Vec::new();
    for (c, (key, idx)) in choices.iter().enumerate() {
        let Some(list) = sites.get(key) else {
            return Err(Error::Parameter(format!("no absorber sites recorded for {key:?}")));
        };
        let Some(site) = list.get(*idx) else {
            return Err(Error::Parameter(format!(
                "absorber site {idx} out of range for {key:?}"
            )));
        };
        if used.contains(&(key.clone(), *idx)) {
            return Err(Error::Parameter(format!("absorber site {idx} for {key:?} reused")));
        }
        used.push((key.clone(), *idx));
        let vals: &[u32] = match replacements {
            Some(r) => &r[c],
            None => key,
        };
        if vals.len() + 1 != site.segment_lens.len() {
            return Err(Error::Parameter(format!(
                "sequence of {} vertices does not fit a {}-segment site",
                vals.len(),
                site.segment_lens.len()
            )));
        }
        let mut at = site.start;
        for (j, &v) in vals.iter().enumerate() {
            at += site.segment_lens[j];
            inserts.push((at, v));
        }
    }
    inserts.sort_by(|a, b| b.0.cmp(&a.0));
    let mut out = walk.to_vec();
    for (pos, v) in inserts {
        out.insert(pos, v);
    }
    Ok(out)
}

/// A master walk realized injectively inside a blow-up, with the
/// bookkeeping carried over (keys remain base-graph sequences).
#[derive(Clone, Debug)]
pub struct BlownPath {
    pub path: VertexSeq,
    pub edge_subwalks: BTreeMap<Vec<u32>, Range<usize>>,
    pub absorber_subwalks: BTreeMap<Vec<u32>, Vec<AbsorberSite>>,
    pub params: CycleParams,
}

impl BlownPath {
    /// Splices blow-up vertex sequences into absorber sites; `choices`
    /// pairs (base key, site index) with the blow-up vertices to insert.
    pub fn splice(&self, choices: &[(Vec<u32>, usize, Vec<u32>)]) -> Result<Vec<u32>> {
        let keyed: Vec<(Vec<u32>, usize)> =
            choices.iter().map(|(k, i, _)| (k.clone(), *i)).collect();
        let repl: Vec<Vec<u32>> = choices.iter().map(|(_, _, r)| r.clone()).collect();
        splice_impl(self.path.vertices(), &self.absorber_subwalks, &keyed, Some(&repl))
    }
}

/// Realizes a master walk of the base graph as a designated-window path in
/// the blow-up, choosing a fresh representative of the right part for every
/// position and avoiding `forbidden` vertices entirely.
pub fn blow_up_walk_to_path(
    spec: &BlowupSpec,
    mw: &MasterWalk,
    forbidden: &[u32],
) -> Result<BlownPath> {
    if spec.base.k() != mw.params.k {
        return Err(Error::Parameter("blow-up base and walk disagree on k".into()));
    }
    let total = spec.total();
    let mut banned = BitSet::new(total);
    for &v in forbidden {
        if (v as usize) < total {
            banned.insert(v as usize);
        }
    }
    let walk = mw.walk.vertices();
    let mut need = vec![0usize; spec.base.n()];
    for &w in walk {
        need[w as usize] += 1;
    }
    for (v, part) in spec.parts.iter().enumerate() {
        let avail = part.iter().filter(|&&x| !banned.contains(x as usize)).count();
        if need[v] > avail {
            return Err(Error::Resource(format!(
                "part for base vertex {v} exhausted: the walk needs {} representatives, {avail} available",
                need[v]
            )));
        }
    }
    let mut cursors = vec![0usize; spec.base.n()];
    let mut path: Vec<u32> = Vec::with_capacity(walk.len());
    for &w in walk {
        let part = &spec.parts[w as usize];
        let cur = &mut cursors[w as usize];
        while banned.contains(part[*cur] as usize) {
            *cur += 1;
        }
        path.push(part[*cur]);
        *cur += 1;
    }
    let host = BlowupHost { spec };
    let path = VertexSeq::tagged(&host, path, WalkKind::EllPath, mw.params)?;
    Ok(BlownPath {
        path,
        edge_subwalks: mw.edge_subwalks.clone(),
        absorber_subwalks: mw.absorber_subwalks.clone(),
        params: mw.params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::compute_t;
    use crate::util::seeded_rng;
    use num::BigRational;
    use rand::Rng;

    fn params(k: usize, ell: usize) -> CycleParams {
        compute_t(k, ell).unwrap()
    }

    fn random_dense(n: usize, keep_num: u32, keep_den: u32, seed: u64) -> Hypergraph {
        let mut rng = seeded_rng("absorb-unit", seed);
        let full = Hypergraph::complete(n, 3).unwrap();
        let edges: Vec<Vec<u32>> = full
            .edges()
            .iter()
            .filter(|_| rng.gen_ratio(keep_num, keep_den))
            .cloned()
            .collect();
        Hypergraph::new(n, 3, edges).unwrap()
    }

    #[test]
    fn join_on_complete_graph() {
        let g = Hypergraph::complete(12, 3).unwrap();
        let p = params(3, 2);
        let w = join_tight_walk(&g, &[0, 1, 2], &[3, 4, 5], p, Strategy::Lex).unwrap();
        let v = w.vertices();
        assert!(v.starts_with(&[0, 1, 2]));
        assert!(v.ends_with(&[3, 4, 5]));
        assert!(v.len() >= 6 + 3);
        assert!(walks::verify_tight_walk(&g, v));
    }

    #[test]
    fn join_rejects_sparse_graphs() {
        let g = Hypergraph::new(8, 3, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let p = params(3, 2);
        let err = join_tight_walk(&g, &[0, 1], &[2, 3], p, Strategy::Lex).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn join_randomized_matches_verifier() {
        let g = random_dense(20, 9, 10, 5);
        let d = supported_codegree(&g).unwrap();
        assert!(2 * d > 20, "fixture must stay dense, got {d}");
        let p = params(3, 2);
        let mut rng = seeded_rng("absorb-join-pairs", 1);
        for trial in 0..20 {
            let mut pick = || loop {
                let a = rng.gen_range(0..20u32);
                let b = rng.gen_range(0..20u32);
                if a != b && g.is_supported(&[a.min(b), a.max(b)]) {
                    return vec![a, b];
                }
            };
            let s = pick();
            let t = pick();
            let w = join_tight_walk(&g, &s, &t, p, Strategy::Seeded(trial)).unwrap();
            assert!(w.vertices().starts_with(&s));
            assert!(w.vertices().ends_with(&t));
        }
    }

    #[test]
    fn vertex_absorber_on_complete_graph() {
        let g = Hypergraph::complete(8, 3).unwrap();
        let p = params(3, 2);
        let a = find_vertex_absorber(&g, 0, p, Strategy::Lex).unwrap();
        assert_eq!(a.segments().len(), 2);
        assert_eq!(a.segments()[0].len(), 2);
        assert_eq!(a.segments()[1].len(), 2);
        assert!(a.verify_tight(&g));
    }

    #[test]
    fn vertex_absorber_rejects_isolated_targets() {
        // Vertex 7 is isolated; co-degree over supported sets stays high.
        let edges: Vec<Vec<u32>> = Hypergraph::complete(8, 3)
            .unwrap()
            .edges()
            .iter()
            .filter(|e| !e.contains(&7))
            .cloned()
            .collect();
        let g = Hypergraph::new(8, 3, edges).unwrap();
        let p = params(3, 2);
        let err = find_vertex_absorber(&g, 7, p, Strategy::Lex).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(find_vertex_absorber(&g, 3, p, Strategy::Lex).is_ok());
    }

    #[test]
    fn sequence_absorber_hits_every_congruence_class() {
        let g = Hypergraph::complete(12, 3).unwrap();
        let p = params(3, 1); // step 2
        for q in 0..2 {
            let a = find_sequence_absorber(&g, &[4, 7], q, p, Strategy::Lex).unwrap();
            assert_eq!(a.plain().len() % 2, q);
            assert!(a.verify_tight(&g));
            assert_eq!(a.interleaved().len(), a.plain().len() + 2);
        }
        assert!(find_sequence_absorber(&g, &[4, 7], 2, p, Strategy::Lex).is_err());
    }

    #[test]
    fn sequence_absorber_handles_repeated_targets() {
        let g = Hypergraph::complete(12, 3).unwrap();
        let p = params(3, 1);
        let a = find_sequence_absorber(&g, &[5, 5], 1, p, Strategy::Lex).unwrap();
        assert!(a.verify_tight(&g));
    }

    #[test]
    fn congruence_join_realizes_all_orders() {
        let g = Hypergraph::complete(16, 4).unwrap();
        let p = params(4, 1); // step 3
        for q in 0..3 {
            let w =
                join_with_congruence(&g, &[0, 1, 2], &[3, 4, 5], q, p, Strategy::Lex).unwrap();
            assert_eq!(w.len() % 3, q);
            assert!(w.len() >= 8);
            assert!(w.vertices().starts_with(&[0, 1, 2]));
            assert!(w.vertices().ends_with(&[3, 4, 5]));
        }
        let err = join_with_congruence(&g, &[0, 1, 2, 3, 4], &[5, 6], 0, p, Strategy::Lex);
        assert!(err.is_err(), "oversized start set must be rejected");
    }

    #[test]
    fn master_walk_on_small_complete_graph() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = params(3, 2);
        let mw = build_master_walk(
            &g,
            &[0, 1],
            &[4, 5],
            1,
            p,
            2_000_000,
            None,
            Strategy::Lex,
        )
        .unwrap();
        assert!(mw.verify(&g));
        assert_eq!(mw.edge_subwalks.len(), 120);
        assert_eq!(mw.absorber_subwalks.len(), 6);
    }

    #[test]
    fn master_walk_multiplicity_doubles_sites() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = params(3, 2);
        let catalogue: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let mw = build_master_walk(
            &g,
            &[0, 1],
            &[4, 5],
            2,
            p,
            2_000_000,
            Some(&catalogue),
            Strategy::Lex,
        )
        .unwrap();
        assert!(mw.verify(&g));
        for sites in mw.absorber_subwalks.values() {
            assert_eq!(sites.len(), 2);
        }
        // Splicing one target in at each of its two sites still walks.
        let spliced = mw.splice(&[(vec![3], 0), (vec![5], 1)]).unwrap();
        assert!(walks::verify_tight_walk(&g, &spliced));
        assert_eq!(spliced.len(), mw.walk.len() + 2);
    }

    #[test]
    fn master_walk_budget_is_enforced() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = params(3, 2);
        let err =
            build_master_walk(&g, &[0, 1], &[4, 5], 1, p, 100, None, Strategy::Lex).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn blown_path_uses_fresh_representatives() {
        let g = Hypergraph::complete(6, 3).unwrap();
        let p = params(3, 2);
        let catalogue: Vec<Vec<u32>> = vec![vec![0, 1, 2]];
        let mw = build_master_walk(
            &g,
            &[0, 1],
            &[4, 5],
            1,
            p,
            2_000_000,
            Some(&catalogue),
            Strategy::Lex,
        )
        .unwrap();
        // Build the blow-up spec directly; materializing the host edge
        // set would be enormous and the host trait projects on the fly.
        let mut counts = vec![0usize; 6];
        for &v in mw.walk.vertices() {
            counts[v as usize] += 1;
        }
        let mut parts: Vec<Vec<u32>> = Vec::new();
        let mut next = 0u32;
        for c in &counts {
            let size = (c + 2) as u32;
            parts.push((next..next + size).collect());
            next += size;
        }
        let m = parts.iter().map(|p| p.len()).max().unwrap();
        let spec = BlowupSpec { base: g.clone(), parts, gamma: BigRational::from_integer(0.into()), m };
        let blown = blow_up_walk_to_path(&spec, &mw, &[]).unwrap();
        let verts = blown.path.vertices();
        let mut sorted = verts.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), verts.len(), "blown path must be injective");
        // Forbidding an entire part starves the construction.
        let forbidden: Vec<u32> = spec.parts[0].clone();
        let err = blow_up_walk_to_path(&spec, &mw, &forbidden).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }
}

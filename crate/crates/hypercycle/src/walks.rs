//! Verification and elementary manipulation of l-walks, l-paths, l-cycles,
//! tight walks, and the supported-l-path calculus used by the extremal
//! pipeline.
//!
//! All verifiers use modular arithmetic for cyclic windows (never array
//! duplication), so sequences up to 10^6 vertices are cheap. Boolean
//! verifiers are thin wrappers over diagnostic variants that report the
//! first failing window.

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::hypergraph::{CycleParams, HostGraph};
use crate::util::BitSet;
use crate::{Error, Result};

/// Sequence kinds, each backed by its own verifier. Only walks may repeat
/// vertices; path/cycle verifiers reject repeats before any window check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkKind {
    TightWalk,
    EllWalk,
    EllPath,
    EllCycle,
    SupportsEllPath,
    SupportsExtendedEllPath,
}

/// An ordered vertex sequence tagged with a verified kind. Values can only
/// be built through [`VertexSeq::tagged`] (which runs the verifier) or
/// operations whose postconditions guarantee the tag, so a value never
/// claims a kind its verifier rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSeq {
    vertices: Vec<u32>,
    kind: WalkKind,
}

impl VertexSeq {
    /// Verifies `vertices` as `kind` in `g` and tags it; domain error with
    /// the first failing check otherwise.
    pub fn tagged(
        g: &impl HostGraph,
        vertices: Vec<u32>,
        kind: WalkKind,
        params: CycleParams,
    ) -> Result<Self> {
        let check = match kind {
            WalkKind::TightWalk => tight_walk_diag(g, &vertices),
            WalkKind::EllWalk => ell_walk_diag(g, &vertices, params),
            WalkKind::EllPath => ell_path_diag(g, &vertices, params),
            WalkKind::EllCycle => ell_cycle_diag(g, &vertices, params),
            WalkKind::SupportsEllPath => supports_ell_path_diag(g, &vertices, params),
            WalkKind::SupportsExtendedEllPath => {
                supports_extended_ell_path_diag(g, &vertices, params)
            }
        };
        match check {
            Ok(()) => Ok(VertexSeq { vertices, kind }),
            Err(d) => Err(Error::Domain(format!("sequence is not a valid {kind:?}: {d}"))),
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<u32> {
        self.vertices
    }
}

/// First failing check of a sequence verifier.
#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum SeqDiag {
    #[error("length {len} fails {len} = {expected} (mod {modulus})")]
    LengthCongruence { len: usize, expected: usize, modulus: usize },
    #[error("length {len} is not divisible by {modulus}")]
    LengthDivisibility { len: usize, modulus: usize },
    #[error("length {len} is below the minimum {min}")]
    TooShort { len: usize, min: usize },
    #[error("vertex {vertex} repeats")]
    RepeatedVertex { vertex: u32 },
    #[error("window {index} (starting at position {start}) is not an edge")]
    WindowNotEdge { index: usize, start: usize },
    #[error("the last {t} vertices are not a supported set")]
    TailNotSupported { t: usize },
    #[error("the first {t} vertices are not a supported set")]
    HeadNotSupported { t: usize },
}

/// Errors from concatenation / cycle assembly, with the offending segment
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum ConcatError {
    #[error("segments {first} and {second} share vertex {vertex}")]
    Overlap { first: usize, second: usize, vertex: u32 },
    #[error("segment {index} does not support an l-path: {diag}")]
    NotSupporting { index: usize, diag: SeqDiag },
    #[error("last t of segment {first} followed by first t-1 of segment {second} is not a tight path")]
    TailHeadNotTight { first: usize, second: usize },
    #[error("concatenation of segments {first} and {second} does not support an l-path: {diag}")]
    PairNotSupporting { first: usize, second: usize, diag: SeqDiag },
    #[error("need at least two segments, got {got}")]
    TooFewSegments { got: usize },
}

fn first_repeat(w: &[u32]) -> Option<u32> {
    let max = w.iter().copied().max().map(|v| v as usize + 1).unwrap_or(0);
    let mut seen = BitSet::new(max);
    for &v in w {
        if seen.contains(v as usize) {
            return Some(v);
        }
        seen.insert(v as usize);
    }
    None
}

fn window_edge(g: &impl HostGraph, w: &[u32], start: usize, buf: &mut Vec<u32>) -> bool {
    let r = w.len();
    let k = g.k();
    buf.clear();
    for j in 0..k {
        buf.push(w[(start + j) % r]);
    }
    g.has_edge(buf)
}

/// Tight walk: every window of k consecutive vertices is an edge (vacuously
/// true below length k). Repeats across windows are allowed.
pub fn tight_walk_diag(g: &impl HostGraph, w: &[u32]) -> std::result::Result<(), SeqDiag> {
    let k = g.k();
    let mut buf = Vec::with_capacity(k);
    for start in 0..w.len().saturating_sub(k - 1) {
        if !window_edge(g, w, start, &mut buf) {
            return Err(SeqDiag::WindowNotEdge { index: start, start });
        }
    }
    Ok(())
}

pub fn verify_tight_walk(g: &impl HostGraph, w: &[u32]) -> bool {
    tight_walk_diag(g, w).is_ok()
}

/// Tight path: a tight walk with pairwise-distinct vertices.
pub fn verify_tight_path(g: &impl HostGraph, w: &[u32]) -> bool {
    first_repeat(w).is_none() && verify_tight_walk(g, w)
}

/// l-walk: |W| = k (mod k-l) and every window starting at an offset
/// divisible by k-l is an edge. Vertices may repeat across windows.
pub fn ell_walk_diag(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> std::result::Result<(), SeqDiag> {
    let (k, step) = (params.k, params.step());
    let r = w.len();
    if r % step != k % step {
        return Err(SeqDiag::LengthCongruence { len: r, expected: k % step, modulus: step });
    }
    let mut buf = Vec::with_capacity(k);
    if r >= k {
        for s in 0..=(r - k) / step {
            let start = s * step;
            if !window_edge(g, w, start, &mut buf) {
                return Err(SeqDiag::WindowNotEdge { index: s, start });
            }
        }
    }
    Ok(())
}

pub fn verify_ell_walk(g: &impl HostGraph, w: &[u32], params: CycleParams) -> bool {
    ell_walk_diag(g, w, params).is_ok()
}

/// l-path: an l-walk on pairwise-distinct vertices.
pub fn ell_path_diag(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> std::result::Result<(), SeqDiag> {
    if let Some(vertex) = first_repeat(w) {
        return Err(SeqDiag::RepeatedVertex { vertex });
    }
    ell_walk_diag(g, w, params)
}

pub fn verify_ell_path(g: &impl HostGraph, w: &[u32], params: CycleParams) -> bool {
    ell_path_diag(g, w, params).is_ok()
}

/// l-cycle: distinct vertices, length at least k and divisible by k-l, and
/// every cyclic window of k vertices starting at an offset divisible by k-l
/// is an edge. Hamiltonicity (|W| = n) is a separate flag; see
/// [`verify_hamilton_ell_cycle`].
pub fn ell_cycle_diag(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> std::result::Result<(), SeqDiag> {
    let (k, step) = (params.k, params.step());
    let r = w.len();
    if r % step != 0 {
        return Err(SeqDiag::LengthDivisibility { len: r, modulus: step });
    }
    if r < k {
        return Err(SeqDiag::TooShort { len: r, min: k });
    }
    if let Some(vertex) = first_repeat(w) {
        return Err(SeqDiag::RepeatedVertex { vertex });
    }
    let mut buf = Vec::with_capacity(k);
    for s in 0..r / step {
        let start = s * step;
        if !window_edge(g, w, start, &mut buf) {
            return Err(SeqDiag::WindowNotEdge { index: s, start });
        }
    }
    Ok(())
}

pub fn verify_ell_cycle(g: &impl HostGraph, w: &[u32], params: CycleParams) -> bool {
    ell_cycle_diag(g, w, params).is_ok()
}

/// An l-cycle spanning all n vertices.
pub fn verify_hamilton_ell_cycle(g: &impl HostGraph, w: &[u32], params: CycleParams) -> bool {
    w.len() == g.n() && verify_ell_cycle(g, w, params)
}

/// Re-tags a verified tight walk as an l-walk: the l-walk's designated
/// windows are a subset of the tight walk's windows, so no re-verification
/// against the graph is needed — only the length congruence.
pub fn tight_walk_to_ell_walk(w: &VertexSeq, params: CycleParams) -> Result<VertexSeq> {
    if w.kind() != WalkKind::TightWalk {
        return Err(Error::Parameter(format!(
            "expected a TightWalk-tagged sequence, got {:?}",
            w.kind()
        )));
    }
    let (k, step) = (params.k, params.step());
    if w.len() % step != k % step {
        return Err(Error::Parameter(format!(
            "tight walk length {} fails {} = {} (mod {})",
            w.len(),
            w.len() % step,
            k % step,
            step
        )));
    }
    Ok(VertexSeq { vertices: w.vertices.clone(), kind: WalkKind::EllWalk })
}

/// A sequence of distinct vertices supports an l-path when its length r is
/// at least t and divisible by k-l, the windows at offsets 0, k-l, ...,
/// r-t-(k-l) are edges, and the last t vertices form a supported set. For
/// r = t the window range is empty and only the support check remains.
pub fn supports_ell_path_diag(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> std::result::Result<(), SeqDiag> {
    let (k, t, step) = (params.k, params.t, params.step());
    let r = w.len();
    if r < t {
        return Err(SeqDiag::TooShort { len: r, min: t });
    }
    if r % step != 0 {
        return Err(SeqDiag::LengthDivisibility { len: r, modulus: step });
    }
    if let Some(vertex) = first_repeat(w) {
        return Err(SeqDiag::RepeatedVertex { vertex });
    }
    let mut buf = Vec::with_capacity(k);
    for s in 0..(r - t) / step {
        let start = s * step;
        if !window_edge(g, w, start, &mut buf) {
            return Err(SeqDiag::WindowNotEdge { index: s, start });
        }
    }
    if !g.supports(&w[r - t..]) {
        return Err(SeqDiag::TailNotSupported { t });
    }
    Ok(())
}

pub fn verify_supports_ell_path(g: &impl HostGraph, w: &[u32], params: CycleParams) -> bool {
    supports_ell_path_diag(g, w, params).is_ok()
}

/// A sequence w_0 w_1 ... w_r of distinct vertices supports an extended
/// l-path when r >= t, r is divisible by k-l, w_1 ... w_r supports an
/// l-path, and the first t vertices form a supported set.
pub fn supports_extended_ell_path_diag(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> std::result::Result<(), SeqDiag> {
    let (t, step) = (params.t, params.step());
    if w.len() < t + 1 {
        return Err(SeqDiag::TooShort { len: w.len(), min: t + 1 });
    }
    let r = w.len() - 1;
    if r % step != 0 {
        return Err(SeqDiag::LengthDivisibility { len: r, modulus: step });
    }
    if let Some(vertex) = first_repeat(w) {
        return Err(SeqDiag::RepeatedVertex { vertex });
    }
    supports_ell_path_diag(g, &w[1..], params)?;
    if !g.supports(&w[..t]) {
        return Err(SeqDiag::HeadNotSupported { t });
    }
    Ok(())
}

pub fn verify_supports_extended_ell_path(
    g: &impl HostGraph,
    w: &[u32],
    params: CycleParams,
) -> bool {
    supports_extended_ell_path_diag(g, w, params).is_ok()
}

fn check_disjoint(
    first: usize,
    second: usize,
    p: &[u32],
    q: &[u32],
) -> std::result::Result<(), ConcatError> {
    let max = p
        .iter()
        .chain(q.iter())
        .copied()
        .max()
        .map(|v| v as usize + 1)
        .unwrap_or(0);
    let mut seen = BitSet::new(max);
    for &v in p {
        seen.insert(v as usize);
    }
    for &v in q {
        if seen.contains(v as usize) {
            return Err(ConcatError::Overlap { first, second, vertex: v });
        }
    }
    Ok(())
}

/// Concatenates two disjoint sequences that support l-paths, provided the
/// last t vertices of the first followed by the first t-1 of the second form
/// a tight path. The result supports an l-path.
pub fn concat_supported_paths(
    g: &impl HostGraph,
    p: &[u32],
    q: &[u32],
    params: CycleParams,
) -> Result<Vec<u32>> {
    let t = params.t;
    if let Err(diag) = supports_ell_path_diag(g, p, params) {
        return Err(ConcatError::NotSupporting { index: 0, diag }.into());
    }
    if let Err(diag) = supports_ell_path_diag(g, q, params) {
        return Err(ConcatError::NotSupporting { index: 1, diag }.into());
    }
    check_disjoint(0, 1, p, q)?;
    let mut bridge = Vec::with_capacity(2 * t - 1);
    bridge.extend_from_slice(&p[p.len() - t..]);
    bridge.extend_from_slice(&q[..t - 1]);
    if !verify_tight_path(g, &bridge) {
        return Err(ConcatError::TailHeadNotTight { first: 0, second: 1 }.into());
    }
    let mut out = Vec::with_capacity(p.len() + q.len());
    out.extend_from_slice(p);
    out.extend_from_slice(q);
    debug_assert!(verify_supports_ell_path(g, &out, params));
    Ok(out)
}

/// Concatenates pairwise-disjoint sequences, each supporting an l-path, into
/// an l-cycle, provided every cyclic consecutive concatenation P_i P_{i+1}
/// supports an l-path. Errors name the offending segment (pair).
pub fn assemble_cycle_from_segments(
    g: &impl HostGraph,
    segments: &[Vec<u32>],
    params: CycleParams,
) -> Result<Vec<u32>> {
    let m = segments.len();
    if m < 2 {
        return Err(ConcatError::TooFewSegments { got: m }.into());
    }
    for (i, s) in segments.iter().enumerate() {
        if let Err(diag) = supports_ell_path_diag(g, s, params) {
            return Err(ConcatError::NotSupporting { index: i, diag }.into());
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            check_disjoint(i, j, &segments[i], &segments[j])?;
        }
    }
    let mut pair = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        pair.clear();
        pair.extend_from_slice(&segments[i]);
        pair.extend_from_slice(&segments[j]);
        if let Err(diag) = supports_ell_path_diag(g, &pair, params) {
            return Err(ConcatError::PairNotSupporting { first: i, second: j, diag }.into());
        }
    }
    let out: Vec<u32> = segments.iter().flatten().copied().collect();
    debug_assert!(verify_ell_cycle(g, &out, params));
    Ok(out)
}

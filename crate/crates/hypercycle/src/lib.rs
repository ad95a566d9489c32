//! Hamilton l-cycles in k-uniform hypergraphs under minimum supported
//! co-degree conditions.
//!
//! The crate provides, at small scale:
//!
//! * canonical hypergraph primitives: supported sets, shadows, co-degrees,
//!   blow-ups, and extremal/non-extremal classification ([`hypergraph`]);
//! * verifiers and elementary calculus for l-walks, l-paths, l-cycles and
//!   sequences that support l-paths ([`walks`]);
//! * the lower-bound generators and the explicit spanning l-cycle in
//!   complete k-partite k-graphs ([`constructions`]);
//! * an exact-rational LP engine for weighted perfect fractional matchings
//!   with Farkas infeasibility certificates ([`lp`]);
//! * the dense-subgraph cleaning procedure and its relative-degree
//!   corollaries ([`cleaning`]);
//! * connecting walks, vertex/sequence absorbers and the master walk
//!   ([`absorb`]);
//! * Hall matchings, seeded randomized matchings with per-family
//!   intersection counts, sequential k-partite matchings, and a directed
//!   Hamilton solver for dense digraphs ([`matching`]);
//! * an exact brute-force Hamilton l-cycle/l-path oracle ([`oracle`]);
//! * the extremal-case Hamilton-cycle pipeline: decomposition, balancing
//!   path system, auxiliary t-partite graph, transition digraph, assembly
//!   ([`pipeline`]).
//!
//! All feasibility logic uses exact rational arithmetic; all randomized
//! procedures are reproducible from a single root seed.

pub mod absorb;
pub mod cleaning;
pub mod constructions;
pub mod hypergraph;
pub mod instances;
pub mod lp;
pub mod matching;
pub mod oracle;
pub mod pipeline;
pub mod util;
pub mod walks;

pub use num::BigRational;

/// Crate-wide error type. Variants mirror the distinct failure classes the
/// operations contract for: bad parameters, domain violations (an input that
/// is well-formed but outside an operation's mathematical domain), resource
/// or budget exhaustion, failed searches, classification failures, and
/// staged pipeline failures that name the stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("stage '{stage}' failed: {reason}")]
    Stage { stage: String, reason: String },
    #[error("concatenation error: {0}")]
    Concat(#[from] walks::ConcatError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class used by the CLI: 2 usage/parameter, 3 resource,
    /// 4 staged pipeline failure, 1 anything else that reaches the top.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Domain(_) => 2,
            Error::Resource(_) => 3,
            Error::Stage { .. } => 4,
            _ => 1,
        }
    }
}

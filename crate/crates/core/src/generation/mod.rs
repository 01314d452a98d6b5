//! The generation engine: fact exchange, artifact containers, the target
//! language syntax gate, traceability and incremental regeneration.

mod blackboard;
mod cache;
mod container;
mod engine;
mod ootl;
mod trace;

pub use blackboard::{
    Blackboard, BoardReader, BoardView, ClaimConflict, Fact, Topic, GEN_CLAIM_CONFLICT, GEN_FACT,
};
pub use cache::{digest, CacheEntry, GenCache, CACHE_FILE};
pub use container::{ArtifactContainer, ArtifactPlan, FactQuery, Region, SyntaxStatus, CORE_FEATURE};
pub use engine::{
    generate, incremental_generate, render_artifacts, resolve_hooks, GenError, GenerationReport,
    GEN_EMIT, GEN_HOOK_UNRESOLVED, GEN_SYNTAX,
};
pub use ootl::{check_ootl, validate_syntax};
pub use trace::{
    trace_query, LineRange, TraceEntry, TraceIndex, TraceParseError, TraceQuery, TraceRegion,
    TraceResult, TRACE_FILE,
};

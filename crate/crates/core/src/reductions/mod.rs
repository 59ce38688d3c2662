//! Hard-instance constructions from orthogonal vectors, triangle detection,
//! Boolean matrix multiplication and online matrix-vector multiplication,
//! with decoders and definition-level solvers for cross-checking.

mod build;
mod bundle;
mod instances;

pub use build::{
    bmm_to_eval, decode_matrix, decode_omv_round, decode_ov_count, omv_to_dynamic_enum, ov_to_check, ov_to_count,
    replay_dynamic, sbmm_to_eval, tri_to_boole, tri_to_dynamic_enum, BooleReduction, CheckReduction,
    DynamicReduction, LayeredReduction,
};
pub use bundle::{
    brute_answer, build_bundle, generate_instance, random_source, verify, Answer, GeneratedInstance, ReductionKind,
    Sidecar, SourceInstance, Verdict,
};
pub use instances::{
    bmm_brute, omv_brute, ov_brute, tri_brute, tri_brute_per_vertex, BmmInstance, BoolMatrix, OmvInstance,
    OvInstance, SparseBmmInstance, TriInstance,
};

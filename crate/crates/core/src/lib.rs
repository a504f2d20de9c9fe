//! Flow-table matching engines for the twelve-field OpenFlow match model.
//!
//! The crate provides three interchangeable lookup engines (linear scan,
//! tuple-space search and a layered pre-match index), a seeded workload
//! generator and a timing harness that compares the engines.

pub mod bench;
pub mod classifier;
pub mod flow;
pub mod matcher;
pub mod workload;

pub use classifier::{
    build_index, candidate_classes, class_stats, extract_signature, same_class, signature_key,
    CandidateMode, ClassStats, ClassifyError, LayerSignature, PreMatchIndex, SignatureKey,
};
pub use flow::{
    field_layer, matches, tuple_length, Counters, FieldName, FieldSet, FlowEntry, FlowError,
    FlowTable, PacketHeader,
};
pub use matcher::{
    apply_match, apply_outcomes, build_tuple_groups, fopenflow_match, hit_rate, linear_match,
    tuple_space_match, HitRate, LinearMatcher, MatchError, MatchResult, Matcher, PreMatchMatcher,
    TraceCounts, TupleGroup, TupleSpaceMatcher,
};

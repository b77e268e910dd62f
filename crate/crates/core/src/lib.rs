//! Interpretable online sequence learning with NAL truth values.
//!
//! Symbols map to columns of context-specific event nodes. Directed links
//! between nodes of different columns carry three temporal predictions whose
//! truth values are revised from observed transitions; deduction over the
//! links of the currently active nodes yields the anticipation of the next
//! symbol. New links are hypothesized between successive columns and the
//! weakest ones are recycled when a column runs over capacity.
//!
//! All arithmetic is generic over [`Scalar`]; the aliases below fix `f64`.

pub mod engine;
pub mod lab;
pub mod memory;
pub mod scalar;
pub mod truth;

pub use engine::{
    Activation, ConfigError, EvidenceCase, Model, ModelConfig, NodeSelection, Revision, StepReport,
};
pub use memory::{
    Column, ColumnId, Link, LinkId, MemoryError, Network, NetworkConfig, NetworkStats, Node,
    NodeId, Symbol,
};
pub use scalar::Scalar;
pub use truth::{
    decay_budget, deduce, expectation, revise, truth_from_evidence, unit_evidence, Budget,
    EvidenceCount, TruthError, TruthValue,
};

pub type Truth = TruthValue<f64>;
pub type Truth32 = TruthValue<f32>;
/// Exact truth values over 64-bit rationals.
pub type ExactTruth = TruthValue<num_rational::Ratio<i64>>;
pub type Config = ModelConfig<f64>;
pub type Learner = Model<f64>;
pub type Learner32 = Model<f32>;
pub type Memory = Network<f64>;

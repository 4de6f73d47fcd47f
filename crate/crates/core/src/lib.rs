//! Variable ordering selection for cylindrical algebraic decomposition.
//!
//! The crate covers the whole selection pipeline: exact polynomial
//! arithmetic ([`poly`]), problem and label ingestion ([`ingest`]),
//! McCallum projection sets ([`projection`]), the Brown, sotd and ndrr
//! ordering heuristics ([`heuristics`]), problem features ([`features`]),
//! an RBF-kernel SVM ([`learner`]) and the experiment harness
//! ([`pipeline`]).

pub mod features;
pub mod heuristics;
pub mod ingest;
pub mod learner;
pub mod pipeline;
pub mod poly;
pub mod projection;

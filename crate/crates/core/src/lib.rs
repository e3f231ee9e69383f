//! Conflict-free electric vehicle routing with time windows.
//!
//! The crate turns a routing instance into a quantifier-free SMT problem,
//! drives an external solver, decodes and checks the resulting schedules,
//! and ships an exhaustive oracle for small instances plus a benchmark
//! generator and harness.

pub mod bench;
pub mod encoder;
pub mod fixtures;
pub mod generator;
pub mod model;
pub mod oracle;
pub mod par;
pub mod smt;
pub mod validate;

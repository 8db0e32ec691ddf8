//! Dominating set construction and reduction.
//!
//! The pipeline has two stages. Stage 1 ([`stage1`]) grows a dominating set
//! greedily by active degree and records the choices in a cluster forest.
//! Stage 2 ([`purify`]) shrinks that set with one of five reduction
//! procedures (PP0..PP4) that drop redundant vertices while keeping the set
//! dominating. [`bounds`] provides an exact branch-and-bound solver and
//! analytic bounds for quality checks, and [`bench`] runs instances in batch
//! and emits CSV/JSON reports.

pub mod bench;
pub mod bounds;
pub mod graph;
pub mod io;
pub mod purify;
pub mod random;
pub mod stage1;

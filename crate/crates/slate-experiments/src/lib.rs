//! Experiment harness: Monte-Carlo error sweeps and parameter scans over the
//! synthetic environment, evaluation of text-pipeline slates, vote
//! validation, and report emission.

pub mod eval;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod votes;

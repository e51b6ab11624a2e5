//! The democratic selection processes: the parameterized main algorithm with
//! its fast / complex / uniform / unit-cost instantiations, and the
//! unit-cost approximate variant with a relaxed acceptance threshold.

mod config;
mod run;
mod suite;
mod uniform_approx;

pub use config::{LevelExpansion, ProcessConfig, Variant};
pub use run::{run_process, CandidateRecord, ProcessError, RoundRecord, SlateResult};
pub use suite::{QueryError, QuerySuite, StatementDraft};
pub use uniform_approx::run_uniform_approx;

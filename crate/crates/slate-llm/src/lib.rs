//! Language-model-backed realization of the query suite for text corpora:
//! chat/embedding clients with record/replay caching, agreement/specificity
//! scoring, the two-stage generative pipeline, slate baselines, and dataset
//! ingestion.

pub mod words;

pub use words::word_count;

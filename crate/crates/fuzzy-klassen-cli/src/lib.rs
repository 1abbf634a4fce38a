//! Library surface of the fuzzy-klassen CLI, split out so integration tests
//! can drive command logic in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod report;

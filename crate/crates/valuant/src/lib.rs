//! Problem files, JSON reports and the corpus runner on top of `valuant-core`.

pub mod corpus;
pub mod engine;
pub mod error;
pub mod expr;
pub mod model;
pub mod problem;
pub mod report;
pub mod theorems;

pub use error::CliError;

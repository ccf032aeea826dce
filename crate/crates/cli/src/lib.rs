//! Ingestion, reports and experiment driver behind the `hindex` command.

pub mod dataset;
pub mod report;
pub mod simulate;

pub use dataset::{ingest, ingest_estimates, Dataset, IngestError, InputFormat};
pub use report::{cmd_compare, cmd_estimate, estimates_of, OutputFormat};
pub use simulate::{cmd_simulate, Overrides};

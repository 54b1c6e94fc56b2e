//! File formats, reports and the command-line front end for `altarb-core`.

pub mod cli;
pub mod ingest;
pub mod report;

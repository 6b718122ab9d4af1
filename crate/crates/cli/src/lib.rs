//! File formats and batch runner behind the `hajlasz` binary.

pub mod canonical;
pub mod output;
pub mod run;
pub mod scenario;
pub mod spacefile;

//! File formats, reports and the command line for `grasspos-core`.

pub mod cli;
pub mod matrix_text;
pub mod report;

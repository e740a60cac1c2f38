//! File formats, parallel drivers and the command-line front end for
//! `skatevote-core`.

pub mod cli;
pub mod format;
pub mod parallel;
pub mod records;
pub mod witness;

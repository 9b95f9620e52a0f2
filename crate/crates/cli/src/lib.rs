//! Library surface of the `fpr` command line tool, exposed so integration
//! tests can drive every command in process.

pub mod commands;
pub mod config;
pub mod plot;

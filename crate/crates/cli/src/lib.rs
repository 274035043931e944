//! Command-line frontend over the deciders, oracles and generators.

pub mod commands;
pub mod format;

pub use commands::run;

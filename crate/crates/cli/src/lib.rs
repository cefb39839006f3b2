//! Library surface of the `monomial-lab` command-line tool.

pub mod commands;
pub mod config;
pub mod report;
pub mod spec_lang;

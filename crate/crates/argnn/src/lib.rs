//! File formats, multi-run harness and command-line interface for the
//! `argnn-core` simulator.

pub mod cli;
pub mod formats;
pub mod harness;

//! File formats, table caching, reports and the command-line front end for
//! [`gf2synth_core`].

pub mod cache;
pub mod cli;
pub mod formats;
pub mod plan;
pub mod report;

pub use gf2synth_core as core;

//! File formats, Monte Carlo campaigns and the command-line interface built on
//! [`rgspec_core`].

pub mod cli;
pub mod experiments;
pub mod io;
pub mod stats;

//! Benchmark problems, runtime statistics and the timed runner behind the
//! `oif-bench` binary.

pub mod micro;
pub mod problems;
pub mod runner;
pub mod stats;

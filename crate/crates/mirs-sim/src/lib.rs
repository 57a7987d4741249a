//! Statistical laboratory for the rough driving noise: spectral synthesis on
//! a periodic space-time grid, the linear heat solve, and moment, centredness,
//! and scaling diagnostics that cross-check the exact algebra numerically.

pub mod config;
pub mod field;
pub mod report;
pub mod solve;
pub mod spectral;
pub mod stats;

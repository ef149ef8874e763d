//! Thermal dynamics data generation for single-zone buildings.
//!
//! The crate simulates a two-node RC building under feedback controllers or
//! excitation signals, samples building populations from parameter
//! distributions, measures the state-space coverage of the resulting traces,
//! and scores next-step temperature predictors trained on them.

pub mod cli;
pub mod config;
pub mod control;
pub mod coverage;
pub mod engine;
pub mod eval;
pub mod rng;
pub mod signals;
pub mod thermal;
pub mod variation;
pub mod weather;

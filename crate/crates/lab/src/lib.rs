//! Experiment runner for the `modrec` recovery library: seeded ensembles,
//! structured records and the acceptance suite.

#![forbid(unsafe_code)]

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod experiments;
pub mod record;
pub mod suite;

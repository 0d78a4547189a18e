//! Config-driven command-line front end for the `ordest` library.

pub mod commands;
pub mod config;
pub mod data;

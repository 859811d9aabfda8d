//! Command-line interface: simulate, check, verify, reproduce.

pub mod builtin;
pub mod commands;
pub mod config;

pub use commands::main;

// Negated float comparisons like `!(x > 0.0)` reject NaN along with the
// out-of-range values; `x <= 0.0` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Coordinated auto-bidding in repeated second-price auctions.
//!
//! A simulation library and CLI for RoS-constrained value maximizers that
//! either bid independently or coordinate so that only the highest-value
//! coalition member competes against the outside bid. The crate provides
//! the auction and mechanism primitives, mirror-descent auto-bidders,
//! Monte-Carlo estimators for the distributional quantities that decide
//! when coordination helps (Δ, Δᵢ, G(λ), λ⋆, V₍N₎), a replication harness
//! with confidence intervals, and ingestion of real winning-price logs.

pub mod assumption;
pub mod auction;
pub mod bidders;
pub mod cli;
pub mod coordination;
pub mod data_ingest;
pub mod distributions;
pub mod error;
pub mod mirror_map;
pub mod reporting;
pub mod simulator;

pub use error::{Error, Result};

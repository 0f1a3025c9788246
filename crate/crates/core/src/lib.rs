//! Adjustable-type one-shot auction model.
//!
//! A designer spends an observable adjustment cost `c` that scales every
//! bidder's private valuation by `1 + beta * c^gamma`. The crate computes the
//! resulting first-price equilibrium, the designer's profit-maximizing cost,
//! and the classical optimal-auction benchmark the result is compared against.
//!
//! - [`model`]: types, the adjustment map, the social choice function, utilities
//! - [`equilibrium`]: best responses and equilibrium verification
//! - [`profit`]: designer utility/profit, cost optimization, implementability
//! - [`baseline`]: optimal reserve auction benchmark
//! - [`mc`]: reproducible Monte Carlo streams and estimators

pub mod baseline;
pub mod equilibrium;
mod error;
pub mod mc;
pub mod model;
mod optimize;
pub mod profit;

pub use error::{Error, Result};
pub use mc::{EstimateWithCI, RngStream};
pub use model::{AdjustmentRule, InitialDistribution, ModelConfig, Outcome, TypeProfile};

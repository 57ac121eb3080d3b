//! Outage analysis of network NOMA in downlink CoMP systems whose base
//! stations form a Poisson point process.
//!
//! [`analytic`] evaluates the closed-form outage probabilities of the CoMP
//! user and of the NOMA users, [`sim`] estimates the same quantities by
//! Monte-Carlo simulation of the network, and [`specfun`] holds the numerical
//! machinery shared by both.

pub mod analytic;
pub mod error;
pub mod params;
pub mod sim;
pub mod specfun;

pub use error::{Error, Result};
pub use params::{build_params, sic_feasible, RawParams, SystemParams};

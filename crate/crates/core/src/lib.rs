//! Exact outage and throughput analysis for opportunistic full-duplex relay
//! selection in underlay cognitive networks with Nakagami-m fading.
//!
//! The crate is layered bottom-up:
//!
//! - [`specfun`]: incomplete gamma, confluent hypergeometric (Kummer M,
//!   Tricomi U, Whittaker W), Beta, compositions and adaptive quadrature.
//! - [`channel`]: scenario description, validation and seeded channel draws.
//! - [`analytic`]: closed-form end-to-end SINR distributions, interference
//!   feasibility probabilities, outage and throughput, each paired with an
//!   integral oracle.
//! - [`montecarlo`]: a direct simulator of every protocol, including the
//!   half-duplex baselines.
//! - [`analysis`]: sweeps, analytic-vs-simulation reports and diversity-order
//!   slope fitting.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod specfun;

pub use analytic::Protocol;
pub use channel::{LinkSpec, Method, NetworkConfig};
pub use error::{Error, Result, Violation};

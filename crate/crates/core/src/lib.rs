//! Fluid reconfigurable intelligent surface (FRIS) link simulation.
//!
//! A dense `my × mz` grid of on/off reflecting elements assists a single
//! SISO link. Only `M̂` elements are switched on for a given channel, each
//! with a `b`-bit phase shifter. [`ceo`] jointly picks the elements and
//! their phases with a cross-entropy search; [`baselines`] provides the
//! conventional-RIS benchmark and an exhaustive oracle; [`harness`] runs
//! seeded Monte-Carlo experiments and writes CSV.

pub mod baselines;
pub mod ceo;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod rate;

pub use error::{Error, Result};

//! Exact dynamics of radix expansions and their perturbations, BBP-type series
//! with spigot digit extraction, and G-series classification of
//! `sum p(n)/q(n) z^n`.
//!
//! All exact quantities are [`numerics::Rational`]; all approximate ones are
//! [`numerics::BoundedReal`] enclosures with exact endpoints.

pub mod bbp;
pub mod error;
pub mod gfunction;
pub mod numerics;
pub mod perturbed_dynamics;
pub mod poly;
pub mod radix_dynamics;
pub mod repro;
pub mod stats;

pub use error::{Error, Result};

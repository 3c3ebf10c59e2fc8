//! Exact-arithmetic toolkit for ordinal random assignment.
//!
//! Agents and objects are equal in number (`n >= 3`). Every probability is an exact
//! [`Rational`]; there is no floating point anywhere in the crate.
//!
//! - [`model`]: objects, strict preferences, profiles, assignment matrices, stochastic dominance.
//! - [`mechanisms`]: equal division, serial dictatorship, random serial dictatorship,
//!   probabilistic serial, pairwise exchange and the linear family.
//! - [`transfers`]: transfer functions, flow decomposition, rank representations.
//! - [`properties`]: exhaustive axiom checkers and mechanism dominance.
//! - [`certify`]: exact simplex with Farkas certificates and the axiom encoders.
//! - [`lottery`]: Birkhoff decomposition, hull membership, seeded sampling.
//! - [`cli`]: the `randassign` command-line front end.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod certify;
pub mod cli;
mod error;
pub mod lottery;
pub mod mechanisms;
pub mod model;
pub mod properties;
pub mod rational;
pub mod transfers;

pub use error::{Error, Result};
pub use rational::Rational;

//! Exact and floating numeric substrate shared by every other module.

pub mod dense;
pub mod diff;
pub mod linalg;
pub mod logreal;
pub mod lp;
pub mod rational;

pub use logreal::{logsumexp, LogReal};
pub use rational::Rational;

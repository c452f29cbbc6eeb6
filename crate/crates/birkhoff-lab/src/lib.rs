//! Computational laboratory for Birkhoff sums S_{n}f(x) = sum f(x + k*alpha)
//! over irrational circle rotations: exact continued-fraction and tower
//! machinery, the explicit slow/fast function constructions, discrepancy and
//! Koksma diagnostics, Hausdorff pre-measure covers, and seeded Monte Carlo
//! verification of the probabilistic bounds.

pub mod arcs;
pub mod birkhoff;
pub mod cf;
pub mod counting;
pub mod descriptor;
pub mod dimension;
pub mod error;
pub mod fixed;
pub mod gauge;
pub mod piecewise;
pub mod stochastic;
pub mod tower;
pub mod zoo;

pub use error::{Error, Result};

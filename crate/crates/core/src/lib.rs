//! Percolation laboratory: critical site percolation on the triangular
//! lattice, the complex crossing observable, conformal-map numerics, and
//! arm-event exponent estimation.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod geometry;
pub mod halfplane;
pub mod numerics;
pub mod observable;
pub mod rng;

pub use error::{Error, Result};

//! Bond percolation on `Z^d`, plaquette surfaces on the dual lattice, and
//! finite-cluster percolation on regular trees.

#![allow(clippy::needless_range_loop)]

pub mod animals;
pub mod block;
pub mod dsu;
pub mod error;
pub mod estimators;
pub mod format;
pub mod geometry;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod topology;
pub mod tree;

pub use error::{Error, Result};

//! Gaussian approximation and bootstrap inference for maxima of sums of
//! high-dimensional random vectors, with the Dantzig selector, stepdown
//! multiple testing and an adaptive specification test built on top.

pub mod bootstrap;
pub mod cli;
pub mod dantzig;
pub mod data;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod maxstat;
pub mod quantile;
pub mod rng;
pub mod spectest;
pub mod stepdown;

//! Stochastic analysis on the path space of Riemannian manifolds.
//!
//! This crate samples horizontal Brownian motion on the orthonormal frame
//! bundle of a small catalog of closed-form manifolds (Euclidean space, flat
//! tori, spheres, hyperbolic spaces, and products thereof), and computes the
//! path-space calculus built on top of it: stochastic parallel transport,
//! parallel and test-function gradients, Hessians under the Markovian and
//! L2 connections, the hat-map, path-space divergences, and the closed-form
//! heat-kernel oracles needed to verify all of it by Monte Carlo.
//!
//! Everything here is pure per-path computation: no IO, no global state, no
//! threads. The companion crate `pathspace-lab` drives these primitives in
//! parallel and turns them into verification reports.
//!
//! Normalization: Brownian motion is generated by the full Laplacian, not
//! half of it, so increments have covariance `2*dt*I`. Every formula in this
//! crate assumes that convention.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod heatkernel;
pub mod linalg;
pub mod malliavin;
pub mod pathfunc;
pub mod rng;
pub mod sde;
pub mod stats;

pub use error::CoreError;
pub use geometry::{ManifoldModel, PointFrame};
pub use sde::{FramePath, TimeGrid};

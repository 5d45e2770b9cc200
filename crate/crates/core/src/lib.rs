//! Numerical laboratory for boundary behaviour of functions in the unit disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: disk and sphere metrics, Möbius automorphisms, Fermi charts;
//! * [`curves`]: boundary-terminating curves, curvilinear angles, curve distances;
//! * [`functions`]: meromorphic function handles and the spherical derivative;
//! * [`analysis`]: normality sups, P-sequence indicators, cluster sets;
//! * [`stolz`]: Stolz angles, their conformal map and decay-margin checks.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod curves;
pub mod functions;
pub mod geometry;
pub mod report;
pub mod stolz;
pub mod analysis;
pub mod selftest;

pub use error::{Error, Result};

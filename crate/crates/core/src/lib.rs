//! Ball-constrained convex minimization over arbitrary norm geometries.
//!
//! The crate implements the exact ball-proximal outer iteration and its
//! linearized LMO variant over l1 / l2 / linf / lp / ellipsoid / spectral
//! balls, and certifies each run against the method's convergence
//! guarantees at runtime: function-value contraction, dual gradient-norm
//! monotonicity, the squared-distance recursion in inner-product
//! geometries, boundary and normal-cone identities, and finite
//! convergence. The `certify` module also searches for the linf instance
//! where the distance to the minimizer grows while every other guarantee
//! still holds.
//!
//! Entry points: [`methods::run_bpm`] / [`methods::run_linearized`] drive
//! runs, [`broximal::brox`] is the inner ball solver, and
//! [`certify::certify_all`] produces a [`certify::CertificateReport`].

pub mod broximal;
pub mod certify;
pub mod config;
pub mod error;
pub mod geometry;
pub mod methods;
pub mod problems;
pub mod report;

pub use error::{Error, Result};

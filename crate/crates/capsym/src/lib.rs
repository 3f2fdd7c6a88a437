//! Capillary and anisotropic machinery outside convex obstacles: gauges and
//! their duals, capillary Schwartz symmetrization, mixed-boundary anisotropic
//! PDE and eigenvalue solvers, and desk-scale verification of the associated
//! sharp inequalities on discretized domains.
//!
//! The crate is organized around grids masked by a convex obstacle `E`:
//! a bounded domain `Omega` lives in the complement `E^c`, with a Dirichlet
//! part of its boundary away from the obstacle and a Neumann (contact) part
//! on the obstacle. See the `examples/` directory for one runnable example
//! per major capability.

pub mod cli;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod harmonic;
pub mod pde;
pub mod quad;
pub mod rearrange;
pub mod vecn;
pub mod verify;

pub use error::{CapsymError, Result};
pub use vecn::VecN;

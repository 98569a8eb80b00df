//! Conservative, positivity-preserving semi-Lagrangian advection.
//!
//! The crate provides the third-order PFC reconstruction, its fifth-order
//! weighted extension (WPFC), the conservative flux-form update built on
//! them, and the benchmark drivers: 1D linear advection, an approximate
//! dispersion relation, 3D solid-body rotation and an electrostatic
//! Vlasov–Ampère solver.

pub mod advection;
pub mod dispersion;
pub mod engine;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod pfc;
pub mod rotation;
pub mod vlasov;
pub mod wpfc;

pub use engine::{advect_step, error_norms, ErrorNorms, FluxRecord, LineSweeper, Scheme};
pub use error::{Error, Result};
pub use kernel::{Boundary, CellAverages, QuadraticRecon, QuarticRecon, UniformGrid1D};
pub use wpfc::WeightParams;

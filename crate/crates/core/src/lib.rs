//! Numerical toolkit for system-dependent cost-distance, reachable sets,
//! clearance fields, and wave envelopes of nonlinear control systems among
//! obstacles.
//!
//! The state space is discretized into a [`scene::Lattice`], motion primitives
//! of a [`systems::ControlSystem`] are integrated into a
//! [`reach::PrimitiveGraph`], and label-correcting shortest-path sweeps produce
//! cost and clearance fields. The [`analysis`] module runs the structural
//! checks (clearance monotonicity, shelf/cliff boundary classification,
//! envelope generators) on the computed fields.
//!
//! All graph costs are carried as integer ticks ([`cost::TICKS_PER_UNIT`] per
//! cost unit) so that sums of edge costs compare exactly and runs are
//! bit-reproducible across worker counts.

pub mod analysis;
pub mod clearance;
pub mod cost;
pub mod error;
pub mod export;
pub mod reach;
pub mod scenario;
pub mod scene;
pub mod space;
pub mod systems;

pub use error::Error;

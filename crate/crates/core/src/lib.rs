//! Efficient, weakly efficient and properly efficient point sets of finite
//! outcome clouds in `R^ℓ`, with machine-checkable certificates.
//!
//! The crate is organised bottom-up:
//!
//! * [`cones`]: polyhedral cones in halfspace form, the open union cones
//!   `D^K`, the parametric cone families that enclose the nonnegative
//!   orthant, and the inclusion constants between them.
//! * [`gerstewitz`]: closed-form Gerstewitz functionals for polyhedral sets
//!   and sampled monotonicity / sublinearity harnesses.
//! * [`efficiency`]: `Min`, `WMin`, Geoffrion / Henig / Benson / NI proper
//!   efficiency over finite clouds.
//! * [`scalarize`]: scalarizing functionals with unique minimizers.
//! * [`corpus`]: deterministic instance generators.
//! * [`io`] and [`report`]: file formats and the analysis report.

pub mod cones;
pub mod corpus;
pub mod efficiency;
mod error;
pub mod gerstewitz;
pub mod io;
mod lp;
mod point;
pub mod report;
pub mod scalarize;

pub use error::{Error, Result};
pub use point::{Point, Tolerance};

/// Multiplicative safety margin applied wherever a strict inequality on a
/// cone parameter has to survive floating point.
pub const SAFETY_MARGIN: f64 = 1e-6;

//! Convex duality for scenario-valued problems.
//!
//! A finite measure space stands in for the underlying probability space:
//! random quantities are vectors indexed by atoms, and a convex integrand is
//! one closed convex function per atom. The crate computes conjugates
//! exactly where the representation allows (piecewise linear, quadratic,
//! boxes, risk measures), builds perturbational duals atom by atom, and
//! reports gaps, attainment and regularity diagnostics.
//!
//! Everything is generic over the scalar; the `*64` aliases fix `f64`.

pub mod applications;
pub mod convex;
pub mod duality;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod scalar;
pub mod scenario;
pub mod schemes;

pub use error::{Error, Result};

pub type ConvexFn64 = convex::ConvexFn<f64>;
pub type Pwl64 = convex::Pwl<f64>;
pub type Quadratic64 = convex::Quadratic<f64>;
pub type Sampled1D64 = convex::Sampled1D<f64>;
pub type MeasureSpace64 = measure::MeasureSpace<f64>;
pub type L0Ext64 = measure::L0Ext<f64>;
pub type L0Point64 = scenario::L0Point<f64>;
pub type ScenarioFn64 = scenario::ScenarioFn<f64>;
pub type Perturbation64 = duality::Perturbation<f64>;
pub type DualityReport64 = duality::DualityReport<f64>;
pub type ConstraintSet64 = schemes::ConstraintSet<f64>;
pub type LinearOp64 = schemes::LinearOp<f64>;

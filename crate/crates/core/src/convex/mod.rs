//! Convex calculus on the real line and on ℝᵈ.

pub mod epigraph;
mod func;
pub mod line;
pub mod pwl;
pub mod quadratic;
pub mod risk_fn;
pub mod sampled;

pub use epigraph::{from_epigraph, Epigraph1D, Halfplane};
pub use func::{inf_convolution_on_grid, minimum_of_line, ConvexFn, Minimum, Subdifferential};
pub use pwl::Pwl;
pub use quadratic::{BoxSet, Quadratic};
pub use risk_fn::RiskFn;
pub use sampled::{conjugate_sampled_llt, SampleSource, Sampled1D, Sampler};

//! Perturbational duality.

mod analysis;
mod perturbation;

pub use analysis::{
    check_optimality, default_y_grid, dual_value, duality_gap, duality_report, farkas_decide,
    moreau_rockafellar_check, primal_value, regularity_probe, Attainment, DualValue, DualityReport,
    Farkas, MrPoint, MrReport, OptimalityReport, PrimalValue, ProbePoint, ProbeReport, Verdict,
};
pub use perturbation::{PertComponent, PertShape, Perturbation};

//! Coefficient engine: exact integral tables, the density pipelines and the
//! assembled gluing polynomial.

pub mod densities;
pub mod moments;
pub mod report;
pub mod sfunction;

pub use densities::{
    closed_form_densities, heat_densities, polynomial_p, zeta_densities, zeta_r_at_zero,
    ClosedFormDensities, DensityEngine, JetField,
};
pub use moments::{mu_contour_heat, mu_contour_zeta, xi_moment_heat, xi_moment_zeta};
pub use report::{coefficient_report, CoefficientReport};
pub use sfunction::SFunction;

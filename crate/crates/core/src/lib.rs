//! Symbol calculus for the Dirichlet-to-Neumann operator family `R(λ)` on a
//! 2-dimensional cutting surface, the coefficient densities of its heat-trace
//! and `ln Det R(λ)` asymptotics, and a numerical harness that verifies the
//! BFK gluing formula on explicit product models where every spectrum is
//! known in closed form.
//!
//! The crate is organized along the pipeline:
//!
//! * [`geometry`] — metric/bundle jets at a point of the cutting surface in
//!   boundary normal coordinates, and the curvature invariants consumed by
//!   the coefficient formulas.
//! * [`symbol`] — a canonical term algebra for parameter-dependent symbols;
//!   runs the Riccati recursion for the DtN symbol and the resolvent
//!   recursion, in the weight-2 and λ-as-constant gradings.
//! * [`coeff`] — μ-contour and ξ-plane integrals (exact rational arithmetic)
//!   turning resolvent symbols into the densities `π_j`, `q_j`, `v_j(λ)` and
//!   the gluing polynomial `P(λ) = a₁λ + a₀`.
//! * [`models`] — exact mode-level spectra for `S¹(L) × N` with `N` a flat
//!   torus or round sphere: DtN spectra, one-dimensional determinants and
//!   regularized determinants.
//! * [`harness`] — end-to-end experiments fitting the asymptotic expansions
//!   and comparing them against the analytic densities.

pub mod coeff;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod models;
pub mod sum;
pub mod symbol;

pub use coeff::report::CoefficientReport;
pub use coeff::sfunction::SFunction;
pub use error::Error;
pub use geometry::{CurvatureInvariants, MetricJet};
pub use harness::experiments::ExperimentReport;
pub use harness::fit::FitSpec;
pub use models::{Model, ModeSpectrum, RegularizedSum};
pub use symbol::expr::{SymbolExpr, SymbolTerm, Variant};

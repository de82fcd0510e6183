//! Numerical laboratory for polaron-type particle-field models.
//!
//! A translation-invariant particle coupled linearly to a boson field is
//! studied through two independent routes that must agree:
//!
//! * sparse spectral theory on truncated Fock spaces ([`fock`], [`spectral`]):
//!   fiber Hamiltonians H(P), the energy-momentum relation E(P), the inverse
//!   effective mass E''(0), and semigroup characteristic functions;
//! * path-integral Monte Carlo for the same finite-mode model ([`pathmc`]):
//!   Gibbs-weighted Brownian paths with pair interaction kernel W, whose
//!   large-time displacement variance yields the diffusion constant σ².
//!
//! The central identity under test is 1/m_eff = σ². A separate toy laboratory
//! ([`cltlab`]) exercises the two-sided pinning limit theory for synthetic
//! fibered models with prescribed energy-minimum structure.

pub mod error;
pub mod fock;
pub mod model;
pub mod numeric;
pub mod pathmc;
pub mod spectral;

pub use error::CoreError;
pub use model::{DispersionSpec, FormFactorSpec, KGrid, KGridSpec, ModelSpec, Vec3};

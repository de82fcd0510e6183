//! Shared numerical utilities: quadrature, sequence extrapolation,
//! log-domain arithmetic and small least-squares fits.

pub mod extrap;
pub mod fit;
pub mod logspace;
pub mod quad;

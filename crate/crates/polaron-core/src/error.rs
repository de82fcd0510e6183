//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("form factor is singular at k = 0 for the sharp-cutoff Coulomb kind")]
    SingularFormFactor,

    #[error("no closed form or convergent quadrature for this kernel: {0}")]
    UnsupportedKernel(String),

    #[error("quadrature failed to converge: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("basis would exceed the configured limit: {size} > {limit}")]
    BasisTooLarge { size: u128, limit: u64 },

    #[error("occupation state not in basis")]
    StateNotInBasis,

    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("dense oracle limited to dimension {limit}, got {dim}")]
    DenseTooLarge { dim: usize, limit: usize },

    #[error("vacuum overlap |<vac, psi0>| = {overlap:.3e} too small to normalize the relaxed boundary")]
    VanishingOverlap { overlap: f64 },

    #[error("scaling ladder unusable below eps = {eps:.3e}: |ln G| = {ln_g:.3e} exceeds the representable range")]
    ScalingUnderflow { eps: f64, ln_g: f64 },

    #[error("momentum grid too small to bracket the minimizer: argmin uses boundary modes at |k| > {radius:.3}")]
    GridBoundaryMinimum { radius: f64 },

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidMcConfig(String),

    #[error("invalid toy model: {0}")]
    InvalidToy(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;

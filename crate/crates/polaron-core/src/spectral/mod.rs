//! Spectral route: Lanczos eigensolves, semigroup matrix elements, the
//! energy-momentum relation and its derived quantities.

mod charfn;
mod curve;
mod krylov;
mod lanczos;

pub use charfn::{
    char_fn_spectral, sigma_from_scaling, CharFnBoundary, CharFnValue, ScalingLadder,
    ScalingRow, TwoSidedParams,
};
pub use curve::{
    effective_mass, energy_curve, essential_edge, CurvePoint, EssentialEdge, MassResult,
};
pub use krylov::Semigroup;
pub use lanczos::{dense_ground_state, dense_spectrum, ground_state, GroundState};

use serde::{Deserialize, Serialize};

/// Iterative-solver options shared across the spectral operations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    /// Relative residual tolerance for eigenpairs and semigroup values.
    pub tol: f64,
    /// Lanczos iteration budget per restart.
    pub max_iter: usize,
    /// Number of restarts before giving up.
    pub restarts: usize,
    /// Seed for the deterministic start vector.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 400,
            restarts: 8,
            seed: 0x5eed_1ab,
        }
    }
}

/// Second-order weak-coupling slope of the ground energy at P = 0:
/// [E(0; α) - E(0; 0)]/α → -Σ_i Δk^d g(k_i)² / (ω(k_i) + ½|k_i|²).
///
/// Evaluated directly from the model data, independently of assembly and
/// eigensolves; serves as the oracle for the perturbative consistency check.
pub fn second_order_slope(model: &crate::model::Model) -> crate::error::Result<f64> {
    let mut s = 0.0;
    for k in &model.grid.modes {
        let g = model.spec.form_factor.eval(k)?;
        let w = model.spec.dispersion.eval(k);
        s += model.grid.cell_volume * g * g / (w + 0.5 * k.norm_squared());
    }
    Ok(-s)
}

//! Path-integral Monte Carlo for the Gibbs-weighted Brownian measure: pinned
//! or free discretized paths with the pair-interaction kernel W, estimating
//! displacement characteristic functions and the diffusion constant σ².

mod action;
mod estimate;
mod moves;
mod sampler;
pub mod stats;

pub use action::{
    interaction_action, ActionEngine, ActionKernel, KernelKind,
};
pub use estimate::{
    estimate_charfn, estimate_sigma2, CharFnEstimate, MCEstimate, MsdRow, Sigma2Report,
};
pub use moves::{propose_and_accept, MoveKind};
pub use sampler::{run_sampler, ChainStats, McConfig, SamplerOutput};
pub use stats::{blocking, BlockingResult};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::Vec3;

/// Endpoint treatment of the sampled paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundaryKind {
    /// q(-T_minus) pinned at the origin, far end free (T_minus is usually 0
    /// here; the classic one-sided setup).
    DeltaStartFreeEnd,
    /// Both ends free; increments carry all the information and a global
    /// translation is a symmetry.
    FreeBoth,
    /// Both endpoints weighted by a radial profile φ(|q|), given as a table
    /// with linear interpolation (clamped beyond the last knot).
    TwoSidedPinned { r: Vec<f64>, phi: Vec<f64> },
}

impl BoundaryKind {
    /// ln φ(|q|) of the endpoint weight; 0 for unweighted boundaries.
    pub fn ln_weight(&self, q: &Vec3) -> f64 {
        match self {
            BoundaryKind::DeltaStartFreeEnd | BoundaryKind::FreeBoth => 0.0,
            BoundaryKind::TwoSidedPinned { r, phi } => {
                let x = q.norm();
                if x <= r[0] {
                    return phi[0].ln();
                }
                match r.iter().position(|&ri| ri >= x) {
                    None => phi[phi.len() - 1].ln(),
                    Some(j) => {
                        let (r0, r1) = (r[j - 1], r[j]);
                        let w = (x - r0) / (r1 - r0);
                        (phi[j - 1] + w * (phi[j] - phi[j - 1])).ln()
                    }
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let BoundaryKind::TwoSidedPinned { r, phi } = self {
            if r.len() < 2 || r.len() != phi.len() {
                return Err(CoreError::InvalidMcConfig(
                    "pinning table needs matching r/phi lists with at least two knots".into(),
                ));
            }
            if !r.windows(2).all(|w| w[0] < w[1]) || r[0] < 0.0 {
                return Err(CoreError::InvalidMcConfig(
                    "pinning radii must be nonnegative and strictly increasing".into(),
                ));
            }
            if phi.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
                return Err(CoreError::InvalidMcConfig(
                    "pinning weights must be strictly positive and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Time layout and boundary treatment of a discretized path: positions live
/// on the dt lattice from -T_minus through t + T_plus, with the observation
/// window [0, t] in the middle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    /// Observation window length.
    pub t: f64,
    /// Buffer before time 0.
    pub t_minus: f64,
    /// Buffer after time t.
    pub t_plus: f64,
    /// Lattice step.
    pub dt: f64,
    pub boundary: BoundaryKind,
}

fn lattice_steps(span: f64, dt: f64, what: &str) -> Result<usize> {
    if span < 0.0 {
        return Err(CoreError::InvalidMcConfig(format!(
            "{what} must be nonnegative, got {span}"
        )));
    }
    let steps = span / dt;
    let rounded = steps.round();
    if (steps - rounded).abs() > 1e-9 * steps.max(1.0) {
        return Err(CoreError::InvalidMcConfig(format!(
            "{what} = {span} is not a multiple of dt = {dt}"
        )));
    }
    Ok(rounded as usize)
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(CoreError::InvalidMcConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        self.boundary.validate()?;
        let n = self.n_steps()?;
        if n < 2 {
            return Err(CoreError::InvalidMcConfig(
                "path must have at least two steps".into(),
            ));
        }
        Ok(())
    }

    /// Number of lattice steps N; the path has N+1 positions.
    pub fn n_steps(&self) -> Result<usize> {
        Ok(lattice_steps(self.t_minus, self.dt, "t_minus")?
            + lattice_steps(self.t, self.dt, "t")?
            + lattice_steps(self.t_plus, self.dt, "t_plus")?)
    }

    /// Lattice index of physical time 0.
    pub fn index_zero(&self) -> Result<usize> {
        lattice_steps(self.t_minus, self.dt, "t_minus")
    }

    /// Lattice index of a nonnegative physical time within [0, t + t_plus].
    pub fn index_at(&self, time: f64) -> Result<usize> {
        Ok(self.index_zero()? + lattice_steps(time, self.dt, "observation time")?)
    }
}

/// A discretized path: N+1 positions on the dt lattice.
#[derive(Debug, Clone)]
pub struct Path {
    pub q: Vec<Vec3>,
    pub dt: f64,
    /// Active spatial dimension (trailing axes stay exactly zero).
    pub dim: usize,
}

impl Path {
    /// The all-zero path for a layout (the canonical cold start).
    pub fn zeros(cfg: &PathConfig, dim: usize) -> Result<Path> {
        cfg.validate()?;
        Ok(Path {
            q: vec![Vec3::zeros(); cfg.n_steps()? + 1],
            dt: cfg.dt,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

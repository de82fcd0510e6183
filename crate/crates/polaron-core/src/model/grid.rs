//! Symmetric cubic momentum grids.

use super::Vec3;
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Lattice spacing and ball radius for the mode grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KGridSpec {
    pub dk: f64,
    pub kmax: f64,
}

impl KGridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dk > 0.0) || !self.dk.is_finite() {
            return Err(CoreError::InvalidModel(format!(
                "grid spacing dk must be positive, got {}",
                self.dk
            )));
        }
        if !(self.kmax >= self.dk) || !self.kmax.is_finite() {
            return Err(CoreError::InvalidModel(format!(
                "grid radius kmax must be >= dk, got {}",
                self.kmax
            )));
        }
        Ok(())
    }
}

/// Realized grid: the nonzero points of Δk·Z^d inside the ball |k| ≤ kmax,
/// in lexicographic (n1, n2, n3) order. Symmetric under k → -k by
/// construction.
#[derive(Debug, Clone)]
pub struct KGrid {
    pub dim: usize,
    pub dk: f64,
    pub modes: Vec<Vec3>,
    /// Δk^d, the Riemann cell volume attached to each mode.
    pub cell_volume: f64,
}

impl KGrid {
    pub fn build(spec: &KGridSpec, dim: usize) -> Result<KGrid> {
        spec.validate()?;
        let nmax = (spec.kmax / spec.dk).floor() as i64 + 1;
        // Slightly permissive radius test keeps shell modes that land exactly
        // on |k| = kmax independent of rounding in kmax/dk.
        let r2max = spec.kmax * spec.kmax * (1.0 + 1e-12);
        let dk2 = spec.dk * spec.dk;
        let range = |active: bool| if active { -nmax..=nmax } else { 0..=0 };
        let mut modes = Vec::new();
        for n1 in range(dim >= 1) {
            for n2 in range(dim >= 2) {
                for n3 in range(dim >= 3) {
                    let r2i = (n1 * n1 + n2 * n2 + n3 * n3) as f64;
                    if r2i == 0.0 || r2i * dk2 > r2max {
                        continue;
                    }
                    modes.push(Vec3::new(
                        n1 as f64 * spec.dk,
                        n2 as f64 * spec.dk,
                        n3 as f64 * spec.dk,
                    ));
                }
            }
        }
        Ok(KGrid {
            dim,
            dk: spec.dk,
            modes,
            cell_volume: spec.dk.powi(dim as i32),
        })
    }

    /// Grid with an explicit mode list (synthetic bases in tests and toys).
    pub fn from_modes(dk: f64, dim: usize, modes: Vec<Vec3>) -> KGrid {
        KGrid {
            dim,
            dk,
            modes,
            cell_volume: dk.powi(dim as i32),
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

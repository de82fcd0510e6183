//! Model definition: dispersion, form factor, momentum grid and the
//! interaction kernel W shared by the spectral and Monte Carlo routes.

mod condition;
mod grid;
mod kernel;

pub use condition::{check_condition_c, ConditionCheck, ConditionReport};
pub use grid::{KGrid, KGridSpec};
pub use kernel::{coulomb_limit_kernel, w_continuum, w_discrete};

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Momenta and positions live in at most three dimensions; for d < 3 the
/// trailing components are held at zero so that dot products and norms need
/// no dimension dispatch.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Embed the first `dim` components of `v` into a [`Vec3`].
pub fn embed(dim: usize, v: &[f64]) -> Vec3 {
    let mut out = Vec3::zeros();
    for (i, &c) in v.iter().take(dim).enumerate() {
        out[i] = c;
    }
    out
}

/// Boson dispersion relation ω(k), rotation invariant by construction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DispersionSpec {
    /// ω(k) = c0.
    Constant { c0: f64 },
    /// ω(k) = c0 + a·|k|².
    MassiveQuadratic { c0: f64, a: f64 },
    /// Radial table with linear interpolation, clamped outside the knots.
    Tabulated { r: Vec<f64>, omega: Vec<f64> },
}

impl DispersionSpec {
    pub fn eval_radial(&self, r: f64) -> f64 {
        match self {
            DispersionSpec::Constant { c0 } => *c0,
            DispersionSpec::MassiveQuadratic { c0, a } => c0 + a * r * r,
            DispersionSpec::Tabulated { r: knots, omega } => {
                if r <= knots[0] {
                    return omega[0];
                }
                if r >= *knots.last().unwrap() {
                    return *omega.last().unwrap();
                }
                let idx = knots.partition_point(|&k| k <= r) - 1;
                let (r0, r1) = (knots[idx], knots[idx + 1]);
                let s = (r - r0) / (r1 - r0);
                omega[idx] * (1.0 - s) + omega[idx + 1] * s
            }
        }
    }

    pub fn eval(&self, k: &Vec3) -> f64 {
        self.eval_radial(k.norm())
    }

    /// Greatest lower bound of ω used in massiveness checks and decay bounds.
    pub fn floor(&self) -> f64 {
        match self {
            DispersionSpec::Constant { c0 } => *c0,
            DispersionSpec::MassiveQuadratic { c0, .. } => *c0,
            DispersionSpec::Tabulated { omega, .. } => {
                omega.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DispersionSpec::Constant { c0 } | DispersionSpec::MassiveQuadratic { c0, .. } => {
                if !c0.is_finite() || *c0 <= 0.0 {
                    return Err(CoreError::InvalidModel(format!(
                        "dispersion floor c0 must be positive, got {c0}"
                    )));
                }
            }
            DispersionSpec::Tabulated { r, omega } => {
                if r.len() != omega.len() || r.len() < 2 {
                    return Err(CoreError::InvalidModel(
                        "tabulated dispersion needs matching r/omega tables with >= 2 knots"
                            .into(),
                    ));
                }
                if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CoreError::InvalidModel(
                        "tabulated dispersion knots must be nonnegative and strictly increasing"
                            .into(),
                    ));
                }
                if omega.iter().any(|v| !v.is_finite()) {
                    return Err(CoreError::InvalidModel(
                        "tabulated dispersion values must be finite".into(),
                    ));
                }
            }
        }
        if let DispersionSpec::MassiveQuadratic { a, .. } = self {
            if !a.is_finite() || *a < 0.0 {
                return Err(CoreError::InvalidModel(format!(
                    "quadratic dispersion curvature must be >= 0, got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Coupling form factor g(k), real and rotation invariant.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormFactorSpec {
    /// g(k) = g0·exp(-|k|²/(2·width²)).
    Gaussian { g0: f64, width: f64 },
    /// Sharp-cutoff Coulomb coupling g(k) = χ_{|k| ≤ κ} / (√2·π·|k|),
    /// the standard large-polaron form factor. Singular at k = 0.
    Froehlich { kappa: f64 },
}

impl FormFactorSpec {
    /// g(|k|); the Coulomb kind rejects k = 0 as a domain error.
    pub fn eval_radial(&self, r: f64) -> Result<f64> {
        match self {
            FormFactorSpec::Gaussian { g0, width } => {
                Ok(g0 * (-0.5 * (r / width).powi(2)).exp())
            }
            FormFactorSpec::Froehlich { kappa } => {
                if r == 0.0 {
                    return Err(CoreError::SingularFormFactor);
                }
                if r > *kappa {
                    return Ok(0.0);
                }
                Ok(1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI * r))
            }
        }
    }

    pub fn eval(&self, k: &Vec3) -> Result<f64> {
        self.eval_radial(k.norm())
    }

    fn validate(&self) -> Result<()> {
        match self {
            FormFactorSpec::Gaussian { g0, width } => {
                if !g0.is_finite() || !width.is_finite() || *width <= 0.0 {
                    return Err(CoreError::InvalidModel(
                        "gaussian form factor needs finite g0 and width > 0".into(),
                    ));
                }
            }
            FormFactorSpec::Froehlich { kappa } => {
                if !(*kappa > 0.0) {
                    return Err(CoreError::InvalidModel(format!(
                        "cutoff kappa must be positive, got {kappa}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Full model specification; [`Model::new`] validates it and realizes the
/// momentum grid.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dimension: usize,
    pub alpha: f64,
    pub dispersion: DispersionSpec,
    pub form_factor: FormFactorSpec,
    pub grid: KGridSpec,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(CoreError::InvalidModel(format!(
                "dimension must be 1, 2 or 3, got {}",
                self.dimension
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(CoreError::InvalidModel(format!(
                "coupling alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        self.dispersion.validate()?;
        self.form_factor.validate()?;
        self.grid.validate()?;
        Ok(())
    }
}

/// Validated model with its realized grid; the unit shared by assembly,
/// kernel evaluation and the Monte Carlo route.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub grid: KGrid,
}

impl Model {
    pub fn new(spec: ModelSpec) -> Result<Model> {
        spec.validate()?;
        let grid = KGrid::build(&spec.grid, spec.dimension)?;
        Ok(Model { spec, grid })
    }

    /// Synthetic grids for tests and toy constructions bypass the lattice
    /// builder but still validate the rest of the spec.
    pub fn with_modes(spec: ModelSpec, modes: Vec<Vec3>) -> Result<Model> {
        spec.validate()?;
        let grid = KGrid::from_modes(spec.grid.dk, spec.dimension, modes);
        Ok(Model { spec, grid })
    }

    pub fn dim(&self) -> usize {
        self.spec.dimension
    }

    /// Σ_i Δk^d g(k_i)², the discrete squared coupling norm.
    pub fn coupling_norm2(&self) -> Result<f64> {
        let mut s = 0.0;
        for k in &self.grid.modes {
            let g = self.spec.form_factor.eval(k)?;
            s += self.grid.cell_volume * g * g;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn froehlich_value_at_unit_momentum() {
        let g = FormFactorSpec::Froehlich { kappa: 2.0 };
        let v = g.eval(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((v - 0.225_079_079_039_276_51).abs() < 1e-16);
        assert_eq!(g.eval(&Vec3::new(0.0, 3.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(
            g.eval(&Vec3::zeros()),
            Err(CoreError::SingularFormFactor)
        ));
    }

    #[test]
    fn gaussian_peak_value() {
        let g = FormFactorSpec::Gaussian { g0: 0.8, width: 2.0 };
        assert_eq!(g.eval(&Vec3::zeros()).unwrap(), 0.8);
        let v = g.eval(&Vec3::new(2.0, 0.0, 0.0)).unwrap();
        assert!((v - 0.8 * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tabulated_dispersion_interpolates_and_clamps() {
        let d = DispersionSpec::Tabulated {
            r: vec![0.0, 1.0, 2.0],
            omega: vec![1.0, 2.0, 2.5],
        };
        assert_eq!(d.eval_radial(0.5), 1.5);
        assert_eq!(d.eval_radial(5.0), 2.5);
        assert_eq!(d.floor(), 1.0);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(DispersionSpec::Constant { c0: 0.0 }.validate().is_err());
        assert!(DispersionSpec::Tabulated {
            r: vec![0.0, 0.0],
            omega: vec![1.0, 1.0],
        }
        .validate()
        .is_err());
        assert!(FormFactorSpec::Froehlich { kappa: -1.0 }.validate().is_err());
    }
}

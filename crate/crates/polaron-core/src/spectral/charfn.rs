//! Finite-time characteristic functions G(k, t) of the particle displacement
//! under three path boundary conditions, and the diffusive scaling ladder
//! G(εk, t/ε²) whose limit exponent is σ²·t·|k|²/2.

use serde::{Deserialize, Serialize};

use super::krylov::Semigroup;
use super::lanczos::ground_state;
use super::SolveOptions;
use crate::error::{CoreError, Result};
use crate::fock::FockBasis;
use crate::model::Vec3;
use crate::numeric::extrap::aitken_limit;
use crate::numeric::logspace::LogVal;
use crate::numeric::quad::gauss_legendre_on;

/// Boundary condition of the underlying path measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CharFnBoundary {
    /// Paths started in the bare vacuum on one side:
    /// G = ⟨Ω, e^{-tH(k)} Ω⟩ / ⟨Ω, e^{-tH(0)} Ω⟩.
    OneSided,
    /// One side relaxed onto the fiber ground state:
    /// G = ⟨Ω, e^{-t(H(k) - E₀)} ψ₀⟩ / ⟨Ω, ψ₀⟩.
    Relaxed,
    /// Both sides pinned and relaxed over a window of total momenta:
    /// G = Σ_P w(P) ⟨Ω, e^{-T H(P)} e^{-t H(P+k)} e^{-T H(P)} Ω⟩ /
    ///     Σ_P w(P) ⟨Ω, e^{-(2T+t) H(P)} Ω⟩.
    TwoSided(TwoSidedParams),
}

/// Quadrature window for the two-sided boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoSidedParams {
    /// Relaxation time T on each side.
    pub big_t: f64,
    /// Half-width of the total-momentum window per axis.
    pub p_halfwidth: f64,
    /// Gauss-Legendre nodes per axis.
    pub nodes_per_axis: usize,
    /// Width of the Gaussian momentum profile φ̂(P) = e^{-|P|²/(2w²)}.
    pub phi_width: f64,
}

impl Default for TwoSidedParams {
    fn default() -> Self {
        TwoSidedParams {
            big_t: 8.0,
            p_halfwidth: 1.0,
            nodes_per_axis: 8,
            phi_width: 0.75,
        }
    }
}

/// A characteristic-function value carried both plainly and in log form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CharFnValue {
    /// e^{ln_g} (may underflow to 0 for deep decay; `ln_g` never does).
    pub g: f64,
    pub ln_g: f64,
    pub sign: i8,
}

impl CharFnValue {
    fn from_logval(v: LogVal) -> CharFnValue {
        CharFnValue {
            g: v.value(),
            ln_g: v.ln_abs,
            sign: v.sign,
        }
    }
}

/// Spectral-route characteristic function of the displacement across time t.
pub fn char_fn_spectral(
    basis: &FockBasis,
    k: &Vec3,
    t: f64,
    boundary: &CharFnBoundary,
    opts: &SolveOptions,
) -> Result<CharFnValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(CoreError::InvalidModel(format!(
            "characteristic-function time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(CharFnValue { g: 1.0, ln_g: 0.0, sign: 1 });
    }
    let n = basis.len();
    let mut vacuum = vec![0.0; n];
    vacuum[0] = 1.0;

    match boundary {
        CharFnBoundary::OneSided => {
            let hk = basis.assemble_fiber_hamiltonian(k);
            let h0 = basis.assemble_fiber_hamiltonian(&Vec3::zeros());
            let num = Semigroup::new(&hk, &vacuum)?.quad_form(t, opts)?;
            let den = Semigroup::new(&h0, &vacuum)?.quad_form(t, opts)?;
            Ok(CharFnValue::from_logval(num.div(den)))
        }
        CharFnBoundary::Relaxed => {
            let h0 = basis.assemble_fiber_hamiltonian(&Vec3::zeros());
            let gs = ground_state(&h0, opts)?;
            let overlap = gs.vector[0];
            if overlap.abs() < 1e-10 {
                return Err(CoreError::VanishingOverlap { overlap });
            }
            let hk = basis.assemble_fiber_hamiltonian(k);
            let cross = Semigroup::new(&hk, &gs.vector)?.cross_form(&vacuum, t, opts)?;
            // Undo the ground-energy offset: e^{-t(H(k) - E₀)}.
            let shifted = LogVal {
                ln_abs: cross.ln_abs + t * gs.energy,
                sign: cross.sign,
            };
            Ok(CharFnValue::from_logval(
                shifted.div(LogVal::from_value(overlap)),
            ))
        }
        CharFnBoundary::TwoSided(tp) => {
            if !(tp.big_t > 0.0) || tp.nodes_per_axis < 2 || !(tp.p_halfwidth > 0.0) {
                return Err(CoreError::InvalidModel(
                    "two-sided boundary needs big_t > 0, p_halfwidth > 0 and \
                     at least 2 nodes per axis"
                        .into(),
                ));
            }
            let dim = basis_dim(basis, k);
            let (nodes, weights) = gauss_legendre_on(tp.nodes_per_axis, -tp.p_halfwidth, tp.p_halfwidth);
            // Cartesian product over the active axes.
            let mut points: Vec<(Vec3, f64)> = vec![(Vec3::zeros(), 1.0)];
            for axis in 0..dim {
                let mut next = Vec::with_capacity(points.len() * nodes.len());
                for (p, w) in &points {
                    for (x, wx) in nodes.iter().zip(&weights) {
                        let mut q = *p;
                        q[axis] = *x;
                        next.push((q, w * wx));
                    }
                }
                points = next;
            }
            let mut num_terms = Vec::with_capacity(points.len());
            let mut den_terms = Vec::with_capacity(points.len());
            for (p, w) in &points {
                let ln_profile2 = -p.norm_squared() / (tp.phi_width * tp.phi_width);
                let ln_w = ln_profile2 + w.ln();
                let hp = basis.assemble_fiber_hamiltonian(p);
                let mut sg_p = Semigroup::new(&hp, &vacuum)?;
                // Denominator collapses to a single quadratic form.
                let den = sg_p.quad_form(2.0 * tp.big_t + t, opts)?;
                den_terms.push(LogVal {
                    ln_abs: den.ln_abs + ln_w,
                    sign: den.sign,
                });
                // Numerator: relax for T, then propagate with H(P+k).
                let (w1, ln1) = sg_p.apply(tp.big_t, opts)?;
                let hpk = basis.assemble_fiber_hamiltonian(&(p + k));
                let qf = Semigroup::new(&hpk, &w1)?.quad_form(t, opts)?;
                num_terms.push(LogVal {
                    ln_abs: qf.ln_abs + 2.0 * ln1 + ln_w,
                    sign: qf.sign,
                });
            }
            let num = LogVal::sum(&num_terms);
            let den = LogVal::sum(&den_terms);
            if den.sign == 0 {
                return Err(CoreError::VanishingOverlap { overlap: 0.0 });
            }
            Ok(CharFnValue::from_logval(num.div(den)))
        }
    }
}

/// Effective dimension for quadrature windows: the number of axes the model
/// actually uses (axes beyond it are frozen at zero in every mode).
fn basis_dim(basis: &FockBasis, _k: &Vec3) -> usize {
    basis.dim()
}

/// One rung of the diffusive scaling ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    pub eps: f64,
    /// ln G(εk̂, t/ε²).
    pub ln_g: f64,
    /// σ²-estimate -2 ln G / (t |k̂|²).
    pub sigma2: f64,
    /// Whether |ln G| stayed within plain-f64 range (|ln G| ≤ 700).
    pub representable: bool,
}

/// Diffusive scaling ladder with extrapolation and convergence diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingLadder {
    pub rows: Vec<ScalingRow>,
    /// Aitken-accelerated limit of the σ² sequence over usable rows.
    pub extrapolated: f64,
    /// Successive-difference ratios |Δσᵢ₊₁/Δσᵢ| of usable rows.
    pub rate_ratios: Vec<f64>,
    /// True when the differences are (weakly) contracting.
    pub cauchy: bool,
    pub flags: Vec<String>,
}

/// Evaluate σ²(ε) = -2 ln G(εk̂, t/ε²) / (t|k̂|²) down a ladder of ε values
/// and extrapolate ε → 0.
///
/// Rows whose |ln G| exceeds the representable range are excluded from the
/// extrapolation and flagged; if no usable row remains the call fails with
/// the offending scale.
pub fn sigma_from_scaling(
    basis: &FockBasis,
    khat: &Vec3,
    t: f64,
    eps_list: &[f64],
    boundary: &CharFnBoundary,
    opts: &SolveOptions,
) -> Result<ScalingLadder> {
    if eps_list.is_empty() {
        return Err(CoreError::InvalidModel("empty scaling ladder".into()));
    }
    if !(t > 0.0) {
        return Err(CoreError::InvalidModel(
            "scaling ladder requires t > 0".into(),
        ));
    }
    let k2 = khat.norm_squared();
    if !(k2 > 0.0) {
        return Err(CoreError::InvalidModel(
            "scaling direction must be nonzero".into(),
        ));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a)); // descending: coarse to fine
    let mut rows = Vec::with_capacity(eps_sorted.len());
    let mut flags = Vec::new();
    for &eps in &eps_sorted {
        if !(eps > 0.0) {
            return Err(CoreError::InvalidModel(format!(
                "scaling parameter must be positive, got {eps}"
            )));
        }
        let k = khat * eps;
        let g = char_fn_spectral(basis, &k, t / (eps * eps), boundary, opts)?;
        if g.sign <= 0 {
            flags.push(format!(
                "G({eps:.3e}) lost positivity; excluded from the ladder"
            ));
            rows.push(ScalingRow {
                eps,
                ln_g: f64::NAN,
                sigma2: f64::NAN,
                representable: false,
            });
            continue;
        }
        let representable = g.ln_g.abs() <= 700.0;
        if !representable {
            flags.push(format!(
                "G({eps:.3e}) below plain-f64 range (ln G = {:.3e})",
                g.ln_g
            ));
        }
        rows.push(ScalingRow {
            eps,
            ln_g: g.ln_g,
            sigma2: -2.0 * g.ln_g / (t * k2),
            representable,
        });
    }
    let usable: Vec<f64> = rows
        .iter()
        .filter(|r| r.representable && r.sigma2.is_finite())
        .map(|r| r.sigma2)
        .collect();
    if usable.is_empty() {
        let worst = rows.last().expect("nonempty ladder");
        return Err(CoreError::ScalingUnderflow {
            eps: worst.eps,
            ln_g: worst.ln_g,
        });
    }
    if usable.len() < rows.len() {
        let lo = rows
            .iter()
            .filter(|r| r.representable)
            .map(|r| r.eps)
            .fold(f64::INFINITY, f64::min);
        let hi = rows
            .iter()
            .filter(|r| r.representable)
            .map(|r| r.eps)
            .fold(0.0f64, f64::max);
        flags.push(format!("usable scaling range: eps in [{lo:.3e}, {hi:.3e}]"));
    }
    let mut rate_ratios = Vec::new();
    for w in usable.windows(3) {
        let d0 = (w[1] - w[0]).abs();
        let d1 = (w[2] - w[1]).abs();
        if d0 > 0.0 {
            rate_ratios.push(d1 / d0);
        }
    }
    // Contracting ladder: allow slack for noise around an already-converged
    // sequence (tiny differences compare unreliably).
    let span = usable
        .iter()
        .cloned()
        .fold(0.0f64, |a, b| a.max(b.abs()))
        .max(1e-300);
    let cauchy = usable.windows(2).all(|w| (w[1] - w[0]).abs() < span)
        && rate_ratios.iter().all(|&r| r < 1.25);
    let extrapolated = aitken_limit(&usable);
    Ok(ScalingLadder {
        rows,
        extrapolated,
        rate_ratios,
        cauchy,
        flags,
    })
}

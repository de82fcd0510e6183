//! Admissibility checks on (g, ω): realness/rotation invariance, square
//! summability, massiveness ω ≥ c0 > 0 and sub-additivity.

use super::{Model, Vec3};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub pass: bool,
    pub checks: Vec<ConditionCheck>,
}

/// Verify the standing admissibility assumptions on sampled momenta.
///
/// Deterministic for a given (model, samples, seed); the report lists each
/// sub-check with a diagnostic detail string.
pub fn check_condition_c(model: &Model, samples: usize, seed: u64) -> Result<ConditionReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let d = model.dim();
    let spec = &model.spec;
    let mut checks = Vec::new();

    let random_k = |rng: &mut ChaCha12Rng| -> Vec3 {
        let mut k = Vec3::zeros();
        for i in 0..d {
            k[i] = rng.random_range(-1.5 * spec.grid.kmax..1.5 * spec.grid.kmax);
        }
        k
    };

    // g real and rotation invariant: finite on the grid, equal on images of
    // equal radius.
    {
        let mut pass = true;
        let mut detail = String::from("finite and radius-determined on all samples");
        for _ in 0..samples {
            let k = random_k(&mut rng);
            let r = k.norm();
            if r == 0.0 {
                continue;
            }
            let g1 = spec.form_factor.eval_radial(r)?;
            // Rotate to an axis: same radius must give the same value.
            let g2 = spec.form_factor.eval(&Vec3::new(r, 0.0, 0.0))?;
            if !g1.is_finite() || g1 != g2 {
                pass = false;
                detail = format!("g mismatch at |k| = {r}: {g1} vs {g2}");
                break;
            }
        }
        checks.push(ConditionCheck {
            name: "form-factor-real-rotation-invariant".into(),
            pass,
            detail,
        });
    }

    // Square summability of the discrete coupling.
    {
        let n2 = model.coupling_norm2()?;
        checks.push(ConditionCheck {
            name: "form-factor-square-summable".into(),
            pass: n2.is_finite() && n2 >= 0.0,
            detail: format!("discrete norm2 = {n2:.6e}"),
        });
    }

    // Massiveness: ω ≥ c0 > 0 on grid modes and random momenta.
    {
        let floor = spec.dispersion.floor();
        let mut min_seen = f64::INFINITY;
        for k in &model.grid.modes {
            min_seen = min_seen.min(spec.dispersion.eval(k));
        }
        for _ in 0..samples {
            min_seen = min_seen.min(spec.dispersion.eval(&random_k(&mut rng)));
        }
        min_seen = min_seen.min(spec.dispersion.eval_radial(0.0));
        let pass = floor > 0.0 && min_seen >= floor - 1e-12;
        checks.push(ConditionCheck {
            name: "dispersion-massive".into(),
            pass,
            detail: format!("floor = {floor:.6e}, sampled min = {min_seen:.6e}"),
        });
    }

    // Rotation invariance of ω.
    {
        let mut pass = true;
        let mut detail = String::from("radius-determined on all samples");
        for _ in 0..samples {
            let k = random_k(&mut rng);
            let w1 = spec.dispersion.eval(&k);
            let w2 = spec.dispersion.eval_radial(k.norm());
            if w1 != w2 {
                pass = false;
                detail = format!("omega mismatch at |k| = {}", k.norm());
                break;
            }
        }
        checks.push(ConditionCheck {
            name: "dispersion-rotation-invariant".into(),
            pass,
            detail,
        });
    }

    // Sub-additivity ω(k+k') ≤ ω(k) + ω(k') on sampled pairs.
    {
        let mut pass = true;
        let mut detail = String::from("holds on all sampled pairs");
        let m = model.grid.len();
        for _ in 0..samples {
            let (a, b) = if m >= 2 && rng.random_bool(0.5) {
                let i = rng.random_range(0..m);
                let j = rng.random_range(0..m);
                (model.grid.modes[i], model.grid.modes[j])
            } else {
                (random_k(&mut rng), random_k(&mut rng))
            };
            let lhs = spec.dispersion.eval(&(a + b));
            let rhs = spec.dispersion.eval(&a) + spec.dispersion.eval(&b);
            if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                pass = false;
                detail = format!(
                    "violated: omega({:.3}) = {lhs:.6} > {rhs:.6}",
                    (a + b).norm()
                );
                break;
            }
        }
        checks.push(ConditionCheck {
            name: "dispersion-subadditive".into(),
            pass,
            detail,
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(ConditionReport { pass, checks })
}

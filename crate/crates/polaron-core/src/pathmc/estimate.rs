//! Estimators on top of sampler output: the characteristic function of the
//! endpoint displacement, and the diffusion constant σ² from the
//! mean-square-displacement growth law Var(q(τ) - q(0)) = σ²·d·τ.

use serde::{Deserialize, Serialize};

use super::sampler::SamplerOutput;
use super::stats::{blocking, BlockingResult};
use crate::error::{CoreError, Result};
use crate::model::Vec3;

/// A Monte Carlo number with its provenance: blocked standard error,
/// integrated autocorrelation time, sample count and master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub tau_int: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Every chain's blocking analysis found a plateau.
    pub plateau_found: bool,
}

/// One observation time of the mean-square-displacement ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsdRow {
    pub tau: f64,
    pub msd: f64,
    pub stderr: f64,
    /// msd / (d·τ): the pointwise diffusion estimate.
    pub sigma2_pointwise: f64,
}

/// σ² from the growth-law fit, cross-checked against the characteristic
/// function estimator at a probe momentum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sigma2Report {
    pub rows: Vec<MsdRow>,
    /// Weighted least-squares slope of msd against d·τ.
    pub fit: MCEstimate,
    pub chi2_per_dof: f64,
    /// -2·ln Re Ĝ(k, τ_max) / (|k|²·τ_max), when Ĝ is usable.
    pub alt: Option<MCEstimate>,
    /// |fit - alt| in combined standard errors.
    pub discrepancy_sigmas: Option<f64>,
    /// The two estimators agree within three combined standard errors.
    pub consistent: bool,
    pub flags: Vec<String>,
    pub seed: u64,
}

/// Ĝ(k, τ) = E[e^{i·k·(q(τ)-q(0))}]; the real part is the estimate, the
/// imaginary part must vanish (reflection symmetry) and is kept as a check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharFnEstimate {
    pub k: [f64; 3],
    pub tau: f64,
    pub real: MCEstimate,
    pub imag: MCEstimate,
    /// |imag| is within three standard errors of zero.
    pub imag_consistent: bool,
}

/// Sample-count-weighted combination of per-chain blocking results.
fn combine(per_chain: &[BlockingResult], seed: u64) -> MCEstimate {
    let total: u64 = per_chain.iter().map(|b| b.n_samples).sum();
    let w_total = total.max(1) as f64;
    let mut mean = 0.0;
    let mut var = 0.0;
    let mut tau = 0.0f64;
    let mut plateau = true;
    for b in per_chain {
        let w = b.n_samples as f64 / w_total;
        mean += w * b.mean;
        var += (w * b.stderr) * (w * b.stderr);
        tau = tau.max(b.tau_int);
        plateau &= b.plateau_found;
    }
    MCEstimate {
        mean,
        stderr: var.sqrt(),
        tau_int: tau,
        n_samples: total as usize,
        seed,
        plateau_found: plateau,
    }
}

/// Reduce each recorded row to a scalar and block chain by chain.
fn blocked_scalar<F>(out: &SamplerOutput, f: F) -> Vec<BlockingResult>
where
    F: Fn(&[Vec3]) -> f64,
{
    out.displacements
        .iter()
        .map(|chain| {
            let series: Vec<f64> = chain.iter().map(|row| f(row)).collect();
            blocking(&series)
        })
        .collect()
}

fn observe_index(out: &SamplerOutput, tau: f64) -> Result<usize> {
    out.observe_times
        .iter()
        .position(|&t| (t - tau).abs() <= 1e-9 * tau.abs().max(1.0))
        .ok_or_else(|| {
            CoreError::InvalidMcConfig(format!("time {tau} was not recorded by the sampler"))
        })
}

/// Estimate Ĝ(k, τ) from recorded displacements.
pub fn estimate_charfn(out: &SamplerOutput, k: &Vec3, tau: f64) -> Result<CharFnEstimate> {
    let j = observe_index(out, tau)?;
    let real = combine(&blocked_scalar(out, |row| k.dot(&row[j]).cos()), out.seed);
    let imag = combine(&blocked_scalar(out, |row| k.dot(&row[j]).sin()), out.seed);
    let imag_consistent = if imag.stderr == 0.0 {
        imag.mean == 0.0
    } else {
        imag.mean.abs() <= 3.0 * imag.stderr
    };
    Ok(CharFnEstimate {
        k: [k[0], k[1], k[2]],
        tau,
        real,
        imag,
        imag_consistent,
    })
}

/// Fit the diffusion law through the recorded observation times and
/// cross-check against the characteristic-function route at `k_probe`.
///
/// Demands at least five observation times covering a factor of ten so the
/// fit actually constrains a growth law rather than one point.
pub fn estimate_sigma2(out: &SamplerOutput, dim: usize, k_probe: &Vec3) -> Result<Sigma2Report> {
    let times = &out.observe_times;
    if times.len() < 5 {
        return Err(CoreError::InvalidMcConfig(format!(
            "diffusion fit needs at least 5 observation times, got {}",
            times.len()
        )));
    }
    let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = times.iter().cloned().fold(0.0f64, f64::max);
    if !(t_min > 0.0) || t_max / t_min < 10.0 {
        return Err(CoreError::InvalidMcConfig(format!(
            "observation times must span a decade: [{t_min}, {t_max}]"
        )));
    }
    if !(k_probe.norm() > 0.0) {
        return Err(CoreError::InvalidMcConfig(
            "the cross-check momentum must be nonzero".into(),
        ));
    }
    let mut flags = Vec::new();

    let mut rows = Vec::with_capacity(times.len());
    for (j, &tau) in times.iter().enumerate() {
        let est = combine(&blocked_scalar(out, |row| row[j].norm_squared()), out.seed);
        if est.stderr == 0.0 {
            return Err(CoreError::InvalidMcConfig(format!(
                "degenerate displacement statistics at time {tau}"
            )));
        }
        if !est.plateau_found {
            flags.push(format!("no-blocking-plateau at tau {tau}"));
        }
        rows.push(MsdRow {
            tau,
            msd: est.mean,
            stderr: est.stderr,
            sigma2_pointwise: est.mean / (dim as f64 * tau),
        });
    }

    // Weighted least squares through the origin: msd = s·(d·τ).
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for r in &rows {
        let x = dim as f64 * r.tau;
        let w = 1.0 / (r.stderr * r.stderr);
        sxx += w * x * x;
        sxy += w * x * r.msd;
    }
    let slope = sxy / sxx;
    let slope_se = sxx.sqrt().recip();
    let mut chi2 = 0.0;
    for r in &rows {
        let x = dim as f64 * r.tau;
        let resid = (r.msd - slope * x) / r.stderr;
        chi2 += resid * resid;
    }
    let chi2_per_dof = chi2 / (rows.len() as f64 - 1.0);
    if chi2_per_dof > 4.0 {
        flags.push(format!(
            "growth law fits poorly: chi2/dof {chi2_per_dof:.2}"
        ));
    }
    let base = blocked_scalar(out, |row| row[0][0]);
    let tau_int = base.iter().map(|b| b.tau_int).fold(0.5, f64::max);
    let n_samples = out.n_records();
    let fit = MCEstimate {
        mean: slope,
        stderr: slope_se,
        tau_int,
        n_samples,
        seed: out.seed,
        plateau_found: !flags.iter().any(|f| f.starts_with("no-blocking-plateau")),
    };

    // Independent route through the characteristic function at the longest
    // observation time: Ĝ = e^{-σ²·|k|²·τ/2} for a diffusive endpoint.
    let g = estimate_charfn(out, k_probe, t_max)?;
    let k2t = k_probe.norm_squared() * t_max;
    let (alt, discrepancy_sigmas, consistent) = if g.real.mean <= 0.0 {
        flags.push("characteristic-function route unusable: nonpositive estimate".into());
        (None, None, false)
    } else {
        let mean = -2.0 * g.real.mean.ln() / k2t;
        let se = 2.0 * g.real.stderr / (g.real.mean * k2t);
        let alt = MCEstimate {
            mean,
            stderr: se,
            tau_int: g.real.tau_int,
            n_samples: g.real.n_samples,
            seed: out.seed,
            plateau_found: g.real.plateau_found,
        };
        let z = (fit.mean - mean).abs() / (fit.stderr * fit.stderr + se * se).sqrt();
        if z > 3.0 {
            flags.push(format!("estimator routes disagree at {z:.2} sigma"));
        }
        (Some(alt), Some(z), z <= 3.0)
    };

    Ok(Sigma2Report {
        rows,
        fit,
        chi2_per_dof,
        alt,
        discrepancy_sigmas,
        consistent,
        flags,
        seed: out.seed,
    })
}

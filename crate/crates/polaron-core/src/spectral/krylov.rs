//! Semigroup matrix elements ⟨u, e^{-tA} v⟩ through Lanczos quadrature.
//!
//! A single Krylov space built from the start vector serves every t at once:
//! with T_m = tridiag(α, β) and T_m = U Θ Uᵀ,
//!   ⟨v, e^{-tA} v⟩ = ‖v‖² Σ_j (e₁ᵀu_j)² e^{-t θ_j},
//! which is a Gauss quadrature of the spectral measure of A at v. Values are
//! carried in the log domain so that deep decay (t‖A‖ of order 10⁴) stays
//! representable.

use nalgebra::DMatrix;

use super::SolveOptions;
use crate::error::{CoreError, Result};
use crate::fock::SparseOperator;
use crate::numeric::logspace::{LogVal, logsumexp};

/// Incrementally extendable Lanczos factorization of (A, v).
pub struct Semigroup<'a> {
    op: &'a SparseOperator,
    /// ln ‖v‖ of the original start vector.
    ln_norm0: f64,
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// True once an invariant subspace has been hit (β ≈ 0): the
    /// factorization is exact and no further extension is possible.
    exhausted: bool,
    scale: f64,
}

/// Ritz decomposition of the current tridiagonal.
struct Ritz {
    theta: Vec<f64>,
    /// First row of U: ⟨e₁, u_j⟩.
    first: Vec<f64>,
    /// Full U for cross forms / applies.
    u: DMatrix<f64>,
}

impl<'a> Semigroup<'a> {
    /// Start a factorization from `v` (need not be normalized).
    pub fn new(op: &'a SparseOperator, v: &[f64]) -> Result<Self> {
        if v.len() != op.n {
            return Err(CoreError::InvalidModel(format!(
                "vector length {} does not match operator dimension {}",
                v.len(),
                op.n
            )));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(CoreError::VanishingOverlap { overlap: norm });
        }
        let v0: Vec<f64> = v.iter().map(|x| x / norm).collect();
        Ok(Semigroup {
            op,
            ln_norm0: norm.ln(),
            basis: vec![v0],
            alpha: Vec::new(),
            beta: Vec::new(),
            exhausted: false,
            scale: op.inf_norm().max(1.0),
        })
    }

    /// Grow the factorization to `m` steps (or until breakdown).
    fn extend_to(&mut self, m: usize) {
        let n = self.op.n;
        let mut w = vec![0.0; n];
        while self.alpha.len() < m.min(n) && !self.exhausted {
            let j = self.alpha.len();
            self.op.matvec(&self.basis[j], &mut w);
            let a: f64 = w.iter().zip(&self.basis[j]).map(|(x, y)| x * y).sum();
            self.alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&self.basis[j]) {
                *wi -= a * vi;
            }
            if j > 0 {
                let b = self.beta[j - 1];
                for (wi, vi) in w.iter_mut().zip(&self.basis[j - 1]) {
                    *wi -= b * vi;
                }
            }
            for _ in 0..2 {
                for vi in &self.basis {
                    let c: f64 = w.iter().zip(vi).map(|(x, y)| x * y).sum();
                    for (wk, vk) in w.iter_mut().zip(vi) {
                        *wk -= c * vk;
                    }
                }
            }
            let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if b <= 1e-14 * self.scale {
                self.exhausted = true;
                return;
            }
            self.beta.push(b);
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            self.basis.push(next);
        }
    }

    fn ritz(&self, m: usize) -> Ritz {
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(t);
        let theta: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let first: Vec<f64> = (0..m).map(|j| eig.eigenvectors[(0, j)]).collect();
        Ritz {
            theta,
            first,
            u: eig.eigenvectors,
        }
    }

    /// ln ⟨v, e^{-tA} v⟩ at Krylov order m (always positive, so a bare ln).
    fn ln_quad_at(&self, ritz: &Ritz, t: f64) -> f64 {
        let terms: Vec<f64> = ritz
            .theta
            .iter()
            .zip(&ritz.first)
            .map(|(&th, &c)| 2.0 * c.abs().max(f64::MIN_POSITIVE).ln() - t * th)
            .collect();
        2.0 * self.ln_norm0 + logsumexp(&terms)
    }

    /// The Krylov-order ladder used for convergence checks.
    fn ladder(&self, cap: usize) -> Vec<usize> {
        let cap = cap.min(self.op.n).max(2);
        let mut ms = vec![];
        let mut m = 16usize.min(cap);
        loop {
            ms.push(m);
            if m >= cap {
                break;
            }
            m = (m * 3 / 2).min(cap);
        }
        ms
    }

    /// ⟨v, e^{-tA} v⟩ as a log-domain value, adaptively converged in the
    /// Krylov order.
    pub fn quad_form(&mut self, t: f64, opts: &SolveOptions) -> Result<LogVal> {
        if t == 0.0 {
            return Ok(LogVal::from_scaled(2.0 * self.ln_norm0, 1.0));
        }
        let cap = opts.max_iter.max(32);
        let mut prev: Option<f64> = None;
        for m in self.ladder(cap) {
            self.extend_to(m);
            let m_eff = self.alpha.len().min(m);
            let ritz = self.ritz(m_eff);
            let val = self.ln_quad_at(&ritz, t);
            if self.exhausted && m_eff == self.alpha.len() {
                return Ok(LogVal::from_scaled(val, 1.0));
            }
            if let Some(p) = prev {
                if (val - p).abs() <= opts.tol * (1.0 + val.abs()) {
                    return Ok(LogVal::from_scaled(val, 1.0));
                }
            }
            prev = Some(val);
        }
        Err(CoreError::NotConverged {
            residual: prev.map(|p| p.abs()).unwrap_or(f64::NAN),
            iterations: self.alpha.len(),
        })
    }

    /// ⟨u, e^{-tA} v⟩ as a signed log-domain value.
    pub fn cross_form(&mut self, u: &[f64], t: f64, opts: &SolveOptions) -> Result<LogVal> {
        if u.len() != self.op.n {
            return Err(CoreError::InvalidModel(
                "cross-form vector length mismatch".into(),
            ));
        }
        let cap = opts.max_iter.max(32);
        let mut prev: Option<LogVal> = None;
        for m in self.ladder(cap) {
            self.extend_to(m);
            let m_eff = self.alpha.len().min(m);
            let ritz = self.ritz(m_eff);
            // d_i = ⟨u, v_i⟩ for the Krylov basis vectors.
            let d: Vec<f64> = self.basis[..m_eff]
                .iter()
                .map(|vi| u.iter().zip(vi).map(|(x, y)| x * y).sum())
                .collect();
            let mut terms = Vec::with_capacity(m_eff);
            for j in 0..m_eff {
                let mut c = 0.0;
                for (i, di) in d.iter().enumerate() {
                    c += di * ritz.u[(i, j)];
                }
                let amp = c * ritz.first[j];
                terms.push(LogVal::from_scaled(
                    self.ln_norm0 - t * ritz.theta[j],
                    amp,
                ));
            }
            let val = LogVal::sum(&terms);
            let done_exact = self.exhausted && m_eff == self.alpha.len();
            if done_exact {
                return Ok(val);
            }
            if let Some(p) = prev {
                let close = if val.sign == 0 || p.sign == 0 {
                    val.sign == p.sign
                        || (val.ln_abs - 2.0 * self.ln_norm0) < -300.0
                            && (p.ln_abs - 2.0 * self.ln_norm0) < -300.0
                } else {
                    val.sign == p.sign
                        && (val.ln_abs - p.ln_abs).abs() <= opts.tol * (1.0 + val.ln_abs.abs())
                };
                if close {
                    return Ok(val);
                }
            }
            prev = Some(val);
        }
        Err(CoreError::NotConverged {
            residual: prev.map(|p| p.ln_abs).unwrap_or(f64::NAN),
            iterations: self.alpha.len(),
        })
    }

    /// e^{-tA} v, returned as a unit vector together with ln of its norm.
    pub fn apply(&mut self, t: f64, opts: &SolveOptions) -> Result<(Vec<f64>, f64)> {
        let cap = opts.max_iter.max(32);
        let mut prev: Option<Vec<f64>> = None;
        for m in self.ladder(cap) {
            self.extend_to(m);
            let m_eff = self.alpha.len().min(m);
            let ritz = self.ritz(m_eff);
            let th_min = ritz.theta.iter().copied().fold(f64::INFINITY, f64::min);
            // y = U e^{-t(Θ - θ_min)} Uᵀ e₁, scaled so ‖·‖ stays O(1).
            let mut y = vec![0.0; m_eff];
            for j in 0..m_eff {
                let w = (-t * (ritz.theta[j] - th_min)).exp() * ritz.first[j];
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi += ritz.u[(i, j)] * w;
                }
            }
            let done_exact = self.exhausted && m_eff == self.alpha.len();
            let converged = prev
                .as_ref()
                .map(|p| {
                    let mut d2 = 0.0;
                    for i in 0..m_eff {
                        let pi = p.get(i).copied().unwrap_or(0.0);
                        let e = y[i] - pi;
                        d2 += e * e;
                    }
                    let n2: f64 = y.iter().map(|x| x * x).sum();
                    d2.sqrt() <= opts.tol * n2.sqrt().max(f64::MIN_POSITIVE)
                })
                .unwrap_or(false);
            if done_exact || converged {
                let y_norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(y_norm > 0.0) {
                    return Err(CoreError::VanishingOverlap { overlap: y_norm });
                }
                let mut out = vec![0.0; self.op.n];
                for (i, vb) in self.basis.iter().take(m_eff).enumerate() {
                    let c = y[i] / y_norm;
                    for (o, x) in out.iter_mut().zip(vb) {
                        *o += c * x;
                    }
                }
                // Re-normalize the assembled vector (basis is orthonormal to
                // machine precision, so this is a tiny correction).
                let n = out.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in out.iter_mut() {
                    *x /= n;
                }
                let ln_norm = self.ln_norm0 - t * th_min + y_norm.ln();
                return Ok((out, ln_norm));
            }
            prev = Some(y);
        }
        Err(CoreError::NotConverged {
            residual: f64::NAN,
            iterations: self.alpha.len(),
        })
    }
}

/// Dense symmetric-exponential oracle: returns e^{-tA} v for cross-checks.
#[cfg(test)]
pub(crate) fn dense_expm_apply(op: &SparseOperator, t: f64, v: &[f64], limit: usize) -> Result<Vec<f64>> {
    let (vals, vecs) = super::lanczos::dense_spectrum(op, limit)?;
    let n = op.n;
    let mut coeff = vec![0.0; n];
    for j in 0..n {
        let mut c = 0.0;
        for i in 0..n {
            c += vecs[(i, j)] * v[i];
        }
        coeff[j] = c * (-t * vals[j]).exp();
    }
    let mut out = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            out[i] += vecs[(i, j)] * coeff[j];
        }
    }
    Ok(out)
}

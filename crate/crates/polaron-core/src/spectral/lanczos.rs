//! Ground-state eigensolver: Lanczos with full reorthogonalization and a
//! dense cross-check oracle for small problems.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::SolveOptions;
use crate::error::{CoreError, Result};
use crate::fock::SparseOperator;

/// Converged lowest eigenpair together with diagnostic data.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// Lowest eigenvalue E₀.
    pub energy: f64,
    /// Unit eigenvector, phase-fixed (see [`fix_phase`]).
    pub vector: Vec<f64>,
    /// Explicit residual ‖Hψ − E₀ψ‖ of the returned pair.
    pub residual: f64,
    /// Estimated spectral gap E₁ − E₀ from the final Krylov space.
    pub gap: f64,
    /// Total matrix-vector products spent.
    pub iterations: usize,
    /// Set when the gap estimate is below the residual scale, i.e. the
    /// eigenvector is not trustworthy even though the eigenvalue is.
    pub degenerate: bool,
}

/// Deterministic pseudo-random unit start vector.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    // Bias towards the first basis state so that vectors with a vacuum
    // component are reached in few iterations.
    v[0] += 4.0;
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fix the overall sign: the entry of largest magnitude is made positive,
/// preferring the first basis state whenever its amplitude is resolvable.
/// Makes eigenvectors reproducible across solver variants.
pub(crate) fn fix_phase(v: &mut [f64]) {
    let mut pivot = 0usize;
    let mut best = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            pivot = i;
        }
    }
    if v[0].abs() > 1e-8 * best {
        pivot = 0;
    }
    if v[pivot] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Eigen-decompose the m×m symmetric tridiagonal (α, β) given as dense;
/// returns (ritz values ascending, ritz vectors as columns in that order).
fn tridiag_eig(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(m, m);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Lowest eigenpair of a symmetric sparse operator by Lanczos with full
/// reorthogonalization, restarted from the current Ritz vector on stall.
///
/// Deterministic: depends only on the operator and `opts.seed`.
pub fn ground_state(op: &SparseOperator, opts: &SolveOptions) -> Result<GroundState> {
    let n = op.n;
    if n == 0 {
        return Err(CoreError::InvalidModel("empty operator".into()));
    }
    if n == 1 {
        return Ok(GroundState {
            energy: op.diag()[0],
            vector: vec![1.0],
            residual: 0.0,
            gap: f64::INFINITY,
            iterations: 1,
            degenerate: false,
        });
    }
    let scale = op.inf_norm().max(1.0);
    let mut v0 = start_vector(n, opts.seed);
    let mut total_mv = 0usize;
    let mut last: Option<GroundState> = None;

    for _restart in 0..opts.restarts.max(1) {
        let m_max = opts.max_iter.min(n);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        basis.push(v0.clone());
        let mut w = vec![0.0; n];
        let mut exhausted = false;

        for j in 0..m_max {
            op.matvec(&basis[j], &mut w);
            total_mv += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                *wi -= a * vi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * vi;
                }
            }
            // Full reorthogonalization, two passes.
            for _ in 0..2 {
                for vi in &basis {
                    let c = dot(&w, vi);
                    for (wk, vk) in w.iter_mut().zip(vi) {
                        *wk -= c * vk;
                    }
                }
            }
            let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if b <= 1e-14 * scale {
                // Invariant subspace reached: the Krylov space is exact.
                exhausted = true;
                break;
            }
            beta.push(b);
            let mut next = w.clone();
            for x in next.iter_mut() {
                *x /= b;
            }
            basis.push(next);

            // Cheap convergence probe on the tridiagonal residual estimate.
            if (j + 1) % 8 == 0 && j + 1 >= 4 {
                let (vals, vecs) = tridiag_eig(&alpha, &beta[..alpha.len() - 1]);
                let est = b * vecs[(alpha.len() - 1, 0)].abs();
                let _ = vals;
                if est < 0.1 * opts.tol * scale {
                    break;
                }
            }
        }

        let m = alpha.len();
        let (vals, vecs) = tridiag_eig(&alpha, &beta[..m - 1]);
        let mut psi = vec![0.0; n];
        for (i, vb) in basis.iter().take(m).enumerate() {
            let c = vecs[(i, 0)];
            for (p, x) in psi.iter_mut().zip(vb) {
                *p += c * x;
            }
        }
        normalize(&mut psi);
        fix_phase(&mut psi);
        // Explicit residual of the assembled pair.
        op.matvec(&psi, &mut w);
        total_mv += 1;
        let theta = vals[0];
        let mut r2 = 0.0;
        for (wi, pi) in w.iter().zip(&psi) {
            let r = wi - theta * pi;
            r2 += r * r;
        }
        let residual = r2.sqrt();
        let gap = if m > 1 { vals[1] - vals[0] } else { f64::INFINITY };
        let state = GroundState {
            energy: theta,
            vector: psi,
            residual,
            gap,
            iterations: total_mv,
            degenerate: gap.abs() <= 10.0 * residual.max(1e-15 * scale),
        };
        if residual <= opts.tol * scale || exhausted {
            return Ok(state);
        }
        v0 = state.vector.clone();
        last = Some(state);
    }

    let last = last.expect("at least one restart ran");
    Err(CoreError::NotConverged {
        residual: last.residual,
        iterations: last.iterations,
    })
}

/// Dense full-spectrum oracle; refuses matrices above the size guard.
pub fn dense_spectrum(op: &SparseOperator, limit: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if op.n > limit {
        return Err(CoreError::DenseTooLarge {
            dim: op.n,
            limit,
        });
    }
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..op.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<f64>::zeros(op.n, op.n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

/// Lowest eigenpair by dense diagonalization (cross-check oracle).
pub fn dense_ground_state(op: &SparseOperator, limit: usize) -> Result<(f64, Vec<f64>)> {
    let (vals, vecs) = dense_spectrum(op, limit)?;
    let mut v: Vec<f64> = vecs.column(0).iter().copied().collect();
    fix_phase(&mut v);
    Ok((vals[0], v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockBasis;
    use crate::model::{DispersionSpec, FormFactorSpec, KGridSpec, Model, ModelSpec, Vec3};

    fn small_model(alpha: f64) -> Model {
        Model::new(ModelSpec {
            dimension: 1,
            alpha,
            dispersion: DispersionSpec::Constant { c0: 1.0 },
            form_factor: FormFactorSpec::Gaussian { g0: 0.8, width: 1.2 },
            grid: KGridSpec { dk: 0.5, kmax: 1.5 },
        })
        .unwrap()
    }

    #[test]
    fn single_mode_two_level_closed_form() {
        // One mode k, truncation N = 1: H(0) = [[0, b], [b, ω + k²/2]]
        // with b = √α √Δk g(k). Ground energy is the closed-form
        // quadratic root m - √(m² + b²) with 2m = ω + k²/2.
        let model = Model::with_modes(
            ModelSpec {
                dimension: 1,
                alpha: 0.36,
                dispersion: DispersionSpec::Constant { c0: 1.0 },
                form_factor: FormFactorSpec::Gaussian { g0: 0.8, width: 1.2 },
                grid: KGridSpec { dk: 0.5, kmax: 1.5 },
            },
            vec![Vec3::new(0.75, 0.0, 0.0)],
        )
        .unwrap();
        let basis = FockBasis::enumerate(&model, 1, 1 << 20).unwrap();
        let h = basis.assemble_fiber_hamiltonian(&Vec3::zeros());
        let gs = ground_state(&h, &SolveOptions::default()).unwrap();
        let g = model.spec.form_factor.eval(&Vec3::new(0.75, 0.0, 0.0)).unwrap();
        let b = 0.36f64.sqrt() * 0.5f64.sqrt() * g;
        let d = 1.0 + 0.75f64 * 0.75 / 2.0;
        let exact = d / 2.0 - (d * d / 4.0 + b * b).sqrt();
        assert!((gs.energy - exact).abs() < 1e-13, "{} vs {}", gs.energy, exact);
        assert!(gs.residual < 1e-12);
    }

    #[test]
    fn free_field_is_diagonal_minimum() {
        let model = small_model(0.0);
        let basis = FockBasis::enumerate(&model, 3, 1 << 20).unwrap();
        let p = Vec3::new(0.3, 0.0, 0.0);
        let h = basis.assemble_fiber_hamiltonian(&p);
        let gs = ground_state(&h, &SolveOptions::default()).unwrap();
        // With no coupling the ground state is the vacuum: E = P²/2.
        assert!((gs.energy - 0.5 * 0.09).abs() < 1e-12);
        assert!((gs.vector[0].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_dense_oracle() {
        let model = small_model(0.9);
        let basis = FockBasis::enumerate(&model, 2, 1 << 20).unwrap();
        assert!(basis.len() <= 500, "keep the oracle cheap");
        let h = basis.assemble_fiber_hamiltonian(&Vec3::new(0.2, 0.0, 0.0));
        let gs = ground_state(&h, &SolveOptions::default()).unwrap();
        let (e_dense, v_dense) = dense_ground_state(&h, 500).unwrap();
        assert!((gs.energy - e_dense).abs() < 1e-10);
        let ov: f64 = gs.vector.iter().zip(&v_dense).map(|(a, b)| a * b).sum();
        assert!(ov.abs() > 1.0 - 1e-9, "overlap {ov}");
    }

    #[test]
    fn deterministic_across_calls() {
        let model = small_model(0.7);
        let basis = FockBasis::enumerate(&model, 3, 1 << 20).unwrap();
        let h = basis.assemble_fiber_hamiltonian(&Vec3::zeros());
        let a = ground_state(&h, &SolveOptions::default()).unwrap();
        let b = ground_state(&h, &SolveOptions::default()).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.vector.len(), b.vector.len());
        for (x, y) in a.vector.iter().zip(&b.vector) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn dense_guard_rejects_large() {
        let model = small_model(0.5);
        let basis = FockBasis::enumerate(&model, 4, 1 << 20).unwrap();
        let h = basis.assemble_fiber_hamiltonian(&Vec3::zeros());
        if basis.len() > 100 {
            assert!(matches!(
                dense_spectrum(&h, 100),
                Err(CoreError::DenseTooLarge { .. })
            ));
        }
    }
}

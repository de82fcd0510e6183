//! The energy-momentum relation E(P) and quantities derived from it: the
//! inverse effective mass E″(0) and the bottom of the essential spectrum.

use std::collections::HashMap;

use rayon::prelude::*;

use super::lanczos::ground_state;
use super::SolveOptions;
use crate::error::{CoreError, Result};
use crate::fock::FockBasis;
use crate::model::{Model, Vec3};
use crate::numeric::extrap::richardson_h2;

/// One point of the fiber ground-energy curve with solver diagnostics.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub p: Vec3,
    pub energy: f64,
    /// Spectral gap estimate at this fiber momentum.
    pub gap: f64,
    /// |⟨vacuum, ψ(P)⟩|².
    pub vacuum_overlap2: f64,
    pub residual: f64,
    pub degenerate: bool,
}

/// Ground energies over a list of fiber momenta (deterministically parallel:
/// the output order follows the input order and every solve is seeded).
pub fn energy_curve(
    basis: &FockBasis,
    ps: &[Vec3],
    opts: &SolveOptions,
) -> Result<Vec<CurvePoint>> {
    ps.par_iter()
        .map(|p| {
            let h = basis.assemble_fiber_hamiltonian(p);
            let gs = ground_state(&h, opts)?;
            Ok(CurvePoint {
                p: *p,
                energy: gs.energy,
                gap: gs.gap,
                vacuum_overlap2: gs.vector[0] * gs.vector[0],
                residual: gs.residual,
                degenerate: gs.degenerate,
            })
        })
        .collect()
}

/// Inverse effective mass from E(P): the outcome of a Richardson table over
/// central second differences.
#[derive(Debug, Clone)]
pub struct MassResult {
    /// Extrapolated E″(0) along the requested direction.
    pub inv_mass: f64,
    /// Error estimate (Richardson table consistency + roundoff floor).
    pub error: f64,
    pub energy_at_zero: f64,
    /// Step sizes h₀, h₀/2, …
    pub h_values: Vec<f64>,
    /// Central second differences [E(h) + E(-h) - 2E(0)]/h² per step.
    pub second_differences: Vec<f64>,
    pub flags: Vec<String>,
}

/// E″(0) along `direction` by central second differences on a shrinking
/// step ladder with Richardson extrapolation (errors fall as h², h⁴, …).
pub fn effective_mass(
    basis: &FockBasis,
    direction: &Vec3,
    h0: f64,
    levels: usize,
    opts: &SolveOptions,
) -> Result<MassResult> {
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(CoreError::InvalidModel(format!(
            "second-difference base step must be positive, got {h0}"
        )));
    }
    if levels == 0 {
        return Err(CoreError::InvalidModel(
            "at least one second-difference level is required".into(),
        ));
    }
    let dn = direction.norm();
    if !(dn > 0.0) {
        return Err(CoreError::InvalidModel(
            "mass direction must be a nonzero vector".into(),
        ));
    }
    let u = direction / dn;

    let mut ps = vec![Vec3::zeros()];
    let mut hs = Vec::with_capacity(levels);
    for j in 0..levels {
        let h = h0 / (1u64 << j) as f64;
        hs.push(h);
        ps.push(u * h);
        ps.push(-u * h);
    }
    let pts = energy_curve(basis, &ps, opts)?;
    let e0 = pts[0].energy;
    let mut flags = Vec::new();
    if pts.iter().any(|p| p.degenerate) {
        flags.push("degenerate ground state within the difference stencil".into());
    }

    let mut d2 = Vec::with_capacity(levels);
    let mut worst_cancel: f64 = f64::INFINITY;
    for (j, &h) in hs.iter().enumerate() {
        let ep = pts[1 + 2 * j].energy;
        let em = pts[2 + 2 * j].energy;
        let num = (ep - e0) + (em - e0);
        worst_cancel = worst_cancel.min(num.abs() / e0.abs().max(1.0));
        d2.push(num / (h * h));
    }
    if worst_cancel < 1e-10 {
        flags.push(format!(
            "second difference within {worst_cancel:.1e} of cancellation; \
             step ladder too fine for the eigensolve tolerance"
        ));
    }

    let (rich, rich_err) = richardson_h2(&d2);
    // Roundoff floor: eigenvalues carry O(tol·scale) noise, amplified by h².
    let h_min = *hs.last().expect("levels >= 1");
    let floor = 8.0 * opts.tol.max(f64::EPSILON) * e0.abs().max(1.0) / (h_min * h_min);
    Ok(MassResult {
        inv_mass: rich,
        error: rich_err.max(floor),
        energy_at_zero: e0,
        h_values: hs,
        second_differences: d2,
        flags,
    })
}

/// Bottom of the n-boson continua above a fiber momentum.
#[derive(Debug, Clone)]
pub struct EssentialEdge {
    /// thresholds[n-1] = min over n-mode multisets of E(P - Σk) + Σω(k).
    pub thresholds: Vec<f64>,
    /// Overall edge: the minimum of the thresholds.
    pub edge: f64,
    /// Ground energy E(P) of the fiber itself, for gap-to-edge comparisons.
    pub base_energy: f64,
    /// Modes of the minimizing multiset.
    pub argmin_modes: Vec<Vec3>,
    /// Set when the minimizer leans on the truncation: it uses a mode within
    /// one spacing of the momentum cutoff, or uses the maximal multiset size,
    /// so enlarging the grid or the boson budget could lower the edge.
    pub boundary_flag: bool,
    /// Number of distinct fiber solves performed (after memoization).
    pub solves: usize,
}

/// Minimize E(P - Σᵢkᵢ) + Σᵢω(kᵢ) over mode multisets of size 1..=`max_bosons`.
///
/// Fiber energies are memoized across multisets; branches are pruned with a
/// certified lower bound E ≥ -R, where R is the largest off-diagonal row sum
/// of the fiber Hamiltonian (a Gershgorin bound independent of P).
pub fn essential_edge(
    model: &Model,
    basis: &FockBasis,
    p: &Vec3,
    max_bosons: usize,
    opts: &SolveOptions,
) -> Result<EssentialEdge> {
    if max_bosons == 0 {
        return Err(CoreError::InvalidModel(
            "essential-edge search needs at least one boson".into(),
        ));
    }
    let modes = &model.grid.modes;
    let m = modes.len();
    let omegas: Vec<f64> = (0..m).map(|i| basis.mode_omega(i as u16)).collect();
    // Sort modes by dispersion so partial sums admit a break-early bound.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]).then(a.cmp(&b)));

    // Certified lower bound on every fiber ground energy.
    let r_bound = {
        let h = basis.assemble_fiber_hamiltonian(p);
        let mut worst = 0.0f64;
        for row in 0..h.n {
            let mut s = 0.0;
            for (c, v) in h.row_indices(row).iter().zip(h.row_values(row)) {
                if *c as usize != row {
                    s += v.abs();
                }
            }
            worst = worst.max(s);
        }
        worst
    };
    let e_lb = -r_bound;

    let mut memo: HashMap<[u64; 3], f64> = HashMap::new();
    let mut solves = 0usize;
    let mut eval_e = |q: &Vec3| -> Result<f64> {
        let key = [q.x.to_bits(), q.y.to_bits(), q.z.to_bits()];
        if let Some(&e) = memo.get(&key) {
            return Ok(e);
        }
        let h = basis.assemble_fiber_hamiltonian(q);
        let e = ground_state(&h, opts)?.energy;
        solves += 1;
        memo.insert(key, e);
        Ok(e)
    };

    let base_energy = eval_e(p)?;
    let mut thresholds = vec![f64::INFINITY; max_bosons];
    let mut argmin: Vec<usize> = Vec::new();
    let mut argmin_n = 0usize;

    // Depth-first over multisets: stack of (position in `order`, chosen so far).
    // Chosen indices are positions into `order`, nondecreasing, so each
    // multiset is visited once and repetitions are allowed.
    fn descend(
        order: &[usize],
        omegas: &[f64],
        modes: &[Vec3],
        p: &Vec3,
        e_lb: f64,
        max_bosons: usize,
        chosen: &mut Vec<usize>,
        k_sum: Vec3,
        w_sum: f64,
        start: usize,
        thresholds: &mut [f64],
        argmin: &mut Vec<usize>,
        argmin_n: &mut usize,
        eval_e: &mut dyn FnMut(&Vec3) -> Result<f64>,
    ) -> Result<()> {
        let n = chosen.len();
        if n > 0 {
            let q = p - k_sum;
            let val = eval_e(&q)? + w_sum;
            if val < thresholds[n - 1] {
                thresholds[n - 1] = val;
                let global_best = thresholds.iter().cloned().fold(f64::INFINITY, f64::min);
                if val <= global_best {
                    *argmin = chosen.clone();
                    *argmin_n = n;
                }
            }
        }
        if n == max_bosons {
            return Ok(());
        }
        for pos in start..order.len() {
            let idx = order[pos];
            let w = omegas[idx];
            // Any completion of size n+1..=max adds at least one more ω ≥ w;
            // the cheapest completion uses exactly one. Bound against the
            // best threshold still improvable from this branch.
            let bound = e_lb + w_sum + w;
            let best_reachable = thresholds[n..]
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if bound >= best_reachable {
                break; // ω ascending: later positions only get worse
            }
            chosen.push(pos);
            descend(
                order,
                omegas,
                modes,
                p,
                e_lb,
                max_bosons,
                chosen,
                k_sum + modes[idx],
                w_sum + w,
                pos,
                thresholds,
                argmin,
                argmin_n,
                eval_e,
            )?;
            chosen.pop();
        }
        Ok(())
    }

    let mut chosen = Vec::new();
    descend(
        &order,
        &omegas,
        modes,
        p,
        e_lb,
        max_bosons,
        &mut chosen,
        Vec3::zeros(),
        0.0,
        0,
        &mut thresholds,
        &mut argmin,
        &mut argmin_n,
        &mut eval_e,
    )?;

    let edge = thresholds.iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = modes.iter().map(|k| k.norm()).fold(0.0f64, f64::max);
    let argmin_modes: Vec<Vec3> = argmin.iter().map(|&pos| modes[order[pos]]).collect();
    let near_cutoff = argmin_modes
        .iter()
        .any(|k| k.norm() > kmax - 0.5 * model.grid.dk);
    let boundary_flag = near_cutoff || argmin_n == max_bosons;

    Ok(EssentialEdge {
        thresholds,
        edge,
        base_energy,
        argmin_modes,
        boundary_flag,
        solves,
    })
}

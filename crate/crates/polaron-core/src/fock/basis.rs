//! Occupation-number basis of the truncated Fock space.

use crate::error::{CoreError, Result};
use crate::model::{Model, Vec3};
use std::collections::HashMap;

/// Basis of all occupation states with total boson number ≤ n_max over the
/// model's grid modes, in graded order: by total number, then
/// lexicographically in the sorted mode tuple. The vacuum has index 0.
///
/// States are stored as sorted mode tuples with repetition; per-state field
/// momentum and field energy are cached, as are the per-mode coupling
/// weights √(Δk^d)·g(k_i) used in assembly.
pub struct FockBasis {
    states: Vec<Box<[u16]>>,
    index: HashMap<Box<[u16]>, u32>,
    field_momentum: Vec<Vec3>,
    field_energy: Vec<f64>,
    coupling: Vec<f64>,
    omega: Vec<f64>,
    sqrt_alpha: f64,
    n_max: u32,
    n_modes: usize,
    dim: usize,
}

/// binom(m + n, n) without overflow; None when it exceeds u128.
fn truncated_size(m: u128, n_max: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 1..=n_max {
        acc = acc.checked_mul(m + i)?;
        acc /= i; // exact: product of i consecutive integers divides by i!
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc)
}

impl FockBasis {
    pub fn enumerate(model: &Model, n_max: u32, basis_limit: u64) -> Result<FockBasis> {
        let m = model.grid.len();
        if m == 0 {
            return Err(CoreError::InvalidModel("empty momentum grid".into()));
        }
        if m > u16::MAX as usize {
            return Err(CoreError::InvalidModel(format!(
                "mode count {m} exceeds the u16 index range"
            )));
        }
        let size = truncated_size(m as u128, n_max as u128)
            .ok_or(CoreError::BasisTooLarge {
                size: u128::MAX,
                limit: basis_limit,
            })?;
        if size > basis_limit as u128 {
            return Err(CoreError::BasisTooLarge {
                size,
                limit: basis_limit,
            });
        }

        let mut states: Vec<Box<[u16]>> = Vec::with_capacity(size as usize);
        let mut tuple: Vec<u16> = Vec::with_capacity(n_max as usize);
        for n in 0..=n_max {
            push_multisets(&mut states, &mut tuple, 0, m as u16, n);
        }
        debug_assert_eq!(states.len() as u128, size);

        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            index.insert(s.clone(), i as u32);
        }

        let mut coupling = Vec::with_capacity(m);
        let mut omega = Vec::with_capacity(m);
        let sqrt_cell = model.grid.cell_volume.sqrt();
        for k in &model.grid.modes {
            let g = model.spec.form_factor.eval(k)?;
            coupling.push(sqrt_cell * g);
            omega.push(model.spec.dispersion.eval(k));
        }

        let mut field_momentum = Vec::with_capacity(states.len());
        let mut field_energy = Vec::with_capacity(states.len());
        for s in &states {
            let mut p = Vec3::zeros();
            let mut e = 0.0;
            for &mode in s.iter() {
                p += model.grid.modes[mode as usize];
                e += omega[mode as usize];
            }
            field_momentum.push(p);
            field_energy.push(e);
        }

        Ok(FockBasis {
            states,
            index,
            field_momentum,
            field_energy,
            coupling,
            omega,
            sqrt_alpha: model.spec.alpha.sqrt(),
            n_max,
            n_modes: m,
            dim: model.spec.dimension,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Spatial dimension of the model the basis was built from.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.sqrt_alpha
    }

    /// Sorted mode tuple of state `s`.
    pub fn state(&self, s: usize) -> &[u16] {
        &self.states[s]
    }

    pub fn total_occupation(&self, s: usize) -> u32 {
        self.states[s].len() as u32
    }

    pub fn occupation_of(&self, s: usize, mode: u16) -> u32 {
        self.states[s].iter().filter(|&&x| x == mode).count() as u32
    }

    pub fn field_momentum(&self, s: usize) -> &Vec3 {
        &self.field_momentum[s]
    }

    pub fn field_energy(&self, s: usize) -> f64 {
        self.field_energy[s]
    }

    pub fn coupling_weight(&self, mode: u16) -> f64 {
        self.coupling[mode as usize]
    }

    pub fn mode_omega(&self, mode: u16) -> f64 {
        self.omega[mode as usize]
    }

    /// Exact index lookup of a sorted mode tuple.
    pub fn index_of(&self, tuple: &[u16]) -> Option<usize> {
        debug_assert!(tuple.windows(2).all(|w| w[0] <= w[1]));
        self.index.get(tuple).map(|&i| i as usize)
    }

    /// Index of state `s` with one boson removed from `mode`.
    pub fn index_without(&self, s: usize, mode: u16) -> Option<usize> {
        let src = &self.states[s];
        let pos = src.iter().position(|&x| x == mode)?;
        let mut t: Vec<u16> = Vec::with_capacity(src.len() - 1);
        t.extend_from_slice(&src[..pos]);
        t.extend_from_slice(&src[pos + 1..]);
        self.index_of(&t)
    }

    /// Index of state `s` with one boson added in `mode`.
    pub fn index_with(&self, s: usize, mode: u16) -> Option<usize> {
        let src = &self.states[s];
        if src.len() as u32 >= self.n_max {
            return None;
        }
        let pos = src.partition_point(|&x| x <= mode);
        let mut t: Vec<u16> = Vec::with_capacity(src.len() + 1);
        t.extend_from_slice(&src[..pos]);
        t.push(mode);
        t.extend_from_slice(&src[pos..]);
        self.index_of(&t)
    }

    /// Visit (mode, occupation) for each distinct occupied mode, ascending.
    pub fn for_each_distinct_mode<F: FnMut(u16, u32)>(&self, s: usize, mut f: F) {
        let src = &self.states[s];
        let mut i = 0;
        while i < src.len() {
            let mode = src[i];
            let mut count = 1;
            while i + count < src.len() && src[i + count] == mode {
                count += 1;
            }
            f(mode, count as u32);
            i += count;
        }
    }

    /// Dense occupation vector of state `s` (diagnostics, dumps).
    pub fn occupation_vector(&self, s: usize) -> Vec<u32> {
        let mut occ = vec![0u32; self.n_modes];
        for &mode in self.states[s].iter() {
            occ[mode as usize] += 1;
        }
        occ
    }
}

fn push_multisets(
    out: &mut Vec<Box<[u16]>>,
    tuple: &mut Vec<u16>,
    from: u16,
    m: u16,
    remaining: u32,
) {
    if remaining == 0 {
        out.push(tuple.clone().into_boxed_slice());
        return;
    }
    for mode in from..m {
        tuple.push(mode);
        push_multisets(out, tuple, mode, m, remaining - 1);
        tuple.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DispersionSpec, FormFactorSpec, KGridSpec, ModelSpec};

    fn model_with_n_modes(n: usize) -> Model {
        let modes = (0..n)
            .map(|i| Vec3::new(0.5 * (i as f64 + 1.0), 0.0, 0.0))
            .collect();
        Model::with_modes(
            ModelSpec {
                dimension: 1,
                alpha: 0.3,
                dispersion: DispersionSpec::Constant { c0: 1.0 },
                form_factor: FormFactorSpec::Gaussian { g0: 1.0, width: 2.0 },
                grid: KGridSpec { dk: 0.5, kmax: 4.0 },
            },
            modes,
        )
        .unwrap()
    }

    #[test]
    fn sizes_match_binomials() {
        // (M, N_max, binom(M+N, N))
        for (m, n, expect) in [(3usize, 2u32, 10usize), (6, 4, 210), (1, 3, 4), (5, 0, 1)] {
            let model = model_with_n_modes(m);
            let b = FockBasis::enumerate(&model, n, 1 << 30).unwrap();
            assert_eq!(b.len(), expect, "M={m} N={n}");
        }
    }

    #[test]
    fn graded_order_vacuum_first() {
        let model = model_with_n_modes(3);
        let b = FockBasis::enumerate(&model, 2, 1 << 20).unwrap();
        assert_eq!(b.state(0), &[] as &[u16]);
        let grades: Vec<u32> = (0..b.len()).map(|s| b.total_occupation(s)).collect();
        assert!(grades.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(b.state(1), &[0u16]);
        assert_eq!(b.state(4), &[0u16, 0]);
    }

    #[test]
    fn index_lookup_round_trips() {
        let model = model_with_n_modes(5);
        let b = FockBasis::enumerate(&model, 3, 1 << 20).unwrap();
        for s in 0..b.len() {
            assert_eq!(b.index_of(b.state(s)), Some(s));
        }
        assert_eq!(b.index_of(&[4, 4, 4, 4]), None); // grade 4 > n_max
    }

    #[test]
    fn ladder_indices_are_consistent() {
        let model = model_with_n_modes(4);
        let b = FockBasis::enumerate(&model, 3, 1 << 20).unwrap();
        for s in 0..b.len() {
            if b.total_occupation(s) < b.n_max() {
                for mode in 0..4u16 {
                    let up = b.index_with(s, mode).unwrap();
                    assert_eq!(b.index_without(up, mode), Some(s));
                    assert_eq!(b.occupation_of(up, mode), b.occupation_of(s, mode) + 1);
                }
            }
        }
    }

    #[test]
    fn basis_limit_is_enforced() {
        let model = model_with_n_modes(10);
        match FockBasis::enumerate(&model, 4, 100) {
            Err(CoreError::BasisTooLarge { size, limit }) => {
                assert_eq!(size, 1001);
                assert_eq!(limit, 100);
            }
            Err(other) => panic!("expected BasisTooLarge, got {other:?}"),
            Ok(_) => panic!("expected BasisTooLarge, got a basis"),
        }
    }

    #[test]
    fn cached_field_quantities() {
        let model = model_with_n_modes(2); // modes at k = 0.5, 1.0
        let b = FockBasis::enumerate(&model, 2, 1 << 20).unwrap();
        let s = b.index_of(&[0, 1]).unwrap();
        assert_eq!(b.field_momentum(s)[0], 1.5);
        assert_eq!(b.field_energy(s), 2.0);
    }
}

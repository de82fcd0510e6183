//! Truncated bosonic Fock space over the momentum grid: occupation basis,
//! sparse operators and fiber-Hamiltonian assembly.

mod basis;
mod operator;

pub use basis::FockBasis;
pub use operator::SparseOperator;

use crate::model::Vec3;

impl FockBasis {
    /// Fiber Hamiltonian H(P) = ½(P - P_f)² + Σ n_i ω(k_i)
    /// + √α Σ_i √(Δk^d) g(k_i) (a_i + a_i*), as a symmetric CSR matrix.
    ///
    /// Mirrored off-diagonal entries are produced by the same floating-point
    /// expression, so the matrix is bit-exactly symmetric. With α = 0 the
    /// coupling rows are omitted entirely and the operator is diagonal.
    pub fn assemble_fiber_hamiltonian(&self, p: &Vec3) -> SparseOperator {
        let n = self.len();
        let sqrt_alpha = self.sqrt_alpha();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        indptr.push(0usize);
        let mut row: Vec<(u32, f64)> = Vec::new();
        for s in 0..n {
            row.clear();
            let diag = 0.5 * (p - self.field_momentum(s)).norm_squared() + self.field_energy(s);
            row.push((s as u32, diag));
            if sqrt_alpha > 0.0 {
                // Annihilation neighbors: one boson removed from each distinct
                // occupied mode.
                self.for_each_distinct_mode(s, |mode, count| {
                    let j = self
                        .index_without(s, mode)
                        .expect("grade n-1 state must exist");
                    let amp = sqrt_alpha * self.coupling_weight(mode) * (count as f64).sqrt();
                    row.push((j as u32, amp));
                });
                // Creation neighbors: one boson added in every grid mode.
                if self.total_occupation(s) < self.n_max() {
                    for mode in 0..self.n_modes() as u16 {
                        let j = self
                            .index_with(s, mode)
                            .expect("grade n+1 state must exist");
                        let count_after = self.occupation_of(s, mode) + 1;
                        let amp = sqrt_alpha
                            * self.coupling_weight(mode)
                            * (count_after as f64).sqrt();
                        row.push((j as u32, amp));
                    }
                }
            }
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        SparseOperator {
            n,
            indptr,
            indices,
            values,
        }
    }

    /// Total boson number operator N_f (diagonal).
    pub fn assemble_number_operator(&self) -> SparseOperator {
        SparseOperator::diagonal(
            (0..self.len())
                .map(|s| self.total_occupation(s) as f64)
                .collect(),
        )
    }

    /// Component `axis` of the field momentum P_f (diagonal).
    pub fn assemble_pf_component(&self, axis: usize) -> SparseOperator {
        assert!(axis < 3);
        SparseOperator::diagonal(
            (0..self.len())
                .map(|s| self.field_momentum(s)[axis])
                .collect(),
        )
    }
}

//! Symmetric sparse operators in compressed-row form.

use rayon::prelude::*;
use std::io::Write;

/// CSR matrix with u32 column indices. Row entries are stored with strictly
/// increasing columns; all operators here are symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseOperator {
    pub fn diagonal(diag: Vec<f64>) -> SparseOperator {
        let n = diag.len();
        SparseOperator {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n as u32).collect(),
            values: diag,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_indices(&self, r: usize) -> &[u32] {
        &self.indices[self.indptr[r]..self.indptr[r + 1]]
    }

    pub fn row_values(&self, r: usize) -> &[f64] {
        &self.values[self.indptr[r]..self.indptr[r + 1]]
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for (c, v) in self.row_indices(r).iter().zip(self.row_values(r)) {
                if *c as usize == r {
                    d[r] = *v;
                }
            }
        }
        d
    }

    /// y = A x. Rows are processed independently with a fixed in-row
    /// summation order, so the result is bit-identical for any thread count.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        const PAR_THRESHOLD: usize = 20_000;
        let row = |r: usize| -> f64 {
            let mut acc = 0.0;
            for (c, v) in self.row_indices(r).iter().zip(self.row_values(r)) {
                acc += v * x[*c as usize];
            }
            acc
        };
        if self.nnz() >= PAR_THRESHOLD {
            y.par_iter_mut().enumerate().for_each(|(r, out)| {
                *out = row(r);
            });
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = row(r);
            }
        }
    }

    pub fn is_symmetric_bit_exact(&self) -> bool {
        for r in 0..self.n {
            for (c, v) in self.row_indices(r).iter().zip(self.row_values(r)) {
                let c = *c as usize;
                if c < r {
                    continue;
                }
                let cols = self.row_indices(c);
                match cols.binary_search(&(r as u32)) {
                    Ok(pos) => {
                        if self.row_values(c)[pos].to_bits() != v.to_bits() {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
        }
        true
    }

    /// Largest row sum of absolute values; a cheap bound on the spectral
    /// radius used for certified eigenvalue lower bounds.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|r| self.row_values(r).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row_indices(r).iter().zip(self.row_values(r)) {
                m[(r, *c as usize)] = *v;
            }
        }
        m
    }

    /// Plain-text triple dump `row col value`, row-major, columns ascending,
    /// 17 significant digits.
    pub fn dump_triples<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for r in 0..self.n {
            for (c, v) in self.row_indices(r).iter().zip(self.row_values(r)) {
                writeln!(w, "{} {} {:.16e}", r, c, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseOperator {
        // [[2, 1, 0], [1, -1, 3], [0, 3, 0.5]]
        SparseOperator {
            n: 3,
            indptr: vec![0, 2, 5, 7],
            indices: vec![0, 1, 0, 1, 2, 1, 2],
            values: vec![2.0, 1.0, 1.0, -1.0, 3.0, 3.0, 0.5],
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample();
        let x = vec![1.0, -2.0, 0.5];
        let mut y = vec![0.0; 3];
        a.matvec(&x, &mut y);
        assert_eq!(y, vec![0.0, 4.5, -5.75]);
    }

    #[test]
    fn symmetry_check_detects_asymmetry() {
        let mut a = sample();
        assert!(a.is_symmetric_bit_exact());
        a.values[1] = 1.0 + 1e-16;
        assert!(a.is_symmetric_bit_exact()); // 1.0+1e-16 rounds to 1.0
        a.values[1] = 1.5;
        assert!(!a.is_symmetric_bit_exact());
    }

    #[test]
    fn triple_dump_is_sorted_and_parseable() {
        let a = sample();
        let mut buf = Vec::new();
        a.dump_triples(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<Vec<&str>> = text
            .lines()
            .map(|l| l.split_whitespace().collect())
            .collect();
        assert_eq!(rows.len(), a.nnz());
        assert_eq!(rows[0][0], "0");
        let v: f64 = rows[4][2].parse().unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn diagonal_constructor() {
        let d = SparseOperator::diagonal(vec![1.0, 2.0, 3.0]);
        assert_eq!(d.diag(), vec![1.0, 2.0, 3.0]);
        assert_eq!(d.nnz(), 3);
    }
}

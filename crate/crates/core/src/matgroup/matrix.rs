use crate::ffield::{AmbientField, Fe};

/// A square matrix over the ambient field, stored row-major.
///
/// The derived ordering compares entry codes in row-major order, which is
/// the canonical element order of every enumerated group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Fe>,
}

impl Matrix {
    pub fn from_entries(dim: usize, entries: Vec<Fe>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Matrix { dim, entries }
    }

    pub fn identity(field: &AmbientField, dim: usize) -> Self {
        let mut entries = vec![field.zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = field.one();
        }
        Matrix { dim, entries }
    }

    pub fn diagonal(field: &AmbientField, diag: &[Fe]) -> Self {
        let dim = diag.len();
        let mut entries = vec![field.zero(); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Matrix { dim, entries }
    }

    /// Integer matrix reduced into the prime field.
    pub fn from_ints(field: &AmbientField, dim: usize, ints: &[i64]) -> Self {
        Matrix::from_entries(dim, ints.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &Matrix, f: &AmbientField) -> Matrix {
        let n = self.dim;
        debug_assert_eq!(n, other.dim);
        let mut out = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.entries[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] = f.add(out[i * n + j], f.mul(a, b));
                    }
                }
            }
        }
        Matrix { dim: n, entries: out }
    }

    pub fn pow(&self, mut e: u64, f: &AmbientField) -> Matrix {
        let mut result = Matrix::identity(f, self.dim);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        result
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j];
            }
        }
        Matrix { dim: n, entries: out }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, f: &AmbientField) -> Fe {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return f.zero();
            };
            if pr != c {
                for j in 0..n {
                    a.swap(c * n + j, pr * n + j);
                }
                det = f.neg(det);
            }
            let pivot = a[c * n + c];
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("nonzero pivot");
            for r in c + 1..n {
                let factor = f.mul(a[r * n + c], inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[c * n + j]));
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self, f: &AmbientField) -> Option<Matrix> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity(f, n).entries;
        for c in 0..n {
            let pr = (c..n).find(|&r| !a[r * n + c].is_zero())?;
            for j in 0..n {
                a.swap(c * n + j, pr * n + j);
                inv.swap(c * n + j, pr * n + j);
            }
            let pinv = f.inv(a[c * n + c])?;
            for j in 0..n {
                a[c * n + j] = f.mul(a[c * n + j], pinv);
                inv[c * n + j] = f.mul(inv[c * n + j], pinv);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = a[r * n + c];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[c * n + j]));
                    inv[r * n + j] = f.sub(inv[r * n + j], f.mul(factor, inv[c * n + j]));
                }
            }
        }
        Some(Matrix { dim: n, entries: inv })
    }

    /// Entrywise `x -> x^{p^e}`.
    pub fn frobenius(&self, e: u64, f: &AmbientField) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| f.frobenius_power(x, e)).collect(),
        }
    }

    /// Whether every entry lies in the subfield F_{p^d}.
    pub fn entries_in_subfield(&self, d: usize, f: &AmbientField) -> bool {
        self.entries.iter().all(|&x| f.frobenius_power(x, d as u64) == x)
    }

    /// Entries as coefficient vectors, for reports.
    pub fn to_coeff_rows(&self, f: &AmbientField) -> Vec<Vec<Vec<u64>>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| f.coeffs(self.get(i, j))).collect())
            .collect()
    }
}

//! Dense square matrices and LU factorization with partial pivoting.

use std::fmt;

/// Pivots smaller than this fraction of the largest entry of their column in
/// the unfactored matrix are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if the rows do not form a square matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix is not square");
            data.extend(row);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn set_row(&mut self, i: usize, values: &[f64]) {
        assert_eq!(values.len(), self.dim);
        self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(values);
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Column and magnitude of the pivot that failed the tolerance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
    pub pivot: f64,
}

/// `P A = L U` with unit-diagonal `L` stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: SquareMatrix,
    // row i of P A is row perm[i] of A
    perm: Vec<usize>,
    sign: f64,
}

impl LuFactors {
    pub fn factor(a: &SquareMatrix) -> Result<Self, SingularPivot> {
        let n = a.dim;
        let scale: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| a[(i, j)].abs()).fold(0.0, f64::max))
            .collect();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if scale[k] == 0.0 || pivot < PIVOT_TOLERANCE * scale[k] {
                return Err(SingularPivot { column: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let diag = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / diag;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= factor * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Aᵀ x = b` from the same factors: `Uᵀ y = b`, `Lᵀ w = y`, `x = Pᵀ w`.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut w = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(j, i)] * w[j]).sum();
            w[i] = (w[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(j, i)] * w[j]).sum();
            w[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }
}

/// Determinant by LU with partial pivoting; 0 when a pivot falls below tolerance.
pub fn determinant(a: &SquareMatrix) -> f64 {
    if a.dim() == 0 {
        return 1.0;
    }
    LuFactors::factor(a).map_or(0.0, |lu| lu.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(a: &SquareMatrix, x: &[f64]) -> Vec<f64> {
        a.rows().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&SquareMatrix::identity(3)), 1.0);
        let a = SquareMatrix::from_rows(vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, 3.0, 1.0],
            vec![1.0, 1.0, 3.0],
        ]);
        assert!((determinant(&a) - 4.0).abs() < 1e-12);
        let repeated = SquareMatrix::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 5.0],
        ]);
        assert_eq!(determinant(&repeated), 0.0);
    }

    #[test]
    fn determinant_sign_from_row_swaps() {
        let a = SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(determinant(&a), -1.0);
        let b = SquareMatrix::from_rows(vec![vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0], vec![5.0, 0.0, 0.0]]);
        assert!((determinant(&b) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn solve_both_orientations() {
        let a = SquareMatrix::from_rows(vec![
            vec![2.0, 1.0, -1.0],
            vec![-3.0, -1.0, 2.0],
            vec![-2.0, 1.0, 2.0],
        ]);
        let lu = LuFactors::factor(&a).unwrap();
        let x = lu.solve(&[8.0, -11.0, -3.0]);
        for (got, want) in x.iter().zip([2.0, 3.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let b = [1.0, -2.0, 0.5];
        let y = lu.solve_transposed(&b);
        let back = mat_vec(&a.transpose(), &y);
        for (got, want) in back.iter().zip(b) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_pivot_is_singular() {
        let a = SquareMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]);
        let err = LuFactors::factor(&a).unwrap_err();
        assert_eq!(err.column, 1);
        let zero_col = SquareMatrix::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert!(LuFactors::factor(&zero_col).is_err());
    }
}

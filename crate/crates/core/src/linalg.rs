//! Small dense linear algebra over a [`Scalar`].
//!
//! Exact mode uses fraction-free (Bareiss) elimination for determinants and
//! ranks, and plain rational Gauss-Jordan for kernel vectors. Float mode uses
//! partially pivoted elimination for determinants and singular-value
//! thresholding for ranks.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols));
        Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Determinant of a square matrix. Dispatches on the arithmetic mode.
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        if S::EXACT {
            self.clone().det_bareiss()
        } else {
            self.clone().det_partial_pivot()
        }
    }

    /// Fraction-free one-step elimination. Intermediate entries are minors of
    /// the input, which keeps exact entries compact; every division is exact.
    fn det_bareiss(mut self) -> S {
        let n = self.rows;
        if n == 0 {
            return S::one();
        }
        let mut sign_flip = false;
        let mut prev = S::one();
        for k in 0..n - 1 {
            if self.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !self.get(i, k).is_zero()) {
                    Some(i) => {
                        self.swap_rows(k, i);
                        sign_flip = !sign_flip;
                    }
                    None => return S::zero(),
                }
            }
            let pivot = self.get(k, k).clone();
            for i in k + 1..n {
                let lead = self.get(i, k).clone();
                for j in k + 1..n {
                    let v = (pivot.clone() * self.get(i, j).clone()
                        - lead.clone() * self.get(k, j).clone())
                        / prev.clone();
                    self.set(i, j, v);
                }
                self.set(i, k, S::zero());
            }
            prev = pivot;
        }
        let d = self.get(n - 1, n - 1).clone();
        if sign_flip {
            -d
        } else {
            d
        }
    }

    fn det_partial_pivot(mut self) -> S {
        let n = self.rows;
        if n == 0 {
            return S::one();
        }
        let mut sign_flip = false;
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&a, &b| {
                    self.get(a, k)
                        .abs()
                        .partial_cmp(&self.get(b, k).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if self.get(pivot_row, k).is_zero() {
                return S::zero();
            }
            if pivot_row != k {
                self.swap_rows(k, pivot_row);
                sign_flip = !sign_flip;
            }
            let pivot = self.get(k, k).clone();
            for i in k + 1..n {
                let factor = self.get(i, k).clone() / pivot.clone();
                for j in k..n {
                    let v = self.get(i, j).clone() - factor.clone() * self.get(k, j).clone();
                    self.set(i, j, v);
                }
            }
        }
        let mut d = S::one();
        for k in 0..n {
            d = d * self.get(k, k).clone();
        }
        if sign_flip {
            -d
        } else {
            d
        }
    }

    /// Exact rank together with the input row indices that carry the pivots.
    /// Deterministic: columns are scanned left to right, candidate rows top
    /// to bottom.
    pub fn rank_exact(&self) -> (usize, Vec<usize>) {
        debug_assert!(S::EXACT, "rank_exact called in float mode");
        let mut m = self.clone();
        let mut row_of = (0..m.rows).collect::<Vec<_>>();
        let mut rank = 0usize;
        let mut pivot_rows = Vec::new();
        let mut prev = S::one();
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pr) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pr);
            row_of.swap(rank, pr);
            let pivot = m.get(rank, col).clone();
            for i in rank + 1..m.rows {
                let lead = m.get(i, col).clone();
                for j in col + 1..m.cols {
                    let v = (pivot.clone() * m.get(i, j).clone()
                        - lead.clone() * m.get(rank, j).clone())
                        / prev.clone();
                    m.set(i, j, v);
                }
                m.set(i, col, S::zero());
            }
            prev = pivot;
            pivot_rows.push(row_of[rank]);
            rank += 1;
        }
        (rank, pivot_rows)
    }

    /// Singular values in descending order, computed in `f64`.
    pub fn singular_values(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_f64());
        let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    /// Float rank by singular-value thresholding at `rel_tol` relative to the
    /// largest singular value. Returns the rank and the full spectrum.
    pub fn rank_float(&self, rel_tol: f64) -> (usize, Vec<f64>) {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        let rank = if top == 0.0 {
            0
        } else {
            sv.iter().filter(|&&s| s > rel_tol * top).count()
        };
        (rank, sv)
    }

    /// One-dimensional kernel vector of a square exact matrix, or `None` when
    /// the kernel dimension differs from one.
    pub fn kernel_vector_exact(&self) -> Option<Vec<S>> {
        debug_assert!(S::EXACT);
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return None;
        }
        let mut m = self.clone();
        let mut pivot_col_of_row = vec![usize::MAX; n];
        let mut is_pivot_col = vec![false; n];
        let mut rank = 0usize;
        for col in 0..n {
            let Some(pr) = (rank..n).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pr);
            let pivot = m.get(rank, col).clone();
            for j in col..n {
                let v = m.get(rank, j).clone() / pivot.clone();
                m.set(rank, j, v);
            }
            for i in 0..n {
                if i != rank && !m.get(i, col).is_zero() {
                    let lead = m.get(i, col).clone();
                    for j in col..n {
                        let v = m.get(i, j).clone() - lead.clone() * m.get(rank, j).clone();
                        m.set(i, j, v);
                    }
                }
            }
            pivot_col_of_row[rank] = col;
            is_pivot_col[col] = true;
            rank += 1;
        }
        if rank != n - 1 {
            return None;
        }
        let free_col = (0..n).find(|&c| !is_pivot_col[c])?;
        let mut kernel = vec![S::zero(); n];
        kernel[free_col] = S::one();
        for r in 0..rank {
            let c = pivot_col_of_row[r];
            kernel[c] = -m.get(r, free_col).clone();
        }
        Some(kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use num::rational::BigRational;
    use num::traits::Zero;

    fn rat(n: i64) -> BigRational {
        BigRational::from_i64(n)
    }

    fn rational_matrix(rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
    }

    #[test]
    fn bareiss_matches_known_determinants() {
        assert_eq!(rational_matrix(&[&[5]]).det(), rat(5));
        assert_eq!(rational_matrix(&[&[1, 2], &[3, 4]]).det(), rat(-2));
        let m = rational_matrix(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 3]]);
        assert_eq!(m.det(), rat(12));
        let singular = rational_matrix(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(singular.det(), rat(0));
        assert_eq!(Matrix::<BigRational>::zeros(0, 0).det(), rat(1));
    }

    #[test]
    fn bareiss_handles_zero_leading_pivot() {
        let m = rational_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det(), rat(-1));
    }

    #[test]
    fn float_determinant_matches_exact() {
        let exact = rational_matrix(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 3]]).det();
        let m = Matrix::<f64>::from_rows(vec![
            vec![2.0, 0.0, 1.0],
            vec![1.0, 3.0, 2.0],
            vec![1.0, 1.0, 3.0],
        ]);
        assert!((m.det() - exact.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn exact_rank_with_pivot_rows() {
        let m = rational_matrix(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1], &[1, 3, 4]]);
        let (rank, pivots) = m.rank_exact();
        assert_eq!(rank, 2);
        assert_eq!(pivots, vec![0, 2]);
    }

    #[test]
    fn float_rank_by_svd() {
        let m = Matrix::<f64>::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, 1.0],
        ]);
        let (rank, sv) = m.rank_float(1e-9);
        assert_eq!(rank, 2);
        assert_eq!(sv.len(), 3);
        assert!(sv[0] >= sv[1] && sv[1] >= sv[2]);
        assert!(sv[2] / sv[0] < 1e-12);
    }

    #[test]
    fn kernel_of_singular_matrix() {
        // Rows sum against (1, 2, 3).
        let m = rational_matrix(&[&[2, -1, 0], &[-2, 4, -2], &[0, -3, 2]]);
        let k = m.kernel_vector_exact().expect("one-dimensional kernel");
        for r in 0..3 {
            let mut acc = BigRational::zero();
            for c in 0..3 {
                acc = acc + m.get(r, c).clone() * k[c].clone();
            }
            assert!(acc.is_zero());
        }
        assert!(k.iter().any(|v| !v.is_zero()));
        let full_rank = rational_matrix(&[&[1, 0], &[0, 1]]);
        assert!(full_rank.kernel_vector_exact().is_none());
    }
}

//! Dense matrices with exact (rational elimination) and floating-point (SVD)
//! rank and nullspace computations.

use nalgebra::DMatrix;

use crate::scalar::{Rational, Scalar};

/// Relative threshold under which a singular value counts as zero in
/// floating-point mode.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share one length.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols(rows: &[Vec<S>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors (each of length `dim`).
    pub fn from_columns(cols: &[Vec<S>], dim: usize) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone())
            })
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<S>) -> Matrix<S> {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Scalars that support rank and nullspace computations.
///
/// Rationals use exact elimination and ignore `tol`; floats use an SVD and
/// treat singular values below `tol · σ_max` as zero.
pub trait LinearScalar: Scalar {
    fn rank(m: &Matrix<Self>, tol: f64) -> usize;

    /// Basis of `{v : m v = 0}`.
    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>>;

    /// Canonical basis of the span of `vectors`: reduced echelon rows for
    /// rationals, an orthonormal basis for floats.
    fn span_basis(vectors: &[Vec<Self>], dim: usize, tol: f64) -> Vec<Vec<Self>>;
}

impl LinearScalar for Rational {
    fn rank(m: &Matrix<Self>, _tol: f64) -> usize {
        rref(m).1.len()
    }

    fn nullspace(m: &Matrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        let (r, pivots) = rref(m);
        let n = m.cols();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    fn span_basis(vectors: &[Vec<Self>], dim: usize, _tol: f64) -> Vec<Vec<Self>> {
        if vectors.is_empty() {
            return Vec::new();
        }
        let m = Matrix::from_rows_with_cols(vectors, dim);
        let (r, pivots) = rref(&m);
        (0..pivots.len()).map(|i| r.row(i)).collect()
    }
}

/// Reduced row echelon form over the rationals, with pivot columns.
pub fn rref(m: &Matrix<Rational>) -> (Matrix<Rational>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !a.get(i, col).is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..cols {
                let tmp = a.get(p, j).clone();
                a.set(p, j, a.get(row, j).clone());
                a.set(row, j, tmp);
            }
        }
        let inv = a.get(row, col).recip();
        for j in col..cols {
            let v = a.get(row, j) * &inv;
            a.set(row, j, v);
        }
        for i in 0..rows {
            if i == row || a.get(i, col).is_zero() {
                continue;
            }
            let factor = a.get(i, col).clone();
            for j in col..cols {
                if a.get(row, j).is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &(&factor * a.get(row, j));
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

fn to_nalgebra(m: &Matrix<f64>, min_rows: usize) -> DMatrix<f64> {
    let rows = m.rows().max(min_rows);
    DMatrix::from_fn(rows, m.cols(), |i, j| if i < m.rows() { *m.get(i, j) } else { 0.0 })
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Matrix<f64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let svd = to_nalgebra(m, 0).svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

impl LinearScalar for f64 {
    fn rank(m: &Matrix<Self>, tol: f64) -> usize {
        let s = singular_values(m);
        let Some(&max) = s.first() else { return 0 };
        if max == 0.0 {
            return 0;
        }
        s.iter().filter(|&&v| v > tol * max).count()
    }

    fn nullspace(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        let n = m.cols();
        if n == 0 {
            return Vec::new();
        }
        if m.rows() == 0 || m.max_abs() == 0.0 {
            return Matrix::<f64>::identity(n).to_rows();
        }
        let svd = to_nalgebra(m, n).svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] <= tol * max)
            .map(|i| v_t.row(i).iter().copied().collect())
            .collect()
    }

    fn span_basis(vectors: &[Vec<Self>], dim: usize, tol: f64) -> Vec<Vec<Self>> {
        if vectors.is_empty() || dim == 0 {
            return Vec::new();
        }
        let m = Matrix::from_rows_with_cols(vectors, dim);
        let svd = to_nalgebra(&m, dim).svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return Vec::new();
        }
        (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > tol * max)
            .map(|i| v_t.row(i).iter().copied().collect())
            .collect()
    }
}

/// Restricts the subspace spanned by `basis` to the vectors it contains that
/// are annihilated by every row of `constraints`.
pub fn restrict_to_kernel<S: LinearScalar>(
    basis: &[Vec<S>],
    constraints: &Matrix<S>,
    dim: usize,
    tol: f64,
) -> Vec<Vec<S>> {
    if basis.is_empty() {
        return Vec::new();
    }
    if constraints.rows() == 0 {
        return basis.to_vec();
    }
    let b = Matrix::from_columns(basis, dim);
    let reduced = constraints.matmul(&b);
    S::nullspace(&reduced, tol).into_iter().map(|c| b.mul_vec(&c)).collect()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span<S: LinearScalar>(a: &[Vec<S>], b: &[Vec<S>], dim: usize, tol: f64) -> bool {
    let ra = rank_of_vectors(a, dim, tol);
    let rb = rank_of_vectors(b, dim, tol);
    if ra != rb {
        return false;
    }
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    rank_of_vectors(&all, dim, tol) == ra
}

pub fn rank_of_vectors<S: LinearScalar>(vectors: &[Vec<S>], dim: usize, tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    S::rank(&Matrix::from_rows_with_cols(vectors, dim), tol)
}

//! Dense symmetric matrix numerics: Pearson correlation estimation,
//! eigendecomposition (Householder tridiagonalization + implicit-shift QL),
//! Cholesky-based inverse and log-determinant.
//!
//! Matrices are stored dense and row-major; the targeted problem sizes are
//! a few hundred elements at most, so no packed or sparse storage is used.
//! All operations are pure functions of their inputs.

use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::{cast, Scalar};

/// Default tolerance on Cholesky pivots below which a matrix is rejected
/// as not positive definite.
pub const DEFAULT_PD_TOL: f64 = 1e-10;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            n_rows,
            n_cols,
            data: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(CorrError::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: n_cols,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n_cols, other.n_rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let out_row =
                    &mut out.data[i * other.n_cols..(i + 1) * other.n_cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Elementwise product summed over all entries: `tr(A^T B)`.
    /// For symmetric `A`, this equals `tr(A B)`.
    pub fn trace_product(&self, other: &Matrix<T>) -> T {
        debug_assert_eq!(self.n_rows, other.n_rows);
        debug_assert_eq!(self.n_cols, other.n_cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|&a| a * a)
            .sum::<T>()
            .sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.n_cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.n_cols + c]
    }
}

/// A T x N panel of observations: rows are time records, columns are the
/// elements of the system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataMatrix<T> {
    values: Matrix<T>,
    column_labels: Vec<String>,
}

impl<T: Scalar> DataMatrix<T> {
    /// Build a data matrix, checking dimensions, finiteness and that every
    /// column has nonzero sample variance.
    pub fn new(values: Matrix<T>, column_labels: Vec<String>) -> Result<Self> {
        if values.n_rows() < 2 {
            return Err(CorrError::DimensionTooSmall {
                needed: 2,
                got: values.n_rows(),
            });
        }
        if values.n_cols() == 0 || column_labels.len() != values.n_cols() {
            return Err(CorrError::DimensionMismatch(format!(
                "{} labels for {} columns",
                column_labels.len(),
                values.n_cols()
            )));
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(CorrError::InvalidParameter(
                "data matrix contains non-finite entries".into(),
            ));
        }
        let dm = DataMatrix {
            values,
            column_labels,
        };
        if let Some(j) = dm.constant_column() {
            return Err(CorrError::ZeroVarianceColumn(dm.column_labels[j].clone()));
        }
        Ok(dm)
    }

    pub(crate) fn constant_column(&self) -> Option<usize> {
        (0..self.n_cols()).find(|&j| {
            let first = self.values[(0, j)];
            (1..self.n_rows()).all(|t| self.values[(t, j)] == first)
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.n_cols()
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn column_labels(&self) -> &[String] {
        &self.column_labels
    }

    /// Column means and population standard deviations (divisor T).
    pub fn column_moments(&self) -> (Vec<T>, Vec<T>) {
        let t = self.n_rows();
        let n = self.n_cols();
        let tf = cast::<T>(t as f64);
        let mut means = vec![T::zero(); n];
        for r in 0..t {
            for (m, &v) in means.iter_mut().zip(self.values.row(r)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= tf;
        }
        let mut vars = vec![T::zero(); n];
        for r in 0..t {
            for j in 0..n {
                let d = self.values[(r, j)] - means[j];
                vars[j] += d * d;
            }
        }
        let stds = vars.into_iter().map(|v| (v / tf).sqrt()).collect();
        (means, stds)
    }

    /// Standardized copy (zero mean, unit population variance per column).
    pub fn standardized(&self) -> Result<Matrix<T>> {
        let (means, stds) = self.column_moments();
        if let Some(j) = stds.iter().position(|&s| s <= T::zero()) {
            return Err(CorrError::ZeroVarianceColumn(self.column_labels[j].clone()));
        }
        let mut out = self.values.clone();
        for r in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                out[(r, j)] = (out[(r, j)] - means[j]) / stds[j];
            }
        }
        Ok(out)
    }
}

/// N x N correlation matrix: symmetric, unit diagonal, entries in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix<T> {
    values: Matrix<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Validate and wrap a square matrix. Symmetry is required within
    /// 1e-12 (or a few ulps for narrower scalars); the diagonal must be
    /// exactly one.
    pub fn new(values: Matrix<T>) -> Result<Self> {
        let n = values.n_rows();
        if n == 0 || values.n_cols() != n {
            return Err(CorrError::InvalidCorrelationMatrix(format!(
                "expected square matrix, got {}x{}",
                values.n_rows(),
                values.n_cols()
            )));
        }
        let sym_tol = cast::<T>(1e-12).max(T::epsilon() * cast::<T>(64.0));
        for i in 0..n {
            if values[(i, i)] != T::one() {
                return Err(CorrError::InvalidCorrelationMatrix(format!(
                    "diagonal entry ({i},{i}) is {} (must be exactly 1)",
                    values[(i, i)]
                )));
            }
            for j in 0..i {
                let a = values[(i, j)];
                let b = values[(j, i)];
                if (a - b).abs() > sym_tol {
                    return Err(CorrError::InvalidCorrelationMatrix(format!(
                        "asymmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                if a.abs() > T::one() || !a.is_finite() {
                    return Err(CorrError::InvalidCorrelationMatrix(format!(
                        "entry ({i},{j}) = {a} outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(CorrelationMatrix { values })
    }

    /// Build from a symmetric [`Matrix`] after forcing exact symmetry
    /// ((A + A^T)/2), clamping off-diagonals to [-1, 1] and pinning the
    /// diagonal to one.
    pub fn from_symmetrized(mut values: Matrix<T>) -> Result<Self> {
        let n = values.n_rows();
        let half = cast::<T>(0.5);
        for i in 0..n {
            values[(i, i)] = T::one();
            for j in 0..i {
                let v = (values[(i, j)] + values[(j, i)]) * half;
                let v = v.min(T::one()).max(-T::one());
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.values.n_rows()
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn into_values(self) -> Matrix<T> {
        self.values
    }

    /// Mean of the off-diagonal entries.
    pub fn mean_off_diagonal(&self) -> T {
        let n = self.n();
        if n < 2 {
            return T::zero();
        }
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..i {
                s += self.values[(i, j)];
            }
        }
        s / cast::<T>((n * (n - 1) / 2) as f64)
    }
}

/// Sample Pearson correlation matrix of a data panel.
///
/// The output is symmetrized as (A + A^T)/2 with the diagonal forced to
/// one, so downstream exact comparisons see a bitwise-symmetric matrix.
pub fn pearson_correlation<T: Scalar>(data: &DataMatrix<T>) -> Result<CorrelationMatrix<T>> {
    if data.n_rows() < 2 {
        return Err(CorrError::DimensionTooSmall {
            needed: 2,
            got: data.n_rows(),
        });
    }
    let x = data.standardized()?;
    let t = cast::<T>(data.n_rows() as f64);
    let n = data.n_cols();
    let mut c = Matrix::zeros(n, n);
    // C = X^T X / T, accumulating the lower triangle record by record.
    for r in 0..data.n_rows() {
        let row = x.row(r);
        for i in 0..n {
            let xi = row[i];
            let base = i * n;
            let crow = &mut c.data[base..base + i + 1];
            for (cv, &xj) in crow.iter_mut().zip(&row[..=i]) {
                *cv += xi * xj;
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = c[(i, j)] / t;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    CorrelationMatrix::from_symmetrized(c)
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending
/// and eigenvectors stored as orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// Reconstruct `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for (k, &lam) in self.eigenvalues.iter().enumerate() {
                    s += self.eigenvectors[(i, k)] * lam * self.eigenvectors[(j, k)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }
}

/// Eigendecomposition of a correlation matrix.
pub fn symmetric_eigen<T: Scalar>(m: &CorrelationMatrix<T>) -> Result<SymmetricEigen<T>> {
    eigen_symmetric(m.values())
}

/// Eigendecomposition of a general symmetric matrix via Householder
/// tridiagonalization followed by implicit-shift QL iteration.
pub fn eigen_symmetric<T: Scalar>(m: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols(), "eigen_symmetric needs a square matrix");
    let mut z = m.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut z, 100 * n.max(1))?;
    // Sort descending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new_col)] = z[(r, old_col)];
        }
    }
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition of a symmetric tridiagonal matrix given its diagonal
/// and sub-diagonal. Returns eigenvalues (ascending) and the matrix of
/// eigenvector columns. Used by the Gauss quadrature node generator.
pub fn eigen_tridiagonal<T: Scalar>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Matrix<T>)> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(off);
    // tql2 reads the sub-diagonal from e[1..]
    for i in (1..n).rev() {
        e[i] = e[i - 1];
    }
    e[0] = T::zero();
    let mut z = Matrix::identity(n);
    tql2(&mut d, &mut e, &mut z, 100 * n.max(1))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let evals: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, new_col)] = z[(r, old_col)];
        }
    }
    Ok((evals, vecs))
}

/// Householder reduction to tridiagonal form (EISPACK `tred2`),
/// accumulating the orthogonal transformation in `z`.
fn tred2<T: Scalar>(z: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        let mut scale = T::zero();
        if l > 0 {
            for k in 0..=l {
                scale += z[(i, k)].abs();
            }
            if scale == T::zero() {
                e[i] = z[(i, l)];
            } else {
                for k in 0..=l {
                    let v = z[(i, k)] / scale;
                    z[(i, k)] = v;
                    h += v * v;
                }
                let mut f = z[(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[(i, l)] = f - g;
                f = T::zero();
                for j in 0..=l {
                    z[(j, i)] = z[(i, j)] / h;
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += z[(j, k)] * z[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += z[(k, j)] * z[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * z[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = z[(i, j)];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        let delta = fj * e[k] + gj * z[(i, k)];
                        z[(j, k)] = z[(j, k)] - delta;
                    }
                }
            }
        } else {
            e[i] = z[(i, l)];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        let l = i;
        if d[i] != T::zero() {
            for j in 0..l {
                let mut g = T::zero();
                for k in 0..l {
                    g += z[(i, k)] * z[(k, j)];
                }
                for k in 0..l {
                    z[(k, j)] = z[(k, j)] - g * z[(k, i)];
                }
            }
        }
        d[i] = z[(i, i)];
        z[(i, i)] = T::one();
        for j in 0..l {
            z[(j, i)] = T::zero();
            z[(i, j)] = T::zero();
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix
/// (EISPACK `tql2`), with eigenvectors accumulated in `z`.
fn tql2<T: Scalar>(d: &mut [T], e: &mut [T], z: &mut Matrix<T>, max_iter: usize) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut total_iter = 0usize;
    for l in 0..n {
        loop {
            // Look for a negligible sub-diagonal element.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total_iter += 1;
            if total_iter > max_iter {
                return Err(CorrError::ConvergenceFailure(max_iter));
            }
            // Wilkinson shift.
            let two = cast::<T>(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
///
/// `tol` bounds the acceptable squared pivots; for unit-diagonal inputs
/// this mirrors the configured smallest-eigenvalue tolerance.
pub fn cholesky<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols());
    let tol_t = cast::<T>(tol);
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= tol_t {
                    return Err(CorrError::NotPositiveDefinite {
                        index: i,
                        pivot: s.to_f64().unwrap_or(f64::NAN),
                        tol,
                    });
                }
                l[(i, j)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Inverse and log-determinant of a positive definite matrix via
/// Cholesky factorization.
pub fn inverse_and_logdet<T: Scalar>(m: &CorrelationMatrix<T>) -> Result<(Matrix<T>, T)> {
    inverse_and_logdet_with_tol(m.values(), DEFAULT_PD_TOL)
}

/// As [`inverse_and_logdet`] but for a raw symmetric matrix with a
/// configurable definiteness tolerance.
pub fn inverse_and_logdet_with_tol<T: Scalar>(
    m: &Matrix<T>,
    tol: f64,
) -> Result<(Matrix<T>, T)> {
    let n = m.n_rows();
    let l = cholesky(m, tol)?;
    let mut logdet = T::zero();
    for i in 0..n {
        logdet += l[(i, i)].ln();
    }
    logdet = logdet + logdet;
    // Invert L in place, then form (L^-1)^T L^-1.
    let mut linv = Matrix::zeros(n, n);
    for i in 0..n {
        linv[(i, i)] = T::one() / l[(i, i)];
        for j in 0..i {
            let mut s = T::zero();
            for k in j..i {
                s += l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = -s / l[(i, i)];
        }
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for k in i..n {
                s += linv[(k, i)] * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s;
        }
    }
    Ok((inv, logdet))
}

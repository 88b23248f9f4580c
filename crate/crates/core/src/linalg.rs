//! Dense row-major matrices with the few decompositions projection pursuit needs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("rows have unequal lengths");
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return invalid("columns have unequal lengths");
        }
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                data[i * cols + j] = *v;
            }
        }
        Matrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ · v`.
    pub fn t_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in m.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        m.iter_mut().for_each(|s| *s /= self.rows as f64);
        m
    }

    /// Subtracts `center` from every row.
    pub fn centered(&self, center: &[f64]) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, c) in out.data[i * self.cols..(i + 1) * self.cols].iter_mut().zip(center) {
                *v -= c;
            }
        }
        out
    }

    /// Sample covariance with divisor `n - 1`.
    pub fn covariance(&self) -> Matrix {
        let mu = self.column_means();
        let c = self.centered(&mu);
        let d = self.cols;
        let mut cov = Matrix::zeros(d, d);
        for i in 0..self.rows {
            let r = c.row(i);
            for a in 0..d {
                for b in a..d {
                    cov.data[a * d + b] += r[a] * r[b];
                }
            }
        }
        let denom = (self.rows.max(2) - 1) as f64;
        for a in 0..d {
            for b in a..d {
                let v = cov.data[a * d + b] / denom;
                cov.data[a * d + b] = v;
                cov.data[b * d + a] = v;
            }
        }
        cov
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return invalid("only square matrices can be inverted");
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
                .expect("non-empty range");
            if a[(piv, col)].abs() <= 1e-14 * scale {
                return Err(Error::Numeric("matrix is singular".into()));
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= f * a[(col, j)];
                    inv[(i, j)] -= f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`, largest-magnitude entry positive.
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations until the off-diagonal norm drops below `1e-12·‖A‖`.
pub fn sym_eig(a: &Matrix) -> Result<SymEig> {
    if a.rows != a.cols {
        return invalid("eigendecomposition needs a square matrix");
    }
    let n = a.rows;
    let tol = 1e-10 * a.max_abs().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return invalid(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let fro = a.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-12 * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = idx.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        let col = v.column(i);
        let big = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        let sign = if big < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, k)] = sign * col[r];
        }
    }
    Ok(SymEig { values, vectors })
}

/// Data whitened onto its leading principal axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhitenedData {
    /// `n × k`, zero mean and identity covariance.
    pub whitened: Matrix,
    /// `d × k`, equal to `U_k Λ_k^{-1/2}`.
    pub whitener: Matrix,
    pub center: Vec<f64>,
    /// The retained covariance eigenvalues.
    pub eigenvalues: Vec<f64>,
}

impl WhitenedData {
    /// Maps whitened coordinates back to the original space (within the retained subspace).
    pub fn unwhiten(&self, z: &Matrix) -> Result<Matrix> {
        let k = self.eigenvalues.len();
        let d = self.center.len();
        let mut back = Matrix::zeros(k, d);
        for a in 0..k {
            for j in 0..d {
                // whitener column a is u_a / √λ_a
                back[(a, j)] = self.whitener[(j, a)] * self.eigenvalues[a];
            }
        }
        let mut out = z.matmul(&back)?;
        for i in 0..out.rows {
            for j in 0..d {
                out[(i, j)] += self.center[j];
            }
        }
        Ok(out)
    }
}

/// Projects centred data onto the leading `ncomp` eigenvectors of its covariance,
/// scaled to unit variance.
pub fn whiten(x: &Matrix, ncomp: usize) -> Result<WhitenedData> {
    let d = x.cols;
    if ncomp == 0 || ncomp > d {
        return invalid(format!("number of components must be in 1..={d}, got {ncomp}"));
    }
    if x.rows < 2 {
        return invalid("whitening needs at least two observations");
    }
    let center = x.column_means();
    let eig = sym_eig(&x.covariance())?;
    let lmax = eig.values[0];
    let floor = 1e-12 * lmax.max(0.0);
    if let Some((k, l)) = eig.values[..ncomp].iter().enumerate().find(|(_, &l)| !(l > floor)) {
        return Err(Error::Numeric(format!(
            "covariance is rank deficient: eigenvalue {} is {l:e}, below 1e-12 × {lmax:e}",
            k + 1
        )));
    }
    let mut whitener = Matrix::zeros(d, ncomp);
    for a in 0..ncomp {
        let s = 1.0 / eig.values[a].sqrt();
        for j in 0..d {
            whitener[(j, a)] = eig.vectors[(j, a)] * s;
        }
    }
    let whitened = x.centered(&center).matmul(&whitener)?;
    Ok(WhitenedData {
        whitened,
        whitener,
        center,
        eigenvalues: eig.values[..ncomp].to_vec(),
    })
}

/// Solves `(XᵀX + ridge·I) w = Xᵀy` by Cholesky factorisation.
pub fn ridge_ols(x: &Matrix, y: &[f64], ridge: f64) -> Result<Vec<f64>> {
    if !(ridge > 0.0) {
        return invalid(format!("ridge must be positive, got {ridge}"));
    }
    if y.len() != x.rows {
        return invalid(format!("{} responses for {} rows", y.len(), x.rows));
    }
    let d = x.cols;
    let mut g = Matrix::zeros(d, d);
    for i in 0..x.rows {
        let r = x.row(i);
        for a in 0..d {
            for b in 0..=a {
                g.data[a * d + b] += r[a] * r[b];
            }
        }
    }
    for a in 0..d {
        g[(a, a)] += ridge;
    }
    let rhs = x.t_mul_vec(y);
    cholesky_solve(&g, &rhs)
}

/// Solves `A x = b` for symmetric positive definite `A`, reading only the lower triangle.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Numeric("matrix is not positive definite".into()));
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= l[(i, k)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            z[i] -= l[(k, i)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    Ok(z)
}

//! Small dense linear algebra with fixed-capacity storage.
//!
//! Everything here targets matrices of order at most [`MAX_DIM`]; values are
//! `Copy` so that jets can be passed around in sampling loops without
//! touching the allocator.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Off-diagonal Frobenius tolerance used by [`largest_eig`] and friends.
pub const JACOBI_TOL: f64 = 1e-12;

/// Number of cyclic sweeps before the eigensolver gives up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Dimension(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

/// A real vector of length at most [`MAX_DIM`].
#[derive(Clone, Copy)]
pub struct Vector {
    len: usize,
    data: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "vector length {n} exceeds {MAX_DIM}");
        Self {
            len: n,
            data: [0.0; MAX_DIM],
        }
    }

    /// The `i`-th standard basis vector of ℝⁿ.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v[i] = 1.0;
        v
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut v = Self::zeros(xs.len());
        v.data[..xs.len()].copy_from_slice(xs);
        v
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Self {
        let mut v = Self::zeros(n);
        for i in 0..n {
            v[i] = f(i);
        }
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len, other.len);
        self.as_slice().iter().zip(other.as_slice()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector::from_fn(self.len, |i| alpha * self[i])
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len, other.len);
        Vector::from_fn(self.len, |i| self[i] + other[i])
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len, other.len);
        Vector::from_fn(self.len, |i| self[i] - other[i])
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.len, other.len);
        Vector::from_fn(self.len, |i| self[i] + alpha * other[i])
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        let len = self.len;
        &mut self.data[..len][i]
    }
}

impl PartialEq for Vector {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let xs = Vec::<f64>::deserialize(d)?;
        if xs.is_empty() || xs.len() > MAX_DIM {
            return Err(D::Error::custom(format!(
                "vector length {} outside 1..={MAX_DIM}",
                xs.len()
            )));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("vector entries must be finite"));
        }
        Ok(Vector::from_slice(&xs))
    }
}

/// A general `rows × cols` matrix, both at most [`MAX_DIM`].
#[derive(Clone, Copy)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: [[f64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(
            rows <= MAX_DIM && cols <= MAX_DIM,
            "matrix {rows}x{cols} exceeds {MAX_DIM}"
        );
        Self {
            rows,
            cols,
            data: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || r > MAX_DIM || c > MAX_DIM {
            return Err(Error::Dimension(format!("matrix {r}x{c} outside 1..={MAX_DIM}")));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let rows = cols.first().map_or(0, Vector::dim);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i][j] = v;
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.rows, |i| self.data[i][j])
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.data[i][..self.cols].to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.data[j][i])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.data[i][k] * other.data[k][j]).sum()
        })
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        Vector::from_fn(self.rows, |i| (0..self.cols).map(|k| self.data[i][k] * v[k]).sum())
    }

    /// `selfᵀ v`
    pub fn tr_mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.rows, v.dim(), "matrix-vector shape mismatch");
        Vector::from_fn(self.cols, |j| (0..self.rows).map(|k| self.data[k][j] * v[k]).sum())
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += self.data[i][j] * self.data[i][j];
            }
        }
        s.sqrt()
    }

    /// `‖selfᵀ self − I‖_F`: zero for a matrix with orthonormal columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut s = 0.0;
        for i in 0..self.cols {
            for j in 0..self.cols {
                let d = g.data[i][j] - if i == j { 1.0 } else { 0.0 };
                s += d * d;
            }
        }
        s.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        (0..self.rows).all(|i| self.data[i][..self.cols].iter().all(|x| x.is_finite()))
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows).all(|i| self.data[i][..self.cols] == other.data[i][..other.cols])
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let m = Matrix::from_rows(&rows).map_err(D::Error::custom)?;
        if !m.is_finite() {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

/// A symmetric `n × n` matrix. Every mutation writes both mirrored entries,
/// so `a[i][j] == a[j][i]` holds bit for bit.
#[derive(Clone, Copy)]
pub struct SymMatrix {
    n: usize,
    data: [[f64; MAX_DIM]; MAX_DIM],
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "matrix order {n} exceeds {MAX_DIM}");
        Self {
            n,
            data: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i][i] = x;
        }
        m
    }

    /// Builds from the upper triangle of `f(i, j)`, `i <= j`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows. The input must already be symmetric to within
    /// `1e-12` relative; the upper triangle is kept.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("symmetric matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i}, {j}): {a} vs {b}")));
                }
            }
        }
        let m = Self::from_fn(n, |i, j| rows[i][j]);
        if !m.is_finite() {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    /// `v vᵀ`
    pub fn outer(v: &Vector) -> Self {
        Self::from_fn(v.dim(), |i, j| v[i] * v[j])
    }

    /// `M Mᵀ`, positive semidefinite for any `M`.
    pub fn gram(m: &Matrix) -> Self {
        Self::from_fn(m.rows(), |i, j| (0..m.cols()).map(|k| m.get(i, k) * m.get(j, k)).sum())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.data[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.data[i][j] = v;
        self.data[j][i] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.data[i][..self.n].to_vec()).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.data[i][j])
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix::from_fn(self.n, |i, j| self.data[i][j] + other.data[i][j])
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix::from_fn(self.n, |i, j| self.data[i][j] - other.data[i][j])
    }

    pub fn scale(&self, alpha: f64) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| alpha * self.data[i][j])
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix::from_fn(self.n, |i, j| self.data[i][j] + alpha * other.data[i][j])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i][i]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.to_matrix().frobenius()
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.n, v.dim());
        Vector::from_fn(self.n, |i| (0..self.n).map(|k| self.data[i][k] * v[k]).sum())
    }

    /// `zᵀ A z`
    pub fn quad_form(&self, z: &Vector) -> f64 {
        z.dot(&self.mul_vec(z))
    }

    /// `Q A Qᵀ` for a square `Q`.
    pub fn conjugate(&self, q: &Matrix) -> SymMatrix {
        assert_eq!(q.cols(), self.n);
        let qa = q.mul(&self.to_matrix());
        SymMatrix::from_fn(q.rows(), |i, j| (0..self.n).map(|k| qa.get(i, k) * q.get(j, k)).sum())
    }

    /// `Qᵀ A Q` for a square `Q`.
    pub fn conjugate_tr(&self, q: &Matrix) -> SymMatrix {
        self.conjugate(&q.transpose())
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|i| self.data[i][..self.n].iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.data[i][..self.n].iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                s += self.data[i][j] * self.data[i][j];
            }
        }
        (2.0 * s).sqrt()
    }
}

impl PartialEq for SymMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && (0..self.n).all(|i| self.data[i][..self.n] == other.data[i][..other.n])
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
///
/// Column `i` of `eigenvectors` belongs to `eigenvalues[i]`. Within a block of
/// tied eigenvalues the basis is whatever the rotations produced.
#[derive(Debug, Clone, Copy)]
pub struct Spectrum {
    pub eigenvalues: Vector,
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.dim()
    }

    pub fn eigenvector(&self, i: usize) -> Vector {
        self.eigenvectors.column(i)
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Unit eigenvector for the largest eigenvalue.
    pub fn top_eigenvector(&self) -> Vector {
        self.eigenvector(self.dim() - 1)
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Runs sweeps until the off-diagonal Frobenius norm of the rotated matrix is
/// at most `tol`, failing after [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn jacobi_eigen(a: &SymMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() {
        return Err(Error::Domain("matrix entries must be finite".into()));
    }
    let n = a.dim();
    check_dim(n)?;
    let mut w = *a;
    let mut v = Matrix::identity(n);

    let mut sweep = 0;
    loop {
        let off = w.off_diagonal_norm();
        if off <= tol {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: sweep,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.data[p][q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (w.data[p][p], w.data[q][q]);
                // entries below the diagonal's resolution are flushed
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    w.data[p][q] = 0.0;
                    w.data[q][p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let (arp, arq) = (w.data[r][p], w.data[r][q]);
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    w.data[r][p] = new_rp;
                    w.data[p][r] = new_rp;
                    w.data[r][q] = new_rq;
                    w.data[q][r] = new_rq;
                }
                w.data[p][p] = app - t * apq;
                w.data[q][q] = aqq + t * apq;
                w.data[p][q] = 0.0;
                w.data[q][p] = 0.0;

                for r in 0..n {
                    let (vrp, vrq) = (v.data[r][p], v.data[r][q]);
                    v.data[r][p] = c * vrp - s * vrq;
                    v.data[r][q] = s * vrp + c * vrq;
                }
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.data[i][i].total_cmp(&w.data[j][j]));
    let eigenvalues = Vector::from_fn(n, |k| w.data[order[k]][order[k]]);
    let eigenvectors = Matrix::from_fn(n, n, |r, k| v.data[r][order[k]]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigen-decomposition at the default tolerance.
pub fn eigen(a: &SymMatrix) -> Result<Spectrum> {
    jacobi_eigen(a, JACOBI_TOL)
}

/// Largest eigenvalue with a unit eigenvector.
pub fn largest_eig(a: &SymMatrix) -> Result<(f64, Vector)> {
    let spec = eigen(a)?;
    Ok((spec.largest(), spec.top_eigenvector()))
}

/// Rayleigh quotient `zᵀ A z / |z|²`.
pub fn rayleigh(a: &SymMatrix, z: &Vector) -> Result<f64> {
    let nz = z.norm_sq();
    if nz == 0.0 {
        return Err(Error::Domain("rayleigh quotient of the zero vector".into()));
    }
    if z.dim() != a.dim() {
        return Err(Error::Dimension(format!(
            "vector length {} vs matrix order {}",
            z.dim(),
            a.dim()
        )));
    }
    Ok(a.quad_form(z) / nz)
}
